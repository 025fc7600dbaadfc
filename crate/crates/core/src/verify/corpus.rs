use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::checks::{check_eigenfunction, check_l1_double, check_lowering, check_operator_identity, check_poly_claim, check_table_claim, compare_diffop};
use super::maroni::maroni_check;
use super::recurrence::{compare_recurrence, compare_recurrence_values, extract_recurrence, RecurrenceTable};
use super::sigma::check_sigma_closed_form;
use super::{CheckResult, Origin, Status, Witness};
use crate::diffop::{apply, DiffOperator};
use crate::error::Result;
use crate::families::{build_family, generate_table, Family, FamilySpec, Kind, Ordering, ParamValue, PolyTable};
use crate::ring::{Param, Poly, QPoly, Rat, Scalar, X};
use crate::shiftop::ShiftOperator;

type Fam = Family<Scalar>;
type Table = PolyTable<Scalar>;
type XP = Poly<Scalar, X>;

/// Printed examples with extra claims beyond the generic family audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    AppellK(usize),
    LaguerreLinear,
    LaguerreHalfSquare,
    CubicLinear,
    CubicHalfSquareZero,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub tag: String,
    pub spec: FamilySpec,
    pub maroni: bool,
    pub example: Option<Example>,
    /// Conventions under which ordering-sensitive claims are evaluated.
    pub orderings: Vec<Ordering>,
}

impl CorpusEntry {
    pub fn new(tag: impl Into<String>, spec: FamilySpec) -> Self {
        CorpusEntry {
            tag: tag.into(),
            spec,
            maroni: false,
            example: None,
            orderings: Ordering::BOTH.to_vec(),
        }
    }

    /// Audit entry for a user-supplied spec, tagged `kind:q=...`.
    pub fn from_spec(spec: FamilySpec) -> Self {
        CorpusEntry::new(format!("{}:q={}", spec.kind, spec.q), spec).with_maroni()
    }

    pub fn with_orderings(mut self, orderings: &[Ordering]) -> Self {
        self.orderings = orderings.to_vec();
        self
    }

    pub fn with_maroni(mut self) -> Self {
        self.maroni = true;
        self
    }

    fn example(mut self, e: Example) -> Self {
        self.example = Some(e);
        self
    }
}

fn qpoly(terms: &[(i64, i64, usize)]) -> QPoly {
    QPoly::from_terms(terms.iter().map(|&(a, b, k)| (Rat::new(a, b), k))).expect("nonconstant q")
}

/// The fixed audit corpus: the five printed examples plus cross-checks of
/// every family for q ∈ {X, X², X²/2, X³/3}.
pub fn builtin_corpus() -> Vec<CorpusEntry> {
    let mut out = vec![
        CorpusEntry::new("ex-6.1-k2", FamilySpec::symbolic(Kind::Weyl, qpoly(&[(-1, 2, 2)]), 12))
            .with_maroni()
            .example(Example::AppellK(2)),
        CorpusEntry::new("ex-6.1-k3", FamilySpec::symbolic(Kind::Weyl, qpoly(&[(-1, 3, 3)]), 12))
            .with_maroni()
            .example(Example::AppellK(3)),
        CorpusEntry::new("ex-6.2", FamilySpec::symbolic(Kind::Sl2, qpoly(&[(1, 1, 1)]), 12))
            .with_maroni()
            .example(Example::LaguerreLinear),
        CorpusEntry::new("ex-6.3", FamilySpec::symbolic(Kind::Sl2, qpoly(&[(1, 2, 2)]), 12))
            .with_maroni()
            .example(Example::LaguerreHalfSquare),
        CorpusEntry::new("ex-6.4", FamilySpec::symbolic(Kind::Cubic, qpoly(&[(1, 1, 1)]), 12))
            .with_maroni()
            .example(Example::CubicLinear),
    ];
    let zero: BTreeMap<Param, ParamValue> = [
        (Param::Alpha, ParamValue::Value(Rat::zero())),
        (Param::Beta, ParamValue::Value(Rat::zero())),
    ]
    .into_iter()
    .collect();
    out.push(
        CorpusEntry::new(
            "ex-6.5",
            FamilySpec::new(Kind::Cubic, qpoly(&[(1, 2, 2)]), zero, 12).expect("valid spec"),
        )
        .example(Example::CubicHalfSquareZero),
    );
    let qs: [(&str, QPoly); 4] = [
        ("X", qpoly(&[(1, 1, 1)])),
        ("X^2", qpoly(&[(1, 1, 2)])),
        ("X^2/2", qpoly(&[(1, 2, 2)])),
        ("X^3/3", qpoly(&[(1, 3, 3)])),
    ];
    for kind in [Kind::Weyl, Kind::Sl2, Kind::Cubic] {
        for (name, q) in &qs {
            let n = match kind {
                Kind::Cubic => 10,
                _ => 12,
            };
            out.push(CorpusEntry::new(
                format!("{kind}:q={name}"),
                FamilySpec::symbolic(kind, q.clone(), n),
            ));
        }
    }
    out
}

struct Ids {
    lemma: &'static str,
    theorem: &'static str,
}

fn ids(kind: Kind) -> Ids {
    match kind {
        Kind::Weyl => Ids {
            lemma: "lem-3.1",
            theorem: "thm-3.2",
        },
        Kind::Sl2 => Ids {
            lemma: "lem-4.3",
            theorem: "thm-4.4",
        },
        Kind::Cubic => Ids {
            lemma: "lem-5.3",
            theorem: "thm-5.4",
        },
    }
}

/// Runs every applicable check for one corpus entry. Ids are `tag/check`.
pub fn audit_family(entry: &CorpusEntry) -> Result<Vec<CheckResult>> {
    audit_with_table(entry, None)
}

/// As [`audit_family`], but audits a supplied table in place of the generated one.
pub fn audit_with_table(entry: &CorpusEntry, table: Option<Table>) -> Result<Vec<CheckResult>> {
    let fam: Fam = build_family(&entry.spec)?;
    let table = match table {
        Some(t) => {
            if t.spec_hash != entry.spec.hash() || t.kind != entry.spec.kind {
                return Err(crate::error::Error::BadTable(format!(
                    "table was generated for spec {} not {}",
                    t.spec_hash,
                    entry.spec.hash()
                )));
            }
            t
        }
        None => generate_table(&fam)?,
    };
    let table = &table;
    let rec = extract_recurrence(table)?;
    let ids = ids(fam.spec.kind);
    let mut out = vec![
        CheckResult::matched("build", "commutation relations, mu(n), L1 by two routes"),
        check_l1_double(&fam),
        CheckResult::matched("recurrence-extract", "x P_n expands exactly in the monic basis"),
    ];

    // the constructive recurrence operator b'(x) = b(sigma^-1(x))
    let bprime_x = fam.b_prime(&fam.x, None)?;
    out.push(
        compare_recurrence(&bprime_x, table)
            .with_id("bprime-x-constructive")
            .with_claim(format!("x P_n = b(sigma^-1(x)) P_n, b(sigma^-1(x)) = {bprime_x}")),
    );

    out.push(
        check_eigenfunction(&fam, table)
            .with_id(format!("{}-i", ids.theorem))
            .as_claim(),
    );
    out.push(
        check_lowering(&fam, table)
            .with_id(format!("{}-iii", ids.theorem))
            .as_claim(),
    );

    let lemma = fam.claimed_bprime_x()?;
    let theorem = fam.claimed_theorem_recurrence()?;
    for &ord in &entry.orderings {
        let l = lemma.eval(ord);
        out.push(
            compare_recurrence(&l, table)
                .with_id(format!("{}/bprime-x/{}", ids.lemma, ord.name()))
                .as_claim(),
        );
        out.push(
            check_operator_identity(
                format!("{}/bprime-x-operator/{}", ids.lemma, ord.name()),
                format!("b'(x) = {l} as operators"),
                &bprime_x,
                &l,
            )
            .as_claim(),
        );
        let t = theorem.eval(ord);
        out.push(
            compare_recurrence(&t, table)
                .with_id(format!("{}-ii/{}", ids.theorem, ord.name()))
                .as_claim(),
        );
    }

    let bprime_b = fam.b_prime(&fam.b, None)?;
    out.push(
        check_operator_identity(
            format!("{}/bprime-b", ids.lemma),
            format!("b'(B) = {}", fam.lowering_symbol()),
            fam.lowering_symbol(),
            &bprime_b,
        )
        .as_claim(),
    );
    let bprime_l1 = fam.b_prime(&fam.l1, None)?;
    out.push(
        check_operator_identity(
            format!("{}/bprime-l1", ids.lemma),
            "b'(L1) = n",
            &ShiftOperator::n(),
            &bprime_l1,
        )
        .as_claim(),
    );

    out.extend(check_sigma_closed_form(&fam)?);

    if fam.spec.kind == Kind::Weyl {
        let deg = fam.spec.q.degree().unwrap_or(0);
        let want = deg.saturating_sub(1);
        let outcome = (rec.bandwidth != want).then(|| Witness::new(None, want, rec.bandwidth));
        out.push(CheckResult::from_outcome(
            "bandwidth",
            format!("Appell case: bandwidth d = deg q - 1 = {want}"),
            outcome,
        ));
    }

    if entry.maroni {
        match maroni_check(table, &rec) {
            Ok((_, checks)) => out.extend(checks.into_iter().map(CheckResult::as_claim)),
            Err(e) => out.push(CheckResult::not_applicable("maroni", "d-orthogonality", e.to_string())),
        }
    }

    if let Some(ex) = entry.example {
        out.extend(example_checks(ex, &fam, table, &rec)?);
    }

    let tag = &entry.tag;
    Ok(out
        .into_iter()
        .map(|c| {
            let id = format!("{tag}/{}", c.id);
            c.with_id(id)
        })
        .collect())
}

fn s(v: i64) -> Scalar {
    Scalar::from(v)
}

fn param(fam: &Fam, p: Param) -> Result<Scalar> {
    fam.spec.param(p)
}

fn xpoly(terms: &[(Scalar, usize)]) -> XP {
    Poly::from_terms(terms.iter().cloned())
}

fn op_claim(id: &str, text: &str, truth: &DiffOperator<Scalar>, printed: &DiffOperator<Scalar>) -> CheckResult {
    CheckResult::from_outcome(id, text, compare_diffop(truth, printed)).as_claim()
}

fn printed_recurrence(
    id: &str,
    text: &str,
    table: &Table,
    coeffs: impl Fn(usize) -> Vec<(i64, Scalar)> + Sync,
) -> CheckResult {
    // printed formulas rely on P_m = 0 for m < 0
    let kept = |n: usize| {
        let mut cs = coeffs(n);
        cs.retain(|(k, _)| n as i64 + k >= 0);
        cs
    };
    CheckResult::from_outcome(id, text, compare_recurrence_values(table, kept)).as_claim()
}

fn gamma_law(id: &str, text: &str, rec: &RecurrenceTable<Scalar>, j: usize, law: impl Fn(i64) -> Scalar) -> CheckResult {
    let mut outcome = None;
    for n in j..rec.rows() {
        let got = rec.gamma(n, j).cloned().unwrap_or_else(Scalar::zero);
        let want = law(n as i64);
        if got != want {
            outcome = Some(Witness::new(Some(n as i64), &want, &got).with_difference(&got - &want));
            break;
        }
    }
    CheckResult::from_outcome(id, text, outcome)
}

fn falling(n: i64, m: usize) -> Scalar {
    crate::shiftop::falling_at(n, m)
}

fn factorial_ratio(n: i64, k: u64) -> Scalar {
    if n < 0 {
        return Scalar::zero();
    }
    Scalar::constant(&Rat::factorial(n as u64) / &Rat::factorial(k))
}

fn example_checks(ex: Example, fam: &Fam, table: &Table, rec: &RecurrenceTable<Scalar>) -> Result<Vec<CheckResult>> {
    let l1_claim = |printed: DiffOperator<Scalar>| op_claim("l1", &format!("L1 = {printed}"), &fam.l1, &printed);
    let h = DiffOperator::monomial(Scalar::one(), 1, 1);
    let mut out = Vec::new();
    match ex {
        Example::AppellK(k) => {
            out.push(l1_claim(&h - &DiffOperator::monomial(Scalar::one(), 0, k)));
            let km1 = k as i64 - 1;
            out.push(printed_recurrence(
                "recurrence-printed",
                &format!("x P_n = P_(n+1) + n!/{km1}! P_(n-{km1})"),
                table,
                |n| vec![(1, Scalar::one()), (-km1, factorial_ratio(n as i64, km1 as u64))],
            ));
            out.push(gamma_law(
                "gamma-falling",
                &format!("gamma_{km1}(n) = n(n-1)...(n-{}) and no other gamma", k - 2),
                rec,
                k - 1,
                |n| falling(n, k - 1),
            ));
            let outcome = (rec.bandwidth != k - 1).then(|| Witness::new(None, k - 1, rec.bandwidth));
            out.push(CheckResult::from_outcome("bandwidth", format!("d = {}", k - 1), outcome));
        }
        Example::LaguerreLinear => {
            let beta = param(fam, Param::Beta)?;
            let b = &DiffOperator::monomial(Scalar::one(), 1, 2) + &DiffOperator::monomial(beta.clone(), 0, 1);
            out.push(l1_claim(&b + &h));
            let b0 = beta.clone();
            out.push(gamma_law("gamma0", "gamma_0(n) = -(2n + beta)", rec, 0, move |n| -(&s(2 * n) + &b0)));
            let b1 = beta.clone();
            out.push(gamma_law("gamma1", "gamma_1(n) = n(n - 1 + beta)", rec, 1, move |n| {
                &s(n) * &(&s(n - 1) + &b1)
            }));
            let outcome = (rec.bandwidth != 1).then(|| Witness::new(None, 1, rec.bandwidth));
            out.push(CheckResult::from_outcome("bandwidth", "three-term recurrence, d = 1", outcome));
        }
        Example::LaguerreHalfSquare => {
            let beta = param(fam, Param::Beta)?;
            let one_b = &Scalar::one() + &beta;
            let two_b = &s(2) + &beta;
            let printed = DiffOperator::from_terms([
                (4, xpoly(&[(Scalar::one(), 2)])),
                (3, xpoly(&[(one_b.scale_rat(&Rat::from(2)), 1)])),
                (2, xpoly(&[(&beta + &(&beta * &beta), 0)])),
                (1, xpoly(&[(Scalar::one(), 1)])),
            ]);
            out.push(l1_claim(printed));
            out.push(check_table_claim("p0", table, 0, &XP::one()));
            out.push(check_table_claim("p1", table, 1, &XP::var()));
            out.push(check_table_claim("p2", table, 2, &xpoly(&[(Scalar::one(), 2), (&beta * &one_b, 0)])));
            let c3 = (&one_b * &two_b).scale_rat(&Rat::from(3));
            out.push(check_table_claim("p3", table, 3, &xpoly(&[(Scalar::one(), 3), (c3, 1)])));
            let b = beta.clone();
            out.push(printed_recurrence(
                "recurrence-printed",
                "x P_n = P_(n+1) - n(n-1+beta)(2n-1+beta) P_(n-1) + n!/3! C(n-1+beta, 3) P_(n-3)",
                table,
                move |n| {
                    let n = n as i64;
                    let lin = |c: i64| &s(n + c) + &b;
                    let c1 = -(&(&s(n) * &lin(-1)) * &(&s(2 * n - 1) + &b));
                    let binom = (&(&lin(-1) * &lin(-2)) * &lin(-3)).scale_rat(&Rat::new(1, 6));
                    let c3 = &factorial_ratio(n, 3) * &binom;
                    vec![(1, Scalar::one()), (-1, c1), (-3, c3)]
                },
            ));
            let mu = fam.mu.clone();
            out.push(gamma_law(
                "gamma3",
                "gamma_3(n) = mu(n) mu(n-1) mu(n-2)",
                rec,
                3,
                move |n| &(&mu.eval_int(n) * &mu.eval_int(n - 1)) * &mu.eval_int(n - 2),
            ));
        }
        Example::CubicLinear => {
            let alpha = param(fam, Param::Alpha)?;
            let beta = param(fam, Param::Beta)?;
            out.push(l1_claim(&fam.b + &h));
            let (a, b) = (alpha.clone(), beta.clone());
            out.push(printed_recurrence(
                "recurrence-printed",
                "x P_n = P_(n+1) + (3 - 2 alpha) P_n - 3n[(n-1)(n-2+alpha) + beta] P_(n-1) \
                 - n(n-1)[(n-1)(n-2+alpha) + beta][(n-2)(n-3+alpha) + beta] P_(n-2)",
                table,
                move |n| {
                    let n = n as i64;
                    let bracket = |m: i64| &(&s(m) * &(&s(m - 1) + &a)) + &b;
                    let c0 = &s(3) - &a.scale_rat(&Rat::from(2));
                    let c1 = (&s(n) * &bracket(n - 1)).scale_rat(&Rat::from(-3));
                    let c2 = -(&(&s(n * (n - 1)) * &bracket(n - 1)) * &bracket(n - 2));
                    vec![(1, Scalar::one()), (0, c0), (-1, c1), (-2, c2)]
                },
            ));
            let outcome = (rec.bandwidth != 2).then(|| Witness::new(None, 2, rec.bandwidth));
            out.push(CheckResult::from_outcome("bandwidth", "four-term recurrence, d = 2", outcome).as_claim());
        }
        Example::CubicHalfSquareZero => {
            let printed = DiffOperator::from_terms([
                (6, xpoly(&[(Scalar::one(), 4)])),
                (5, xpoly(&[(s(6), 3)])),
                (4, xpoly(&[(s(6), 2)])),
                (1, xpoly(&[(Scalar::one(), 1)])),
            ]);
            out.push(l1_claim(printed));
            out.push(check_table_claim("p0", table, 0, &XP::one()));
            out.push(check_table_claim("p1", table, 1, &XP::var()));
            out.push(check_table_claim("p2", table, 2, &xpoly(&[(Scalar::one(), 2)])));
            let p3 = xpoly(&[(Scalar::one(), 3), (s(3 * 8), 1)]);
            let p4 = xpoly(&[(Scalar::one(), 4), (s(4 * 27 * 4), 2)]);
            out.push(check_table_claim("p3", table, 3, &p3));
            out.push(check_table_claim("p4", table, 4, &p4));
            for (n, printed) in [(3usize, &p3), (4, &p4)] {
                let lhs = apply(&fam.l1, printed);
                let want = printed.scale_rat(&Rat::from(n as i64));
                out.push(
                    check_poly_claim(
                        format!("p{n}-printed-eigen"),
                        format!("printed P_{n} satisfies L1 P = {n} P"),
                        Some(n),
                        &want,
                        &lhs,
                    )
                    .as_claim(),
                );
                let generated = &table.polys[n];
                out.push(check_poly_claim(
                    format!("p{n}-generated-eigen"),
                    format!("generated P_{n} = {generated} satisfies L1 P = {n} P"),
                    Some(n),
                    &generated.scale_rat(&Rat::from(n as i64)),
                    &apply(&fam.l1, generated),
                ));
            }
            let outcome = (rec.bandwidth != 5).then(|| Witness::new(None, 5, rec.bandwidth));
            out.push(CheckResult::from_outcome("bandwidth", "seven-term recurrence, d = 5", outcome).as_claim());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    #[serde(rename = "match")]
    pub matched: usize,
    pub mismatch: usize,
    pub discrepancy: usize,
    pub engine_error: usize,
    pub not_applicable: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn from_checks(mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Match => summary.matched += 1,
                Status::NotApplicable => summary.not_applicable += 1,
                Status::Mismatch => {
                    summary.mismatch += 1;
                    match c.origin {
                        Origin::Claim => summary.discrepancy += 1,
                        Origin::Engine => summary.engine_error += 1,
                    }
                }
            }
        }
        Report { checks, summary }
    }

    pub fn all_match(&self) -> bool {
        self.summary.mismatch == 0
    }

    pub fn get(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let s = &self.summary;
        write!(
            f,
            "summary: {} match, {} mismatch ({} discrepancy, {} engine-error), {} not-applicable",
            s.matched, s.mismatch, s.discrepancy, s.engine_error, s.not_applicable
        )
    }
}

/// Audits every entry; checks are sorted by id.
pub fn full_report(entries: &[CorpusEntry]) -> Result<Report> {
    let parts: Vec<Vec<CheckResult>> = entries.par_iter().map(audit_family).collect::<Result<_>>()?;
    Ok(Report::from_checks(parts.into_iter().flatten().collect()))
}
