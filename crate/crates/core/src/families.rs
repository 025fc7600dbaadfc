//! The three families: generators, `L₁ = σ(H)`, polynomial tables
//! `Pₙ = exp(q(B))xⁿ`, the lowering factor μ(n), and the printed closed forms
//! of the recurrence operator kept as unevaluated expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cancel::CancelToken;
use crate::diffop::{self, ad_exp_with, commutator, compose, exp_apply_with, poly_of_op, DiffOperator};
use crate::error::{Error, Result};
use crate::ring::{Coeff, FormalPoly, Param, Poly, QPoly, Rat, N, X};
use crate::shiftop::{bispectral_b, qpoly_at_shiftop, shift_compose, ShiftOperator};

pub const DEFAULT_N: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Weyl,
    Sl2,
    Cubic,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Weyl => "weyl",
            Kind::Sl2 => "sl2",
            Kind::Cubic => "cubic",
        }
    }

    /// Parameters the family's operator B depends on.
    pub fn params(self) -> &'static [Param] {
        match self {
            Kind::Weyl => &[],
            Kind::Sl2 => &[Param::Beta],
            Kind::Cubic => &[Param::Alpha, Param::Beta],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Symbolic,
    Value(Rat),
}

impl Serialize for ParamValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ParamValue::Symbolic => s.serialize_str("symbolic"),
            ParamValue::Value(r) => r.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ParamValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) if t == "symbolic" => Ok(ParamValue::Symbolic),
            Raw::Text(t) => t.parse().map(ParamValue::Value).map_err(serde::de::Error::custom),
            Raw::Int(v) => Ok(ParamValue::Value(Rat::from(v))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: Kind,
    q: Vec<(Rat, usize)>,
    #[serde(default)]
    params: BTreeMap<String, ParamValue>,
    #[serde(rename = "N", default)]
    n: Option<usize>,
}

/// A validated family specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: Kind,
    pub q: QPoly,
    pub params: BTreeMap<Param, ParamValue>,
    pub n_max: usize,
}

impl FamilySpec {
    /// Builds a spec; parameters the family needs but `params` omits are symbolic.
    pub fn new(kind: Kind, q: QPoly, params: BTreeMap<Param, ParamValue>, n_max: usize) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidSpec("q must be a nonzero polynomial".into()));
        }
        for p in params.keys() {
            if !kind.params().contains(p) {
                return Err(Error::UndeclaredParameter(format!(
                    "{} is not a parameter of the {kind} family",
                    p.name()
                )));
            }
        }
        let mut params = params;
        for &p in kind.params() {
            params.entry(p).or_insert(ParamValue::Symbolic);
        }
        Ok(FamilySpec {
            kind,
            q,
            params,
            n_max,
        })
    }

    /// Spec with every family parameter symbolic.
    pub fn symbolic(kind: Kind, q: QPoly, n_max: usize) -> Self {
        Self::new(kind, q, BTreeMap::new(), n_max).expect("symbolic spec is valid")
    }

    pub fn with_n(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Parse(format!("family spec: {e}")))?;
        let q = QPoly::from_terms(raw.q)?;
        let mut params = BTreeMap::new();
        for (name, v) in raw.params {
            let p = Param::from_name(&name)
                .ok_or_else(|| Error::UndeclaredParameter(format!("unknown parameter {name:?}")))?;
            params.insert(p, v);
        }
        Self::new(raw.kind, q, params, raw.n.unwrap_or(DEFAULT_N))
    }

    /// Canonical JSON text; stable key and term order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("spec serializes")
    }

    pub fn to_value(&self) -> serde_json::Value {
        let q: Vec<serde_json::Value> = self
            .q
            .as_formal()
            .terms()
            .map(|(k, c)| serde_json::json!([c.to_string(), k]))
            .collect();
        let params: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(p, v)| (p.name().to_string(), serde_json::to_value(v).expect("param value")))
            .collect();
        serde_json::json!({
            "kind": self.kind.name(),
            "q": q,
            "params": params,
            "N": self.n_max,
        })
    }

    /// SHA-256 of the canonical JSON text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn declared_params(&self) -> BTreeSet<Param> {
        self.params.keys().copied().collect()
    }

    pub fn is_fully_numeric(&self) -> bool {
        self.params.values().all(|v| matches!(v, ParamValue::Value(_)))
    }

    /// The value of a parameter in the ring `R`.
    pub fn param<R: Coeff>(&self, p: Param) -> Result<R> {
        match self.params.get(&p) {
            None => Err(Error::MissingParameter(p.name().to_string())),
            Some(ParamValue::Value(r)) => Ok(R::from_rat(r)),
            Some(ParamValue::Symbolic) => R::param(p).ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "parameter {} is symbolic but the coefficient ring is numeric",
                    p.name()
                ))
            }),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} q = {}", self.kind, self.q)?;
        for (p, v) in &self.params {
            match v {
                ParamValue::Symbolic => {}
                ParamValue::Value(r) => write!(f, ", {} = {r}", p.name())?,
            }
        }
        write!(f, ", N = {}", self.n_max)
    }
}

/// The operator B of a family.
pub fn family_b<R: Coeff>(spec: &FamilySpec) -> Result<DiffOperator<R>> {
    Ok(match spec.kind {
        Kind::Weyl => DiffOperator::d(),
        Kind::Sl2 => {
            &DiffOperator::monomial(R::one(), 1, 2) + &DiffOperator::monomial(spec.param(Param::Beta)?, 0, 1)
        }
        Kind::Cubic => {
            let b = &DiffOperator::monomial(R::one(), 2, 3)
                + &DiffOperator::monomial(spec.param(Param::Alpha)?, 1, 2);
            &b + &DiffOperator::monomial(spec.param(Param::Beta)?, 0, 1)
        }
    })
}

fn linear_n<R: Coeff>(c0: R, c1: R) -> Poly<R, N> {
    Poly::from_coeffs(vec![c0, c1])
}

/// Closed-form lowering factor μ(n) with `B·xⁿ = μ(n)xⁿ⁻¹`.
pub fn lowering_mu<R: Coeff>(spec: &FamilySpec) -> Result<Poly<R, N>> {
    let n: Poly<R, N> = Poly::var();
    Ok(match spec.kind {
        Kind::Weyl => n,
        Kind::Sl2 => {
            let beta: R = spec.param(Param::Beta)?;
            &n * &linear_n(beta.sub_ref(&R::one()), R::one())
        }
        Kind::Cubic => {
            let alpha: R = spec.param(Param::Alpha)?;
            let beta: R = spec.param(Param::Beta)?;
            let nm1 = linear_n(-R::one(), R::one());
            let inner = &(&nm1 * &linear_n(R::from_i64(-2), R::one())) + &nm1.scale(&alpha);
            let inner = &inner + &Poly::constant(beta);
            &n * &inner
        }
    })
}

/// Evaluation of an operator-valued closed form under a chosen convention for
/// noncommutative products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    AsWritten,
    Reversed,
}

impl Ordering {
    pub const BOTH: [Ordering; 2] = [Ordering::AsWritten, Ordering::Reversed];

    pub fn name(self) -> &'static str {
        match self {
            Ordering::AsWritten => "as-written",
            Ordering::Reversed => "reversed",
        }
    }
}

/// An unevaluated difference-operator expression.
#[derive(Clone, Debug)]
pub enum OpExpr<R: Coeff> {
    Atom(ShiftOperator<R>),
    Sum(Vec<OpExpr<R>>),
    /// Factors in printed order.
    Prod(Vec<OpExpr<R>>),
    Scale(Rat, Box<OpExpr<R>>),
}

impl<R: Coeff> OpExpr<R> {
    pub fn atom(s: ShiftOperator<R>) -> Self {
        OpExpr::Atom(s)
    }

    pub fn neg(self) -> Self {
        OpExpr::Scale(-Rat::from(1), Box::new(self))
    }

    pub fn eval(&self, ordering: Ordering) -> ShiftOperator<R> {
        match self {
            OpExpr::Atom(s) => s.clone(),
            OpExpr::Sum(parts) => parts
                .iter()
                .fold(ShiftOperator::zero(), |acc, p| &acc + &p.eval(ordering)),
            OpExpr::Prod(factors) => {
                let vals: Vec<ShiftOperator<R>> = factors.iter().map(|f| f.eval(ordering)).collect();
                let iter: Box<dyn Iterator<Item = &ShiftOperator<R>>> = match ordering {
                    Ordering::AsWritten => Box::new(vals.iter()),
                    Ordering::Reversed => Box::new(vals.iter().rev()),
                };
                iter.fold(ShiftOperator::identity(), |acc, v| shift_compose(&acc, v))
            }
            OpExpr::Scale(r, inner) => inner.eval(ordering).scale_rat(r),
        }
    }
}

/// Images of the generators under the seed anti-isomorphism.
#[derive(Clone, Debug)]
pub struct GeneratorImages<R: Coeff> {
    pub x: ShiftOperator<R>,
    pub h: ShiftOperator<R>,
    pub b: ShiftOperator<R>,
}

/// A built family; every structural relation was checked on construction.
#[derive(Clone, Debug)]
pub struct Family<R: Coeff> {
    pub spec: FamilySpec,
    pub x: DiffOperator<R>,
    pub h: DiffOperator<R>,
    pub b: DiffOperator<R>,
    /// `q(B)`
    pub q_op: DiffOperator<R>,
    pub mu: Poly<R, N>,
    pub l1: DiffOperator<R>,
    pub b_map: GeneratorImages<R>,
}

/// Expected value of `[B, x]` from direct expansion.
fn b_x_commutator<R: Coeff>(spec: &FamilySpec, h: &DiffOperator<R>) -> Result<DiffOperator<R>> {
    Ok(match spec.kind {
        Kind::Weyl => DiffOperator::identity(),
        Kind::Sl2 => &h.scale(&R::from_i64(2)) + &DiffOperator::constant(spec.param(Param::Beta)?),
        Kind::Cubic => {
            // 3x²∂² + 2αx∂ + β written in H: 3H² + (2α − 3)H + β
            let alpha: R = spec.param(Param::Alpha)?;
            let hh = compose(h, h);
            let lin = alpha.scale(&Rat::from(2)).sub_ref(&R::from_i64(3));
            &(&hh.scale(&R::from_i64(3)) + &h.scale(&lin)) + &DiffOperator::constant(spec.param(Param::Beta)?)
        }
    })
}

pub fn build_family<R: Coeff>(spec: &FamilySpec) -> Result<Family<R>> {
    build_family_with(spec, None)
}

pub fn build_family_with<R: Coeff>(spec: &FamilySpec, cancel: Option<&CancelToken>) -> Result<Family<R>> {
    let x = DiffOperator::<R>::x();
    let h = DiffOperator::<R>::monomial(R::one(), 1, 1);
    let b = family_b::<R>(spec)?;

    if commutator(&h, &x) != x {
        return Err(Error::RelationViolation(format!("[H, x] = {}", commutator(&h, &x))));
    }
    let hb = commutator(&h, &b);
    if hb != -&b {
        return Err(Error::RelationViolation(format!("[H, B] = {hb}")));
    }
    let bx = commutator(&b, &x);
    let want = b_x_commutator(spec, &h)?;
    if bx != want {
        return Err(Error::RelationViolation(format!("[B, x] = {bx}, expected {want}")));
    }

    // μ(n): read off B·xⁿ, interpolate, compare with the closed form
    let read = |n: usize| -> Result<R> {
        let img = diffop::apply(&b, &Poly::monomial(R::one(), n));
        let c = img.coeff_or_zero(n.saturating_sub(1));
        let expected = Poly::monomial(c.clone(), n.saturating_sub(1));
        if n > 0 && img != expected || n == 0 && !img.is_zero() {
            return Err(Error::RelationViolation(format!("B·x^{n} = {img} is not a multiple of x^{}", n.saturating_sub(1))));
        }
        Ok(c)
    };
    let samples: Vec<R> = (0..=5).map(read).collect::<Result<_>>()?;
    let mu = interpolate_n(&samples);
    let closed = lowering_mu::<R>(spec)?;
    if mu != closed {
        return Err(Error::RelationViolation(format!("mu(n): interpolated {mu}, closed form {closed}")));
    }
    for n in 0..=spec.n_max {
        let v = if n <= 5 { samples[n].clone() } else { read(n)? };
        if v != mu.eval_int(n as i64) {
            return Err(Error::RelationViolation(format!("mu({n}) mismatch")));
        }
    }

    let q_op = diffop::qpoly_of_op(&spec.q, &b);
    let by_composition = &h + &compose(&poly_of_op(&spec.q.derivative(), &b), &b);
    let guard = diffop::default_ad_guard(&q_op, &h);
    let by_series = ad_exp_with(&q_op, &h, guard, cancel)?;
    if by_composition != by_series {
        return Err(Error::SigmaMismatch {
            composed: by_composition.to_string(),
            series: by_series.to_string(),
        });
    }

    let b_map = GeneratorImages {
        x: bispectral_b(&x),
        h: bispectral_b(&h),
        b: bispectral_b(&b),
    };
    let want_b = ShiftOperator::term(mu.clone(), -1);
    if b_map.b != want_b || b_map.x != ShiftOperator::t() || b_map.h != ShiftOperator::n() {
        return Err(Error::RelationViolation(format!("b(B) = {}", b_map.b)));
    }

    Ok(Family {
        spec: spec.clone(),
        x,
        h,
        b,
        q_op,
        mu,
        l1: by_composition,
        b_map,
    })
}

/// Newton forward-difference interpolation through `(k, v[k])`, k = 0, 1, ….
fn interpolate_n<R: Coeff>(values: &[R]) -> Poly<R, N> {
    let mut diffs: Vec<R> = values.to_vec();
    let mut out: Poly<R, N> = Poly::zero();
    for k in 0..values.len() {
        let basis: Poly<R, N> = Poly::falling(k);
        out += &basis.scale(&diffs[0].scale(&Rat::factorial(k as u64).recip()));
        diffs = diffs.windows(2).map(|w| w[1].sub_ref(&w[0])).collect();
        if diffs.is_empty() {
            break;
        }
    }
    out
}

impl<R: Coeff> Family<R> {
    /// `σ⁻¹(A) = exp(−ad q(B))A`.
    pub fn sigma_inv(&self, a: &DiffOperator<R>, cancel: Option<&CancelToken>) -> Result<DiffOperator<R>> {
        let neg = -&self.q_op;
        ad_exp_with(&neg, a, diffop::default_ad_guard(&neg, a), cancel)
    }

    pub fn sigma(&self, a: &DiffOperator<R>, cancel: Option<&CancelToken>) -> Result<DiffOperator<R>> {
        ad_exp_with(&self.q_op, a, diffop::default_ad_guard(&self.q_op, a), cancel)
    }

    /// `b′(A) = b(σ⁻¹(A))`, computed from the series.
    pub fn b_prime(&self, a: &DiffOperator<R>, cancel: Option<&CancelToken>) -> Result<ShiftOperator<R>> {
        Ok(bispectral_b(&self.sigma_inv(a, cancel)?))
    }

    /// `b(B) = μ(n)T⁻¹`
    pub fn lowering_symbol(&self) -> &ShiftOperator<R> {
        &self.b_map.b
    }

    fn q_at(&self, p: &FormalPoly) -> OpExpr<R> {
        OpExpr::atom(qpoly_at_shiftop(p, self.lowering_symbol()))
    }

    fn n_poly(&self, coeffs: Vec<R>) -> OpExpr<R> {
        OpExpr::atom(ShiftOperator::mul_by(Poly::from_coeffs(coeffs)))
    }

    fn q1(&self) -> FormalPoly {
        self.spec.q.derivative()
    }

    fn q2(&self) -> FormalPoly {
        self.q1().derivative()
    }

    fn q3(&self) -> FormalPoly {
        self.q2().derivative()
    }

    /// `Q₀(X) = −q‴X² + (2q″X + 3q′ − q′²X)·X·q′`
    pub fn q0_poly(&self) -> FormalPoly {
        let xv = FormalPoly::var();
        let (q1, q2, q3) = (self.q1(), self.q2(), self.q3());
        let first = -&(&q3 * &(&xv * &xv));
        let brace = &(&(&q2 * &xv).scale_rat(&Rat::from(2)) + &q1.scale_rat(&Rat::from(3))) - &(&(&q1 * &q1) * &xv);
        &first + &(&(&brace * &xv) * &q1)
    }

    /// `Q₁(X) = (q′² − q″)X/2`
    pub fn q1_poly(&self) -> FormalPoly {
        let q1 = self.q1();
        (&(&(&q1 * &q1) - &self.q2()) * &FormalPoly::var()).scale_rat(&Rat::new(1, 2))
    }

    /// The printed closed form of `b′(x)`.
    pub fn claimed_bprime_x(&self) -> Result<OpExpr<R>> {
        let t = OpExpr::atom(ShiftOperator::t());
        let q1 = self.q1();
        Ok(match self.spec.kind {
            Kind::Weyl => OpExpr::Sum(vec![t, self.q_at(&q1).neg()]),
            Kind::Sl2 => {
                let beta: R = self.spec.param(Param::Beta)?;
                let g = OpExpr::atom(self.lowering_symbol().clone());
                let q1sq = &q1 * &q1;
                OpExpr::Sum(vec![
                    t,
                    OpExpr::Prod(vec![self.q_at(&q1), self.n_poly(vec![beta, R::from_i64(2)])]).neg(),
                    OpExpr::Prod(vec![self.q_at(&self.q2()), g.clone()]).neg(),
                    OpExpr::Prod(vec![self.q_at(&q1sq), g]),
                ])
            }
            Kind::Cubic => {
                let (alpha, beta, w) = self.cubic_parts()?;
                let r = self.n_poly(vec![alpha.add_ref(&R::from_i64(3)), R::from_i64(6)]);
                let _ = beta;
                OpExpr::Sum(vec![
                    t,
                    OpExpr::Prod(vec![self.q_at(&q1), w]).neg(),
                    OpExpr::Prod(vec![self.q_at(&self.q1_poly()), r]),
                    self.q_at(&self.q0_poly()),
                ])
            }
        })
    }

    /// `(α, β, 3n² + 2αn + β)`
    fn cubic_parts(&self) -> Result<(R, R, OpExpr<R>)> {
        let alpha: R = self.spec.param(Param::Alpha)?;
        let beta: R = self.spec.param(Param::Beta)?;
        let w = self.n_poly(vec![beta.clone(), alpha.scale(&Rat::from(2)), R::from_i64(3)]);
        Ok((alpha, beta, w))
    }

    /// The recurrence operator as stated in the main result for the family.
    pub fn claimed_theorem_recurrence(&self) -> Result<OpExpr<R>> {
        let t = OpExpr::atom(ShiftOperator::t());
        let q1 = self.q1();
        Ok(match self.spec.kind {
            Kind::Weyl => self.claimed_bprime_x()?,
            Kind::Sl2 => {
                let beta: R = self.spec.param(Param::Beta)?;
                let g = OpExpr::atom(self.lowering_symbol().clone());
                let q1sq = &q1 * &q1;
                let brace = OpExpr::Sum(vec![
                    OpExpr::Scale(Rat::from(-2), Box::new(self.q_at(&self.q2()))),
                    self.q_at(&q1sq),
                ]);
                OpExpr::Sum(vec![
                    t,
                    OpExpr::Prod(vec![self.q_at(&q1), self.n_poly(vec![beta, R::from_i64(2)])]).neg(),
                    OpExpr::Prod(vec![brace, g]),
                ])
            }
            Kind::Cubic => {
                let (alpha, _, w) = self.cubic_parts()?;
                let r = self.n_poly(vec![alpha.add_ref(&R::from_i64(3)), R::from_i64(6)]);
                OpExpr::Sum(vec![
                    t,
                    OpExpr::Sum(vec![
                        OpExpr::Scale(Rat::from(-3), Box::new(OpExpr::Prod(vec![self.q_at(&q1), w]))),
                        OpExpr::Prod(vec![self.q_at(&self.q1_poly()), r]),
                        self.q_at(&self.q0_poly()),
                    ]),
                ])
            }
        })
    }
}

/// `P₀..P_N`, each monic of exact degree n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTable<R: Coeff + Serialize> {
    pub kind: Kind,
    pub spec_hash: String,
    pub polys: Vec<Poly<R, X>>,
}

impl<R: Coeff + Serialize> PolyTable<R> {
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.polys.len().saturating_sub(1)
    }

    pub fn get(&self, n: usize) -> Option<&Poly<R, X>> {
        self.polys.get(n)
    }

    /// Parses a table document and checks that entry n is monic of degree n.
    pub fn from_json(text: &str) -> Result<Self>
    where
        R: serde::de::DeserializeOwned,
    {
        let t: Self = serde_json::from_str(text).map_err(|e| Error::BadTable(e.to_string()))?;
        if t.polys.is_empty() {
            return Err(Error::BadTable("no polynomials".into()));
        }
        for (n, p) in t.polys.iter().enumerate() {
            if p.degree() != Some(n) || !p.is_monic() {
                return Err(Error::BadTable(format!("entry {n} is not monic of degree {n}: {p}")));
            }
        }
        Ok(t)
    }
}

pub fn generate_table<R: Coeff + Serialize>(fam: &Family<R>) -> Result<PolyTable<R>> {
    generate_table_with(fam, None)
}

pub fn generate_table_with<R: Coeff + Serialize>(
    fam: &Family<R>,
    cancel: Option<&CancelToken>,
) -> Result<PolyTable<R>> {
    let polys: Vec<Poly<R, X>> = (0..=fam.spec.n_max)
        .into_par_iter()
        .map(|n| {
            let seed = Poly::monomial(R::one(), n);
            let p = exp_apply_with(&fam.q_op, &seed, diffop::default_exp_guard(&seed), cancel)?;
            if p.degree() != Some(n) || !p.is_monic() {
                return Err(Error::RelationViolation(format!("P_{n} = {p} is not monic of degree {n}")));
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;
    Ok(PolyTable {
        kind: fam.spec.kind,
        spec_hash: fam.spec.hash(),
        polys,
    })
}
