use rayon::prelude::*;
use serde::Serialize;

use super::{CheckResult, Witness};
use crate::diffop::{apply, compose, poly_of_op, DiffOperator};
use crate::families::{Family, PolyTable};
use crate::ring::{Coeff, Poly, Rat, Var, X};
use crate::shiftop::ShiftOperator;

/// First index in `0..=max` where `fails` produces a witness.
pub(crate) fn first_failure(max: usize, fails: impl Fn(usize) -> Option<Witness> + Sync) -> Option<Witness> {
    (0..=max).into_par_iter().find_map_first(|n| fails(n))
}

fn poly_witness<R: Coeff, V: Var>(n: usize, expected: &Poly<R, V>, got: &Poly<R, V>) -> Witness {
    Witness::new(Some(n as i64), expected, got).with_difference(got - expected)
}

/// `L₁Pₙ = nPₙ` for every n in the table.
pub fn check_eigenfunction<R: Coeff + Serialize>(fam: &Family<R>, table: &PolyTable<R>) -> CheckResult {
    let outcome = first_failure(table.n_max(), |n| {
        let p = &table.polys[n];
        let got = apply(&fam.l1, p);
        let want = p.scale_rat(&Rat::from(n as i64));
        (got != want).then(|| poly_witness(n, &want, &got))
    });
    CheckResult::from_outcome("eigenfunction", format!("L1 P_n = n P_n, L1 = {}", fam.l1), outcome)
}

/// `BPₙ = μ(n)Pₙ₋₁`, with `B·P₀ = 0`.
pub fn check_lowering<R: Coeff + Serialize>(fam: &Family<R>, table: &PolyTable<R>) -> CheckResult {
    let outcome = first_failure(table.n_max(), |n| {
        let got = apply(&fam.b, &table.polys[n]);
        let want = if n == 0 {
            Poly::zero()
        } else {
            table.polys[n - 1].scale(&fam.mu.eval_int(n as i64))
        };
        (got != want).then(|| poly_witness(n, &want, &got))
    });
    CheckResult::from_outcome("lowering", format!("B P_n = mu(n) P_(n-1), mu(n) = {}", fam.mu), outcome)
}

/// `L₁` by composition `H + q′(B)B` against the series `exp(ad q(B))H`.
pub fn check_l1_double<R: Coeff>(fam: &Family<R>) -> CheckResult {
    let composed = &fam.h + &compose(&poly_of_op(&fam.spec.q.derivative(), &fam.b), &fam.b);
    let series = fam.sigma(&fam.h, None);
    let claim = "L1 by composition equals L1 by ad-series";
    match series {
        Ok(s) => CheckResult::from_outcome("l1-double", claim, compare_diffop(&composed, &s)),
        Err(e) => CheckResult::mismatched("l1-double", claim, Witness::new(None, composed, "-").with_note(e.to_string())),
    }
}

/// Witness when two differential operators differ.
pub fn compare_diffop<R: Coeff>(expected: &DiffOperator<R>, got: &DiffOperator<R>) -> Option<Witness> {
    (expected != got).then(|| Witness::new(None, expected, got).with_difference(got - expected))
}

pub fn check_operator_identity<R: Coeff>(
    id: impl Into<String>,
    claim: impl Into<String>,
    expected: &ShiftOperator<R>,
    got: &ShiftOperator<R>,
) -> CheckResult {
    let outcome = (expected != got).then(|| Witness::new(None, expected, got).with_difference(got - expected));
    CheckResult::from_outcome(id, claim, outcome)
}

pub fn check_poly_claim<R: Coeff, V: Var>(
    id: impl Into<String>,
    claim: impl Into<String>,
    n: Option<usize>,
    expected: &Poly<R, V>,
    got: &Poly<R, V>,
) -> CheckResult {
    let outcome = (expected != got).then(|| {
        let w = Witness::new(n.map(|v| v as i64), expected, got).with_difference(got - expected);
        w
    });
    CheckResult::from_outcome(id, claim, outcome)
}

/// A printed `Pₙ` against the generated one.
pub fn check_table_claim<R: Coeff + Serialize>(
    id: impl Into<String>,
    table: &PolyTable<R>,
    n: usize,
    printed: &Poly<R, X>,
) -> CheckResult {
    let id = id.into();
    let claim = format!("P_{n} = {printed}");
    match table.get(n) {
        Some(p) => check_poly_claim(id, claim, Some(n), p, printed).as_claim(),
        None => CheckResult::not_applicable(id, claim, format!("table stops at N = {}", table.n_max())),
    }
}
