use rayon::prelude::*;
use serde::Serialize;

use super::recurrence::RecurrenceTable;
use super::{CheckResult, Witness};
use crate::error::{Error, Result};
use crate::families::PolyTable;
use crate::ring::Coeff;

/// Moments `u_k(xʲ)` of the functionals dual to the table: `u_k(P_m) = δ_{k,m}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalTable<R: Coeff + Serialize> {
    pub d: usize,
    /// `moments[k][j] = u_k(xʲ)`, j = 0..=N.
    pub moments: Vec<Vec<R>>,
}

impl<R: Coeff + Serialize> FunctionalTable<R> {
    /// Triangular solve: `u_k(xᵐ) = δ_{k,m} − Σ_{i<m} [xⁱ]P_m · u_k(xⁱ)`.
    pub fn dual_to(table: &PolyTable<R>, d: usize) -> Self {
        let moments = (0..d)
            .into_par_iter()
            .map(|k| {
                let mut u: Vec<R> = Vec::with_capacity(table.len());
                for (m, p) in table.polys.iter().enumerate() {
                    let mut v = if m == k { R::one() } else { R::zero() };
                    for (i, c) in p.terms().filter(|(i, _)| *i < m) {
                        if !u[i].is_zero() {
                            v -= &c.mul_ref(&u[i]);
                        }
                    }
                    u.push(v);
                }
                u
            })
            .collect();
        FunctionalTable { d, moments }
    }

    /// `u_k(p)`; `None` when p exceeds the moment range.
    pub fn apply(&self, k: usize, p: &crate::ring::Poly<R, crate::ring::X>) -> Option<R> {
        let u = &self.moments[k];
        let mut acc = R::zero();
        for (i, c) in p.terms() {
            acc += &c.mul_ref(u.get(i)?);
        }
        Some(acc)
    }

    /// `u_k(PₙP_m)` for all n + m ≤ N, indexed `[n][m]`.
    pub fn gram(&self, table: &PolyTable<R>, k: usize) -> Vec<Vec<R>> {
        let u = &self.moments[k];
        let max = table.n_max();
        // v[m][i] = u_k(xⁱ P_m)
        let v: Vec<Vec<R>> = (0..=max)
            .into_par_iter()
            .map(|m| {
                (0..=max - m)
                    .map(|i| {
                        let mut acc = R::zero();
                        for (l, c) in table.polys[m].terms() {
                            acc += &c.mul_ref(&u[i + l]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        (0..=max)
            .into_par_iter()
            .map(|n| {
                (0..=max - n)
                    .map(|m| {
                        let mut acc = R::zero();
                        for (i, c) in table.polys[n].terms() {
                            acc += &c.mul_ref(&v[m][i]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

/// d-orthogonality of the table against its δ-dual functionals:
/// `u_k(PₙP_m) = 0` for `m > nd + k` and `u_k(PₙP_{nd+k}) ≠ 0`, over
/// n + m ≤ N, plus regularity `γ_d(n) ≠ 0` for d ≤ n ≤ N−1.
pub fn maroni_check<R: Coeff + Serialize>(
    table: &PolyTable<R>,
    rec: &RecurrenceTable<R>,
) -> Result<(FunctionalTable<R>, Vec<CheckResult>)> {
    let d = rec.bandwidth;
    if d == 0 {
        return Err(Error::BandwidthZero);
    }
    let funcs = FunctionalTable::dual_to(table, d);
    let max = table.n_max();

    let mut duality = None;
    'outer: for k in 0..d {
        for (m, p) in table.polys.iter().enumerate() {
            let got = funcs.apply(k, p).expect("moments cover the table");
            let want = if m == k { R::one() } else { R::zero() };
            if got != want {
                duality = Some(Witness::new(Some(m as i64), want, got).with_note(format!("u_{k}(P_{m})")));
                break 'outer;
            }
        }
    }

    let grams: Vec<Vec<Vec<R>>> = (0..d).map(|k| funcs.gram(table, k)).collect();
    let mut vanishing = None;
    let mut nonvanishing = None;
    for n in 0..=max {
        for m in 0..=max - n {
            for (k, g) in grams.iter().enumerate() {
                let val = &g[n][m];
                let edge = n * d + k;
                if m > edge && !val.is_zero() && vanishing.is_none() {
                    vanishing = Some(
                        Witness::new(Some(n as i64), "0", val).with_note(format!("u_{k}(P_{n} P_{m}), m > {edge}")),
                    );
                }
                if m == edge && val.is_zero() && nonvanishing.is_none() {
                    nonvanishing = Some(
                        Witness::new(Some(n as i64), "nonzero", "0").with_note(format!("u_{k}(P_{n} P_{m})")),
                    );
                }
            }
        }
    }

    let mut regular = None;
    for n in d..rec.rows() {
        if rec.gammas[n][d].is_zero() {
            regular = Some(Witness::new(Some(n as i64), "nonzero", "0").with_note(format!("gamma_{d}({n})")));
            break;
        }
    }

    let checks = vec![
        CheckResult::from_outcome("maroni-duality", "u_k(P_m) = delta_(k,m)", duality),
        CheckResult::from_outcome(
            "maroni-vanishing",
            format!("u_k(P_n P_m) = 0 for m > {d}n + k, n + m <= {max}"),
            vanishing,
        ),
        CheckResult::from_outcome(
            "maroni-nonvanishing",
            format!("u_k(P_n P_({d}n+k)) != 0 where n + {d}n + k <= {max}"),
            nonvanishing,
        ),
        CheckResult::from_outcome("maroni-regularity", format!("gamma_{d}(n) != 0 for {d} <= n < {max}"), regular),
    ];
    Ok((funcs, checks))
}
