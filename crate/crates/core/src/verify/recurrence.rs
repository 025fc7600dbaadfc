use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use super::checks::first_failure;
use super::{CheckResult, Witness};
use crate::error::{Error, Result};
use crate::families::PolyTable;
use crate::ring::{Coeff, Poly, Rat, N, X};
use crate::shiftop::ShiftOperator;

/// Coefficients of `x·Pₙ = Pₙ₊₁ + Σⱼ γⱼ(n)Pₙ₋ⱼ` for n = 0..N−1.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceTable<R> {
    /// `gammas[n][j] = γⱼ(n)`, j = 0..=n.
    pub gammas: Vec<Vec<R>>,
    /// Largest j with some `γⱼ(n) ≠ 0`.
    pub bandwidth: usize,
}

impl<R: Coeff> RecurrenceTable<R> {
    pub fn gamma(&self, n: usize, j: usize) -> Option<&R> {
        self.gammas.get(n)?.get(j)
    }

    /// Number of rows, i.e. N when built from `P₀..P_N`.
    pub fn rows(&self) -> usize {
        self.gammas.len()
    }

    /// The polynomial in n through the values `γⱼ(n)`, n = j..N−1, provided a
    /// polynomial of lower degree than the number of points fits all of them.
    pub fn closed_form(&self, j: usize) -> Option<Poly<R, N>> {
        let values: Vec<R> = (j..self.rows()).map(|n| self.gammas[n][j].clone()).collect();
        if values.is_empty() {
            return None;
        }
        let mut diffs = values;
        let mut leading = Vec::new();
        loop {
            if diffs.iter().all(|c| c.is_zero()) {
                break;
            }
            if diffs.len() == 1 {
                // no spare point left to confirm the fit
                return None;
            }
            leading.push(diffs[0].clone());
            diffs = diffs.windows(2).map(|w| w[1].sub_ref(&w[0])).collect();
        }
        // Newton form in the shifted variable m = n − j
        let shift: Poly<R, N> = Poly::from_coeffs(vec![R::from_i64(-(j as i64)), R::one()]);
        let mut out: Poly<R, N> = Poly::zero();
        let mut basis: Poly<R, N> = Poly::one();
        for (k, c) in leading.iter().enumerate() {
            out += &basis.scale(&c.scale(&Rat::factorial(k as u64).recip()));
            let factor = &shift - &Poly::constant(R::from_i64(k as i64));
            basis = &basis * &factor;
        }
        Some(out)
    }

    /// The recurrence as `(offset, coefficient)` pairs at a fixed n.
    pub fn row_terms(&self, n: usize) -> Vec<(i64, R)> {
        let mut out = vec![(1, R::one())];
        for (j, g) in self.gammas[n].iter().enumerate() {
            if !g.is_zero() {
                out.push((-(j as i64), g.clone()));
            }
        }
        out
    }
}

/// Expands `x·Pₙ − Pₙ₊₁` in the monic basis by back-substitution from the
/// top degree; divisions never occur since every `Pⱼ` is monic.
pub fn extract_recurrence<R: Coeff + Serialize>(table: &PolyTable<R>) -> Result<RecurrenceTable<R>> {
    let polys = &table.polys;
    let rows = polys.len().saturating_sub(1);
    let gammas: Vec<Vec<R>> = (0..rows)
        .into_par_iter()
        .map(|n| {
            let mut r = &polys[n].shift_up(1) - &polys[n + 1];
            let mut g = vec![R::zero(); n + 1];
            for j in (0..=n).rev() {
                let c = r.coeff_or_zero(j);
                if c.is_zero() {
                    continue;
                }
                r -= &polys[j].scale(&c);
                g[n - j] = c;
            }
            if !r.is_zero() {
                return Err(Error::RelationViolation(format!(
                    "x P_{n} is not in the span of P_0..P_{}: remainder {r}",
                    n + 1
                )));
            }
            Ok(g)
        })
        .collect::<Result<_>>()?;
    let bandwidth = gammas
        .iter()
        .filter_map(|g| g.iter().rposition(|c| !c.is_zero()))
        .max()
        .unwrap_or(0);
    let rec = RecurrenceTable { gammas, bandwidth };
    // independent reconstruction
    for n in 0..rows {
        let mut sum = polys[n + 1].clone();
        for (j, g) in rec.gammas[n].iter().enumerate() {
            if !g.is_zero() {
                sum += &polys[n - j].scale(g);
            }
        }
        if sum != polys[n].shift_up(1) {
            return Err(Error::RelationViolation(format!("recurrence row {n} does not reconstruct x P_{n}")));
        }
    }
    Ok(rec)
}

/// Checks `x·Pₙ = Σₖ cₖ(n)Pₙ₊ₖ` for n = 0..N−1 with coefficients given per n.
/// A nonzero coefficient reaching an index below 0 counts as a failure.
pub fn compare_recurrence_values<R: Coeff + Serialize>(
    table: &PolyTable<R>,
    coeffs: impl Fn(usize) -> Vec<(i64, R)> + Sync,
) -> Option<Witness> {
    let polys = &table.polys;
    let max = table.n_max();
    if max == 0 {
        return None;
    }
    first_failure(max - 1, |n| {
        let lhs = polys[n].shift_up(1);
        let mut rhs: Poly<R, X> = Poly::zero();
        for (k, c) in coeffs(n) {
            if c.is_zero() {
                continue;
            }
            let idx = n as i64 + k;
            if idx < 0 {
                return Some(
                    Witness::new(Some(n as i64), &lhs, "-")
                        .with_note(format!("nonzero coefficient {c} on P_{idx}")),
                );
            }
            match polys.get(idx as usize) {
                Some(p) => rhs += &p.scale(&c),
                None => {
                    return Some(
                        Witness::new(Some(n as i64), &lhs, "-")
                            .with_note(format!("needs P_{idx} beyond N = {max}")),
                    )
                }
            }
        }
        (rhs != lhs).then(|| Witness::new(Some(n as i64), &lhs, &rhs).with_difference(&rhs - &lhs))
    })
}

/// Checks a claimed recurrence operator (already evaluated under one ordering
/// convention) against the table: `x·Pₙ = claimed·Pₙ`.
pub fn compare_recurrence<R: Coeff + Serialize>(claimed: &ShiftOperator<R>, table: &PolyTable<R>) -> CheckResult {
    let outcome = compare_recurrence_values(table, |n| {
        claimed
            .terms()
            .map(|(k, c)| (k, c.eval_int(n as i64)))
            .collect()
    });
    CheckResult::from_outcome("recurrence", format!("x P_n = ({claimed}) P_n"), outcome)
}

impl<R: Coeff + Serialize> Serialize for RecurrenceTable<R> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Row<'a, R>(usize, &'a [R]);
        impl<R: Coeff + Serialize> Serialize for Row<'_, R> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut st = s.serialize_struct("Row", 2)?;
                st.serialize_field("n", &self.0)?;
                st.serialize_field("gamma", self.1)?;
                st.end()
            }
        }
        struct Closed<'a, R>(&'a RecurrenceTable<R>);
        impl<R: Coeff + Serialize> Serialize for Closed<'_, R> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(None)?;
                for j in 0..=self.0.bandwidth {
                    m.serialize_entry(&j.to_string(), &self.0.closed_form(j))?;
                }
                m.end()
            }
        }
        let rows: Vec<Row<'_, R>> = self.gammas.iter().enumerate().map(|(n, g)| Row(n, g)).collect();
        let mut st = serializer.serialize_struct("RecurrenceTable", 3)?;
        st.serialize_field("bandwidth", &self.bandwidth)?;
        st.serialize_field("closed_forms", &Closed(self))?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}
