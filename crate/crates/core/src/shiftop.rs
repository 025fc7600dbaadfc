//! Difference operators `Σₖ cₖ(n)Tᵏ` in the discrete variable n.
//!
//! `T` shifts sequences forward, `(Tf)(n) = f(n+1)`, so `Tᵏ c(n) = c(n+k) Tᵏ`.
//! Composition `S₁∘S₂` means "apply S₂, then S₁" on sequences.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diffop::DiffOperator;
use crate::error::{Error, Result};
use crate::ring::{falling_factorial, Coeff, FormalPoly, Poly, N, X};

#[derive(Clone, PartialEq, Eq)]
pub struct ShiftOperator<R> {
    terms: BTreeMap<i64, Poly<R, N>>,
}

impl<R: Coeff> ShiftOperator<R> {
    pub fn zero() -> Self {
        ShiftOperator {
            terms: BTreeMap::new(),
        }
    }

    pub fn identity() -> Self {
        Self::mul_by(Poly::one())
    }

    /// Multiplication by `c(n)`.
    pub fn mul_by(c: Poly<R, N>) -> Self {
        Self::from_terms([(0, c)])
    }

    pub fn constant(c: R) -> Self {
        Self::mul_by(Poly::constant(c))
    }

    /// Multiplication by n.
    pub fn n() -> Self {
        Self::mul_by(Poly::var())
    }

    /// `Tᵏ` for any integer k.
    pub fn t_pow(k: i64) -> Self {
        Self::from_terms([(k, Poly::one())])
    }

    pub fn t() -> Self {
        Self::t_pow(1)
    }

    pub fn t_inv() -> Self {
        Self::t_pow(-1)
    }

    /// `c(n)Tᵏ`
    pub fn term(c: Poly<R, N>, offset: i64) -> Self {
        Self::from_terms([(offset, c)])
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (i64, Poly<R, N>)>) -> Self {
        let mut terms: BTreeMap<i64, Poly<R, N>> = BTreeMap::new();
        for (k, c) in iter {
            if c.is_zero() {
                continue;
            }
            let slot = terms.entry(k).or_insert_with(Poly::zero);
            *slot += &c;
        }
        terms.retain(|_, c| !c.is_zero());
        ShiftOperator { terms }
    }

    /// `(offset, coefficient)` pairs, ascending offset.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Poly<R, N>)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient of `Tᵏ`, zero when absent.
    pub fn coeff(&self, offset: i64) -> Poly<R, N> {
        self.terms.get(&offset).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_offset(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_offset(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (*k, p.scale(c))))
    }

    pub fn scale_rat(&self, r: &crate::ring::Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (*k, p.scale_rat(r))))
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        shift_compose(self, rhs)
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> ShiftOperator<S> {
        ShiftOperator::from_terms(self.terms.iter().map(|(k, p)| (*k, p.map(&f))))
    }

    /// `(Sf)(n)` for a scalar sequence `f`.
    pub fn apply_to_sequence(&self, n: i64, f: impl Fn(i64) -> R) -> R {
        let mut acc = R::zero();
        for (&k, c) in &self.terms {
            let ck = c.eval_int(n);
            if !ck.is_zero() {
                acc += &ck.mul_ref(&f(n + k));
            }
        }
        acc
    }

    /// Offsets whose coefficient is nonzero at `n` but reach below index 0.
    pub fn negative_support(&self, n: i64) -> Vec<i64> {
        self.terms
            .iter()
            .filter(|(&k, c)| n + k < 0 && !c.eval_int(n).is_zero())
            .map(|(&k, _)| k)
            .collect()
    }
}

/// Normal form of `a∘b` via `Tᵏ c(n) = c(n+k) Tᵏ`.
pub fn shift_compose<R: Coeff>(a: &ShiftOperator<R>, b: &ShiftOperator<R>) -> ShiftOperator<R> {
    let mut out: Vec<(i64, Poly<R, N>)> = Vec::with_capacity(a.terms.len() * b.terms.len());
    for (&k, ak) in &a.terms {
        for (&j, bj) in &b.terms {
            out.push((k + j, ak * &bj.shift(k)));
        }
    }
    ShiftOperator::from_terms(out)
}

/// `q(G)` by Horner's rule; `q` may carry a constant term.
pub fn qpoly_at_shiftop<R: Coeff>(q: &FormalPoly, g: &ShiftOperator<R>) -> ShiftOperator<R> {
    let mut acc = ShiftOperator::zero();
    for c in q.coeffs().iter().rev() {
        acc = shift_compose(&acc, g);
        if !c.is_zero() {
            acc = &acc + &ShiftOperator::constant(R::from_rat(c));
        }
    }
    acc
}

/// `Σₖ cₖ(n)·P_{n+k}`; indices below 0 contribute nothing.
pub fn apply_to_table<R: Coeff>(
    s: &ShiftOperator<R>,
    table: &[Poly<R, X>],
    n: i64,
) -> Result<Poly<R, X>> {
    let max = table.len().saturating_sub(1);
    let mut acc = Poly::zero();
    for (&k, c) in &s.terms {
        let ck = c.eval_int(n);
        if ck.is_zero() {
            continue;
        }
        let idx = n + k;
        if idx < 0 {
            continue;
        }
        let p = table
            .get(idx as usize)
            .ok_or(Error::TableOutOfRange { index: idx, max })?;
        acc += &p.scale(&ck);
    }
    Ok(acc)
}

/// The image of a differential operator under the anti-isomorphism fixed by
/// the seed `xⁿ`: `xᵃ∂ⁱ ↦ n(n−1)···(n−i+1)·Tᵃ⁻ⁱ`.
pub fn bispectral_b<R: Coeff>(a: &DiffOperator<R>) -> ShiftOperator<R> {
    let mut out = Vec::new();
    for (i, p) in a.terms() {
        let ff: Poly<R, N> = Poly::falling(i);
        for (xa, c) in p.terms() {
            out.push((xa as i64 - i as i64, ff.scale(c)));
        }
    }
    ShiftOperator::from_terms(out)
}

/// Checks `b(A)` against `A` on the seed table `xⁿ` at one index.
pub fn seed_action_agrees<R: Coeff>(a: &DiffOperator<R>, n: usize) -> bool {
    let top = n + a.x_degree().unwrap_or(0) + 1;
    let seed: Vec<Poly<R, X>> = (0..=top).map(|m| Poly::monomial(R::one(), m)).collect();
    let lhs = crate::diffop::apply(a, &seed[n]);
    match apply_to_table(&bispectral_b(a), &seed, n as i64) {
        Ok(rhs) => rhs == lhs,
        Err(_) => false,
    }
}

/// Scalar `k(k−1)···(k−m+1)`, handy for closed-form coefficients.
pub fn falling_at<R: Coeff>(k: i64, m: usize) -> R {
    R::from_rat(&falling_factorial(k, m))
}

impl<R: Coeff> Add<&ShiftOperator<R>> for &ShiftOperator<R> {
    type Output = ShiftOperator<R>;
    fn add(self, rhs: &ShiftOperator<R>) -> ShiftOperator<R> {
        ShiftOperator::from_terms(
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(k, c)| (*k, c.clone())),
        )
    }
}

impl<R: Coeff> Sub<&ShiftOperator<R>> for &ShiftOperator<R> {
    type Output = ShiftOperator<R>;
    fn sub(self, rhs: &ShiftOperator<R>) -> ShiftOperator<R> {
        self + &(-rhs)
    }
}

impl<R: Coeff> Neg for &ShiftOperator<R> {
    type Output = ShiftOperator<R>;
    fn neg(self) -> ShiftOperator<R> {
        ShiftOperator {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl<R: Coeff> Mul<&ShiftOperator<R>> for &ShiftOperator<R> {
    type Output = ShiftOperator<R>;
    fn mul(self, rhs: &ShiftOperator<R>) -> ShiftOperator<R> {
        shift_compose(self, rhs)
    }
}

impl<R: Coeff> fmt::Display for ShiftOperator<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (&k, c)) in self.terms.iter().rev().enumerate() {
            let unit = match k {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{k}"),
            };
            crate::ring::fmt_coeff_term(f, idx == 0, &c.to_string(), &unit)?;
        }
        Ok(())
    }
}

impl<R: Coeff> fmt::Debug for ShiftOperator<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct ShiftTerm<P> {
    offset: i64,
    coeff: P,
}

/// JSON form: `[{"offset": k, "coeff": <polynomial in n>}]`, descending offset.
impl<R: Coeff + Serialize> Serialize for ShiftOperator<R> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<ShiftTerm<&Poly<R, N>>> = self
            .terms
            .iter()
            .rev()
            .map(|(offset, coeff)| ShiftTerm {
                offset: *offset,
                coeff,
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de, R: Coeff + Deserialize<'de>> Deserialize<'de> for ShiftOperator<R> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<ShiftTerm<Poly<R, N>>>::deserialize(deserializer)?;
        Ok(ShiftOperator::from_terms(
            terms.into_iter().map(|t| (t.offset, t.coeff)),
        ))
    }
}
