//! Differential operators `Σ pᵢ(x)∂ⁱ` with polynomial coefficients.
//!
//! Operators are kept in normal order (x-coefficients left of ∂-powers).
//! Composition uses the Leibniz rewrite `∂ⁱ p = Σₖ C(i,k) p⁽ᵏ⁾ ∂ⁱ⁻ᵏ`.
//! Besides the algebra itself this module provides the two exponentials
//! the constructions rest on: `exp(Q)` acting on polynomials and
//! `exp(ad Q)` acting on operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cancel::CancelToken;
use crate::error::{Error, Result};
use crate::ring::{Coeff, FormalPoly, Param, Poly, QPoly, Rat, X};

/// Normal-ordered differential operator; stored coefficients are nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffOperator<R> {
    terms: BTreeMap<usize, Poly<R, X>>,
}

impl<R: Coeff> DiffOperator<R> {
    pub fn zero() -> Self {
        DiffOperator {
            terms: BTreeMap::new(),
        }
    }

    pub fn identity() -> Self {
        Self::mul_by(Poly::one())
    }

    /// Multiplication by the polynomial `p(x)`.
    pub fn mul_by(p: Poly<R, X>) -> Self {
        Self::from_terms([(0, p)])
    }

    pub fn constant(c: R) -> Self {
        Self::mul_by(Poly::constant(c))
    }

    /// Multiplication by x.
    pub fn x() -> Self {
        Self::mul_by(Poly::var())
    }

    /// The derivation ∂.
    pub fn d() -> Self {
        Self::monomial(R::one(), 0, 1)
    }

    /// `c·xᵃ∂ⁱ`
    pub fn monomial(c: R, x_power: usize, order: usize) -> Self {
        Self::from_terms([(order, Poly::monomial(c, x_power))])
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (usize, Poly<R, X>)>) -> Self {
        let mut terms: BTreeMap<usize, Poly<R, X>> = BTreeMap::new();
        for (i, p) in iter {
            if p.is_zero() {
                continue;
            }
            let slot = terms.entry(i).or_insert_with(Poly::zero);
            *slot += &p;
            if slot.is_zero() {
                terms.remove(&i);
            }
        }
        DiffOperator { terms }
    }

    /// `(order, coefficient)` pairs in ascending order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (usize, &Poly<R, X>)> {
        self.terms.iter().map(|(i, p)| (*i, p))
    }

    pub fn coeff(&self, order: usize) -> Option<&Poly<R, X>> {
        self.terms.get(&order)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    /// Highest power of x among the coefficients.
    pub fn x_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(Poly::degree).max()
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(i, p)| (*i, p.scale(c))))
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(i, p)| (*i, p.scale_rat(r))))
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        compose(self, rhs)
    }

    /// Coefficientwise ring change, e.g. specializing parameters.
    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> DiffOperator<S> {
        DiffOperator::from_terms(self.terms.iter().map(|(i, p)| (*i, p.map(&f))))
    }

    pub fn try_map<S: Coeff, E>(
        &self,
        f: impl Fn(&R) -> std::result::Result<S, E>,
    ) -> std::result::Result<DiffOperator<S>, E> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (i, p) in &self.terms {
            out.push((*i, p.try_map(&f)?));
        }
        Ok(DiffOperator::from_terms(out))
    }

    pub fn params_mentioned(&self) -> BTreeSet<Param> {
        self.terms
            .values()
            .flat_map(Poly::params_mentioned)
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..e {
            acc = compose(&acc, self);
        }
        acc
    }
}

/// Normal form of `a∘b`.
pub fn compose<R: Coeff>(a: &DiffOperator<R>, b: &DiffOperator<R>) -> DiffOperator<R> {
    let mut out: BTreeMap<usize, Poly<R, X>> = BTreeMap::new();
    for (&j, bj) in &b.terms {
        // derivatives of b_j, computed once per j
        let max_i = a.order().unwrap_or(0);
        let mut derivs = Vec::with_capacity(max_i + 1);
        let mut cur = bj.clone();
        for _ in 0..=max_i {
            if cur.is_zero() {
                break;
            }
            let next = cur.derivative();
            derivs.push(cur);
            cur = next;
        }
        for (&i, ai) in &a.terms {
            for (k, dk) in derivs.iter().enumerate().take(i + 1) {
                let binom = Rat::binomial(i as u64, k as u64);
                let term = (ai * dk).scale_rat(&binom);
                let slot = out.entry(i - k + j).or_insert_with(Poly::zero);
                *slot += &term;
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    DiffOperator { terms: out }
}

/// `[a, b] = a∘b − b∘a`
pub fn commutator<R: Coeff>(a: &DiffOperator<R>, b: &DiffOperator<R>) -> DiffOperator<R> {
    &compose(a, b) - &compose(b, a)
}

/// The action of `a` on the polynomial `p`.
pub fn apply<R: Coeff>(a: &DiffOperator<R>, p: &Poly<R, X>) -> Poly<R, X> {
    let Some(pdeg) = p.degree() else {
        return Poly::zero();
    };
    let top = pdeg + a.x_degree().unwrap_or(0);
    let mut out = vec![R::zero(); top + 1];
    for (&i, ai) in &a.terms {
        for (k, c) in p.terms() {
            if k < i {
                continue;
            }
            let v = c.scale(&crate::ring::falling_factorial(k as i64, i));
            for (j, aj) in ai.terms() {
                out[k - i + j] += &aj.mul_ref(&v);
            }
        }
    }
    Poly::from_coeffs(out)
}

/// Guard for [`exp_apply`]: one step per degree plus the terminating step.
pub fn default_exp_guard<R: Coeff>(p: &Poly<R, X>) -> usize {
    p.degree().unwrap_or(0) + 1
}

/// Guard for [`ad_exp`], generous relative to the nilpotency indices that
/// occur for the family generators and their short products.
pub fn default_ad_guard<R: Coeff>(q: &DiffOperator<R>, a: &DiffOperator<R>) -> usize {
    let oq = q.order().unwrap_or(0);
    let oa = a.order().unwrap_or(0) + a.x_degree().unwrap_or(0);
    ((oa + oq) * (oq + 2)).max(4)
}

/// `Σₘ Qᵐp/m!`, requiring every application of `Q` to strictly lower the
/// degree.
pub fn exp_apply<R: Coeff>(q: &DiffOperator<R>, p: &Poly<R, X>, guard: usize) -> Result<Poly<R, X>> {
    exp_apply_with(q, p, guard, None)
}

pub fn exp_apply_with<R: Coeff>(
    q: &DiffOperator<R>,
    p: &Poly<R, X>,
    guard: usize,
    cancel: Option<&CancelToken>,
) -> Result<Poly<R, X>> {
    let mut result = p.clone();
    let mut term = p.clone();
    for m in 1..=guard {
        if cancel.is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        let before = match term.degree() {
            Some(d) => d,
            None => return Ok(result),
        };
        term = apply(q, &term).scale_rat(&Rat::new(1, m as i64));
        match term.degree() {
            None => return Ok(result),
            Some(after) if after >= before => {
                return Err(Error::DegreeNotLowered {
                    step: m,
                    before,
                    after,
                })
            }
            Some(_) => result += &term,
        }
    }
    if term.is_zero() {
        Ok(result)
    } else {
        Err(Error::GuardExceeded { guard })
    }
}

/// `ad_Qᵏ(A)` for k = 0, 1, … up to the last nonzero power.
pub fn ad_powers<R: Coeff>(
    q: &DiffOperator<R>,
    a: &DiffOperator<R>,
    guard: usize,
    cancel: Option<&CancelToken>,
) -> Result<Vec<DiffOperator<R>>> {
    let mut out = Vec::new();
    if a.is_zero() {
        return Ok(out);
    }
    out.push(a.clone());
    for _ in 1..=guard {
        if cancel.is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        let next = commutator(q, out.last().expect("nonempty"));
        if next.is_zero() {
            return Ok(out);
        }
        out.push(next);
    }
    Err(Error::GuardExceeded { guard })
}

/// `σ(A) = Σₖ ad_Qᵏ(A)/k!`, the inner automorphism `exp(ad Q)`.
pub fn ad_exp<R: Coeff>(q: &DiffOperator<R>, a: &DiffOperator<R>, guard: usize) -> Result<DiffOperator<R>> {
    ad_exp_with(q, a, guard, None)
}

pub fn ad_exp_with<R: Coeff>(
    q: &DiffOperator<R>,
    a: &DiffOperator<R>,
    guard: usize,
    cancel: Option<&CancelToken>,
) -> Result<DiffOperator<R>> {
    let powers = ad_powers(q, a, guard, cancel)?;
    let mut acc = DiffOperator::zero();
    for (k, t) in powers.iter().enumerate() {
        acc = &acc + &t.scale_rat(&Rat::factorial(k as u64).recip());
    }
    Ok(acc)
}

/// `q(B)` by Horner's rule in the operator algebra; `q` may have a constant term.
pub fn poly_of_op<R: Coeff>(q: &FormalPoly, b: &DiffOperator<R>) -> DiffOperator<R> {
    let mut acc = DiffOperator::zero();
    for c in q.coeffs().iter().rev() {
        acc = compose(&acc, b);
        if !c.is_zero() {
            acc = &acc + &DiffOperator::constant(R::from_rat(c));
        }
    }
    acc
}

pub fn qpoly_of_op<R: Coeff>(q: &QPoly, b: &DiffOperator<R>) -> DiffOperator<R> {
    poly_of_op(q.as_formal(), b)
}

impl<R: Coeff> Add<&DiffOperator<R>> for &DiffOperator<R> {
    type Output = DiffOperator<R>;
    fn add(self, rhs: &DiffOperator<R>) -> DiffOperator<R> {
        DiffOperator::from_terms(
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(i, p)| (*i, p.clone())),
        )
    }
}

impl<R: Coeff> Sub<&DiffOperator<R>> for &DiffOperator<R> {
    type Output = DiffOperator<R>;
    fn sub(self, rhs: &DiffOperator<R>) -> DiffOperator<R> {
        self + &(-rhs)
    }
}

impl<R: Coeff> Neg for &DiffOperator<R> {
    type Output = DiffOperator<R>;
    fn neg(self) -> DiffOperator<R> {
        DiffOperator {
            terms: self.terms.iter().map(|(i, p)| (*i, -p)).collect(),
        }
    }
}

impl<R: Coeff> Mul<&DiffOperator<R>> for &DiffOperator<R> {
    type Output = DiffOperator<R>;
    fn mul(self, rhs: &DiffOperator<R>) -> DiffOperator<R> {
        compose(self, rhs)
    }
}

macro_rules! owned_op_binop {
    ($tr:ident, $method:ident) => {
        impl<R: Coeff> $tr<DiffOperator<R>> for DiffOperator<R> {
            type Output = DiffOperator<R>;
            fn $method(self, rhs: DiffOperator<R>) -> DiffOperator<R> {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_op_binop!(Add, add);
owned_op_binop!(Sub, sub);
owned_op_binop!(Mul, mul);

impl<R: Coeff> Zero for DiffOperator<R> {
    fn zero() -> Self {
        DiffOperator::zero()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<R: Coeff> fmt::Display for DiffOperator<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&i, p) in self.terms.iter().rev() {
            for (a, c) in p.terms().rev() {
                let mut unit = match a {
                    0 => String::new(),
                    1 => "x".to_string(),
                    _ => format!("x^{a}"),
                };
                let d = match i {
                    0 => String::new(),
                    1 => "d".to_string(),
                    _ => format!("d^{i}"),
                };
                if !d.is_empty() {
                    if !unit.is_empty() {
                        unit.push('*');
                    }
                    unit.push_str(&d);
                }
                crate::ring::fmt_coeff_term(f, first, &c.to_string(), &unit)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl<R: Coeff> fmt::Debug for DiffOperator<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct DiffTerm<P> {
    order: usize,
    coeff: P,
}

/// JSON form: `[{"order": i, "coeff": <polynomial in x>}]`, ascending order.
impl<R: Coeff + Serialize> Serialize for DiffOperator<R> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<DiffTerm<&Poly<R, X>>> = self
            .terms
            .iter()
            .map(|(order, coeff)| DiffTerm {
                order: *order,
                coeff,
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de, R: Coeff + Deserialize<'de>> Deserialize<'de> for DiffOperator<R> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<DiffTerm<Poly<R, X>>>::deserialize(deserializer)?;
        Ok(DiffOperator::from_terms(
            terms.into_iter().map(|t| (t.order, t.coeff)),
        ))
    }
}
