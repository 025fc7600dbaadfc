//! Dense univariate polynomials over a [`Coeff`] ring, tagged by variable.

use std::collections::BTreeSet;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Coeff, Param, Rat};
use crate::error::Error;

/// Marker for the variable a polynomial is written in.
pub trait Var: Copy + Default + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    const NAME: &'static str;
}

/// The continuous variable x.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct X;

/// The discrete index variable n.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct N;

/// An abstract indeterminate, substituted later by an operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Formal;

impl Var for X {
    const NAME: &'static str = "x";
}

impl Var for N {
    const NAME: &'static str = "n";
}

impl Var for Formal {
    const NAME: &'static str = "X";
}

/// `Σ cₖ vᵏ` with no trailing zero coefficients; the zero polynomial has no
/// coefficients and degree `None`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<R, V> {
    coeffs: Vec<R>,
    var: PhantomData<V>,
}

/// Formal polynomial over ℚ; constant term allowed.
pub type FormalPoly = Poly<Rat, Formal>;

impl<R: Coeff, V: Var> Poly<R, V> {
    pub fn zero() -> Self {
        Poly {
            coeffs: Vec::new(),
            var: PhantomData,
        }
    }

    pub fn one() -> Self {
        Self::constant(R::one())
    }

    pub fn constant(c: R) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c·vᵏ`
    pub fn monomial(c: R, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![R::zero(); k + 1];
        coeffs[k] = c;
        Poly {
            coeffs,
            var: PhantomData,
        }
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::monomial(R::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly {
            coeffs,
            var: PhantomData,
        }
    }

    /// Builds from `(coefficient, power)` pairs; repeated powers add up.
    pub fn from_terms(terms: impl IntoIterator<Item = (R, usize)>) -> Self {
        let mut coeffs: Vec<R> = Vec::new();
        for (c, k) in terms {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, R::zero());
            }
            coeffs[k] += &c;
        }
        Self::from_coeffs(coeffs)
    }

    /// Coefficients from the constant term upward.
    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&R> {
        self.coeffs.get(k)
    }

    /// Coefficient of `vᵏ`, zero past the degree.
    pub fn coeff_or_zero(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Nonzero `(power, coefficient)` pairs in ascending order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (usize, &R)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn scale(&self, c: &R) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a.scale(r)).collect())
    }

    /// Multiplies by `vᵏ`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![R::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly {
            coeffs,
            var: PhantomData,
        }
    }

    pub fn derivative(&self) -> Self {
        self.nth_derivative(1)
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(order)
            .map(|(k, c)| {
                if c.is_zero() {
                    R::zero()
                } else {
                    c.scale(&falling_factorial(k as i64, order))
                }
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn eval(&self, at: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(at);
            acc += c;
        }
        acc
    }

    /// Evaluation at an integer point.
    pub fn eval_int(&self, at: i64) -> R {
        let at = Rat::from(at);
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(&at);
            acc += c;
        }
        acc
    }

    /// The translate `p(v + k)`.
    pub fn shift(&self, k: i64) -> Self {
        if k == 0 || self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let kr = Rat::from(k);
        let mut acc: Vec<R> = Vec::new();
        for c in self.coeffs.iter().rev() {
            // acc ← acc·(v + k) + c
            let mut next = vec![R::zero(); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                next[i + 1] += a;
                next[i] += &a.scale(&kr);
            }
            next[0] += c;
            acc = next;
        }
        Self::from_coeffs(acc)
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> Poly<S, V> {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<S: Coeff, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Poly<S, V>, E> {
        Ok(Poly::from_coeffs(
            self.coeffs.iter().map(f).collect::<Result<_, _>>()?,
        ))
    }

    /// Same coefficients read in another variable.
    pub fn rename<W: Var>(&self) -> Poly<R, W> {
        Poly {
            coeffs: self.coeffs.clone(),
            var: PhantomData,
        }
    }

    pub fn params_mentioned(&self) -> BTreeSet<Param> {
        self.coeffs
            .iter()
            .flat_map(|c| c.params_mentioned())
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<R: Coeff> Poly<R, N> {
    /// Falling factorial `n(n−1)···(n−k+1)` as a polynomial in n.
    pub fn falling(k: usize) -> Self {
        let mut acc = Self::one();
        for i in 0..k {
            let factor = Self::from_coeffs(vec![R::from_i64(-(i as i64)), R::one()]);
            acc = &acc * &factor;
        }
        acc
    }
}

/// `k(k−1)···(k−m+1)` as a rational.
pub(crate) fn falling_factorial(k: i64, m: usize) -> Rat {
    let mut acc = 1i128;
    let mut big: Option<Rat> = None;
    for i in 0..m as i64 {
        let f = (k - i) as i128;
        match big.as_mut() {
            Some(b) => *b = &*b * &Rat::from((k - i) as i64),
            None => match acc.checked_mul(f) {
                Some(v) => acc = v,
                None => {
                    let mut b = Rat::from_integer(num_bigint::BigInt::from(acc));
                    b = &b * &Rat::from((k - i) as i64);
                    big = Some(b);
                }
            },
        }
    }
    big.unwrap_or_else(|| Rat::from_integer(num_bigint::BigInt::from(acc)))
}

impl<R: Coeff, V: Var> Zero for Poly<R, V> {
    fn zero() -> Self {
        Poly::zero()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<R: Coeff, V: Var> One for Poly<R, V> {
    fn one() -> Self {
        Poly::one()
    }
}

impl<R: Coeff, V: Var> AddAssign<&Poly<R, V>> for Poly<R, V> {
    fn add_assign(&mut self, rhs: &Poly<R, V>) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), R::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl<R: Coeff, V: Var> SubAssign<&Poly<R, V>> for Poly<R, V> {
    fn sub_assign(&mut self, rhs: &Poly<R, V>) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), R::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a -= b;
            }
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl<R: Coeff, V: Var> Add<&Poly<R, V>> for &Poly<R, V> {
    type Output = Poly<R, V>;
    fn add(self, rhs: &Poly<R, V>) -> Poly<R, V> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<R: Coeff, V: Var> Sub<&Poly<R, V>> for &Poly<R, V> {
    type Output = Poly<R, V>;
    fn sub(self, rhs: &Poly<R, V>) -> Poly<R, V> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<R: Coeff, V: Var> Mul<&Poly<R, V>> for &Poly<R, V> {
    type Output = Poly<R, V>;
    fn mul(self, rhs: &Poly<R, V>) -> Poly<R, V> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.terms() {
            for (j, b) in rhs.terms() {
                coeffs[i + j] += &a.mul_ref(b);
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl<R: Coeff, V: Var> Neg for &Poly<R, V> {
    type Output = Poly<R, V>;
    fn neg(self) -> Poly<R, V> {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            var: PhantomData,
        }
    }
}

impl<R: Coeff, V: Var> Neg for Poly<R, V> {
    type Output = Poly<R, V>;
    fn neg(self) -> Poly<R, V> {
        -&self
    }
}

macro_rules! owned_poly_binop {
    ($tr:ident, $method:ident) => {
        impl<R: Coeff, V: Var> $tr<Poly<R, V>> for Poly<R, V> {
            type Output = Poly<R, V>;
            fn $method(self, rhs: Poly<R, V>) -> Poly<R, V> {
                (&self).$method(&rhs)
            }
        }
        impl<R: Coeff, V: Var> $tr<&Poly<R, V>> for Poly<R, V> {
            type Output = Poly<R, V>;
            fn $method(self, rhs: &Poly<R, V>) -> Poly<R, V> {
                (&self).$method(rhs)
            }
        }
    };
}

owned_poly_binop!(Add, add);
owned_poly_binop!(Sub, sub);
owned_poly_binop!(Mul, mul);

/// Writes one `coeff*unit` summand, parenthesizing compound coefficients.
pub(crate) fn fmt_coeff_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    coeff: &str,
    unit: &str,
) -> fmt::Result {
    let compound = coeff[1..].contains(" + ") || coeff[1..].contains(" - ");
    let (neg, body) = match coeff.strip_prefix('-') {
        Some(rest) if !compound => (true, rest),
        _ => (false, coeff),
    };
    match (first, neg) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    if unit.is_empty() {
        if compound && !first {
            write!(f, "({body})")
        } else {
            f.write_str(body)
        }
    } else if body == "1" {
        f.write_str(unit)
    } else if compound {
        write!(f, "({body})*{unit}")
    } else {
        write!(f, "{body}*{unit}")
    }
}

impl<R: Coeff, V: Var> fmt::Display for Poly<R, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms().rev().enumerate() {
            let unit = match k {
                0 => String::new(),
                1 => V::NAME.to_string(),
                _ => format!("{}^{k}", V::NAME),
            };
            fmt_coeff_term(f, i == 0, &c.to_string(), &unit)?;
        }
        Ok(())
    }
}

impl<R: Coeff, V: Var> fmt::Debug for Poly<R, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTerm<R> {
    power: usize,
    coeff: R,
}

/// JSON form: nonzero terms `{"power": k, "coeff": c}` in descending power.
impl<R: Coeff + Serialize, V: Var> Serialize for Poly<R, V> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<PolyTerm<&R>> = self
            .terms()
            .rev()
            .map(|(power, coeff)| PolyTerm { power, coeff })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de, R: Coeff + Deserialize<'de>, V: Var> Deserialize<'de> for Poly<R, V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<PolyTerm<R>>::deserialize(deserializer)?;
        Ok(Poly::from_terms(terms.into_iter().map(|t| (t.coeff, t.power))))
    }
}

/// A formal polynomial `q(X)` with zero constant term, the datum of the
/// automorphism `exp(ad q(B))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QPoly(FormalPoly);

impl QPoly {
    pub fn new(p: FormalPoly) -> Result<QPoly, Error> {
        match p.coeff(0) {
            Some(c) if !c.is_zero() => Err(Error::ConstantTerm(c.clone())),
            _ => Ok(QPoly(p)),
        }
    }

    /// From `(coefficient, power)` pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (Rat, usize)>) -> Result<QPoly, Error> {
        QPoly::new(FormalPoly::from_terms(terms))
    }

    /// `c·Xᵏ` for k ≥ 1.
    pub fn monomial(c: Rat, k: usize) -> Result<QPoly, Error> {
        QPoly::new(FormalPoly::monomial(c, k))
    }

    pub fn as_formal(&self) -> &FormalPoly {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The formal derivative q′; it may carry a constant term.
    pub fn derivative(&self) -> FormalPoly {
        self.0.derivative()
    }

    pub fn neg(&self) -> QPoly {
        QPoly(-&self.0)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Scalar;

    type XP = Poly<Rat, X>;

    fn r(v: i64) -> Rat {
        Rat::from(v)
    }

    #[test]
    fn qpoly_derivative_examples() {
        for k in 2..6usize {
            let q = QPoly::monomial(Rat::new(-1, k as i64), k).unwrap();
            assert_eq!(q.derivative(), FormalPoly::monomial(r(-1), k - 1));
        }
        let half_sq = QPoly::monomial(Rat::new(1, 2), 2).unwrap();
        assert_eq!(half_sq.derivative(), FormalPoly::var());
        let x = QPoly::monomial(r(1), 1).unwrap();
        assert_eq!(x.derivative(), FormalPoly::one());
    }

    #[test]
    fn constant_term_rejected() {
        assert!(QPoly::from_terms([(r(1), 0), (r(1), 2)]).is_err());
        assert!(QPoly::from_terms([(r(0), 0), (r(1), 2)]).is_ok());
    }

    #[test]
    fn zero_has_sentinel_degree() {
        assert_eq!(XP::zero().degree(), None);
        assert_eq!(XP::from_coeffs(vec![r(1), r(0), r(0)]).degree(), Some(0));
    }

    #[test]
    fn shift_matches_substitution() {
        // p(n) = n² − 3n + 2, p(n+2) = n² + n
        let p: Poly<Rat, N> = Poly::from_coeffs(vec![r(2), r(-3), r(1)]);
        assert_eq!(p.shift(2), Poly::from_coeffs(vec![r(0), r(1), r(1)]));
        for n in -3..4 {
            assert_eq!(p.shift(-1).eval_int(n), p.eval_int(n - 1));
        }
    }

    #[test]
    fn falling_factorial_poly() {
        let f: Poly<Rat, N> = Poly::falling(3);
        for n in 0..8i64 {
            assert_eq!(f.eval_int(n), r(n * (n - 1) * (n - 2)));
        }
    }

    #[test]
    fn derivative_of_symbolic_poly() {
        let beta = Scalar::var(Param::Beta);
        let p: Poly<Scalar, X> =
            Poly::from_terms([(beta.clone(), 3), (Scalar::from(2), 1), (beta, 0)]);
        let d2 = p.nth_derivative(2);
        assert_eq!(d2, Poly::monomial(Scalar::var(Param::Beta).scale_rat(&r(6)), 1));
    }

    #[test]
    fn display_forms() {
        let beta = Scalar::var(Param::Beta);
        let p: Poly<Scalar, X> = Poly::from_terms([
            (Scalar::one(), 3),
            (&(&beta * &beta) + &beta, 1),
            (Scalar::from(-2), 0),
        ]);
        assert_eq!(p.to_string(), "x^3 + (beta^2 + beta)*x - 2");
        let q: Poly<Rat, N> = Poly::from_coeffs(vec![r(0), r(-1), Rat::new(1, 2)]);
        assert_eq!(q.to_string(), "1/2*n^2 - n");
    }

    #[test]
    fn json_terms_descending() {
        let p: XP = Poly::from_coeffs(vec![r(-1), r(0), r(1)]);
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"[{"power":2,"coeff":"1"},{"power":0,"coeff":"-1"}]"#);
        assert_eq!(serde_json::from_str::<XP>(&j).unwrap(), p);
    }
}
