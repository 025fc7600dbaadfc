//! Exact coefficient rings and univariate polynomials over them.
//!
//! Everything above this module is generic over [`Coeff`]. Two rings
//! implement it: [`Rat`] for fully numeric instantiations and [`Scalar`]
//! (polynomials in the family parameters over ℚ) for symbolic ones.

mod poly;
mod rat;
mod scalar;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{AddAssign, Neg, SubAssign};

use num_traits::{One, Zero};

pub use poly::{Formal, FormalPoly, Poly, QPoly, Var, N, X};
pub(crate) use poly::{falling_factorial, fmt_coeff_term};
pub use rat::Rat;
pub use scalar::{Monomial, Param, Scalar};

/// A commutative ring containing ℚ, exact, with cheap by-reference products.
pub trait Coeff:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + Send
    + Sync
    + 'static
{
    fn mul_ref(&self, rhs: &Self) -> Self;

    fn from_rat(r: &Rat) -> Self;

    /// Multiplies by a rational constant.
    fn scale(&self, r: &Rat) -> Self;

    /// The value of a family parameter in this ring, when it can be
    /// represented symbolically. Numeric rings return `None`.
    fn param(p: Param) -> Option<Self>;

    /// Parameters occurring in this value.
    fn params_mentioned(&self) -> BTreeSet<Param> {
        BTreeSet::new()
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rat(&Rat::from(v))
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out += rhs;
        out
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Coeff for Rat {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn scale(&self, r: &Rat) -> Self {
        self * r
    }

    fn param(_: Param) -> Option<Self> {
        None
    }

    fn from_i64(v: i64) -> Self {
        Rat::from(v)
    }
}

impl Coeff for Scalar {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn from_rat(r: &Rat) -> Self {
        Scalar::constant(r.clone())
    }

    fn scale(&self, r: &Rat) -> Self {
        self.scale_rat(r)
    }

    fn param(p: Param) -> Option<Self> {
        Some(Scalar::var(p))
    }

    fn params_mentioned(&self) -> BTreeSet<Param> {
        self.params()
    }
}
