//! Exact construction and verification of vector orthogonal polynomial
//! families obtained from automorphisms `exp(ad q(B))` of small operator
//! algebras.
//!
//! The core is generic over the coefficient ring ([`ring::Coeff`]); the
//! aliases below fix it to the symbolic ring ℚ[α, β] or to plain rationals.

pub mod cancel;
pub mod diffop;
pub mod error;
pub mod families;
pub mod ring;
pub mod shiftop;
pub mod verify;

pub use cancel::CancelToken;
pub use error::{Error, Result};
pub use ring::{FormalPoly, Param, QPoly, Rat, Scalar};

/// Polynomial in x with symbolic coefficients.
pub type XPoly = ring::Poly<Scalar, ring::X>;
/// Polynomial in n with symbolic coefficients.
pub type NPoly = ring::Poly<Scalar, ring::N>;
pub type DiffOp = diffop::DiffOperator<Scalar>;

pub type ShiftOp = shiftop::ShiftOperator<Scalar>;

pub type RatXPoly = ring::Poly<Rat, ring::X>;
pub type RatNPoly = ring::Poly<Rat, ring::N>;
pub type RatDiffOp = diffop::DiffOperator<Rat>;
pub type RatShiftOp = shiftop::ShiftOperator<Rat>;
