//! Exact root counts for fully triangular polynomials over finite fields.
//!
//! A fully triangular polynomial
//! `f = Σ_{j=1}^n a_j x_1^{d_{1,j}} ... x_j^{d_{j,j}} - b` that is totally
//! *-equivalent to a linear or quadratic diagonal polynomial has a closed
//! form root count; [`counting::count_roots`] finds the applicable one and
//! falls back to enumeration otherwise. The [`oracle`] module provides the
//! independent checks (enumeration and Gauss sums).

pub mod counting;
pub mod error;
pub mod ffield;
pub mod modring;
pub mod oracle;
pub mod polyform;
pub mod quadring;
pub mod selftest;
pub mod starequiv;

pub use counting::{count_roots, BClass, CountOptions, CountReport, Method, RsProfile};
pub use error::{Error, Result};
pub use ffield::{Fe, FieldElement, FieldSpec};
pub use modring::ResidueMatrix;
pub use polyform::{classify, PolyClass, SparsePoly, Term, TriangularPoly};
pub use starequiv::{Certificate, EquivStatus};

/// Exact elements of `Q[τ]`, used by every quadratic closed form.
pub type QuadRingNumber = quadring::QuadRing<num_rational::BigRational>;

/// Double-precision elements of `Q[τ]` for quick numerical estimates.
pub type QuadRingF64 = quadring::QuadRing<f64>;

/// Gauss sums in double precision, as used by the character-sum oracle.
pub type GaussSum = oracle::GaussValue<f64>;
