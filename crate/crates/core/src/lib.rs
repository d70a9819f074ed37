//! Constructive decompositions in finite-dimensional matrix algebras over
//! the complex numbers:
//!
//! * invertible elements conjugate to their inverse, written as products of
//!   two involutions ([`decomp::bireflectional_decompose`]);
//! * elements conjugate to their negative, written as sums of two
//!   square-zero elements ([`decomp::square_zero_decompose`]);
//! * unitary elements of an algebra with linear involution, conjugated to
//!   their inverse by a unitary of order dividing four
//!   ([`staru::unitary_fourth_root_conjugator`]).
//!
//! All square roots, inverses and idempotents are computed as polynomials
//! in the relevant element, so every result stays inside the supplied
//! algebra.

pub mod algebra;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod fixtures;
pub mod hensel;
pub mod json;
pub mod matrix;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod schur;
pub mod staru;

pub use algebra::{algebra_from_span, AlgebraElement, AlgebraRep};
pub use error::{Error, Result};
pub use matrix::{eigen_clusters, kernel_basis, minimal_polynomial, EigenClusterReport, Matrix};
pub use poly::Poly;
pub use scalar::{Scalar, TolerancePolicy};
