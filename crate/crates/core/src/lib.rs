//! Finite quantum graphs over δ-forms.
//!
//! The crate builds quantum sets from block data, checks Schur idempotents
//! and their flags, computes Laplacian topology and 1/2/3-point regularity,
//! deforms graphs by bubbling along central-type group data, and builds
//! symmetric spin models with their braid-closure link invariants.
//!
//! Linear algebra lives in [`tensor_core`] and is generic over the scalar
//! field; the domain modules run in complex double precision through the
//! [`CMat`] alias.

pub mod bubbling;
pub mod cli;
pub mod constructors;
pub mod error;
pub mod knots;
pub mod quantum_set;
pub mod regularity;
pub mod render;
pub mod schur_algebra;
pub mod spin;
pub mod tensor_core;
pub mod topology;

pub use error::{QglError, Result};
pub use quantum_set::QuantumSet;
pub use schur_algebra::QuantumGraph;
pub use tensor_core::{Matrix, Scalar, Tolerance};

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
/// Complex double-precision matrix used by every domain module.
pub type CMat = Matrix<C64>;
pub type CMat32 = Matrix<C32>;
pub type RMat = Matrix<f64>;
pub type RMat32 = Matrix<f32>;
/// Exact rationals for hard-coded catalog entries.
pub type Q64 = num_rational::Ratio<i64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}
