//! Hermitian matrices and tuples, linear pencils, and free polynomials.

pub mod matrix;
pub mod pencil;
pub mod poly;
pub mod tuple;

pub use matrix::{kron, realify, CMat, HermitianMatrix, RMat};
pub use pencil::{LinearPencil, NormBall};
pub use poly::{words_up_to, NCPolynomial, NCWord};
pub use tuple::HermitianTuple;
