//! Matrix-valued orthogonal polynomials built from scalar weights.
//!
//! A weight `W = T diag(w_1, ..., w_N) T*` with `T = I + A x` and `A` a fixed
//! nilpotent pattern has an explicit orthogonal sequence `Q_n` written in
//! terms of the monic scalar sequences of the `w_i`. This crate builds that
//! sequence and checks the identities around it: orthogonality and norms,
//! three-term recurrences, second-order differential operators having `Q_n`
//! as eigenfunctions, Darboux factorizations, and order-zero symmetries.

pub mod cli_reports;
pub mod darboux;
pub mod diff_operators;
pub mod error;
pub mod irreducibility;
pub mod mat;
pub mod mvop;
pub mod matrix_poly;
pub mod poly;
pub mod scalar;
pub mod scalar_families;
pub mod weight;

pub use error::{Error, Result};
pub use mat::Mat;
pub use matrix_poly::MatrixPolynomial;
pub use mvop::MVOPSequence;
pub use poly::Poly;
pub use scalar::Scalar;
