//! Certification of stable polynomials on the polydisk as Agler denominators.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: dense complex linear algebra (Hermitian eigensolvers, PSD
//!   factorization and projection) and simultaneous polynomial root finding.
//! - [`poly`]: univariate, symmetric multi-affine and three-variable
//!   multi-affine polynomials, with stability tests.
//! - [`cd`]: the one-variable Christoffel–Darboux Gram matrix.
//! - [`agler`]: the `B` tensor, the subset-indexed matrix whose positive
//!   semidefiniteness decides the Agler property, certificate extraction and
//!   verification, the Agler radius scan and the four-variable closed form.
//! - [`kummert`]: the explicit sum-of-squares decomposition for
//!   three-variable multi-affine stable polynomials.
//! - [`cli`]: the command implementations behind the `agler` binary.

// NaN must fail positivity guards, so `!(x > 0.0)` is intentional; dense
// matrix kernels read better with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod agler;
pub mod cd;
pub mod cli;
pub mod error;
pub mod json;
pub mod kummert;
pub mod numerics;
pub mod poly;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used for every coefficient and matrix entry.
pub type ComplexScalar = Complex64;
