//! Multiprecision evaluation of generalized hypergeometric series, the
//! Fox-Wright function and Ramanujan-type Fourier cosine integrals of the
//! form `∫ x^(υ-1) cos(xy) / (e^(b√x) - 1)^λ dx`, together with an
//! independent double-precision quadrature oracle.

pub mod error;
pub mod foxwright;
pub mod hypergeom;
pub mod identities;
pub mod precision;
pub mod ramanujan;
pub mod seriestools;
pub mod transforms;

pub use error::{Error, Result};
pub use precision::{ExactReal, PrecisionComplex, PrecisionReal};
