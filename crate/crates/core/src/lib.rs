//! Numerical laboratory for heat and Poisson semigroup kernels and the
//! maximal-regularity operator `K f(t) = ∫_0^t ∂_t T_{t−s} f(s) ds`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering;
pub mod error;
pub mod field;
pub mod kernels;
pub mod operators;
pub mod quad;
pub mod regularity_lab;
pub mod specfun;
pub mod spectral_oracle;
pub mod transference;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
