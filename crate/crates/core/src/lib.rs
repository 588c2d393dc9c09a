//! Truncated power-series machinery for forward-recursive ODE hierarchies:
//! the single Riccati equation and its symmetries, the linear and nonlinear
//! Riccati-type hierarchies, non-uniqueness demonstrations with bump
//! functions, and moment hierarchies of diffusion equations.

pub mod error;
pub mod hierarchy;
pub mod linear;
pub mod moments;
pub mod nonlinear;
pub mod poly;
pub mod riccati;
pub mod scalar;
pub mod series;
pub mod uniqueness;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use series::TruncatedSeries;
