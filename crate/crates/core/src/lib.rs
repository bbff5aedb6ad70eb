//! Simulation laboratory for the one-dimensional drift-diffusion equation
//!
//! ```text
//! ∂t n − ∂xx n = n(t,0)·∂x n,   x > 0,
//! ∂x n(t,0) + n(t,0)² = 0,
//! ```
//!
//! whose mass `M` decides between self-similar decay (`M < 1`), a family of
//! exponential steady states (`M = 1`) and finite-time blow-up (`M > 1`).

pub mod error;
pub mod functionals;
pub mod grid;
pub mod harness;
pub mod integrated;
pub mod profiles;
pub mod quadrature;
pub mod rescale;
pub mod solver;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{DensityField, Grid};
