//! Angular-radial modelling of multivariate extremes.
//!
//! The crate covers generalized polar coordinates built from star-shaped
//! gauges, a catalog of marginal distributions and copulas, exact
//! angular-radial densities, semi-parametric angular-radial (SPAR) tail
//! models with their limit sets, and tail-order diagnostics.
#![no_std]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod margins;
pub mod copulas;
pub mod ardensity;
pub mod asymptotics;
pub mod spar;
pub mod quad;
pub mod roots;
pub mod special;

pub use error::{Error, Result};
