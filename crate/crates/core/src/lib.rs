//! Sharp bounds on treatment-effect parameters when an instrument may violate
//! exclusion or exogeneity by a bounded amount.
//!
//! Every sensitivity model is indexed by `theta` in `[0, 1]`: `theta = 0` imposes
//! full independence between the instrument and the potential outcomes and
//! `theta = 1` imposes nothing. For discrete outcomes the identified sets are
//! small polytopes and every bound is a linear program ([`discrete`]). For
//! continuous outcomes the densities are approximated with a scaled Bernstein
//! sieve, which again yields finite linear programs ([`continuous`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line live in the `ivsensa` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bisection;
pub mod continuous;
pub mod discrete;
pub mod distributions;
mod error;
mod interval;
pub mod lp;
mod math;
pub mod matrix;
pub mod sensitivity;

pub use error::{Error, Result};
pub use interval::{validate_theta_grid, CurvePoint, IdentifiedInterval, SensitivityCurve};
pub use matrix::Matrix;
