//! Numerical laboratory for boundary estimates of fully nonlinear elliptic
//! equations with a gradient drift `|F(0,p,x)| ≤ φ(|p|)`.
//!
//! * [`nonlinearity`] — drift profiles `φ`, `Φ_R` and their structure checks.
//! * [`harnack`] — the generalized Harnack integral functionals.
//! * [`geometry`] — planar domains: flatness, corkscrews, chains, caps.
//! * [`solver`] — monotone grid solver for Pucci-with-drift and `p(x)`-Laplace problems.
//! * [`barriers`] — radial barrier constructions and the double-exponential sharpness example.
//! * [`estimates`] — empirical verification of the boundary estimates.

// `!(x > 0.0)` is the NaN-rejecting guard used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barriers;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod harnack;
pub mod nonlinearity;
pub mod numeric;
pub mod solver;

pub use error::{Error, Result};
pub use harnack::HarnackCertificate;
pub use nonlinearity::{Nonlinearity, PhiKind, PhiTable, RescaledNonlinearity};
pub use numeric::Extended;
