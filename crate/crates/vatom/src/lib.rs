//! Spontaneous emission of a V-type three-level atom coupled to the band edge
//! of a photonic crystal.
//!
//! The analytic solution is a finite sum of dressed-state terms built from the
//! roots of a quartic (anisotropic dispersion) or quintic (isotropic) in
//! `X = sqrt(s)`. An independent discretized-reservoir simulation and a
//! fractional-Langevin residual check are provided for cross-validation.
//!
//! Units: the coupling constant is 1. Detunings `delta1`, `delta2` and time
//! `tau` are plain numbers in those units.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dressed;
pub mod error;
pub mod evolve;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod polyroot;
pub mod report;
pub mod specfun;

pub use dressed::{DressedMode, DressedSpectrum, InitialState, ModeKind, Regime};
pub use error::{Error, Result};
pub use evolve::TimeSeries;
pub use model::{ModelKind, ModelParams};
pub use num_complex::Complex64;
