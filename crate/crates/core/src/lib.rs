//! Coherence dynamics of a two-level atom driven by a few-cycle pulse of
//! arbitrary shape.
//!
//! The crate pairs a tolerance-driven integrator of the Schrödinger equations
//! of motion with a ladder of closed-form approximations to the ratio
//! `f = C/D` that do not rely on the rotating-wave approximation, and a
//! parameter-plane sweep that measures how far each approximation strays from
//! the exact dynamics.
//!
//! Units: time is measured in units where the carrier frequency `omega` is
//! explicit (the CLI uses `omega = 1`). All frequencies are angular.

pub mod analysis;
pub mod approx;
pub mod cli;
pub mod error;
pub mod exact;
pub mod faddeeva;
pub mod grid;
pub mod ode;
pub mod pulse;
pub mod theta;

pub use error::{Error, Result};
pub use grid::ComplexTrajectory;
pub use pulse::{Envelope, PulseParams};

pub use num_complex::Complex64 as C64;
