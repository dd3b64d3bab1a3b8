//! Error metric, applicability scores, the parameter-plane sweep and contour
//! extraction.

mod contour;
mod sweep;

pub use contour::{extract_contour, march_squares, Polyline};
pub use sweep::{compute_cell, sweep, CellResult, ErrorSurface, SweepSpec, MASKED_FRACTION_LIMIT};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::ComplexTrajectory;
use crate::pulse::PulseParams;

/// `‖approx − exact‖₂ / ‖exact‖₂` with trapezoid weights; samples masked in
/// either trajectory are excluded from both norms.
pub fn relative_l2_error(approx: &ComplexTrajectory, exact: &ComplexTrajectory) -> Result<f64> {
    if !approx.same_grid(exact) {
        return Err(Error::GridMismatch);
    }
    let both = approx.mask().is_some() || exact.mask().is_some();
    let reference = if both {
        let mask: Vec<bool> = (0..exact.len())
            .map(|i| approx.is_masked(i) || exact.is_masked(i))
            .collect();
        exact.clone().with_mask(mask)
    } else {
        exact.clone()
    };
    let norm = reference.l2_norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(approx.l2_distance(&reference)? / norm)
}

/// Left-hand side of the far-off-resonance applicability condition.
///
/// One-sided: `(ω/ω_c)² + (Ω₀/ω)²`. Two-sided:
/// `min((ω_c/ω)², (ω/ω_c)²) + min((Ω₀/ω)², (ω/Ω₀)²)`.
pub fn applicability(p: &PulseParams, two_sided: bool) -> f64 {
    let carrier = p.omega_c / p.omega;
    let field = p.omega0 / p.omega;
    if two_sided {
        let sq = |r: f64| (r * r).min(1.0 / (r * r));
        sq(carrier) + sq(field)
    } else {
        1.0 / (carrier * carrier) + field * field
    }
}

/// Solution methods that can be compared against the exact dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    F0,
    F1Closed,
    F1Exact,
    FInf,
    Rwa,
    ZSeries,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::F0,
        Method::F1Closed,
        Method::F1Exact,
        Method::FInf,
        Method::Rwa,
        Method::ZSeries,
    ];

    /// Methods with a column in the error-surface CSV.
    pub const SURFACE: [Method; 4] = [Method::F0, Method::F1Closed, Method::F1Exact, Method::FInf];

    pub fn name(self) -> &'static str {
        match self {
            Method::F0 => "f0",
            Method::F1Closed => "f1closed",
            Method::F1Exact => "f1exact",
            Method::FInf => "finf",
            Method::Rwa => "rwa",
            Method::ZSeries => "zseries",
        }
    }

    /// Error column in the surface CSV.
    pub fn surface_column(self) -> Option<&'static str> {
        match self {
            Method::F0 => Some("err_f0"),
            Method::F1Closed => Some("err_f1_closed"),
            Method::F1Exact => Some("err_f1_exact"),
            Method::FInf => Some("err_finf"),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method '{s}'"))
    }
}
