use std::collections::BTreeSet;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{relative_l2_error, Method};
use crate::approx::{f0, f1_closed, finfinity_with_lambda, solve_lambda};
use crate::error::Result;
use crate::exact::{solve_exact, solve_f1_exact, SolverSettings};
use crate::pulse::PulseParams;

/// Cells whose exact `f` is masked on more than this fraction of samples are
/// flagged.
pub const MASKED_FRACTION_LIMIT: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Envelope, φ, N and ω are taken from here; Ω₀ and ω_c are overwritten
    /// per cell.
    pub template: PulseParams,
    /// Ω₀/ω values.
    pub x: Vec<f64>,
    /// ω_c/ω values.
    pub y: Vec<f64>,
    pub methods: BTreeSet<Method>,
    pub settings: SolverSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub omega0_ratio: f64,
    pub omegac_ratio: f64,
    pub err_f0: Option<f64>,
    pub err_f1_closed: Option<f64>,
    pub err_f1_exact: Option<f64>,
    pub err_finf: Option<f64>,
    pub lambda: Option<C64>,
    pub lambda_converged: bool,
    /// Failure and quality tags; empty for a clean cell.
    pub flags: Vec<String>,
}

impl CellResult {
    pub fn error(&self, m: Method) -> Option<f64> {
        match m {
            Method::F0 => self.err_f0,
            Method::F1Closed => self.err_f1_closed,
            Method::F1Exact => self.err_f1_exact,
            Method::FInf => self.err_finf,
            _ => None,
        }
    }
}

/// Relative L² errors over a grid of (Ω₀/ω, ω_c/ω); cells are stored
/// row-major with ω_c/ω as the outer index.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSurface {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub cells: Vec<CellResult>,
    pub template: PulseParams,
    pub settings: SolverSettings,
}

impl ErrorSurface {
    pub fn cell(&self, ix: usize, iy: usize) -> &CellResult {
        &self.cells[iy * self.x_axis.len() + ix]
    }

    /// Row-major error values for `method`, NaN where missing.
    pub fn values(&self, method: Method) -> Vec<f64> {
        self.cells
            .iter()
            .map(|c| c.error(method).unwrap_or(f64::NAN))
            .collect()
    }
}

fn tag(flags: &mut Vec<String>, what: &str, err: impl std::fmt::Display) {
    flags.push(format!("{what}:{err}").replace([',', '\n'], ";"));
}

/// Evaluates one sweep cell. Failures are recorded as flags, never
/// propagated.
pub fn compute_cell(
    template: &PulseParams,
    omega0_ratio: f64,
    omegac_ratio: f64,
    methods: &BTreeSet<Method>,
    settings: &SolverSettings,
) -> CellResult {
    let mut cell = CellResult {
        omega0_ratio,
        omegac_ratio,
        err_f0: None,
        err_f1_closed: None,
        err_f1_exact: None,
        err_finf: None,
        lambda: None,
        lambda_converged: false,
        flags: Vec::new(),
    };
    let mut p = *template;
    p.omega0 = omega0_ratio * p.omega;
    p.omega_c = omegac_ratio * p.omega;
    if let Err(e) = p.validate() {
        tag(&mut cell.flags, "params", e);
        return cell;
    }
    let exact = match solve_exact(&p, settings) {
        Ok(sol) => sol.f,
        Err(e) => {
            tag(&mut cell.flags, "exact", e);
            return cell;
        }
    };
    let masked = exact.masked_count() as f64 / exact.len() as f64;
    if masked > MASKED_FRACTION_LIMIT {
        cell.flags.push("masked_gt_5pct".into());
    }
    let k = settings.intervals;
    let mut record = |m: Method, approx: Result<crate::ComplexTrajectory>| -> Option<f64> {
        match approx.and_then(|a| relative_l2_error(&a, &exact)) {
            Ok(e) => Some(e),
            Err(e) => {
                tag(&mut cell.flags, m.name(), e);
                None
            }
        }
    };
    let err_f0 = methods
        .contains(&Method::F0)
        .then(|| record(Method::F0, f0(&p, k)))
        .flatten();
    let err_f1c = methods
        .contains(&Method::F1Closed)
        .then(|| record(Method::F1Closed, f1_closed(&p, k)))
        .flatten();
    let err_f1x = methods
        .contains(&Method::F1Exact)
        .then(|| record(Method::F1Exact, solve_f1_exact(&p, k)))
        .flatten();
    let mut err_finf = None;
    let mut lambda = None;
    let mut converged = false;
    if methods.contains(&Method::FInf) {
        match solve_lambda(&p, k) {
            Ok(lam) => {
                lambda = Some(lam.lambda);
                converged = lam.converged;
                err_finf = record(Method::FInf, finfinity_with_lambda(&p, k, lam.lambda));
            }
            Err(e) => {
                record(Method::FInf, Err(e));
            }
        }
    }
    cell.err_f0 = err_f0;
    cell.err_f1_closed = err_f1c;
    cell.err_f1_exact = err_f1x;
    cell.err_finf = err_finf;
    cell.lambda = lambda;
    cell.lambda_converged = converged;
    if methods.contains(&Method::FInf) && lambda.is_some() && !converged {
        cell.flags.push("lambda_not_converged".into());
    }
    cell
}

/// Runs every cell of the sweep on the current rayon pool. The result does
/// not depend on the pool size or scheduling.
pub fn sweep(spec: &SweepSpec) -> ErrorSurface {
    let nx = spec.x.len();
    let cells: Vec<CellResult> = (0..nx * spec.y.len())
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % nx, idx / nx);
            compute_cell(
                &spec.template,
                spec.x[ix],
                spec.y[iy],
                &spec.methods,
                &spec.settings,
            )
        })
        .collect();
    ErrorSurface {
        x_axis: spec.x.clone(),
        y_axis: spec.y.clone(),
        cells,
        template: spec.template,
        settings: spec.settings,
    }
}
