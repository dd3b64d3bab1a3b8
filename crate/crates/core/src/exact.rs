//! Reference solutions: the full equations of motion for the amplitudes
//! `(C, D)`, the first-order linear equation for `f₁` solved by quadrature,
//! and the analytic rotating-wave solution.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{cumulative_integral, ComplexTrajectory};
use crate::ode::{self, Tolerances};
use crate::pulse::PulseParams;
use crate::theta::{check_grid, spectral_area, theta_quadrature};

/// `f = C/D` is masked where `|D|` falls below this.
pub const MASK_THRESHOLD: f64 = 1e-6;

/// Output samples whose norm drifts further than this are a hard failure.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Longest step, in output intervals. The continuous extension is one order
/// below the step itself and dominates the error at output times if steps
/// are allowed to span many samples.
pub const DENSE_SPAN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState {
    /// Upper-level amplitude C.
    pub c: C64,
    /// Lower-level amplitude D.
    pub d: C64,
}

impl QuantumState {
    pub fn ground() -> Self {
        Self {
            c: C64::new(0.0, 0.0),
            d: C64::new(1.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.norm_sqr() + self.d.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Output grid intervals.
    pub intervals: usize,
    pub max_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            intervals: 2400,
            max_steps: 2_000_000,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidParams("tolerances must be positive".into()));
        }
        if self.intervals < 2 {
            return Err(Error::InvalidParams(
                "output grid needs at least 2 intervals".into(),
            ));
        }
        Ok(())
    }
}

/// Sampled exact dynamics.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub c: ComplexTrajectory,
    pub d: ComplexTrajectory,
    /// `C/D`, masked where `|D| < 1e-6`.
    pub f: ComplexTrajectory,
}

impl ExactSolution {
    pub fn populations(&self) -> impl Iterator<Item = f64> + '_ {
        self.c.samples().iter().map(|c| c.norm_sqr())
    }
}

fn equations_of_motion(p: &PulseParams) -> impl Fn(f64, &ode::State<2>) -> ode::State<2> + '_ {
    let minus_i = C64::new(0.0, -1.0);
    move |t, y| {
        let coupling = p.theta_dot(C64::new(p.omega_c, 0.0), t);
        [minus_i * coupling * y[1], minus_i * coupling.conj() * y[0]]
    }
}

fn initial_step(p: &PulseParams) -> f64 {
    let fastest = p.omega + p.omega_c.abs() + p.omega0;
    (0.05 / fastest).min(p.tau() / 100.0)
}

/// Propagates `state` from `from` to `to`, sampling `intervals + 1` uniform
/// points over `[from, to]`.
pub fn propagate(
    p: &PulseParams,
    s: &SolverSettings,
    from: f64,
    state: QuantumState,
    to: f64,
    intervals: usize,
) -> Result<Vec<QuantumState>> {
    let h = (to - from) / intervals as f64;
    let times: Vec<f64> = (0..=intervals)
        .map(|i| {
            if i == intervals {
                to
            } else {
                from + i as f64 * h
            }
        })
        .collect();
    let tol = Tolerances {
        rtol: s.rtol,
        atol: s.atol,
        max_steps: s.max_steps,
        max_step: DENSE_SPAN * h,
    };
    let ys = ode::integrate(
        equations_of_motion(p),
        from,
        [state.c, state.d],
        to,
        &times,
        &tol,
        initial_step(p),
    )?;
    Ok(ys
        .into_iter()
        .map(|y| QuantumState { c: y[0], d: y[1] })
        .collect())
}

/// Integrates the amplitude equations from `(C, D) = (0, 1)` over `[0, τ]`
/// with adaptive Dormand–Prince stepping and dense output onto the
/// `s.intervals` grid.
pub fn solve_exact(p: &PulseParams, s: &SolverSettings) -> Result<ExactSolution> {
    p.validate()?;
    s.validate()?;
    let tau = p.tau();
    let states = propagate(p, s, 0.0, QuantumState::ground(), tau, s.intervals)?;
    let h = tau / s.intervals as f64;
    for (i, st) in states.iter().enumerate() {
        let drift = (st.norm_sqr() - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                drift,
                t: i as f64 * h,
            });
        }
    }
    let c: Vec<C64> = states.iter().map(|s| s.c).collect();
    let d: Vec<C64> = states.iter().map(|s| s.d).collect();
    let mask: Vec<bool> = d.iter().map(|d| d.norm() < MASK_THRESHOLD).collect();
    let f: Vec<C64> = c
        .iter()
        .zip(&d)
        .zip(&mask)
        .map(|((c, d), &m)| {
            if m {
                C64::new(f64::NAN, f64::NAN)
            } else {
                c / d
            }
        })
        .collect();
    Ok(ExactSolution {
        c: ComplexTrajectory::new(0.0, tau, c),
        d: ComplexTrajectory::new(0.0, tau, d),
        f: ComplexTrajectory::new(0.0, tau, f).with_mask(mask),
    })
}

/// Final state from fixed-step fifth-order propagation with `steps` steps.
pub fn solve_fixed_step(p: &PulseParams, steps: usize) -> QuantumState {
    let g = QuantumState::ground();
    let y = ode::integrate_fixed(equations_of_motion(p), 0.0, [g.c, g.d], p.tau(), steps);
    QuantumState { c: y[0], d: y[1] }
}

/// Exact solution of the first-order linear equation
///
/// ```text
/// ḟ₁ = 2θθ̇*f₁ + iθ²θ̇* − iθ̇,   f₁(0) = 0
/// ```
///
/// as `f₁(t) = −(i/2)[θ(t) + ∫₀ᵗ θ̇(t')e^{α(t',t)}dt']` with
/// `α(t',t) = 2(B(t) − B(t'))`, `B(t) = ∫₀ᵗ θθ̇*`. The kernel factorises, so
/// the nested integral is `e^{2B(t)}∫₀ᵗ θ̇e^{−2B}` and one cumulative pass
/// suffices. `Re B = |θ|²/2 ≥ 0`, so `e^{−2B}` never overflows.
pub fn solve_f1_exact(p: &PulseParams, intervals: usize) -> Result<ComplexTrajectory> {
    let nu = C64::new(p.omega_c, 0.0);
    check_grid(p, nu, intervals)?;
    let theta = theta_quadrature(p, nu, intervals)?;
    let h = theta.step();
    let theta_dot: Vec<C64> = theta.times().map(|t| p.theta_dot(nu, t)).collect();
    let b_integrand: Vec<C64> = theta
        .samples()
        .iter()
        .zip(&theta_dot)
        .map(|(th, td)| th * td.conj())
        .collect();
    let b = cumulative_integral(&b_integrand, h);
    let weighted: Vec<C64> = theta_dot
        .iter()
        .zip(&b)
        .map(|(td, b)| td * (-2.0 * b).exp())
        .collect();
    let inner = cumulative_integral(&weighted, h);
    let minus_half_i = C64::new(0.0, -0.5);
    let f1 = theta
        .samples()
        .iter()
        .zip(&b)
        .zip(&inner)
        .map(|((th, b), i)| minus_half_i * (th + (2.0 * b).exp() * i))
        .collect();
    Ok(ComplexTrajectory::new(0.0, p.tau(), f1))
}

#[derive(Debug, Clone)]
pub struct RwaSolution {
    /// Pulse area A(t).
    pub area: Vec<f64>,
    pub c: ComplexTrajectory,
    pub d: ComplexTrajectory,
    /// `−i tan(A/2)`, masked where `|cos(A/2)| < 1e-6`.
    pub f: ComplexTrajectory,
}

/// Rotating-wave solution `C = −i sin(A/2)`, `D = cos(A/2)`,
/// `f = −i tan(A/2)` with the pulse area from cumulative quadrature.
pub fn solve_rwa(p: &PulseParams, intervals: usize) -> Result<RwaSolution> {
    p.validate()?;
    let tau = p.tau();
    let area: Vec<f64> = spectral_area(p, C64::new(0.0, 0.0), intervals)?
        .samples()
        .iter()
        .map(|a| a.re)
        .collect();
    let c = area
        .iter()
        .map(|a| C64::new(0.0, -(a / 2.0).sin()))
        .collect();
    let d = area
        .iter()
        .map(|a| C64::new((a / 2.0).cos(), 0.0))
        .collect();
    let mask: Vec<bool> = area
        .iter()
        .map(|a| (a / 2.0).cos().abs() < MASK_THRESHOLD)
        .collect();
    let f = area
        .iter()
        .zip(&mask)
        .map(|(a, &m)| {
            if m {
                C64::new(f64::NAN, f64::NAN)
            } else {
                C64::new(0.0, -(a / 2.0).tan())
            }
        })
        .collect();
    Ok(RwaSolution {
        area,
        c: ComplexTrajectory::new(0.0, tau, c),
        d: ComplexTrajectory::new(0.0, tau, d),
        f: ComplexTrajectory::new(0.0, tau, f).with_mask(mask),
    })
}
