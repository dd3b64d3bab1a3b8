use num_complex::Complex64 as C64;

use super::{alpha0, PulseTheta, ThetaSource};
use crate::error::Result;
use crate::grid::simpson;
use crate::pulse::PulseParams;

pub const LAMBDA_DAMPING: f64 = 0.5;
pub const LAMBDA_MAX_ITER: usize = 100;
/// Convergence when `|λ − RHS(λ)| < LAMBDA_TOL·max(1, |λ|)`.
pub const LAMBDA_TOL: f64 = 1e-10;

/// Outcome of the damped fixed-point iteration for λ.
///
/// When `converged` is false, `lambda` is the iterate with the smallest
/// residual seen.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaResult {
    pub lambda: C64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<C64>,
}

/// `RHS(λ) = (i/τ)∫₀^τ θ̇*(ω_c+λ, t)θ(ω_c+λ, t) dt`.
pub fn lambda_rhs(p: &PulseParams, intervals: usize, lambda: C64) -> Result<C64> {
    rhs(&PulseTheta::new(p, intervals), lambda)
}

pub(super) fn rhs(src: &impl ThetaSource, lambda: C64) -> Result<C64> {
    let nu = src.omega_c() + lambda;
    let theta = src.theta(nu)?;
    let integrand: Vec<C64> = theta
        .samples()
        .iter()
        .zip(theta.times())
        .map(|(th, t)| src.theta_dot_conj(nu, t) * th)
        .collect();
    Ok(C64::i() / src.tau() * simpson(&integrand, theta.step()))
}

/// Solves `λ = RHS(λ)` by damped Picard iteration seeded at `α₀/2`.
pub fn solve_lambda(p: &PulseParams, intervals: usize) -> Result<LambdaResult> {
    let seed = alpha0(p, intervals)?.value / 2.0;
    solve_lambda_from(p, intervals, seed)
}

pub fn solve_lambda_from(p: &PulseParams, intervals: usize, seed: C64) -> Result<LambdaResult> {
    solve_lambda_source(&PulseTheta::new(p, intervals), seed)
}

/// The same iteration for any [`ThetaSource`].
pub fn solve_lambda_source(src: &impl ThetaSource, seed: C64) -> Result<LambdaResult> {
    iterate(src, seed)
}

fn iterate(src: &impl ThetaSource, seed: C64) -> Result<LambdaResult> {
    let mut lambda = seed;
    let mut trace = Vec::new();
    let mut best = (lambda, f64::INFINITY, 0usize);
    for n in 1..=LAMBDA_MAX_ITER {
        trace.push(lambda);
        let r = rhs(src, lambda)?;
        let residual = (lambda - r).norm();
        if residual < best.1 {
            best = (lambda, residual, n);
        }
        if residual < LAMBDA_TOL * lambda.norm().max(1.0) {
            return Ok(LambdaResult {
                lambda,
                residual,
                iterations: n,
                converged: true,
                trace,
            });
        }
        lambda = (1.0 - LAMBDA_DAMPING) * lambda + LAMBDA_DAMPING * r;
    }
    Ok(LambdaResult {
        lambda: best.0,
        residual: best.1,
        iterations: LAMBDA_MAX_ITER,
        converged: false,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: usize = 2400;

    #[test]
    fn zero_field_converges_immediately() {
        let p = PulseParams::gaussian_ratios(0.0, 0.2, 3.0).unwrap();
        let r = solve_lambda(&p, K).unwrap();
        assert!(r.converged);
        assert_eq!(r.lambda, C64::new(0.0, 0.0));
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn converged_lambda_is_a_local_residual_minimum() {
        let p = PulseParams::gaussian_ratios(0.1, 0.2, 3.0).unwrap();
        let r = solve_lambda(&p, K).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.residual < LAMBDA_TOL * r.lambda.norm().max(1.0));
        let half = 1e-3 * r.lambda.norm();
        let mut min = f64::INFINITY;
        for a in 0..41 {
            for b in 0..41 {
                let d = C64::new(
                    -half + a as f64 * half / 20.0,
                    -half + b as f64 * half / 20.0,
                );
                let l = r.lambda + d;
                min = min.min((l - lambda_rhs(&p, K, l).unwrap()).norm());
            }
        }
        assert!(
            min >= 0.5 * r.residual,
            "scan min {min:e} vs {:e}",
            r.residual
        );
    }

    #[test]
    fn seed_does_not_matter() {
        let p = PulseParams::gaussian_ratios(0.1, 0.2, 3.0).unwrap();
        let a = solve_lambda(&p, K).unwrap();
        let b = solve_lambda_from(&p, K, C64::new(0.0, 0.0)).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.lambda - b.lambda).norm() < 1e-9);
    }

    #[test]
    fn trace_records_every_iterate() {
        let p = PulseParams::gaussian_ratios(0.3, 4.0, 3.0).unwrap();
        let r = solve_lambda(&p, K).unwrap();
        assert_eq!(r.trace.len(), r.iterations);
        assert_eq!(*r.trace.last().unwrap(), r.lambda);
    }
}
