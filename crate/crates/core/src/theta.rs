//! The generalized pulse integral
//!
//! ```text
//! θ(ν, t) = ∫₀ᵗ Ω(t') cos(ωt' + φ) e^{iνt'} dt'
//! ```
//!
//! and the spectral area `Ã(ν, t) = ∫₀ᵗ Ω(t') e^{iνt'} dt'`.
//!
//! Frequencies are complex: the shifted arguments `ω_c + α₀` and `ω_c + λ`
//! used by the approximations carry imaginary parts.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::faddeeva::erf_scaled;
use crate::grid::{cumulative_integral, ComplexTrajectory};
use crate::pulse::{Envelope, PulseParams};

/// Minimum samples per period of the fastest oscillation in the integrand.
pub const SAMPLES_PER_PERIOD: f64 = 20.0;

/// Largest admissible `|Im ν|·τ`.
pub const OVERFLOW_GUARD: f64 = 50.0;

/// Smallest grid that resolves `e^{iνt}cos(ωt)` at 20 samples per period.
pub fn required_intervals(p: &PulseParams, nu: C64) -> usize {
    let fastest = nu.re.abs() + p.omega;
    (p.tau() * fastest * SAMPLES_PER_PERIOD / TAU)
        .ceil()
        .max(2.0) as usize
}

pub fn check_grid(p: &PulseParams, nu: C64, intervals: usize) -> Result<()> {
    let required = required_intervals(p, nu);
    if intervals < required {
        return Err(Error::GridTooCoarse {
            grid: intervals,
            required,
        });
    }
    check_overflow(p, nu)
}

// Negated comparison so that NaN is rejected too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_overflow(p: &PulseParams, nu: C64) -> Result<()> {
    let im_nu_tau = nu.im.abs() * p.tau();
    if !(im_nu_tau <= OVERFLOW_GUARD) {
        return Err(Error::Overflow { im_nu_tau });
    }
    Ok(())
}

fn cumulative_of(p: &PulseParams, intervals: usize, f: impl Fn(f64) -> C64) -> ComplexTrajectory {
    let tau = p.tau();
    let integrand = ComplexTrajectory::from_fn(0.0, tau, intervals, f);
    let h = integrand.step();
    ComplexTrajectory::new(0.0, tau, cumulative_integral(integrand.samples(), h))
}

/// θ(ν, ·) on the uniform `intervals`-interval grid over `[0, τ]` by
/// fourth-order cumulative quadrature.
pub fn theta_quadrature(p: &PulseParams, nu: C64, intervals: usize) -> Result<ComplexTrajectory> {
    check_grid(p, nu, intervals)?;
    Ok(cumulative_of(p, intervals, |t| p.theta_dot(nu, t)))
}

/// θ(ν, ·) for a Gaussian envelope from its closed-form antiderivative.
///
/// Writing `cos(ωt+φ) = (e^{i(ωt+φ)} + e^{-i(ωt+φ)})/2` splits θ into two
/// Gaussian-times-exponential integrals, each of which completes the square
/// into a difference of error functions. The error functions are combined
/// with their exponential prefactors through the Faddeeva function so that
/// large `σ·Re ν` does not overflow.
pub fn theta_gaussian_closed(
    p: &PulseParams,
    nu: C64,
    intervals: usize,
) -> Result<ComplexTrajectory> {
    let Envelope::Gaussian { sigma_factor } = p.envelope else {
        return Err(Error::WrongEnvelope);
    };
    if intervals < 2 {
        return Err(Error::GridTooCoarse {
            grid: intervals,
            required: 2,
        });
    }
    check_overflow(p, nu)?;
    let tau = p.tau();
    let sigma = sigma_factor * tau;
    let phase = C64::from_polar(1.0, p.phi);
    let up = GaussianPiece::new(tau / 2.0, sigma, nu + p.omega);
    let down = GaussianPiece::new(tau / 2.0, sigma, nu - p.omega);
    let scale = 0.5 * p.omega0;
    Ok(ComplexTrajectory::from_fn(0.0, tau, intervals, |t| {
        if t == 0.0 || p.omega0 == 0.0 {
            return C64::new(0.0, 0.0);
        }
        scale * (phase * up.integral(t) + phase.conj() * down.integral(t))
    }))
}

/// `∫₀ᵗ exp(-(s-c)²/2σ² + iks) ds`.
struct GaussianPiece {
    centre: f64,
    sigma: f64,
    k: C64,
    prefactor_exp: C64,
    lower: C64,
}

impl GaussianPiece {
    fn new(centre: f64, sigma: f64, k: C64) -> Self {
        let i = C64::i();
        // exp(ikc - σ²k²/2) multiplies every error function term
        let prefactor_exp = i * k * centre - 0.5 * sigma * sigma * k * k;
        let mut piece = Self {
            centre,
            sigma,
            k,
            prefactor_exp,
            lower: C64::new(0.0, 0.0),
        };
        piece.lower = piece.scaled_erf_at(0.0);
        piece
    }

    /// `exp(ikc - σ²k²/2)·erf(u(s))` with `u(s) = (s - c - iσ²k)/(√2σ)`.
    fn scaled_erf_at(&self, s: f64) -> C64 {
        let i = C64::i();
        let sigma = self.sigma;
        let u = (s - self.centre - i * sigma * sigma * self.k) / (2f64.sqrt() * sigma);
        let d = s - self.centre;
        // exponent minus u², simplified analytically
        let q = i * self.k * s - d * d / (2.0 * sigma * sigma);
        erf_scaled(u, self.prefactor_exp, q)
    }

    fn integral(&self, t: f64) -> C64 {
        (self.sigma * (PI / 2.0).sqrt()) * (self.scaled_erf_at(t) - self.lower)
    }
}

/// `Ã(ν, ·) = ∫₀ᵗ Ω(t') e^{iνt'} dt'`; at ν = 0 this is the pulse area A(t).
pub fn spectral_area(p: &PulseParams, nu: C64, intervals: usize) -> Result<ComplexTrajectory> {
    check_grid(p, nu, intervals)?;
    Ok(cumulative_of(p, intervals, |t| {
        p.envelope_at(t) * (C64::i() * nu * t).exp()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn benchmark() -> PulseParams {
        PulseParams::gaussian_ratios(0.1, 0.2, 3.0).unwrap()
    }

    fn rel_l2(a: &ComplexTrajectory, b: &ComplexTrajectory) -> f64 {
        a.l2_distance(b).unwrap() / b.l2_norm()
    }

    /// Composite trapezoid with `n` intervals; returns θ(ν, τ).
    fn trapezoid_oracle(p: &PulseParams, nu: C64, n: usize) -> C64 {
        let h = p.tau() / n as f64;
        let mut s = 0.5 * (p.theta_dot(nu, 0.0) + p.theta_dot(nu, p.tau()));
        for i in 1..n {
            s += p.theta_dot(nu, i as f64 * h);
        }
        s * h
    }

    #[test]
    fn theta_vanishes_at_origin_and_for_zero_field() {
        let p = benchmark();
        let th = theta_quadrature(&p, C64::new(0.2, 0.0), 400).unwrap();
        assert_eq!(th.samples()[0], C64::new(0.0, 0.0));
        let z = theta_quadrature(&p.with_amplitude(0.0), C64::new(0.2, 0.0), 400).unwrap();
        assert!(z.samples().iter().all(|v| *v == C64::new(0.0, 0.0)));
        let zc = theta_gaussian_closed(&p.with_amplitude(0.0), C64::new(0.2, 0.0), 400).unwrap();
        assert!(zc.samples().iter().all(|v| *v == C64::new(0.0, 0.0)));
        let c = theta_gaussian_closed(&p, C64::new(0.2, 0.0), 400).unwrap();
        assert_eq!(c.samples()[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn quadrature_matches_refined_trapezoid() {
        let p = benchmark();
        let nu = C64::new(p.omega_c, 0.0);
        let k = 2400;
        let th = theta_quadrature(&p, nu, k).unwrap();
        let oracle = trapezoid_oracle(&p, nu, 10 * k);
        let rel = (th.last() - oracle).norm() / oracle.norm();
        assert!(rel < 1e-8, "relative difference {rel:e}");
    }

    #[test]
    fn closed_form_matches_quadrature_at_benchmark() {
        let p = benchmark();
        let nu = C64::new(p.omega_c, 0.0);
        let q = theta_quadrature(&p, nu, 2400).unwrap();
        let c = theta_gaussian_closed(&p, nu, 2400).unwrap();
        assert!(rel_l2(&c, &q) < 1e-8, "{:e}", rel_l2(&c, &q));
        assert!((c.last() - q.last()).norm() / q.last().norm() < 1e-8);
    }

    #[test]
    fn closed_form_survives_large_detuning() {
        let p = PulseParams::gaussian_ratios(0.5, 20.0, 10.0).unwrap();
        let nu = C64::new(20.0, 0.01);
        let k = 30_000;
        let q = theta_quadrature(&p, nu, k).unwrap();
        let c = theta_gaussian_closed(&p, nu, k).unwrap();
        assert!(c.samples().iter().all(|z| z.is_finite()));
        assert!(rel_l2(&c, &q) < 1e-6, "{:e}", rel_l2(&c, &q));
    }

    #[test]
    fn closed_form_rejects_other_envelopes() {
        let p = PulseParams::new(1.0, 0.2, 0.1, 0.0, 3.0, Envelope::Square).unwrap();
        assert_eq!(
            theta_gaussian_closed(&p, C64::new(0.2, 0.0), 100),
            Err(Error::WrongEnvelope)
        );
    }

    #[test]
    fn grid_and_overflow_guards() {
        let p = benchmark();
        let need = required_intervals(&p, C64::new(0.2, 0.0));
        assert!(matches!(
            theta_quadrature(&p, C64::new(0.2, 0.0), need - 1),
            Err(Error::GridTooCoarse { .. })
        ));
        assert!(theta_quadrature(&p, C64::new(0.2, 0.0), need).is_ok());
        assert!(matches!(
            theta_quadrature(&p, C64::new(0.2, 3.0), 4000),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn square_pulse_area_is_linear() {
        let p = PulseParams::new(1.0, 0.2, 0.7, 0.0, 3.0, Envelope::Square).unwrap();
        let a = spectral_area(&p, C64::new(0.0, 0.0), 600).unwrap();
        for (i, v) in a.samples().iter().enumerate() {
            assert!((v - C64::new(0.7 * a.time(i), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn doubling_grid_changes_theta_little() {
        let p = benchmark();
        let nu = C64::new(0.2, 0.0);
        let a = theta_quadrature(&p, nu, 2400).unwrap();
        let b = theta_quadrature(&p, nu, 4800).unwrap();
        let scale = a.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..a.len() {
            assert!((a.samples()[i] - b.samples()[2 * i]).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn additivity_over_subintervals() {
        let p = benchmark();
        let nu = C64::new(0.2, 0.0);
        let th = theta_quadrature(&p, nu, 2400).unwrap();
        let (i1, i2) = (600, 1700);
        let (t1, t2) = (th.time(i1), th.time(i2));
        // independent fine trapezoid over [t1, t2]
        let n = 200_000;
        let h = (t2 - t1) / n as f64;
        let mut s = 0.5 * (p.theta_dot(nu, t1) + p.theta_dot(nu, t2));
        for j in 1..n {
            s += p.theta_dot(nu, t1 + j as f64 * h);
        }
        s *= h;
        let diff = th.samples()[i2] - th.samples()[i1];
        assert!((diff - s).norm() / s.norm() < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn spectral_area_identity(
            omega0 in 0.05f64..2.0,
            nu_re in 0.0f64..4.0,
            nu_im in -0.3f64..0.3,
            phi in -3.0f64..3.0,
            kind in 0usize..4,
        ) {
            let env = match kind {
                0 => Envelope::Square,
                1 => Envelope::Gaussian { sigma_factor: 0.125 },
                2 => Envelope::Sech { width_factor: 0.125 },
                _ => Envelope::Lorentzian { width_factor: 0.125 },
            };
            let p = PulseParams::new(1.0, nu_re, omega0, phi, 3.0, env).unwrap();
            let nu = C64::new(nu_re, nu_im);
            let k = required_intervals(&p, nu + 1.0) * 4;
            let th = theta_quadrature(&p, nu, k).unwrap();
            let up = spectral_area(&p, nu + p.omega, k).unwrap();
            let down = spectral_area(&p, nu - p.omega, k).unwrap();
            let e = C64::from_polar(1.0, phi);
            let assembled = ComplexTrajectory::new(
                0.0,
                p.tau(),
                up.samples().iter().zip(down.samples())
                    .map(|(a, b)| 0.5 * (e * a + e.conj() * b))
                    .collect(),
            );
            prop_assert!(rel_l2(&assembled, &th) < 1e-10);
        }
    }
}
