//! Perturbation series in `ω_c` for `z(t) = e^{−iω_c t} f(t)`, which obeys
//!
//! ```text
//! ż = i g z² − i ω_c z − i g,   g(t) = Ω(t)cos(ωt + φ).
//! ```
//!
//! With `z = Σ zₙ` and `zₙ = O(ω_cⁿ)`, the zeroth order is solved by
//! separation of variables, `z₀ = −i tan G` with `G(t) = ∫₀ᵗ g`, and every
//! higher order obeys a linear equation
//!
//! ```text
//! żₙ = 2i g z₀ zₙ + i g Σ_{j=1}^{n−1} z_j z_{n−j} − i ω_c z_{n−1}
//! ```
//!
//! whose integrating factor is `e^{w(t)}`, `w = 2i∫g z₀ = −2 ln cos G`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{cumulative_integral, ComplexTrajectory};
use crate::pulse::PulseParams;
use crate::theta::check_grid;

pub const MAX_ORDER: usize = 6;

/// Minimum distance of `G(t)` from the poles of `tan`.
pub const SINGULARITY_MARGIN: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ZSeries {
    /// `z₀ … z_order`.
    pub terms: Vec<ComplexTrajectory>,
    /// `e^{iω_c t} Σ zₙ`.
    pub f: ComplexTrajectory,
}

pub fn z_series(p: &PulseParams, intervals: usize, order: usize) -> Result<ZSeries> {
    if order > MAX_ORDER {
        return Err(Error::InvalidParams(format!(
            "z-series order must be at most {MAX_ORDER}, got {order}"
        )));
    }
    check_grid(p, C64::new(0.0, 0.0), intervals)?;
    let tau = p.tau();
    let g = ComplexTrajectory::from_fn(0.0, tau, intervals, |t| C64::new(p.field_at(t), 0.0));
    let h = g.step();
    let area: Vec<f64> = cumulative_integral(g.samples(), h)
        .iter()
        .map(|z| z.re)
        .collect();

    for (i, a) in area.iter().enumerate() {
        // distance to the nearest odd multiple of π/2
        let r = (a - FRAC_PI_2).rem_euclid(PI);
        let d = r.min(PI - r);
        if d < SINGULARITY_MARGIN {
            return Err(Error::NearSingularArea { t: g.time(i) });
        }
    }

    let i = C64::i();
    let z0: Vec<C64> = area.iter().map(|a| -i * a.tan()).collect();
    let cos2: Vec<f64> = area.iter().map(|a| a.cos().powi(2)).collect();
    let mut terms: Vec<Vec<C64>> = vec![z0];

    let mut growth = 0;
    for n in 1..=order {
        let source: Vec<C64> = (0..g.len())
            .map(|k| {
                let quad: C64 = (1..n).map(|j| terms[j][k] * terms[n - j][k]).sum();
                i * g.samples()[k] * quad - i * p.omega_c * terms[n - 1][k]
            })
            .collect();
        let weighted: Vec<C64> = source.iter().zip(&cos2).map(|(s, c)| s * c).collect();
        let zn: Vec<C64> = cumulative_integral(&weighted, h)
            .iter()
            .zip(&cos2)
            .map(|(v, c)| v / c)
            .collect();
        if zn.iter().any(|z| !z.is_finite()) {
            return Err(Error::Diverged { order: n });
        }
        let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if n >= 2 && norm(&zn) > norm(&terms[n - 1]) {
            growth += 1;
            if growth >= 2 {
                return Err(Error::Diverged { order: n });
            }
        } else {
            growth = 0;
        }
        terms.push(zn);
    }

    let f = (0..g.len())
        .map(|k| {
            let sum: C64 = terms.iter().map(|z| z[k]).sum();
            (i * p.omega_c * g.time(k)).exp() * sum
        })
        .collect();
    Ok(ZSeries {
        terms: terms
            .into_iter()
            .map(|z| ComplexTrajectory::new(0.0, tau, z))
            .collect(),
        f: ComplexTrajectory::new(0.0, tau, f),
    })
}
