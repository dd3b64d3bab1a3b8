//! Uniformly sampled complex trajectories and the quadrature / differencing
//! kernels that operate on them.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A complex-valued function of time sampled on `K + 1` uniformly spaced
/// points spanning `[t0, t1]`, both endpoints included.
///
/// Samples may carry a mask; masked samples are excluded from error metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrajectory {
    t0: f64,
    t1: f64,
    samples: Vec<C64>,
    mask: Option<Vec<bool>>,
}

impl ComplexTrajectory {
    /// *Panics* if fewer than three samples are given or the interval is empty.
    pub fn new(t0: f64, t1: f64, samples: Vec<C64>) -> Self {
        assert!(samples.len() >= 3, "trajectory needs at least 3 samples");
        assert!(t1 > t0, "trajectory interval must be non-empty");
        Self {
            t0,
            t1,
            samples,
            mask: None,
        }
    }

    pub fn zeros(t0: f64, t1: f64, intervals: usize) -> Self {
        Self::new(t0, t1, vec![C64::new(0.0, 0.0); intervals + 1])
    }

    /// Builds a trajectory by evaluating `f` at every grid time.
    pub fn from_fn(t0: f64, t1: f64, intervals: usize, f: impl FnMut(f64) -> C64) -> Self {
        let h = (t1 - t0) / intervals as f64;
        let samples = (0..=intervals).map(|i| t0 + i as f64 * h).map(f).collect();
        Self::new(t0, t1, samples)
    }

    pub fn with_mask(mut self, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), self.samples.len());
        self.mask = if mask.iter().any(|&m| m) {
            Some(mask)
        } else {
            None
        };
        self
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Number of grid intervals `K`.
    pub fn intervals(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.intervals() as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.intervals() {
            self.t1
        } else {
            self.t0 + i as f64 * self.step()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn last(&self) -> C64 {
        self.samples[self.samples.len() - 1]
    }

    pub fn is_masked(&self, i: usize) -> bool {
        self.mask.as_ref().is_some_and(|m| m[i])
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn masked_count(&self) -> usize {
        self.mask
            .as_ref()
            .map_or(0, |m| m.iter().filter(|&&b| b).count())
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && self.t0 == other.t0 && self.t1 == other.t1
    }

    /// Pointwise map keeping grid and mask.
    pub fn map(&self, mut f: impl FnMut(f64, C64) -> C64) -> Self {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &z)| f(self.time(i), z))
            .collect();
        Self {
            t0: self.t0,
            t1: self.t1,
            samples,
            mask: self.mask.clone(),
        }
    }

    /// Trapezoid-weighted L² norm over unmasked samples.
    pub fn l2_norm(&self) -> f64 {
        let w = trapezoid_weights(self.len(), self.step());
        self.samples
            .iter()
            .zip(&w)
            .enumerate()
            .filter(|(i, _)| !self.is_masked(*i))
            .map(|(_, (z, w))| w * z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// L² norm of `self - other`, skipping samples masked in either.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let w = trapezoid_weights(self.len(), self.step());
        Ok((0..self.len())
            .filter(|&i| !self.is_masked(i) && !other.is_masked(i))
            .map(|i| w[i] * (self.samples[i] - other.samples[i]).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Running integral `I_i = ∫_{x_0}^{x_i} y dx` on a uniform grid.
///
/// Each interval contributes the integral of the cubic through the four
/// nearest samples (one-sided at the ends), so every partial integral is
/// fourth-order accurate. On exactly three samples the quadratic rule is used.
pub fn cumulative_integral(y: &[C64], h: f64) -> Vec<C64> {
    let n = y.len();
    assert!(n >= 3, "cumulative_integral needs at least 3 samples");
    let mut out = Vec::with_capacity(n);
    let mut acc = C64::new(0.0, 0.0);
    out.push(acc);
    if n == 3 {
        acc += (5.0 * y[0] + 8.0 * y[1] - y[2]) * (h / 12.0);
        out.push(acc);
        acc += (-y[0] + 8.0 * y[1] + 5.0 * y[2]) * (h / 12.0);
        out.push(acc);
        return out;
    }
    let c = h / 24.0;
    for i in 0..n - 1 {
        let piece = if i == 0 {
            9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]
        } else if i == n - 2 {
            y[n - 4] - 5.0 * y[n - 3] + 19.0 * y[n - 2] + 9.0 * y[n - 1]
        } else {
            -y[i - 1] + 13.0 * y[i] + 13.0 * y[i + 1] - y[i + 2]
        };
        acc += piece * c;
        out.push(acc);
    }
    out
}

/// Composite Simpson integral over the whole grid. An odd number of
/// intervals closes with Simpson's 3/8 rule on the last three.
pub fn simpson(y: &[C64], h: f64) -> C64 {
    let n = y.len();
    assert!(n >= 3, "simpson needs at least 3 samples");
    let intervals = n - 1;
    let (even_end, tail) = if intervals.is_multiple_of(2) {
        (intervals, C64::new(0.0, 0.0))
    } else if intervals == 3 {
        return (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3]) * (3.0 * h / 8.0);
    } else {
        let m = intervals - 3;
        (
            m,
            (y[m] + 3.0 * y[m + 1] + 3.0 * y[m + 2] + y[m + 3]) * (3.0 * h / 8.0),
        )
    };
    let mut s = y[0] + y[even_end];
    for (i, v) in y.iter().enumerate().take(even_end).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * (h / 3.0) + tail
}

/// Fourth-order finite-difference derivative on a uniform grid: central
/// stencils in the interior, one-sided fourth-order stencils at the two
/// samples nearest each end.
pub fn derivative(y: &[C64], h: f64) -> Vec<C64> {
    let n = y.len();
    assert!(n >= 5, "derivative needs at least 5 samples");
    let c = 1.0 / (12.0 * h);
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                -25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]
            } else if i == 1 {
                -3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]
            } else if i == n - 2 {
                3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]
            } else if i == n - 1 {
                25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4]
                    + 3.0 * y[n - 5]
            } else {
                y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]
            };
            d * c
        })
        .collect()
}
