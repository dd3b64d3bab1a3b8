//! Pulse envelopes and the driving field `E(t) = Ω(t) cos(ωt + φ)`.
//!
//! Every envelope is hard-truncated to zero outside `[0, τ]`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DEFAULT_WIDTH_FACTOR: f64 = 0.125;

/// Envelope shape. Width factors are fractions of the pulse duration `τ`;
/// every shape is centred at `τ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Square,
    /// `Ω₀ exp(-(t-τ/2)²/2σ²)` with `σ = sigma_factor·τ`.
    Gaussian {
        sigma_factor: f64,
    },
    /// `Ω₀ sech((t-τ/2)/w)` with `w = width_factor·τ`.
    Sech {
        width_factor: f64,
    },
    /// `Ω₀ / (1 + ((t-τ/2)/w)²)` with `w = width_factor·τ`.
    Lorentzian {
        width_factor: f64,
    },
}

impl Envelope {
    pub fn name(&self) -> &'static str {
        match self {
            Envelope::Square => "square",
            Envelope::Gaussian { .. } => "gaussian",
            Envelope::Sech { .. } => "sech",
            Envelope::Lorentzian { .. } => "lorentzian",
        }
    }

    pub fn width_factor(&self) -> Option<f64> {
        match *self {
            Envelope::Square => None,
            Envelope::Gaussian { sigma_factor } => Some(sigma_factor),
            Envelope::Sech { width_factor } | Envelope::Lorentzian { width_factor } => {
                Some(width_factor)
            }
        }
    }

    /// Parses a shape name, attaching `width` (or the default) to smooth shapes.
    pub fn from_name(name: &str, width: Option<f64>) -> Option<Self> {
        let w = width.unwrap_or(DEFAULT_WIDTH_FACTOR);
        match name {
            "square" => Some(Envelope::Square),
            "gaussian" => Some(Envelope::Gaussian { sigma_factor: w }),
            "sech" => Some(Envelope::Sech { width_factor: w }),
            "lorentzian" => Some(Envelope::Lorentzian { width_factor: w }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Carrier angular frequency ω.
    pub omega: f64,
    /// Transition angular frequency ω_c.
    pub omega_c: f64,
    /// Peak Rabi frequency Ω₀.
    pub omega0: f64,
    /// Carrier-envelope phase φ.
    pub phi: f64,
    /// Number of carrier cycles N; τ = 2πN/ω.
    pub cycles: f64,
    pub envelope: Envelope,
}

impl PulseParams {
    pub fn new(
        omega: f64,
        omega_c: f64,
        omega0: f64,
        phi: f64,
        cycles: f64,
        envelope: Envelope,
    ) -> Result<Self> {
        let p = Self {
            omega,
            omega_c,
            omega0,
            phi,
            cycles,
            envelope,
        };
        p.validate()?;
        Ok(p)
    }

    /// Gaussian pulse with `ω = 1`, σ = τ/8 and zero CEP, parametrised by
    /// the two ratios used on the error-surface axes.
    pub fn gaussian_ratios(omega0_ratio: f64, omegac_ratio: f64, cycles: f64) -> Result<Self> {
        Self::new(
            1.0,
            omegac_ratio,
            omega0_ratio,
            0.0,
            cycles,
            Envelope::Gaussian {
                sigma_factor: DEFAULT_WIDTH_FACTOR,
            },
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        for (name, v) in [
            ("omega", self.omega),
            ("omega_c", self.omega_c),
            ("omega0", self.omega0),
            ("phi", self.phi),
            ("cycles", self.cycles),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.omega <= 0.0 {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        if self.omega0 < 0.0 {
            return bad(format!("omega0 must be non-negative, got {}", self.omega0));
        }
        if self.cycles <= 0.0 {
            return bad(format!("cycles must be positive, got {}", self.cycles));
        }
        match self.envelope {
            Envelope::Square => {}
            Envelope::Gaussian { sigma_factor } => {
                if !(sigma_factor > 0.0 && sigma_factor <= 0.25) {
                    return bad(format!(
                        "gaussian sigma factor must lie in (0, 0.25], got {sigma_factor}"
                    ));
                }
            }
            Envelope::Sech { width_factor } | Envelope::Lorentzian { width_factor } => {
                if !(width_factor > 0.0 && width_factor.is_finite()) {
                    return bad(format!("width factor must be positive, got {width_factor}"));
                }
            }
        }
        Ok(())
    }

    /// Pulse duration τ.
    pub fn tau(&self) -> f64 {
        TAU * self.cycles / self.omega
    }

    /// Envelope width (σ for Gaussian, w for sech/Lorentzian), if any.
    pub fn width(&self) -> Option<f64> {
        self.envelope.width_factor().map(|f| f * self.tau())
    }

    /// Ω(t); zero outside `[0, τ]`.
    pub fn envelope_at(&self, t: f64) -> f64 {
        let tau = self.tau();
        if !(0.0..=tau).contains(&t) {
            return 0.0;
        }
        let x = t - 0.5 * tau;
        match self.envelope {
            Envelope::Square => self.omega0,
            Envelope::Gaussian { sigma_factor } => {
                let s = sigma_factor * tau;
                self.omega0 * (-x * x / (2.0 * s * s)).exp()
            }
            Envelope::Sech { width_factor } => self.omega0 / (x / (width_factor * tau)).cosh(),
            Envelope::Lorentzian { width_factor } => {
                let u = x / (width_factor * tau);
                self.omega0 / (1.0 + u * u)
            }
        }
    }

    /// `Ω(t)·cos(ωt + φ)`.
    pub fn field_at(&self, t: f64) -> f64 {
        self.envelope_at(t) * (self.omega * t + self.phi).cos()
    }

    /// Integrand of θ(ν, t): `Ω(t)cos(ωt+φ)·e^{iνt}`.
    pub fn theta_dot(&self, nu: C64, t: f64) -> C64 {
        self.field_at(t) * (C64::i() * nu * t).exp()
    }

    pub fn with_amplitude(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_transition(mut self, omega_c: f64) -> Self {
        self.omega_c = omega_c;
        self
    }
}
