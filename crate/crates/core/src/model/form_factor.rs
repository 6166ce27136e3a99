use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_nonnegative, require_positive, Error, Result};

/// Coupling profile `g(ω)` between the atom and the photon mode at `ω`.
///
/// Every family is real and non-negative on `ω >= 0`. Families carrying a
/// `gamma` parameter are scaled so that the decay rate `π g²` equals `gamma`
/// at the family's reference frequency (the Lorentzian center, or anywhere
/// inside a flat window).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FormFactor {
    /// `g² = (γ/π) κ² / ((ω − center)² + κ²)`.
    Lorentzian { gamma: f64, center: f64, width: f64 },
    /// `g = A exp(−(ω/ω_c)²/2)`.
    GaussianCutoff { amplitude: f64, cutoff: f64 },
    /// `g = A √ω exp(−ω/ω_c)`.
    OhmicExpCutoff { amplitude: f64, cutoff: f64 },
    /// `g = √(γ/π)` on `[lo, hi]`, zero elsewhere.
    FlatWindow { gamma: f64, lo: f64, hi: f64 },
    /// `g = √(γ/π)` for all `ω >= 0`. Not square integrable.
    Constant { gamma: f64 },
}

impl FormFactor {
    pub fn lorentzian(gamma: f64, center: f64, width: f64) -> Result<Self> {
        Self::Lorentzian {
            gamma,
            center,
            width,
        }
        .validated()
    }

    pub fn gaussian_cutoff(amplitude: f64, cutoff: f64) -> Result<Self> {
        Self::GaussianCutoff { amplitude, cutoff }.validated()
    }

    pub fn ohmic_exp_cutoff(amplitude: f64, cutoff: f64) -> Result<Self> {
        Self::OhmicExpCutoff { amplitude, cutoff }.validated()
    }

    pub fn flat_window(gamma: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::FlatWindow { gamma, lo, hi }.validated()
    }

    pub fn constant(gamma: f64) -> Result<Self> {
        Self::Constant { gamma }.validated()
    }

    /// Identically vanishing coupling.
    pub fn zero() -> Self {
        Self::FlatWindow {
            gamma: 0.0,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Lorentzian { .. } => "lorentzian",
            Self::GaussianCutoff { .. } => "gaussian_cutoff",
            Self::OhmicExpCutoff { .. } => "ohmic_exp_cutoff",
            Self::FlatWindow { .. } => "flat_window",
            Self::Constant { .. } => "constant",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Lorentzian {
                gamma,
                center,
                width,
            } => {
                require_nonnegative("lorentzian.gamma", gamma)?;
                require_positive("lorentzian.center", center)?;
                require_positive("lorentzian.width", width)
            }
            Self::GaussianCutoff { amplitude, cutoff } => {
                require_nonnegative("gaussian_cutoff.amplitude", amplitude)?;
                require_positive("gaussian_cutoff.cutoff", cutoff)
            }
            Self::OhmicExpCutoff { amplitude, cutoff } => {
                require_nonnegative("ohmic_exp_cutoff.amplitude", amplitude)?;
                require_positive("ohmic_exp_cutoff.cutoff", cutoff)
            }
            Self::FlatWindow { gamma, lo, hi } => {
                require_nonnegative("flat_window.gamma", gamma)?;
                require_nonnegative("flat_window.lo", lo)?;
                require_positive("flat_window.hi", hi)?;
                if hi <= lo {
                    return Err(Error::Validation(format!(
                        "flat_window requires lo < hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
            Self::Constant { gamma } => require_nonnegative("constant.gamma", gamma),
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Whether `∫₀^∞ g² dω` is finite, i.e. the memory kernel has a finite `M(0)`.
    pub fn is_normalizable(&self) -> bool {
        !matches!(self, Self::Constant { .. })
    }

    pub(crate) fn require_normalizable(&self) -> Result<()> {
        if self.is_normalizable() {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "{} form factor is not square integrable; only Markovian closed forms accept it",
                self.family_name()
            )))
        }
    }

    /// `g(ω)` without the domain check.
    pub(crate) fn value(&self, omega: f64) -> f64 {
        match *self {
            Self::Lorentzian {
                gamma,
                center,
                width,
            } => {
                let d = omega - center;
                (gamma / PI * width * width / (d * d + width * width)).sqrt()
            }
            Self::GaussianCutoff { amplitude, cutoff } => {
                let x = omega / cutoff;
                amplitude * (-0.5 * x * x).exp()
            }
            Self::OhmicExpCutoff { amplitude, cutoff } => {
                amplitude * omega.max(0.0).sqrt() * (-omega / cutoff).exp()
            }
            Self::FlatWindow { gamma, lo, hi } => {
                if (lo..=hi).contains(&omega) {
                    (gamma / PI).sqrt()
                } else {
                    0.0
                }
            }
            Self::Constant { gamma } => (gamma / PI).sqrt(),
        }
    }

    /// `g(ω)²`, the spectral density of the coupling.
    pub(crate) fn value_sq(&self, omega: f64) -> f64 {
        let g = self.value(omega);
        g * g
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        check_frequency(omega)?;
        Ok(self.value(omega))
    }

    /// Characteristic frequency scale of the family's shape, zero for `Constant`.
    pub fn width_scale(&self) -> f64 {
        match *self {
            Self::Lorentzian { width, .. } => width,
            Self::GaussianCutoff { cutoff, .. } | Self::OhmicExpCutoff { cutoff, .. } => cutoff,
            Self::FlatWindow { lo, hi, .. } => hi - lo,
            Self::Constant { .. } => 0.0,
        }
    }

    /// Frequencies in `(0, ∞)` where `g` is not smooth; grids place panel breaks there.
    pub(crate) fn kinks(&self) -> Vec<f64> {
        match *self {
            Self::FlatWindow { lo, hi, .. } => [lo, hi].into_iter().filter(|&w| w > 0.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Frequency above which `g` vanishes identically, if any.
    pub(crate) fn support_end(&self) -> Option<f64> {
        match *self {
            Self::FlatWindow { hi, .. } => Some(hi),
            _ => None,
        }
    }

    /// Rescale the coupling so that `π g(ω)² = gamma` at `omega`.
    ///
    /// Fails when the profile vanishes at `omega` and cannot be rescaled.
    pub fn with_gamma_at(&self, omega: f64, gamma: f64) -> Result<Self> {
        require_nonnegative("gamma", gamma)?;
        check_frequency(omega)?;
        let rescaled = match *self {
            Self::Lorentzian { center, width, .. } => {
                let d = omega - center;
                Self::Lorentzian {
                    gamma: gamma * (d * d + width * width) / (width * width),
                    center,
                    width,
                }
            }
            Self::GaussianCutoff { cutoff, .. } | Self::OhmicExpCutoff { cutoff, .. } => {
                let unit = match self {
                    Self::GaussianCutoff { .. } => Self::GaussianCutoff {
                        amplitude: 1.0,
                        cutoff,
                    },
                    _ => Self::OhmicExpCutoff {
                        amplitude: 1.0,
                        cutoff,
                    },
                };
                let shape = unit.value(omega);
                if shape <= 0.0 {
                    return Err(Error::Validation(format!(
                        "{} profile vanishes at omega = {omega}",
                        self.family_name()
                    )));
                }
                let amplitude = (gamma / PI).sqrt() / shape;
                match unit {
                    Self::GaussianCutoff { .. } => Self::GaussianCutoff { amplitude, cutoff },
                    _ => Self::OhmicExpCutoff { amplitude, cutoff },
                }
            }
            Self::FlatWindow { lo, hi, .. } => {
                if !(lo..=hi).contains(&omega) {
                    return Err(Error::Validation(format!(
                        "omega = {omega} lies outside the flat window [{lo}, {hi}]"
                    )));
                }
                Self::FlatWindow { gamma, lo, hi }
            }
            Self::Constant { .. } => Self::Constant { gamma },
        };
        rescaled.validated()
    }
}

pub(crate) fn check_frequency(omega: f64) -> Result<()> {
    if omega.is_finite() && omega >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "omega",
            value: omega,
            reason: "frequencies live on [0, inf)",
        })
    }
}

/// `g(ω)` for a validated form factor.
pub fn eval_form_factor(ff: &FormFactor, omega: f64) -> Result<f64> {
    ff.eval(omega)
}

/// Frequency-dependent decay rate `γ(ω) = π g(ω)²`.
pub fn decay_rate(ff: &FormFactor, omega: f64) -> Result<f64> {
    let g = eval_form_factor(ff, omega)?;
    Ok(PI * g * g)
}
