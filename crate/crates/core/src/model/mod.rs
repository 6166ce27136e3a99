//! Atom-field model: coupling profiles, decay rate, level shift and the
//! frequency discretizations shared by every other module.
//!
//! Units are angular frequencies with `ħ = 1`; times are reciprocal
//! frequencies.

mod form_factor;
mod grid;
mod lamb;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use form_factor::{decay_rate, eval_form_factor, FormFactor};
pub use grid::{
    default_omega_max, make_grid, make_grid_to, make_mode_grid, make_mode_grid_to, FrequencyGrid,
    QuadratureScheme,
};
pub use lamb::lamb_shift;

use crate::error::{require_positive, Result};

/// Two-level emitter coupled to the photon continuum.
///
/// `omega0` is the renormalized transition frequency: the level shift is
/// already absorbed into it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    pub omega0: f64,
    pub form_factor: FormFactor,
}

impl AtomModel {
    pub fn new(omega0: f64, form_factor: FormFactor) -> Result<Self> {
        require_positive("omega0", omega0)?;
        form_factor.validate()?;
        Ok(Self {
            omega0,
            form_factor,
        })
    }

    /// Bohr period `τ = 2π/ω₀`.
    pub fn tau(&self) -> f64 {
        2.0 * PI / self.omega0
    }

    /// On-shell decay rate `γ(ω₀)`.
    pub fn gamma(&self) -> f64 {
        PI * self.form_factor.value_sq(self.omega0)
    }

    pub fn decay_rate(&self, omega: f64) -> Result<f64> {
        decay_rate(&self.form_factor, omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_and_rate() {
        let m = AtomModel::new(2.0, FormFactor::lorentzian(0.02, 2.0, 0.3).unwrap()).unwrap();
        assert!((m.tau() - PI).abs() < 1e-15);
        assert!((m.gamma() - 0.02).abs() < 1e-15);
        assert!(AtomModel::new(0.0, FormFactor::zero()).is_err());
    }
}
