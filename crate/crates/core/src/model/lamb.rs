use super::form_factor::{check_frequency, FormFactor};
use super::grid::FrequencyGrid;
use crate::error::{Error, Result};

/// Level shift `Δ(ω) = P∫₀^{ω_max} g(ω′)² / (ω − ω′) dω′`.
///
/// The pole is removed by subtracting `g(ω)²` from the integrand; the
/// subtracted piece integrates analytically to `g(ω)² ln(ω / (ω_max − ω))`.
/// At a node that coincides with `ω` the smooth integrand takes its limit
/// `−d(g²)/dω`, which requires `g²` to be differentiable there.
pub fn lamb_shift(ff: &FormFactor, omega: f64, grid: &FrequencyGrid) -> Result<f64> {
    ff.require_normalizable()?;
    check_frequency(omega)?;
    let omega_max = grid.omega_max();
    if !(omega > 0.0 && omega < omega_max) {
        return Err(Error::Domain {
            what: "omega",
            value: omega,
            reason: "principal value needs omega strictly inside (0, omega_max)",
        });
    }
    let g2 = ff.value_sq(omega);
    let coincide = 1e-9 * omega_max;
    let mut sum = 0.0;
    for (&node, &w) in grid.nodes().iter().zip(grid.weights()) {
        let d = omega - node;
        let term = if d.abs() <= coincide {
            -slope_sq(ff, omega, omega_max)?
        } else {
            (ff.value_sq(node) - g2) / d
        };
        sum += w * term;
    }
    Ok(sum + g2 * (omega / (omega_max - omega)).ln())
}

fn slope_sq(ff: &FormFactor, omega: f64, omega_max: f64) -> Result<f64> {
    let h = 1e-6
        * omega_max
            .min(omega)
            .min(omega_max - omega)
            .max(f64::MIN_POSITIVE);
    let f0 = ff.value_sq(omega);
    let left = (f0 - ff.value_sq(omega - h)) / h;
    let right = (ff.value_sq(omega + h) - f0) / h;
    if !(left.is_finite() && right.is_finite())
        || (left - right).abs() > 1e-3 * (left.abs() + right.abs()) + 1e-12
    {
        return Err(Error::SingularNode { omega });
    }
    Ok(0.5 * (left + right))
}
