use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::form_factor::FormFactor;
use crate::error::{require_positive, Error, Result};
use crate::quadrature::{gauss_legendre, push_panel};

/// Quadrature rule used inside each panel of a [`FrequencyGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Composite Gauss–Legendre; used by the frequency-domain pipeline.
    GaussLegendre,
    /// Composite midpoint with uniformly spaced nodes per panel; used for
    /// finite-mode Hamiltonians, whose recurrence time follows the node spacing.
    Midpoint,
}

/// Discretization of the photon continuum `[0, omega_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: QuadratureScheme,
    omega_max: f64,
}

impl FrequencyGrid {
    /// Assemble a grid from explicit nodes and weights.
    pub fn from_parts(
        nodes: Vec<f64>,
        weights: Vec<f64>,
        scheme: QuadratureScheme,
        omega_max: f64,
    ) -> Result<Self> {
        require_positive("omega_max", omega_max)?;
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::Validation(format!(
                "grid needs matching, nonempty node/weight arrays ({} vs {})",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Validation(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        if nodes[0] < 0.0 || nodes[nodes.len() - 1] > omega_max {
            return Err(Error::Validation(format!(
                "grid nodes must lie in [0, {omega_max}]"
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Validation("grid weights must be positive".into()));
        }
        Ok(Self {
            nodes,
            weights,
            scheme,
            omega_max,
        })
    }

    /// Composite Gauss–Legendre rule on the panels delimited by `breakpoints`.
    pub fn gauss_legendre(breakpoints: &[f64], nodes_per_panel: usize) -> Result<Self> {
        Self::composite(
            breakpoints,
            nodes_per_panel,
            QuadratureScheme::GaussLegendre,
        )
    }

    /// Composite midpoint rule: each panel split into `nodes_per_panel` equal cells.
    pub fn midpoint(breakpoints: &[f64], nodes_per_panel: usize) -> Result<Self> {
        Self::composite(breakpoints, nodes_per_panel, QuadratureScheme::Midpoint)
    }

    fn composite(breakpoints: &[f64], per_panel: usize, scheme: QuadratureScheme) -> Result<Self> {
        if breakpoints.len() < 2 || per_panel == 0 {
            return Err(Error::Validation(
                "composite grid needs at least one panel and one node per panel".into(),
            ));
        }
        let reference = match scheme {
            QuadratureScheme::GaussLegendre => gauss_legendre(per_panel),
            QuadratureScheme::Midpoint => {
                let h = 2.0 / per_panel as f64;
                let x = (0..per_panel)
                    .map(|i| -1.0 + h * (i as f64 + 0.5))
                    .collect();
                (x, vec![h; per_panel])
            }
        };
        let mut nodes = Vec::with_capacity((breakpoints.len() - 1) * per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in breakpoints.windows(2) {
            push_panel(&reference, p[0], p[1], &mut nodes, &mut weights);
        }
        let omega_max = breakpoints[breakpoints.len() - 1];
        Self::from_parts(nodes, weights, scheme, omega_max)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of `f` over `[0, omega_max]`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&w, &wt)| wt * f(w))
            .sum()
    }

    /// `2π / min_spacing`: a finite mode set built on this grid revives
    /// after this time.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.min_spacing()
    }

    /// Smallest gap between neighbouring nodes (`inf` for a single node).
    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Truncation frequency: `ω₀ + 40·max(γ(ω₀), width)`, capped at `100·ω₀`.
///
/// Flat windows are additionally clipped to their upper edge, since the
/// coupling vanishes beyond it.
pub fn default_omega_max(ff: &FormFactor, omega0: f64) -> f64 {
    let gamma0 = PI * ff.value_sq(omega0);
    let mut scale = gamma0.max(ff.width_scale());
    if scale <= 0.0 {
        scale = 0.01 * omega0;
    }
    let mut omega_max = (omega0 + 40.0 * scale).min(100.0 * omega0);
    if let FormFactor::FlatWindow { hi, .. } = *ff {
        if hi > omega0 {
            omega_max = omega_max.min(hi);
        }
    }
    omega_max
}

/// Width of the resonance that grid panels concentrate around.
fn focus_width(ff: &FormFactor, omega0: f64) -> f64 {
    let gamma0 = PI * ff.value_sq(omega0);
    if gamma0 > 0.0 {
        gamma0
    } else if ff.width_scale() > 0.0 {
        ff.width_scale()
    } else {
        0.01 * omega0
    }
}

/// Composite Gauss–Legendre grid on `[0, default_omega_max]` for the
/// frequency-domain pipeline.
///
/// Panel breakpoints follow an equal mixture of a Lorentzian density centred
/// on `omega0` (width `γ(ω₀)`) and a uniform density, so that the resonance
/// and the smooth background are both resolved. Discontinuities of the form
/// factor are added as extra breakpoints.
pub fn make_grid(
    ff: &FormFactor,
    omega0: f64,
    n_panels: usize,
    nodes_per_panel: usize,
) -> Result<FrequencyGrid> {
    ff.validate()?;
    require_positive("omega0", omega0)?;
    if n_panels == 0 || nodes_per_panel == 0 {
        return Err(Error::Validation(
            "n_panels and nodes_per_panel must be >= 1".into(),
        ));
    }
    let omega_max = default_omega_max(ff, omega0);
    make_grid_to(ff, omega0, omega_max, n_panels, nodes_per_panel)
}

/// [`make_grid`] with an explicit truncation frequency.
pub fn make_grid_to(
    ff: &FormFactor,
    omega0: f64,
    omega_max: f64,
    n_panels: usize,
    nodes_per_panel: usize,
) -> Result<FrequencyGrid> {
    require_positive("omega_max", omega_max)?;
    let w = focus_width(ff, omega0);
    let theta = |x: f64| ((x - omega0) / w).atan();
    let (t0, t1) = (theta(0.0), theta(omega_max));
    let cdf = |x: f64| 0.5 * (theta(x) - t0) / (t1 - t0) + 0.5 * x / omega_max;

    let mut breaks = Vec::with_capacity(n_panels + 3);
    breaks.push(0.0);
    for j in 1..n_panels {
        let target = j as f64 / n_panels as f64;
        let (mut lo, mut hi) = (0.0, omega_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * omega_max {
                break;
            }
        }
        breaks.push(0.5 * (lo + hi));
    }
    breaks.push(omega_max);
    breaks.extend(ff.kinks().into_iter().filter(|&k| k < omega_max));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * omega_max);
    FrequencyGrid::gauss_legendre(&breaks, nodes_per_panel)
}

/// Uniform-in-panel (midpoint) grid with `n_modes` nodes for finite-mode models.
///
/// Eighty percent of the modes are spread evenly over the core band
/// `[0, 2ω₀] ∩ [0, omega_max]` around the resonance, the rest evenly over
/// `[2ω₀, omega_max]`.
pub fn make_mode_grid(ff: &FormFactor, omega0: f64, n_modes: usize) -> Result<FrequencyGrid> {
    ff.validate()?;
    require_positive("omega0", omega0)?;
    let omega_max = default_omega_max(ff, omega0);
    make_mode_grid_to(omega0, omega_max, n_modes)
}

/// [`make_mode_grid`] with an explicit truncation frequency.
pub fn make_mode_grid_to(omega0: f64, omega_max: f64, n_modes: usize) -> Result<FrequencyGrid> {
    require_positive("omega_max", omega_max)?;
    if n_modes == 0 {
        return Err(Error::Validation("n_modes must be >= 1".into()));
    }
    let core_hi = 2.0 * omega0;
    if core_hi >= omega_max || n_modes < 10 {
        return FrequencyGrid::midpoint(&[0.0, omega_max], n_modes);
    }
    let n_core = (n_modes * 4) / 5;
    let h_core = core_hi / n_core as f64;
    let n_outer = n_modes - n_core;
    let h_outer = (omega_max - core_hi) / n_outer as f64;

    let nodes = (0..n_core)
        .map(|i| h_core * (i as f64 + 0.5))
        .chain((0..n_outer).map(|i| core_hi + h_outer * (i as f64 + 0.5)))
        .collect();
    let weights = std::iter::repeat_n(h_core, n_core)
        .chain(std::iter::repeat_n(h_outer, n_outer))
        .collect();
    FrequencyGrid::from_parts(nodes, weights, QuadratureScheme::Midpoint, omega_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lorentzian_default() -> FormFactor {
        FormFactor::lorentzian(0.01, 1.0, 0.1).unwrap()
    }

    #[test]
    fn weights_integrate_unity() {
        let grid = make_grid(&lorentzian_default(), 1.0, 120, 8).unwrap();
        let total: f64 = grid.weights().iter().sum();
        assert!((total / grid.omega_max() - 1.0).abs() < 1e-12);
        assert!(grid.nodes().windows(2).all(|p| p[0] < p[1]));
        assert!(grid.nodes()[0] >= 0.0 && *grid.nodes().last().unwrap() <= grid.omega_max());
    }

    #[test]
    fn lorentzian_line_shape_integral() {
        // closed form: (1/π)∫₀^∞ γ/((ω−ω₀)²+γ²) dω = ½ + arctan(ω₀/γ)/π
        let (gamma, w0) = (0.01f64, 1.0f64);
        let ff = FormFactor::constant(gamma).unwrap();
        let grid = make_grid(&ff, w0, 200, 10).unwrap();
        let wm = grid.omega_max();
        let q = grid.integrate(|w| gamma / PI / ((w - w0).powi(2) + gamma * gamma));
        let on_grid = ((wm - w0) / gamma).atan() / PI + (w0 / gamma).atan() / PI;
        assert!((q - on_grid).abs() < 1e-8, "{q} vs {on_grid}");
        let full = 0.5 + (w0 / gamma).atan() / PI;
        assert!((full - 0.996_817).abs() < 1e-6);
    }

    #[test]
    fn omega_max_rule() {
        let wm = default_omega_max(&lorentzian_default(), 1.0);
        assert!((wm - 5.0).abs() < 1e-12);
        let wm = default_omega_max(&FormFactor::constant(1.0).unwrap(), 1.0);
        assert!((wm - 41.0).abs() < 1e-12);
        let wm = default_omega_max(&FormFactor::gaussian_cutoff(0.1, 5.0).unwrap(), 1.0);
        assert!((wm - 100.0).abs() < 1e-12);
        let wm = default_omega_max(&FormFactor::flat_window(0.01, 0.0, 10.0).unwrap(), 1.0);
        assert!((wm - 10.0).abs() < 1e-12);
    }

    #[test]
    fn flat_window_edges_are_breakpoints() {
        let ff = FormFactor::flat_window(0.01, 0.5, 1.5).unwrap();
        let grid = make_grid(&ff, 1.0, 50, 6).unwrap();
        // exact for a piecewise-constant integrand only if edges are panel breaks
        let q = grid.integrate(|w| ff.value_sq(w));
        assert!((q - 0.01 / PI).abs() < 1e-14);
    }

    #[test]
    fn mode_grid_layout() {
        let ff = FormFactor::flat_window(0.01, 0.0, 10.0).unwrap();
        let grid = make_mode_grid(&ff, 1.0, 2000).unwrap();
        assert_eq!(grid.len(), 2000);
        assert_eq!(grid.scheme(), QuadratureScheme::Midpoint);
        assert!((grid.min_spacing() - 2.0 / 1600.0).abs() < 1e-12);
        let total: f64 = grid.weights().iter().sum();
        assert!((total - 10.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(make_grid(&lorentzian_default(), 1.0, 0, 4).is_err());
        assert!(make_grid(&lorentzian_default(), 1.0, 4, 0).is_err());
        assert!(make_grid(&lorentzian_default(), -1.0, 4, 4).is_err());
        assert!(FrequencyGrid::from_parts(
            vec![1.0, 0.5],
            vec![1.0, 1.0],
            QuadratureScheme::Midpoint,
            2.0
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn moments_reproduced(gamma in 1e-3..0.5f64, width in 0.02..2.0f64, w0 in 0.5..3.0f64,
                              panels in 20usize..120, per in 4usize..12) {
            let ff = FormFactor::lorentzian(gamma, w0, width).unwrap();
            let grid = make_grid(&ff, w0, panels, per).unwrap();
            let b = grid.omega_max();
            prop_assert!(grid.weights().iter().all(|&w| w > 0.0));
            for p in 0..3i32 {
                let q = grid.integrate(|w| w.powi(p));
                let exact = b.powi(p + 1) / (p + 1) as f64;
                prop_assert!((q / exact - 1.0).abs() < 1e-10, "p = {} rel = {}", p, q / exact - 1.0);
            }
        }
    }
}
