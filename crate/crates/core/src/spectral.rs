//! Frequency-domain side of the model: Laplace-transformed kernel and
//! resolvent, the optimal recovery packet `φ₀`, and the recovery-fidelity
//! bounds derived from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::model::{AtomModel, FormFactor, FrequencyGrid};

/// Denominators smaller than this are treated as poles.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// Above this `γ/ω₀` the Markovian closed forms are no longer trustworthy.
pub const MARKOV_WARN_RATIO: f64 = 0.1;

/// Single-photon state sampled at the nodes of a frequency grid.
///
/// Inner products use the grid weights, `⟨φ|ψ⟩ = Σ_k w_k φ̄(ω_k) ψ(ω_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket<'g> {
    grid: &'g FrequencyGrid,
    amplitudes: Vec<Complex64>,
}

impl<'g> WavePacket<'g> {
    pub fn new(grid: &'g FrequencyGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a grid of {} nodes",
                amplitudes.len(),
                grid.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::Validation(
                "wave packet amplitudes must be finite".into(),
            ));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: &'g FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amplitudes = grid.nodes().iter().map(|&w| f(w)).collect();
        Self::new(grid, amplitudes)
    }

    pub fn zeros(grid: &'g FrequencyGrid) -> Self {
        Self {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &'g FrequencyGrid {
        self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .zip(self.grid.weights())
            .map(|(a, w)| w * a.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Copy scaled to unit norm; fails for the zero packet.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::Validation(
                "cannot normalize a zero wave packet".into(),
            ));
        }
        Ok(Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &WavePacket<'_>) -> Result<Complex64> {
        if !std::ptr::eq(self.grid, other.grid) && self.grid != other.grid {
            return Err(Error::GridMismatch(
                "wave packets live on different grids".into(),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .zip(self.grid.weights())
            .map(|((a, b), w)| w * a.conj() * b)
            .sum())
    }
}

/// `M̃(z) = Σ_k w_k g(ω_k)² / (z + iω_k)`, the Laplace transform of the
/// quadrature kernel.
pub fn laplace_kernel(ff: &FormFactor, grid: &FrequencyGrid, z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain {
            what: "z",
            value: z.re,
            reason: "Laplace variable needs Re z > 0",
        });
    }
    ff.require_normalizable()?;
    Ok(grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .map(|(&w, &wt)| wt * ff.value_sq(w) / (z + Complex64::new(0.0, w)))
        .sum())
}

/// `F̃(z) = 1 / (z + M̃(z − iω₀))`.
///
/// The shifted kernel argument has the same real part as `z`, so `Re z > 0`
/// is required.
pub fn resolvent_f(model: &AtomModel, grid: &FrequencyGrid, z: Complex64) -> Result<Complex64> {
    let shifted = z - Complex64::new(0.0, model.omega0);
    let denom = z + laplace_kernel(&model.form_factor, grid, shifted)?;
    if denom.norm() < POLE_TOLERANCE {
        return Err(Error::Pole {
            modulus: denom.norm(),
        });
    }
    Ok(denom.inv())
}

/// `[i(ω − ω₀) + γ(ω)]⁻¹`, the boundary value of the survival resolvent in
/// the renormalized convention.
pub fn boundary_resolvent(model: &AtomModel, omega: f64) -> Result<Complex64> {
    let gamma = model.decay_rate(omega)?;
    let denom = Complex64::new(gamma, omega - model.omega0);
    if denom.norm() < POLE_TOLERANCE {
        return Err(Error::Pole {
            modulus: denom.norm(),
        });
    }
    Ok(denom.inv())
}

/// Unnormalized optimal packet `φ₀(ω) = i [i(ω − ω₀) + γ(ω)]⁻¹ g(ω)`.
///
/// Nodes where the boundary resolvent has a pole carry no coupling and get
/// zero amplitude.
pub fn optimal_packet<'g>(model: &AtomModel, grid: &'g FrequencyGrid) -> Result<WavePacket<'g>> {
    let amplitudes = grid
        .nodes()
        .iter()
        .map(|&w| {
            let g = model.form_factor.value(w);
            if g == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(Complex64::i() * boundary_resolvent(model, w)? * g)
        })
        .collect::<Result<Vec<_>>>()?;
    WavePacket::new(grid, amplitudes)
}

/// `|φ₀(ω)|² = (1/π) γ(ω) / ((ω − ω₀)² + γ(ω)²)`.
fn fidelity_density(model: &AtomModel, omega: f64) -> f64 {
    let gamma = PI * model.form_factor.value_sq(omega);
    if gamma == 0.0 {
        return 0.0;
    }
    let d = omega - model.omega0;
    gamma / (d * d + gamma * gamma) / PI
}

/// Maximal recovery fidelity with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    /// `quadrature + tail_estimate`.
    pub value: f64,
    /// Integral over `[0, ω_max]` on the grid.
    pub quadrature: f64,
    /// Analytic estimate of the part beyond `ω_max`.
    pub tail_estimate: f64,
}

/// `F_max = (1/π) ∫₀^∞ γ(ω) / ((ω − ω₀)² + γ(ω)²) dω`.
///
/// The grid covers `[0, ω_max]`. Beyond it `γ` is frozen at `γ(ω_max)`,
/// which integrates to `arctan(γ(ω_max)/(ω_max − ω₀))/π`; for a constant
/// rate this is exact. A coupling with compact support inside the grid has
/// no tail.
pub fn max_fidelity_exact(model: &AtomModel, grid: &FrequencyGrid) -> Result<FidelityEstimate> {
    model.form_factor.validate()?;
    let omega_max = grid.omega_max();
    if omega_max <= model.omega0 {
        return Err(Error::Domain {
            what: "omega_max",
            value: omega_max,
            reason: "grid must extend beyond omega0",
        });
    }
    let quadrature = grid.integrate(|w| fidelity_density(model, w));
    let tail_estimate = match model.form_factor.support_end() {
        Some(end) if end <= omega_max => 0.0,
        _ => {
            let gamma_max = PI * model.form_factor.value_sq(omega_max);
            (gamma_max / (omega_max - model.omega0)).atan() / PI
        }
    };
    Ok(FidelityEstimate {
        value: quadrature + tail_estimate,
        quadrature,
        tail_estimate,
    })
}

/// Weak-coupling closed form `1 − γ/(πω₀)`.
pub fn max_fidelity_markov(gamma: f64, omega0: f64) -> Result<f64> {
    require_positive("gamma", gamma)?;
    require_positive("omega0", omega0)?;
    let ratio = gamma / omega0;
    if ratio > MARKOV_WARN_RATIO {
        log::warn!("gamma/omega0 = {ratio} is outside the weak-coupling regime");
    }
    Ok(1.0 - ratio / PI)
}

/// Error-per-cycle figures for a decay rate `γ` and splitting `ω₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// `η = 2πγ/ω₀ = γτ`.
    pub eta: f64,
    /// `ε_min = η/(2π²)`.
    pub epsilon_min: f64,
    /// `η_corr = η²/(2π²)`.
    pub eta_corr: f64,
    /// `γ/ω₀`.
    pub heuristic_ratio: f64,
    /// `τ = 2π/ω₀`.
    pub tau: f64,
}

pub fn error_metrics(gamma: f64, omega0: f64) -> Result<ErrorMetrics> {
    require_positive("gamma", gamma)?;
    require_positive("omega0", omega0)?;
    let eta = 2.0 * PI * gamma / omega0;
    let two_pi_sq = 2.0 * PI * PI;
    Ok(ErrorMetrics {
        eta,
        epsilon_min: eta / two_pi_sq,
        eta_corr: eta * eta / two_pi_sq,
        heuristic_ratio: gamma / omega0,
        tau: 2.0 * PI / omega0,
    })
}

/// Fidelity after repeated measurement and correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MulticycleFidelity {
    /// `n = γt`, not rounded.
    pub cycles: f64,
    /// `[1 − γ/(πω₀)]ⁿ`.
    pub power_form: f64,
    /// `e^{−η_corr t/τ}`.
    pub exponential_form: f64,
    /// `power_form − exponential_form`.
    pub difference: f64,
}

pub fn multicycle_fidelity(gamma: f64, omega0: f64, t: f64) -> Result<MulticycleFidelity> {
    require_nonnegative("gamma", gamma)?;
    require_positive("omega0", omega0)?;
    require_nonnegative("t", t)?;
    let cycles = gamma * t;
    let ratio = gamma / omega0;
    let power_form = (cycles * (-ratio / PI).ln_1p()).exp();
    let eta = 2.0 * PI * ratio;
    let eta_corr = eta * eta / (2.0 * PI * PI);
    let tau = 2.0 * PI / omega0;
    let exponential_form = (-eta_corr * t / tau).exp();
    Ok(MulticycleFidelity {
        cycles,
        power_form,
        exponential_form,
        difference: power_form - exponential_form,
    })
}

/// Aggregated fidelity and error figures for one model.
///
/// Field order is the serialized column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub gamma: f64,
    pub omega0: f64,
    pub eta: f64,
    pub f_max_exact: f64,
    pub f_max_markov: f64,
    pub epsilon_min: f64,
    pub eta_corr: f64,
    pub heuristic_ratio: f64,
    pub tail_estimate: f64,
    pub tau: f64,
}

impl RecoveryReport {
    /// Column names of [`RecoveryReport::csv_values`].
    pub const CSV_COLUMNS: [&'static str; 9] = [
        "gamma",
        "omega0",
        "eta",
        "f_max_exact",
        "f_max_markov",
        "epsilon_min",
        "eta_corr",
        "heuristic_ratio",
        "tail_estimate",
    ];

    /// Flat row in [`RecoveryReport::CSV_COLUMNS`] order.
    pub fn csv_values(&self) -> [f64; 9] {
        [
            self.gamma,
            self.omega0,
            self.eta,
            self.f_max_exact,
            self.f_max_markov,
            self.epsilon_min,
            self.eta_corr,
            self.heuristic_ratio,
            self.tail_estimate,
        ]
    }

    /// `(1 − F_max)/η`, which tends to `1/(2π²)` at weak coupling.
    pub fn error_ratio(&self) -> f64 {
        (1.0 - self.f_max_exact) / self.eta
    }
}

pub fn recovery_report(model: &AtomModel, grid: &FrequencyGrid) -> Result<RecoveryReport> {
    let gamma = model.gamma();
    if !(gamma > 0.0) {
        return Err(Error::Validation(
            "form factor does not couple at omega0 (gamma = 0): no decay channel".into(),
        ));
    }
    let exact = max_fidelity_exact(model, grid)?;
    let metrics = error_metrics(gamma, model.omega0)?;
    Ok(RecoveryReport {
        gamma,
        omega0: model.omega0,
        eta: metrics.eta,
        f_max_exact: exact.value,
        f_max_markov: max_fidelity_markov(gamma, model.omega0)?,
        epsilon_min: metrics.epsilon_min,
        eta_corr: metrics.eta_corr,
        heuristic_ratio: metrics.heuristic_ratio,
        tail_estimate: exact.tail_estimate,
        tau: metrics.tau,
    })
}

/// Recovery amplitude `R(ψ) = ⟨φ₀|ψ⟩` from the frequency-domain packet.
pub fn recovery_amplitude(model: &AtomModel, packet: &WavePacket<'_>) -> Result<Complex64> {
    optimal_packet(model, packet.grid())?.inner(packet)
}
