//! Brute-force verifier: the continuum is replaced by the modes of a
//! frequency grid, the single-excitation Hamiltonian is diagonalized exactly
//! and every dynamical quantity is evaluated in its eigenbasis.
//!
//! Mode `k` couples with `g_k = g(ω_k)√w_k`, so that `Σ_k g_k² e^{−iω_k t}`
//! is the grid quadrature of the memory kernel. A finite mode set revives at
//! the recurrence time `2π/min_k(ω_{k+1} − ω_k)`; every time-dependent
//! operation here refuses times beyond half of it.

mod arrowhead;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use arrowhead::{arrowhead_eigen, ArrowheadEigen};

use crate::error::{Error, Result};
use crate::model::{lamb_shift, make_grid_to, AtomModel, FrequencyGrid};
use crate::spectral::WavePacket;

/// Default Møller certificate tolerance on `‖W(T)ψ − W(T/2)ψ‖`.
pub const MOLLER_TOLERANCE: f64 = 1e-2;

/// Panel layout of the Gauss–Legendre grid used for the level-shift
/// counterterm.
const COUNTERTERM_PANELS: usize = 400;
const COUNTERTERM_NODES: usize = 12;

/// How the excited-state energy on the diagonal of `H` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counterterm {
    /// Diagonal `ω₀ − Δ(ω₀)`, so the decaying pole sits at the physical
    /// (renormalized) `ω₀`.
    LevelShift,
    /// Diagonal `ω₀` as given.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    /// `e^{−iHt}`.
    Full,
    /// `e^{−iH₀t}`.
    Free,
}

/// Finite-mode single-excitation Hamiltonian with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct DiscretizedModel {
    omega0: f64,
    bare_omega0: f64,
    grid: FrequencyGrid,
    couplings: Vec<f64>,
    recurrence_time: f64,
    eigen: ArrowheadEigen,
}

impl DiscretizedModel {
    /// Physical transition frequency; the free evolution of `|e⟩` uses it.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Diagonal entry of `H` on `|e⟩`.
    pub fn bare_omega0(&self) -> f64 {
        self.bare_omega0
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn mode_freqs(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Number of photon modes `N`; the Hilbert space has dimension `N + 1`.
    pub fn n_modes(&self) -> usize {
        self.couplings.len()
    }

    pub fn dimension(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn recurrence_time(&self) -> f64 {
        self.recurrence_time
    }

    /// Largest time accepted by the time-dependent operations.
    pub fn time_limit(&self) -> f64 {
        0.5 * self.recurrence_time
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigen(&self) -> &ArrowheadEigen {
        &self.eigen
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t.abs() > self.time_limit() {
            return Err(Error::RecurrenceWindow {
                time: t,
                limit: self.time_limit(),
            });
        }
        Ok(())
    }

    fn check_grid(&self, packet: &WavePacket<'_>) -> Result<()> {
        let same = std::ptr::eq(packet.grid(), &self.grid) || *packet.grid() == self.grid;
        if !same {
            return Err(Error::GridMismatch(
                "wave packet is not defined on the oracle's mode grid".into(),
            ));
        }
        Ok(())
    }

    /// Eigenbasis coefficients `Vᵀψ`.
    fn to_eigenbasis(&self, state: &StateVector) -> Vec<Complex64> {
        let (re, im) = state.split();
        let vt = self.eigen.vectors.transpose();
        let cr = &vt * re;
        let ci = &vt * im;
        cr.iter()
            .zip(ci.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect()
    }

    fn state_from_eigenbasis(&self, coeffs: &[Complex64]) -> StateVector {
        let re = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|c| c.re));
        let im = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|c| c.im));
        let v = &self.eigen.vectors;
        let sr = v * re;
        let si = v * im;
        StateVector {
            amplitudes: sr
                .iter()
                .zip(si.iter())
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        }
    }
}

/// Discretize `model` on `grid` with the level-shift counterterm.
pub fn build_model(model: &AtomModel, grid: &FrequencyGrid) -> Result<DiscretizedModel> {
    build_model_with(model, grid, Counterterm::LevelShift)
}

pub fn build_model_with(
    model: &AtomModel,
    grid: &FrequencyGrid,
    counterterm: Counterterm,
) -> Result<DiscretizedModel> {
    let ff = &model.form_factor;
    ff.require_normalizable()?;
    if grid.len() < 2 {
        return Err(Error::Validation("oracle needs at least two modes".into()));
    }
    let bare_omega0 = match counterterm {
        Counterterm::None => model.omega0,
        Counterterm::LevelShift => {
            let fine = make_grid_to(
                ff,
                model.omega0,
                grid.omega_max(),
                COUNTERTERM_PANELS,
                COUNTERTERM_NODES,
            )?;
            model.omega0 - lamb_shift(ff, model.omega0, &fine)?
        }
    };
    let couplings: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .map(|(&w, &wt)| ff.value(w) * wt.sqrt())
        .collect();
    let eigen = arrowhead_eigen(bare_omega0, grid.nodes(), &couplings)?;
    let recurrence_time = grid.recurrence_time();
    log::debug!(
        "oracle: {} modes, bare omega0 {bare_omega0}, recurrence {recurrence_time:.1}, residual {:.2e}",
        grid.len(),
        eigen.residual
    );
    Ok(DiscretizedModel {
        omega0: model.omega0,
        bare_omega0,
        grid: grid.clone(),
        couplings,
        recurrence_time,
        eigen,
    })
}

/// Single-excitation state: index 0 is `|e⟩`, index `k + 1` is photon mode `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn excited(dm: &DiscretizedModel) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dm.dimension()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Photon state with mode amplitudes `ψ(ω_k)√w_k`.
    pub fn from_packet(dm: &DiscretizedModel, packet: &WavePacket<'_>) -> Result<Self> {
        dm.check_grid(packet)?;
        let mut amplitudes = Vec::with_capacity(dm.dimension());
        amplitudes.push(Complex64::new(0.0, 0.0));
        amplitudes.extend(
            packet
                .amplitudes()
                .iter()
                .zip(dm.grid.weights())
                .map(|(a, w)| a * w.sqrt()),
        );
        Ok(Self { amplitudes })
    }

    pub fn excited_amplitude(&self) -> Complex64 {
        self.amplitudes[0]
    }

    pub fn photon_amplitudes(&self) -> &[Complex64] {
        &self.amplitudes[1..]
    }

    /// Photon part as a wave packet on the model grid.
    pub fn photon_packet<'g>(&self, dm: &'g DiscretizedModel) -> Result<WavePacket<'g>> {
        let amps = self
            .photon_amplitudes()
            .iter()
            .zip(dm.grid.weights())
            .map(|(a, w)| a / w.sqrt())
            .collect();
        WavePacket::new(&dm.grid, amps)
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn photon_norm_sq(&self) -> f64 {
        self.photon_amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn split(&self) -> (DVector<f64>, DVector<f64>) {
        let n = self.amplitudes.len();
        (
            DVector::from_iterator(n, self.amplitudes.iter().map(|a| a.re)),
            DVector::from_iterator(n, self.amplitudes.iter().map(|a| a.im)),
        )
    }
}

fn check_dimension(dm: &DiscretizedModel, state: &StateVector) -> Result<()> {
    if state.amplitudes.len() != dm.dimension() {
        return Err(Error::GridMismatch(format!(
            "state has {} components, model has dimension {}",
            state.amplitudes.len(),
            dm.dimension()
        )));
    }
    Ok(())
}

/// Apply `e^{−iHt}` or `e^{−iH₀t}`; negative `t` runs backwards.
pub fn evolve(
    dm: &DiscretizedModel,
    state: &StateVector,
    t: f64,
    picture: Picture,
) -> Result<StateVector> {
    check_dimension(dm, state)?;
    if !t.is_finite() {
        return Err(Error::Validation("evolution time must be finite".into()));
    }
    Ok(match picture {
        Picture::Free => free_evolve(dm, state, t),
        Picture::Full => {
            let mut c = dm.to_eigenbasis(state);
            for (ci, &e) in c.iter_mut().zip(&dm.eigen.values) {
                *ci *= Complex64::from_polar(1.0, -e * t);
            }
            dm.state_from_eigenbasis(&c)
        }
    })
}

fn free_evolve(dm: &DiscretizedModel, state: &StateVector, t: f64) -> StateVector {
    let freqs = std::iter::once(dm.omega0).chain(dm.grid.nodes().iter().copied());
    StateVector {
        amplitudes: state
            .amplitudes
            .iter()
            .zip(freqs)
            .map(|(a, w)| a * Complex64::from_polar(1.0, -w * t))
            .collect(),
    }
}

/// `S(t) = Σ_α |⟨e|α⟩|² e^{−iE_α t}`.
pub fn survival_exact(dm: &DiscretizedModel, times: &[f64]) -> Result<Vec<Complex64>> {
    for &t in times {
        dm.check_time(t)?;
    }
    let weights: Vec<f64> = dm.eigen.vectors.row(0).iter().map(|v| v * v).collect();
    Ok(times
        .iter()
        .map(|&t| {
            weights
                .iter()
                .zip(&dm.eigen.values)
                .map(|(&p, &e)| p * Complex64::from_polar(1.0, -e * t))
                .sum()
        })
        .collect())
}

/// Result of a certified long-time limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Certified<T> {
    pub value: T,
    /// Time at which the certificate held.
    pub time: f64,
    /// `‖X(time) − X(time/2)‖`.
    pub certificate: f64,
}

/// Evaluate `step(T)` and `step(T/2)`, doubling `T` until they agree to `tol`.
fn certify(
    dm: &DiscretizedModel,
    t: f64,
    tol: f64,
    step: impl Fn(f64) -> StateVector,
) -> Result<Certified<StateVector>> {
    dm.check_time(t)?;
    if !(t > 0.0) {
        return Err(Error::Domain {
            what: "T",
            value: t,
            reason: "scattering time must be positive",
        });
    }
    let mut time = t;
    let mut half = step(0.5 * time);
    loop {
        let full = step(time);
        let certificate = full.distance(&half);
        if certificate < tol {
            return Ok(Certified {
                value: full,
                time,
                certificate,
            });
        }
        if 2.0 * time > dm.time_limit() {
            return Err(Error::NonConvergence {
                residual: certificate,
                horizon: time,
                tolerance: tol,
            });
        }
        time *= 2.0;
        half = full;
    }
}

/// `W(T)ψ = e^{−iHT} e^{iH₀T} ψ` with the default certificate tolerance.
pub fn moller_apply(
    dm: &DiscretizedModel,
    packet: &WavePacket<'_>,
    t: f64,
) -> Result<Certified<StateVector>> {
    moller_apply_tol(dm, packet, t, MOLLER_TOLERANCE)
}

pub fn moller_apply_tol(
    dm: &DiscretizedModel,
    packet: &WavePacket<'_>,
    t: f64,
    tol: f64,
) -> Result<Certified<StateVector>> {
    let psi = StateVector::from_packet(dm, packet)?;
    let coeffs_at = |time: f64| {
        let shifted = free_evolve(dm, &psi, -time);
        let mut c = dm.to_eigenbasis(&shifted);
        for (ci, &e) in c.iter_mut().zip(&dm.eigen.values) {
            *ci *= Complex64::from_polar(1.0, -e * time);
        }
        dm.state_from_eigenbasis(&c)
    };
    certify(dm, t, tol, coeffs_at)
}

/// `R(ψ) = ⟨e|W(T)|ψ⟩`.
pub fn recovery_amplitude(
    dm: &DiscretizedModel,
    packet: &WavePacket<'_>,
    t: f64,
) -> Result<Complex64> {
    Ok(moller_apply(dm, packet, t)?.value.excited_amplitude())
}

/// Brute-force maximal recovery fidelity and its maximizing packet.
#[derive(Debug, Clone)]
pub struct BruteForceFidelity<'g> {
    /// `‖χ‖²`.
    pub value: f64,
    /// `χ/‖χ‖` as a normalized packet on the model grid; zero when `χ = 0`.
    pub maximizer: WavePacket<'g>,
    pub time: f64,
    pub certificate: f64,
}

/// `max_ψ |⟨e|W(T)|ψ⟩|² = ‖P_ph W(T)†|e⟩‖²`, where
/// `W(T)†|e⟩ = e^{−iH₀T} e^{iHT} |e⟩` and `P_ph` projects on the photon modes.
pub fn brute_force_max_fidelity(dm: &DiscretizedModel, t: f64) -> Result<BruteForceFidelity<'_>> {
    let e = StateVector::excited(dm);
    let c = dm.to_eigenbasis(&e);
    let chi_at = |time: f64| {
        let phased: Vec<Complex64> = c
            .iter()
            .zip(&dm.eigen.values)
            .map(|(ci, &en)| ci * Complex64::from_polar(1.0, en * time))
            .collect();
        let mut s = free_evolve(dm, &dm.state_from_eigenbasis(&phased), time);
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s
    };
    let cert = certify(dm, t, MOLLER_TOLERANCE, chi_at)?;
    let value = cert.value.photon_norm_sq();
    let chi = cert.value.photon_packet(dm)?;
    let maximizer = if value > 0.0 { chi.normalized()? } else { chi };
    Ok(BruteForceFidelity {
        value,
        maximizer,
        time: cert.time,
        certificate: cert.certificate,
    })
}

/// Prepare `ψ̃ = e^{iH₀t₀}ψ`, evolve it under `H` and return `|⟨e|Ψ(t)⟩|²` at
/// each observation time.
pub fn simulate_protocol(
    dm: &DiscretizedModel,
    packet: &WavePacket<'_>,
    t0: f64,
    observe: &[f64],
) -> Result<Vec<f64>> {
    dm.check_time(t0)?;
    for &t in observe {
        dm.check_time(t)?;
    }
    let psi = StateVector::from_packet(dm, packet)?;
    let prepared = free_evolve(dm, &psi, -t0);
    let c = dm.to_eigenbasis(&prepared);
    let row: Vec<Complex64> = dm
        .eigen
        .vectors
        .row(0)
        .iter()
        .zip(&c)
        .map(|(&v, ci)| v * ci)
        .collect();
    Ok(observe
        .iter()
        .map(|&t| {
            row.iter()
                .zip(&dm.eigen.values)
                .map(|(r, &e)| r * Complex64::from_polar(1.0, -e * t))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect())
}
