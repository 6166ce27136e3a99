//! Time-domain dynamics: the memory kernel `M(t) = ⟨g|g_t⟩` and the coupled
//! Volterra equations for `F(t) = ⟨e|W(t)|e⟩` and `G(t) = ⟨e|W(t)|g_t⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::model::{FormFactor, FrequencyGrid};

/// Largest admissible `dt·ω_max`.
pub const MAX_PHASE_PER_STEP: f64 = 0.5;

/// `M(t_j)` sampled at `t_j = j·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryKernel {
    pub dt: f64,
    pub samples: Vec<Complex64>,
}

impl MemoryKernel {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |j| j as f64 * self.dt)
    }
}

/// Sampled `F`, `G` and the survival amplitude `S` on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTrace {
    pub dt: f64,
    pub f_samples: Vec<Complex64>,
    pub g_samples: Vec<Complex64>,
    pub s_samples: Vec<Complex64>,
}

impl AmplitudeTrace {
    pub fn len(&self) -> usize {
        self.f_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| j as f64 * self.dt).collect()
    }
}

/// Default step `min(0.5/ω_max, 0.02/γ(ω₀))`, resolving both the fastest
/// oscillation on the grid and the decay.
pub fn default_time_step(gamma0: f64, omega_max: f64) -> f64 {
    let oscillation = MAX_PHASE_PER_STEP / omega_max;
    if gamma0 > 0.0 {
        oscillation.min(0.02 / gamma0)
    } else {
        oscillation
    }
}

/// `M(t_j) = Σ_k w_k g(ω_k)² e^{−iω_k t_j}` for `j = 0..=steps`.
pub fn memory_kernel(
    ff: &FormFactor,
    grid: &FrequencyGrid,
    dt: f64,
    steps: usize,
) -> Result<MemoryKernel> {
    ff.validate()?;
    ff.require_normalizable()?;
    require_positive("dt", dt)?;
    let product = dt * grid.omega_max();
    if product > MAX_PHASE_PER_STEP {
        return Err(Error::StepSize {
            dt,
            product,
            limit: MAX_PHASE_PER_STEP,
        });
    }
    let spectral: Vec<(f64, f64)> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .map(|(&w, &wt)| (w, wt * ff.value_sq(w)))
        .filter(|&(_, s)| s != 0.0)
        .collect();
    let samples = (0..=steps)
        .map(|j| {
            let t = j as f64 * dt;
            spectral
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &(w, s)| {
                    let (sin, cos) = (w * t).sin_cos();
                    acc + Complex64::new(s * cos, -s * sin)
                })
        })
        .collect();
    Ok(MemoryKernel { dt, samples })
}

/// Solve
///
/// ```text
/// F(t) = 1 − i ∫₀ᵗ G(s) e^{iω₀s} ds
/// G(t) = −i ∫₀ᵗ F(s) e^{−iω₀s} M(t−s) ds
/// ```
///
/// with trapezoidal product integration on both integrals. The implicit
/// endpoint terms couple `F_n` and `G_n` through a 2×2 system that is solved
/// in closed form at every step, so the scheme is second order in `dt`.
///
/// `omega0` is the frequency appearing in the free Hamiltonian. Since
/// `W(t) = e^{−iHt} e^{iH₀t}`, `F(t) = S(t) e^{+iω₀t}` and the survival
/// amplitude is recovered as `S(t) = F(t) e^{−iω₀t}`.
pub fn solve_volterra(omega0: f64, kernel: &MemoryKernel) -> Result<AmplitudeTrace> {
    require_positive("omega0", omega0)?;
    if kernel.is_empty() {
        return Err(Error::Validation("memory kernel has no samples".into()));
    }
    let dt = kernel.dt;
    let m = &kernel.samples;
    let n_samples = m.len();
    let i = Complex64::i();
    let phase = |t: f64| Complex64::from_polar(1.0, -omega0 * t);

    let mut f = Vec::with_capacity(n_samples);
    let mut g = Vec::with_capacity(n_samples);
    // F_j e^{−iω₀t_j}, reused by every later G_n
    let mut f_rot = Vec::with_capacity(n_samples);
    f.push(Complex64::new(1.0, 0.0));
    g.push(Complex64::new(0.0, 0.0));
    f_rot.push(Complex64::new(1.0, 0.0));
    // running Σ' of G_j e^{iω₀t_j}: ½ first term plus interior terms
    let mut g_sum = Complex64::new(0.0, 0.0);

    for n in 1..n_samples {
        let t = n as f64 * dt;
        let em = phase(t);
        let ep = em.conj();

        let mut conv = 0.5 * f_rot[0] * m[n];
        for j in 1..n {
            conv += f_rot[j] * m[n - j];
        }
        let g_known = -i * dt * conv;
        let a = -i * (0.5 * dt) * em * m[0];

        let tp = (n - 1) as f64 * dt;
        let prev = g[n - 1] * phase(tp).conj();
        g_sum += if n == 1 { 0.5 * prev } else { prev };
        let f_known = Complex64::new(1.0, 0.0) - i * dt * g_sum;
        let b = -i * (0.5 * dt) * ep;

        let f_n = (f_known + b * g_known) / (Complex64::new(1.0, 0.0) - a * b);
        let g_n = g_known + a * f_n;
        if !f_n.norm().is_finite() || f_n.norm() > 1.01 {
            return Err(Error::Discretization {
                step: n,
                time: t,
                modulus: f_n.norm(),
            });
        }
        f.push(f_n);
        g.push(g_n);
        f_rot.push(f_n * em);
    }

    let s = f_rot.clone();
    Ok(AmplitudeTrace {
        dt,
        f_samples: f,
        g_samples: g,
        s_samples: s,
    })
}

/// `|S(t_j)|²`.
pub fn survival_probability(trace: &AmplitudeTrace) -> Vec<f64> {
    trace.s_samples.iter().map(|s| s.norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_grid, make_grid_to, FormFactor};

    fn lorentzian() -> FormFactor {
        FormFactor::lorentzian(0.01, 1.0, 0.1).unwrap()
    }

    #[test]
    fn zero_coupling_kernel_and_trace() {
        let ff = FormFactor::zero();
        let grid = make_grid_to(&ff, 1.0, 4.0, 20, 6).unwrap();
        let k = memory_kernel(&ff, &grid, 0.1, 50).unwrap();
        assert!(k.samples.iter().all(|m| *m == Complex64::new(0.0, 0.0)));
        let tr = solve_volterra(1.0, &k).unwrap();
        assert!(tr.f_samples.iter().all(|f| *f == Complex64::new(1.0, 0.0)));
        assert!(tr.g_samples.iter().all(|g| g.norm() == 0.0));
        assert!(survival_probability(&tr)
            .iter()
            .all(|p| (p - 1.0).abs() < 1e-15));
    }

    #[test]
    fn kernel_at_zero_is_coupling_norm() {
        let ff = lorentzian();
        let grid = make_grid(&ff, 1.0, 200, 10).unwrap();
        let k = memory_kernel(&ff, &grid, 0.05, 3).unwrap();
        let norm = grid.integrate(|w| ff.value_sq(w));
        assert_eq!(k.samples[0].im, 0.0);
        assert!((k.samples[0].re - norm).abs() < 1e-12 * norm);
        assert!(k.samples[0].re > 0.0);
    }

    #[test]
    fn lorentzian_kernel_matches_pole_form() {
        // extending the frequency integral to the full line gives γκ e^{−iω₀t − κt}
        let (gamma, kappa) = (0.01, 0.1);
        let ff = lorentzian();
        let grid = make_grid(&ff, 1.0, 300, 10).unwrap();
        let dt = 0.05;
        let steps = (5.0 / kappa / dt) as usize;
        let k = memory_kernel(&ff, &grid, dt, steps).unwrap();
        for (j, m) in k.samples.iter().enumerate() {
            let t = j as f64 * dt;
            let pole = gamma * kappa * Complex64::from_polar((-kappa * t).exp(), -t);
            assert!((m - pole).norm() / (gamma * kappa) < 0.05, "t = {t}");
        }
    }

    #[test]
    fn kernel_bounded_by_origin_value() {
        let ff = FormFactor::gaussian_cutoff(0.1, 2.0).unwrap();
        let grid = make_grid(&ff, 1.0, 100, 8).unwrap();
        let dt = 0.4 / grid.omega_max();
        let k = memory_kernel(&ff, &grid, dt, 2000).unwrap();
        let m0 = k.samples[0].re;
        assert!(k.samples.iter().all(|m| m.norm() <= m0 * (1.0 + 1e-12)));
    }

    #[test]
    fn step_size_and_family_checks() {
        let ff = lorentzian();
        let grid = make_grid(&ff, 1.0, 50, 6).unwrap();
        assert!(matches!(
            memory_kernel(&ff, &grid, 0.2, 10),
            Err(Error::StepSize { .. })
        ));
        let c = FormFactor::constant(0.01).unwrap();
        assert!(matches!(
            memory_kernel(&c, &grid, 0.01, 10),
            Err(Error::Validation(_))
        ));
        let empty = MemoryKernel {
            dt: 0.1,
            samples: vec![],
        };
        assert!(solve_volterra(1.0, &empty).is_err());
    }

    #[test]
    fn trace_invariants() {
        let ff = lorentzian();
        let grid = make_grid(&ff, 1.0, 100, 8).unwrap();
        let dt = default_time_step(0.01, grid.omega_max());
        assert!((dt - 0.1).abs() < 1e-15);
        let k = memory_kernel(&ff, &grid, dt, 1500).unwrap();
        let tr = solve_volterra(1.0, &k).unwrap();
        assert_eq!(tr.f_samples[0], Complex64::new(1.0, 0.0));
        assert_eq!(tr.g_samples[0], Complex64::new(0.0, 0.0));
        assert_eq!(tr.s_samples[0], Complex64::new(1.0, 0.0));
        for (f, s) in tr.f_samples.iter().zip(&tr.s_samples) {
            assert!((f.norm() - s.norm()).abs() < 1e-14);
            assert!(s.norm() <= 1.0 + 1e-6);
        }
        let p = survival_probability(&tr);
        assert_eq!(p[0], 1.0);
        // weak coupling: decays roughly like e^{-2γt} over the first lifetimes
        let t = 50.0;
        let j = (t / dt) as usize;
        assert!((p[j] - (-2.0 * 0.01 * t).exp()).abs() < 0.1);
    }

    #[test]
    fn exponential_kernel_closed_form() {
        // M(t) = c e^{−iω₀t} reduces the system to F'' = −cF, so F = cos(√c t)
        let (c, w0, dt) = (0.04, 1.0, 0.01);
        let samples = (0..=3000)
            .map(|j| c * Complex64::from_polar(1.0, -w0 * j as f64 * dt))
            .collect();
        let tr = solve_volterra(w0, &MemoryKernel { dt, samples }).unwrap();
        for (j, f) in tr.f_samples.iter().enumerate() {
            let t = j as f64 * dt;
            assert!((f - Complex64::new((c.sqrt() * t).cos(), 0.0)).norm() < 1e-5);
        }
    }

    #[test]
    fn divergence_is_reported() {
        // a kernel that violates positivity drives |F| above one
        let dt = 0.1;
        let samples = (0..200).map(|_| Complex64::new(-1.0, 0.0)).collect();
        let r = solve_volterra(1.0, &MemoryKernel { dt, samples });
        assert!(matches!(r, Err(Error::Discretization { .. })));
    }
}
