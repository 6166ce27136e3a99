//! Cross-checks between the time-domain, frequency-domain and finite-mode
//! routes, plus independent oracles for individual operations.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wwlab_core::dynamics::{
    default_time_step, memory_kernel, solve_volterra, survival_probability,
};
use wwlab_core::model::{
    lamb_shift, make_grid, make_mode_grid, make_mode_grid_to, AtomModel, FormFactor, FrequencyGrid,
};
use wwlab_core::oracle::{
    brute_force_max_fidelity, build_model, build_model_with, moller_apply, recovery_amplitude,
    simulate_protocol, survival_exact, Counterterm, DiscretizedModel,
};
use wwlab_core::spectral::{max_fidelity_exact, optimal_packet, WavePacket};

fn lorentzian(gamma: f64, kappa: f64) -> AtomModel {
    AtomModel::new(1.0, FormFactor::lorentzian(gamma, 1.0, kappa).unwrap()).unwrap()
}

fn oracle(model: &AtomModel, n: usize) -> DiscretizedModel {
    let grid = make_mode_grid(&model.form_factor, model.omega0, n).unwrap();
    build_model(model, &grid).unwrap()
}

fn volterra_vs_oracle(
    dm: &DiscretizedModel,
    model: &AtomModel,
    horizon: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let dt = default_time_step(model.gamma(), dm.grid().omega_max());
    let steps = (horizon / dt).round() as usize;
    let kernel = memory_kernel(&model.form_factor, dm.grid(), dt, steps).unwrap();
    let trace = solve_volterra(dm.bare_omega0(), &kernel).unwrap();
    let exact = survival_exact(dm, &trace.times()).unwrap();
    (trace.s_samples, exact)
}

fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn volterra_matches_oracle_survival() {
    let model = lorentzian(0.01, 0.1);
    let dm = oracle(&model, 1000);
    let (volterra, exact) = volterra_vs_oracle(&dm, &model, 200.0);
    assert!(max_dev(&volterra, &exact) < 1e-3);
}

#[test]
fn survival_phase_is_fixed_by_the_oracle() {
    // S = F e^{−iω₀t} reproduces the oracle; the opposite sign does not
    let model = lorentzian(0.01, 0.1);
    let dm = oracle(&model, 1000);
    let dt = default_time_step(model.gamma(), dm.grid().omega_max());
    let kernel = memory_kernel(&model.form_factor, dm.grid(), dt, 1000).unwrap();
    let trace = solve_volterra(dm.bare_omega0(), &kernel).unwrap();
    let times = trace.times();
    let exact = survival_exact(&dm, &times).unwrap();
    let flipped: Vec<Complex64> = trace
        .f_samples
        .iter()
        .zip(&times)
        .map(|(f, &t)| f * Complex64::from_polar(1.0, dm.bare_omega0() * t))
        .collect();
    assert!(max_dev(&trace.s_samples, &exact) < 1e-4);
    assert!(max_dev(&flipped, &exact) > 0.5);
}

#[test]
fn weak_coupling_survival_follows_fitted_rate() {
    let (gamma, kappa) = (0.005, 1.0);
    let model = lorentzian(gamma, kappa);
    let dm = oracle(&model, 2000);
    let probe: Vec<f64> = (1..=300).map(|j| j as f64).collect();
    let s = survival_exact(&dm, &probe).unwrap();
    // least squares of ln|S|² = −2γ′t through the origin
    let num: f64 = probe
        .iter()
        .zip(&s)
        .map(|(t, s)| t * s.norm_sqr().ln())
        .sum();
    let den: f64 = probe.iter().map(|t| t * t).sum();
    let fitted = -0.5 * num / den;
    assert!((fitted - gamma).abs() < 0.1 * gamma, "fitted {fitted}");

    let horizon = 1.5 / fitted;
    let dt = default_time_step(gamma, dm.grid().omega_max());
    let kernel = memory_kernel(&model.form_factor, dm.grid(), dt, (horizon / dt) as usize).unwrap();
    let trace = solve_volterra(dm.bare_omega0(), &kernel).unwrap();
    let p = survival_probability(&trace);
    let worst = p
        .iter()
        .enumerate()
        .map(|(j, p)| (p - (-2.0 * fitted * j as f64 * dt).exp()).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 0.03, "max deviation {worst}");
}

#[test]
fn weak_coupling_survival_is_monotone_inside_window() {
    let model = lorentzian(0.01, 0.1);
    let dm = oracle(&model, 2000);
    let times: Vec<f64> = (0..1000).map(|j| j as f64 * 0.5).collect();
    let p: Vec<f64> = survival_exact(&dm, &times)
        .unwrap()
        .iter()
        .map(|s| s.norm_sqr())
        .collect();
    assert!(p.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn kernel_is_positive_semidefinite() {
    let model = lorentzian(0.01, 0.1);
    let grid = make_grid(&model.form_factor, 1.0, 100, 8).unwrap();
    let kernel = memory_kernel(&model.form_factor, &grid, 0.1, 2000).unwrap();
    let m = |i: usize, j: usize| {
        if i >= j {
            kernel.samples[i - j]
        } else {
            kernel.samples[j - i].conj()
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..200 {
        let idx: Vec<usize> = (0..4).map(|_| rng.random_range(0..=2000)).collect();
        let a = DMatrix::from_fn(4, 4, |r, c| m(idx[r], idx[c]));
        let eig = SymmetricEigen::new(a);
        assert!(
            eig.eigenvalues.iter().all(|&e| e >= -1e-8),
            "{:?}",
            eig.eigenvalues
        );
    }
}

/// Sum of a few Gaussian bumps with random centres, widths, phases and
/// delays; smooth in frequency, so localized in time.
fn random_smooth_packet<'g>(grid: &'g FrequencyGrid, rng: &mut ChaCha8Rng) -> WavePacket<'g> {
    let bumps: Vec<(f64, f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.7..1.3),
                rng.random_range(0.02..0.3),
                rng.random_range(0.1..1.0),
                rng.random_range(0.0..std::f64::consts::TAU),
                rng.random_range(-20.0..20.0),
            )
        })
        .collect();
    WavePacket::from_fn(grid, |w| {
        bumps
            .iter()
            .map(|&(c, s, a, phase, delay)| {
                let x = (w - c) / s;
                Complex64::from_polar(a * (-0.5 * x * x).exp(), phase + w * delay)
            })
            .sum()
    })
    .unwrap()
    .normalized()
    .unwrap()
}

#[test]
fn brute_force_bounds_random_packets() {
    let model = lorentzian(0.01, 0.1);
    let dm = oracle(&model, 1000);
    let t = 10.0 / model.gamma();
    let best = brute_force_max_fidelity(&dm, t).unwrap();
    assert!(best.value < 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let psi = random_smooth_packet(dm.grid(), &mut rng);
        let r = recovery_amplitude(&dm, &psi, t).unwrap();
        assert!(r.norm_sqr() <= best.value + 1e-12);
    }
    let r = recovery_amplitude(&dm, &best.maximizer, best.time).unwrap();
    assert!((r.norm_sqr() - best.value).abs() < 1e-3);
}

#[test]
fn uncoupled_sector_is_never_recovered() {
    let model = AtomModel::new(1.0, FormFactor::flat_window(0.01, 0.0, 2.0).unwrap()).unwrap();
    let grid = make_mode_grid_to(1.0, 4.0, 800).unwrap();
    let dm = build_model(&model, &grid).unwrap();
    let psi = WavePacket::from_fn(&grid, |w| {
        if w > 2.5 {
            Complex64::new(1.0, 0.5)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap()
    .normalized()
    .unwrap();
    assert!(recovery_amplitude(&dm, &psi, 100.0).unwrap().norm() < 1e-14);
    let trace = simulate_protocol(&dm, &psi, 100.0, &[0.0, 50.0, 100.0, 150.0]).unwrap();
    assert!(trace.iter().all(|&p| p < 1e-28));
    assert!(simulate_protocol(&dm, &psi, 10.0, &[]).unwrap().is_empty());
}

#[test]
fn moller_is_identity_without_coupling() {
    let model = AtomModel::new(1.0, FormFactor::zero()).unwrap();
    let grid = make_mode_grid_to(1.0, 4.0, 300).unwrap();
    let dm = build_model(&model, &grid).unwrap();
    let psi = WavePacket::from_fn(&grid, |w| {
        Complex64::from_polar((-(w - 1.0).powi(2)).exp(), w)
    })
    .unwrap()
    .normalized()
    .unwrap();
    let w = moller_apply(&dm, &psi, 50.0).unwrap();
    let back = w.value.photon_packet(&dm).unwrap();
    let diff: f64 = back
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-12);
    assert!(w.value.excited_amplitude().norm() < 1e-14);
    assert_eq!(brute_force_max_fidelity(&dm, 50.0).unwrap().value, 0.0);
}

#[test]
fn optimal_packet_matches_oracle_maximizer() {
    let model = AtomModel::new(1.0, FormFactor::flat_window(0.01, 0.0, 10.0).unwrap()).unwrap();
    let dm = oracle(&model, 1200);
    let best = brute_force_max_fidelity(&dm, 10.0 / model.gamma()).unwrap();
    let phi = optimal_packet(&model, dm.grid())
        .unwrap()
        .normalized()
        .unwrap();
    assert!(phi.inner(&best.maximizer).unwrap().norm_sqr() > 0.999);
}

#[test]
fn level_shift_counterterm_aligns_the_resonance() {
    // off-centre coupling shifts the level; without the counterterm the
    // optimal packet is detuned from the true resonance
    let ff = FormFactor::lorentzian(1.0, 1.05, 0.1)
        .unwrap()
        .with_gamma_at(1.0, 0.01)
        .unwrap();
    let model = AtomModel::new(1.0, ff).unwrap();
    let grid = make_mode_grid(&ff, 1.0, 1200).unwrap();
    let t = 10.0 / model.gamma();
    let overlap = |dm: &DiscretizedModel| {
        let best = brute_force_max_fidelity(dm, t).unwrap();
        let phi = optimal_packet(&model, dm.grid())
            .unwrap()
            .normalized()
            .unwrap();
        phi.inner(&best.maximizer).unwrap().norm_sqr()
    };
    let renormalized = overlap(&build_model(&model, &grid).unwrap());
    let bare = overlap(&build_model_with(&model, &grid, Counterterm::None).unwrap());
    assert!(renormalized > bare);
    assert!(renormalized > 0.99);
}

#[test]
fn closed_form_fidelity_exceeds_one_when_rate_rises_off_resonance() {
    // γ(ω) grows away from ω₀ toward the Lorentzian centre; the closed form
    // drops the dispersion of the level shift and overshoots, the finite-mode
    // model stays below one
    let ff = FormFactor::lorentzian(0.01, 1.5, 0.3)
        .unwrap()
        .with_gamma_at(1.0, 0.05)
        .unwrap();
    let model = AtomModel::new(1.0, ff).unwrap();
    let grid = make_grid(&ff, 1.0, 400, 12).unwrap();
    let closed = max_fidelity_exact(&model, &grid).unwrap().value;
    assert!(closed > 1.0, "{closed}");
    let dm = oracle(&model, 1500);
    let brute = brute_force_max_fidelity(&dm, 10.0 / model.gamma()).unwrap();
    assert!(brute.value < 1.0);
}

#[test]
fn grid_refinement_is_converged() {
    let model = lorentzian(0.01, 0.1);
    let coarse = make_grid(&model.form_factor, 1.0, 200, 10).unwrap();
    let fine = make_grid(&model.form_factor, 1.0, 200, 20).unwrap();
    let a = max_fidelity_exact(&model, &coarse).unwrap().value;
    let b = max_fidelity_exact(&model, &fine).unwrap().value;
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[test]
fn lamb_shift_matches_excluded_interval_quadrature() {
    let ff = FormFactor::lorentzian(0.01, 1.0, 0.1).unwrap();
    let grid = make_grid(&ff, 1.0, 300, 12).unwrap();
    let omega = 1.0;
    let omega_max = grid.omega_max();
    let g2 = |w: f64| {
        let g = ff.eval(w).unwrap();
        g * g
    };
    let excluded = |eps: f64| {
        let f = |w: f64| g2(w) / (omega - w);
        adaptive_simpson(&f, 0.0, omega - eps, 1e-14)
            + adaptive_simpson(&f, omega + eps, omega_max, 1e-14)
    };
    // symmetric exclusion error is even in ε; one Richardson step removes ε²
    let (e1, e2) = (excluded(2e-3), excluded(1e-3));
    let extrapolated = (4.0 * e2 - e1) / 3.0;
    let d = lamb_shift(&ff, omega, &grid).unwrap();
    assert!((d - extrapolated).abs() <= 1e-6, "{d} vs {extrapolated}");
}
