use anyhow::{Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wwlab_core::model::FrequencyGrid;
use wwlab_core::oracle::{brute_force_max_fidelity, simulate_protocol};
use wwlab_core::spectral::{max_fidelity_exact, optimal_packet, recovery_amplitude, WavePacket};

use super::oracle;
use crate::config::{ExperimentConfig, Format};
use crate::output::{write_json, write_json_file, Destination, Table};
use crate::Verdict;

/// Largest accepted `|F_brute − F_exact|`.
pub const RECOVERY_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Serialize)]
pub struct RecoverSummary {
    pub gamma: f64,
    pub omega0: f64,
    pub modes: usize,
    pub seed: u64,
    pub f_max_exact: f64,
    pub f_brute_force: f64,
    pub brute_force_diff: f64,
    pub scattering_time: f64,
    pub certificate: f64,
    pub optimal_overlap: f64,
    pub optimal_fidelity: f64,
    pub baseline_fidelity: f64,
    pub t0: f64,
    /// Largest excited population over the observation window; absent when
    /// no observation times were requested.
    pub protocol_peak: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RecoverDocument<'a> {
    summary: &'a RecoverSummary,
    t: &'a [f64],
    p_excited: &'a [f64],
}

/// Normalized packet made of three Gaussian bumps near the resonance with
/// random widths, phases and delays.
fn baseline_packet<'g>(grid: &'g FrequencyGrid, omega0: f64, seed: u64) -> Result<WavePacket<'g>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<[f64; 5]> = (0..3)
        .map(|_| {
            [
                omega0 * rng.random_range(0.7..1.3),
                omega0 * rng.random_range(0.02..0.3),
                rng.random_range(0.1..1.0),
                rng.random_range(0.0..std::f64::consts::TAU),
                rng.random_range(-20.0..20.0) / omega0,
            ]
        })
        .collect();
    let packet = WavePacket::from_fn(grid, |w| {
        bumps
            .iter()
            .map(|&[c, s, a, phase, delay]| {
                let x = (w - c) / s;
                Complex64::from_polar(a * (-0.5 * x * x).exp(), phase + w * delay)
            })
            .sum()
    })?;
    Ok(packet.normalized()?)
}

fn observation_times(t0: f64, span: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![t0],
        n => (0..n)
            .map(|j| t0 - 0.5 * span + span * j as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn run(config: &ExperimentConfig, dest: &Destination) -> Result<Verdict> {
    let model = config.model()?;
    let gamma = model.gamma();
    let grid = super::spectral_grid(config, &model)?;
    let exact = max_fidelity_exact(&model, &grid)?.value;

    let dm = oracle(config, &model)?;
    let scattering_time = config.oracle.scattering_time.unwrap_or(10.0 / gamma);
    let brute = brute_force_max_fidelity(&dm, scattering_time)
        .context("brute-force recovery did not converge")?;

    let phi0 = optimal_packet(&model, dm.grid())?;
    let phi = phi0.normalized()?;
    let optimal_overlap = phi.inner(&brute.maximizer)?.norm_sqr();
    let optimal_fidelity = recovery_amplitude(&model, &phi)?.norm_sqr();
    let baseline = baseline_packet(dm.grid(), model.omega0, config.seed)?;
    let baseline_fidelity = recovery_amplitude(&model, &baseline)?.norm_sqr();

    let t0 = config.protocol.t0.unwrap_or(10.0 / gamma);
    let observe = observation_times(
        t0,
        config.protocol.observe_span,
        config.protocol.observe_points,
    );
    let trace = simulate_protocol(&dm, &phi, t0, &observe)?;
    let protocol_peak = trace.iter().copied().reduce(f64::max);

    let summary = RecoverSummary {
        gamma,
        omega0: model.omega0,
        modes: dm.n_modes(),
        seed: config.seed,
        f_max_exact: exact,
        f_brute_force: brute.value,
        brute_force_diff: (brute.value - exact).abs(),
        scattering_time: brute.time,
        certificate: brute.certificate,
        optimal_overlap,
        optimal_fidelity,
        baseline_fidelity,
        t0,
        protocol_peak,
    };

    let mut out = dest.open()?;
    match dest.format {
        Format::Csv => {
            let mut table = Table::new(["t", "p_excited"]);
            for (t, p) in observe.iter().zip(&trace) {
                table.push_numbers([*t, *p]);
            }
            let value = serde_json::to_value(&summary)?;
            for (k, v) in value.as_object().into_iter().flatten() {
                table.note(k, v);
            }
            table.write_csv(&mut out)?;
        }
        Format::Json => write_json(
            &mut out,
            &RecoverDocument {
                summary: &summary,
                t: &observe,
                p_excited: &trace,
            },
        )?,
    }
    out.flush()?;
    if let Some(path) = dest.sidecar() {
        write_json_file(&path, &summary)?;
    }

    let mut breaches = Vec::new();
    if summary.brute_force_diff > RECOVERY_TOLERANCE {
        breaches.push(format!(
            "|F_brute - F_exact| = {:.3e} > {RECOVERY_TOLERANCE:e}",
            summary.brute_force_diff
        ));
    }
    if baseline_fidelity > optimal_fidelity {
        breaches.push(format!(
            "baseline packet fidelity {baseline_fidelity} exceeds optimal {optimal_fidelity}"
        ));
    }
    Ok(if breaches.is_empty() {
        Verdict::Ok
    } else {
        Verdict::Breach(breaches)
    })
}
