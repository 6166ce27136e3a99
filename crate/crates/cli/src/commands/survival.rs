use anyhow::{bail, Result};
use serde::Serialize;
use wwlab_core::dynamics::{default_time_step, memory_kernel, solve_volterra};
use wwlab_core::oracle::survival_exact;

use super::oracle;
use crate::config::{ExperimentConfig, Format};
use crate::output::{write_json, Destination, Table};
use crate::Verdict;

/// Largest accepted `|S_volterra − S_oracle|`.
pub const SURVIVAL_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Serialize)]
struct SurvivalDocument {
    dt: f64,
    modes: usize,
    max_deviation: f64,
    t: Vec<f64>,
    volterra_re: Vec<f64>,
    volterra_im: Vec<f64>,
    oracle_re: Vec<f64>,
    oracle_im: Vec<f64>,
}

pub fn run(config: &ExperimentConfig, dest: &Destination) -> Result<Verdict> {
    let model = config.model()?;
    let gamma = model.gamma();
    let horizon = config.time.horizon.unwrap_or(3.0 / gamma);
    let dm = oracle(config, &model)?;
    if horizon > dm.time_limit() {
        bail!(
            "time.horizon: {horizon} exceeds the oracle validity window {:.1} for {} modes; \
             raise oracle.modes or shorten the horizon",
            dm.time_limit(),
            dm.n_modes()
        );
    }
    let dt = config
        .time
        .dt
        .unwrap_or_else(|| default_time_step(gamma, dm.grid().omega_max()));
    let steps = (horizon / dt).round().max(1.0) as usize;
    let kernel = memory_kernel(&model.form_factor, dm.grid(), dt, steps)?;
    let trace = solve_volterra(dm.bare_omega0(), &kernel)?;
    let times = trace.times();
    let exact = survival_exact(&dm, &times)?;
    let max_deviation = trace
        .s_samples
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let mut out = dest.open()?;
    match dest.format {
        Format::Csv => {
            let mut table = Table::new([
                "t",
                "volterra_re",
                "volterra_im",
                "volterra_p",
                "oracle_re",
                "oracle_im",
                "oracle_p",
            ]);
            for ((t, s), e) in times.iter().zip(&trace.s_samples).zip(&exact) {
                table.push_numbers([*t, s.re, s.im, s.norm_sqr(), e.re, e.im, e.norm_sqr()]);
            }
            table.note("dt", dt);
            table.note("modes", dm.n_modes());
            table.note("max_deviation", max_deviation);
            table.write_csv(&mut out)?;
        }
        Format::Json => write_json(
            &mut out,
            &SurvivalDocument {
                dt,
                modes: dm.n_modes(),
                max_deviation,
                t: times.clone(),
                volterra_re: trace.s_samples.iter().map(|s| s.re).collect(),
                volterra_im: trace.s_samples.iter().map(|s| s.im).collect(),
                oracle_re: exact.iter().map(|s| s.re).collect(),
                oracle_im: exact.iter().map(|s| s.im).collect(),
            },
        )?,
    }
    out.flush()?;
    Ok(if max_deviation > SURVIVAL_TOLERANCE {
        Verdict::Breach(vec![format!(
            "max |S_volterra - S_oracle| = {max_deviation:.3e} > {SURVIVAL_TOLERANCE:e}"
        )])
    } else {
        Verdict::Ok
    })
}
