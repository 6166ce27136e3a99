use anyhow::Result;
use serde::Serialize;
use wwlab_core::spectral::{recovery_report, RecoveryReport};

use super::spectral_grid;
use crate::config::{ExperimentConfig, Format};
use crate::output::{write_json, Destination, Table};
use crate::Verdict;

#[derive(Debug, Serialize)]
struct ReportDocument {
    #[serde(flatten)]
    report: RecoveryReport,
    omega_max: f64,
    nodes: usize,
}

/// Report and grid metadata for one config.
pub fn compute(config: &ExperimentConfig) -> Result<(RecoveryReport, f64, usize)> {
    let model = config.model()?;
    let grid = spectral_grid(config, &model)?;
    Ok((
        recovery_report(&model, &grid)?,
        grid.omega_max(),
        grid.len(),
    ))
}

pub fn run(config: &ExperimentConfig, dest: &Destination) -> Result<Verdict> {
    let (report, omega_max, nodes) = compute(config)?;
    let mut out = dest.open()?;
    match dest.format {
        Format::Csv => {
            let mut table = Table::new(RecoveryReport::CSV_COLUMNS);
            table.push_numbers(report.csv_values());
            table.note("omega_max", omega_max);
            table.note("nodes", nodes);
            table.note("tau", report.tau);
            table.write_csv(&mut out)?;
        }
        Format::Json => write_json(
            &mut out,
            &ReportDocument {
                report,
                omega_max,
                nodes,
            },
        )?,
    }
    out.flush()?;
    Ok(Verdict::Ok)
}
