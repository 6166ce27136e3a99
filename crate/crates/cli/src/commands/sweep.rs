use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::Serialize;
use wwlab_core::spectral::RecoveryReport;

use super::report;
use crate::config::{ExperimentConfig, Format};
use crate::output::{fmt_f64, write_json, Destination, Table};
use crate::Verdict;

#[derive(Debug, Serialize)]
struct SweepRow {
    value: f64,
    report: Option<RecoveryReport>,
    ratio: Option<f64>,
    error: Option<String>,
}

pub fn run(config: &ExperimentConfig, dest: &Destination) -> Result<Verdict> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| anyhow!("sweep: config has no [sweep] table"))?;
    // rayon's indexed collect keeps input order
    let rows: Vec<SweepRow> = sweep
        .values
        .par_iter()
        .map(|&value| {
            let result = config
                .with_parameter(sweep.parameter, value)
                .and_then(|c| report::compute(&c));
            match result {
                Ok((r, _, _)) => SweepRow {
                    value,
                    ratio: Some(r.error_ratio()),
                    report: Some(r),
                    error: None,
                },
                Err(e) => SweepRow {
                    value,
                    report: None,
                    ratio: None,
                    error: Some(format!("{e:#}")),
                },
            }
        })
        .collect();

    let mut out = dest.open()?;
    match dest.format {
        Format::Csv => {
            let header = std::iter::once("value")
                .chain(RecoveryReport::CSV_COLUMNS)
                .chain(["ratio", "error"]);
            let mut table = Table::new(header);
            for row in &rows {
                let mut cells = vec![fmt_f64(row.value)];
                match &row.report {
                    Some(r) => cells.extend(r.csv_values().into_iter().map(fmt_f64)),
                    None => cells.extend(std::iter::repeat_n(String::new(), 9)),
                }
                cells.push(row.ratio.map(fmt_f64).unwrap_or_default());
                cells.push(row.error.clone().unwrap_or_default());
                table.rows.push(cells);
            }
            table.note("parameter", sweep.parameter);
            table.write_csv(&mut out)?;
        }
        Format::Json => write_json(&mut out, &rows)?,
    }
    out.flush()?;

    let failed: Vec<String> = rows
        .iter()
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("{} = {}: {e}", sweep.parameter, r.value))
        })
        .collect();
    Ok(if failed.is_empty() {
        Verdict::Ok
    } else {
        Verdict::Breach(failed)
    })
}
