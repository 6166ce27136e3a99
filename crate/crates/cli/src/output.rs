//! Table and document writers shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::Format;

/// Resolved output destination.
#[derive(Debug, Clone)]
pub struct Destination {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Destination {
    pub fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    /// `<out>.summary.json` next to a file destination.
    pub fn sidecar(&self) -> Option<PathBuf> {
        self.path.as_deref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".summary.json");
            PathBuf::from(s)
        })
    }
}

/// Numeric table followed by `# key = value` metadata lines.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<(String, String)>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn push_numbers(&mut self, row: impl IntoIterator<Item = f64>) {
        self.rows.push(row.into_iter().map(fmt_f64).collect());
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.footer.push((key.to_string(), value.to_string()));
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        for (k, v) in &self.footer {
            writeln!(out, "# {k} = {v}")?;
        }
        Ok(())
    }
}

/// Shortest round-trip representation, so output is reproducible bit for bit.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_json_file(path: &Path, value: &impl Serialize) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_json(&mut w, value)?;
    w.flush()?;
    Ok(())
}
