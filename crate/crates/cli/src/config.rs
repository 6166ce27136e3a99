//! Experiment configuration document (TOML).

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use wwlab_core::model::{AtomModel, FormFactor};

/// Configuration used when no `--config` is given: Lorentzian coupling with
/// `γ = 0.01`, `κ = 0.1` centred on `ω₀ = 1`.
pub const DEFAULT_CONFIG: &str = r#"# Units: angular frequencies (rad per unit time) with hbar = 1;
# times are in the reciprocal unit, so gamma * t is dimensionless.
omega0 = 1.0

[form_factor]
family = "lorentzian"
gamma = 0.01
center = 1.0
width = 0.1
"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `γ(ω₀)`, the on-shell decay rate.
    Gamma,
    /// Transition frequency, with the coupling profile held fixed.
    Omega0,
    /// Shape scale: Lorentzian width, cutoff frequency or window length, with
    /// `γ(ω₀)` held fixed.
    Width,
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gamma => "gamma",
            Self::Omega0 => "omega0",
            Self::Width => "width",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub panels: usize,
    pub nodes_per_panel: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            panels: 400,
            nodes_per_panel: 12,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Volterra step; defaults to `min(0.5/ω_max, 0.02/γ)`.
    pub dt: Option<f64>,
    /// Survival horizon; defaults to `3/γ`.
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub modes: usize,
    /// Møller evolution time; defaults to `10/γ`.
    pub scattering_time: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            modes: 2000,
            scattering_time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Preparation time of the back-shifted packet; defaults to `10/γ`.
    pub t0: Option<f64>,
    /// Length of the observation window centred on `t0`.
    pub observe_span: f64,
    /// Number of equally spaced observation times; zero gives an empty trace.
    pub observe_points: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            t0: None,
            observe_span: 100.0,
            observe_points: 401,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub omega0: f64,
    pub form_factor: FormFactor,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).context("invalid configuration document")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn default_config() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("built-in configuration is valid")
    }

    /// Check every field, reporting all problems at once as `field: message`.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut positive = |field: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("{field}: must be a finite number > 0, got {v}"));
            }
        };
        positive("omega0", self.omega0);
        if let Some(dt) = self.time.dt {
            positive("time.dt", dt);
        }
        if let Some(h) = self.time.horizon {
            positive("time.horizon", h);
        }
        if let Some(t) = self.oracle.scattering_time {
            positive("oracle.scattering_time", t);
        }
        if let Some(t) = self.protocol.t0 {
            positive("protocol.t0", t);
        }
        if !(self.protocol.observe_span.is_finite() && self.protocol.observe_span >= 0.0) {
            problems.push(format!(
                "protocol.observe_span: must be a finite number >= 0, got {}",
                self.protocol.observe_span
            ));
        }
        if self.grid.panels == 0 {
            problems.push("grid.panels: must be >= 1".into());
        }
        if self.grid.nodes_per_panel == 0 {
            problems.push("grid.nodes_per_panel: must be >= 1".into());
        }
        if self.oracle.modes < 2 {
            problems.push("oracle.modes: must be >= 2".into());
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                problems.push("sweep.values: must not be empty".into());
            }
        }
        if let Err(e) = self.form_factor.validate() {
            problems.push(format!("form_factor: {e}"));
        } else if self.omega0 > 0.0 && self.model_unchecked().gamma() <= 0.0 {
            problems.push(format!(
                "form_factor: no decay channel, gamma(omega0) = 0 for {} coupling",
                self.form_factor.family_name()
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            anyhow::bail!("invalid configuration:\n  {}", problems.join("\n  "))
        }
    }

    fn model_unchecked(&self) -> AtomModel {
        AtomModel {
            omega0: self.omega0,
            form_factor: self.form_factor,
        }
    }

    pub fn model(&self) -> Result<AtomModel> {
        Ok(AtomModel::new(self.omega0, self.form_factor)?)
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Result<Self> {
        let mut next = self.clone();
        let gamma0 = self.model_unchecked().gamma();
        match parameter {
            SweepParameter::Gamma => {
                next.form_factor = self.form_factor.with_gamma_at(self.omega0, value)?;
            }
            SweepParameter::Omega0 => next.omega0 = value,
            SweepParameter::Width => {
                let reshaped = match self.form_factor {
                    FormFactor::Lorentzian { gamma, center, .. } => {
                        FormFactor::lorentzian(gamma, center, value)?
                    }
                    FormFactor::GaussianCutoff { amplitude, .. } => {
                        FormFactor::gaussian_cutoff(amplitude, value)?
                    }
                    FormFactor::OhmicExpCutoff { amplitude, .. } => {
                        FormFactor::ohmic_exp_cutoff(amplitude, value)?
                    }
                    FormFactor::FlatWindow { gamma, lo, .. } => {
                        FormFactor::flat_window(gamma, lo, lo + value)?
                    }
                    FormFactor::Constant { .. } => {
                        anyhow::bail!("width: constant coupling has no shape parameter")
                    }
                };
                next.form_factor = reshaped.with_gamma_at(self.omega0, gamma0)?;
            }
        }
        next.validate()?;
        Ok(next)
    }
}
