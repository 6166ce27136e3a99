pub mod recover;
pub mod report;
pub mod survival;
pub mod sweep;

use anyhow::Result;
use wwlab_core::model::{make_grid, make_mode_grid, AtomModel, FrequencyGrid};
use wwlab_core::oracle::{build_model, DiscretizedModel};

use crate::config::ExperimentConfig;

/// Quadrature grid for the frequency-domain pipeline.
pub fn spectral_grid(config: &ExperimentConfig, model: &AtomModel) -> Result<FrequencyGrid> {
    Ok(make_grid(
        &model.form_factor,
        model.omega0,
        config.grid.panels,
        config.grid.nodes_per_panel,
    )?)
}

/// Finite-mode oracle on `config.oracle.modes` modes.
pub fn oracle(config: &ExperimentConfig, model: &AtomModel) -> Result<DiscretizedModel> {
    let grid = make_mode_grid(&model.form_factor, model.omega0, config.oracle.modes)?;
    Ok(build_model(model, &grid)?)
}
