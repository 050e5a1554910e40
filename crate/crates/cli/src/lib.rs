//! Scenario runner for `spinfactor`: TOML scenario files in, CSV and TOML
//! summaries out.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::Path;

use spinfactor::Stepper;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use scenario::{Mode, Outcome, Scenario};

/// Command-line overrides applied on top of the scenario file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub stepper: Option<Stepper>,
    pub steps: Option<usize>,
}

pub fn load(path: &Path, overrides: Overrides) -> Result<ScenarioConfig, CliError> {
    let mut config = ScenarioConfig::load(path)?;
    if let Some(s) = overrides.stepper {
        config.stepper = s;
    }
    if let Some(steps) = overrides.steps {
        if steps < 2 {
            return Err(CliError::Config(format!("--steps: must be >= 2 (got {steps})")));
        }
        match config.grid.as_mut() {
            Some(g) => g.steps = steps,
            None => return Err(CliError::Config("--steps: scenario has no [grid]".into())),
        }
    }
    config.check_domain()?;
    Ok(config)
}

pub fn evaluate(config: ScenarioConfig, mode: Mode) -> Result<(Scenario, Outcome), CliError> {
    let scenario = Scenario::build(config)?;
    let outcome = scenario.execute(mode)?;
    Ok((scenario, outcome))
}
