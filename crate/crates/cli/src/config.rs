//! Optimizer configuration and result documents.

use bellkit_core::formats::{SettingsDoc, FORMAT_VERSION};
use bellkit_core::{FreeParameters, Objective, OptimizationConfig, OptimizationResult};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn default_tolerance() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfigDoc {
    pub format_version: String,
    pub objective: Objective,
    pub free: FreeParameters,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<SettingsDoc>,
    #[serde(default)]
    pub record_trace: bool,
}

impl OptimizerConfigDoc {
    pub fn to_config(&self) -> CliResult<OptimizationConfig> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Input(format!(
                "unsupported format_version {:?}, expected {FORMAT_VERSION:?}",
                self.format_version
            )));
        }
        if self.restarts == 0 {
            return Err(CliError::Input("restarts must be positive".into()));
        }
        if !self.free.any() {
            return Err(CliError::Input(
                "at least one parameter group must be free".into(),
            ));
        }
        Ok(OptimizationConfig {
            objective: self.objective,
            free: self.free,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            seed: self.seed,
            tolerance: self.tolerance,
            base: self
                .base
                .as_ref()
                .map(SettingsDoc::to_settings)
                .transpose()?,
            record_trace: self.record_trace,
            parallel: false,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub format_version: String,
    pub expression: Option<String>,
    pub objective: Objective,
    pub seed: u64,
    pub restarts: usize,
    pub best_objective: f64,
    pub violated: bool,
    pub iterations_used: usize,
    pub restart_index: usize,
    pub best_settings: SettingsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<(usize, f64)>>,
}

impl OptimizationReport {
    pub fn new(
        expression: Option<String>,
        config: &OptimizationConfig,
        r: &OptimizationResult,
    ) -> Self {
        OptimizationReport {
            format_version: FORMAT_VERSION.into(),
            expression,
            objective: config.objective,
            seed: config.seed,
            restarts: config.restarts,
            best_objective: r.best_objective,
            violated: r.violated,
            iterations_used: r.iterations_used,
            restart_index: r.restart_index,
            best_settings: SettingsDoc::from_settings(&r.best_settings, None),
            trace: r.trace.clone(),
        }
    }
}
