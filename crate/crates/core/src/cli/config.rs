//! Optional TOML configuration holding the planning defaults.
//!
//! ```toml
//! budget = 81920
//! levels = [640, 512, 384, 256, 160, 128]
//! max_len = 16384
//!
//! [fps]
//! general = 1.0
//! temporal_detail = 2.0
//! dense_motion = 5.0
//!
//! [cost]
//! alpha = 1415577600.0
//! beta = 276480.0
//! ```
//!
//! Command-line flags take precedence over the file.

use std::path::Path;

use serde::Deserialize;

use super::CliError;
use crate::geometry::CostModel;
use crate::videoplan::SamplingPolicy;

pub const DEFAULT_MAX_LEN: usize = 16_384;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub budget: Option<u64>,
    pub levels: Option<Vec<u64>>,
    pub max_len: Option<usize>,
    #[serde(default)]
    pub fps: FpsConfig,
    #[serde(default)]
    pub cost: CostConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FpsConfig {
    pub general: Option<f64>,
    pub temporal_detail: Option<f64>,
    pub dense_motion: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Data(format!("invalid config {}: {}", path.display(), e.message())))
    }

    pub fn policy(&self, budget_flag: Option<u64>) -> Result<SamplingPolicy, CliError> {
        let d = SamplingPolicy::default();
        let policy = SamplingPolicy {
            default_fps: self.fps.general.unwrap_or(d.default_fps),
            detailed_fps: self.fps.temporal_detail.unwrap_or(d.detailed_fps),
            dense_fps: self.fps.dense_motion.unwrap_or(d.dense_fps),
            budget: budget_flag.or(self.budget).unwrap_or(d.budget),
            levels: self.levels.clone().unwrap_or(d.levels),
        };
        policy.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(policy)
    }

    pub fn max_len(&self, flag: Option<usize>) -> usize {
        flag.or(self.max_len).unwrap_or(DEFAULT_MAX_LEN)
    }

    pub fn cost_model(&self, alpha: Option<f64>, beta: Option<f64>) -> Result<CostModel, CliError> {
        let d = CostModel::default();
        CostModel::new(
            alpha.or(self.cost.alpha).unwrap_or(d.alpha),
            beta.or(self.cost.beta).unwrap_or(d.beta),
        )
        .map_err(|e| CliError::Usage(e.to_string()))
    }
}
