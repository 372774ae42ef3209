use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmetric::{MkConfig, TruncationConfig};

/// Grids and settings for `verify` and `sweep`, read from one JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub q_grid: Vec<f64>,
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<u32>,
    pub truncation: TruncationConfig,
    pub mk: MkConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            q_grid: vec![0.3, 0.5, 0.7, 0.9, 1.0],
            n_grid: vec![1, 2, 4, 8, 16, 32, 64],
            truncation: TruncationConfig::default(),
            mk: MkConfig::default(),
            seed: 0,
            output_dir: PathBuf::from("out"),
            jobs: None,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

impl SweepConfig {
    /// Parse JSON text; syntax errors report line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)
            .map_err(|e| invalid(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_grid.is_empty() {
            return Err(invalid("q_grid", "must not be empty"));
        }
        if self.n_grid.is_empty() {
            return Err(invalid("N_grid", "must not be empty"));
        }
        if let Some(q) = self.q_grid.iter().find(|q| !(**q > 0.0 && **q <= 1.0)) {
            return Err(invalid("q_grid", format!("value {q} is outside (0, 1]")));
        }
        if self.q_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("q_grid", "must be strictly increasing"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("N_grid", "must be strictly increasing"));
        }
        let t = &self.truncation;
        if t.growth_step == 0 || t.max_degree == 0 {
            return Err(invalid("truncation", "max_degree and growth_step must be positive"));
        }
        if t.stop_tol.is_nan() || t.stop_tol <= 0.0 {
            return Err(invalid("truncation.stop_tol", "must be positive"));
        }
        if self.jobs == Some(0) {
            return Err(invalid("jobs", "must be positive"));
        }
        Ok(())
    }
}
