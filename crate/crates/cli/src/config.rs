//! JSON experiment config. Every field is optional; command-line flags win.

use std::fs;
use std::path::{Path, PathBuf};

use scnn_core::AccumulationMode;
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub target: Option<String>,
    pub mode: Option<AccumulationMode>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub bound: BoundSection,
    #[serde(default)]
    pub energy: EnergySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(rename = "N")]
    pub width: Option<usize>,
    pub grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub network: Option<PathBuf>,
    #[serde(rename = "Ms")]
    pub lens: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub epsilon: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSection {
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub width: Option<usize>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub alpha_sum: Option<f64>,
    pub trials: Option<usize>,
    pub grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub len: Option<usize>,
    #[serde(rename = "N")]
    pub width: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
    }
}
