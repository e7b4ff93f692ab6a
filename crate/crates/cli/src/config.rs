//! Experiment files: flat keys plus `[generate]` and `[[method]]` tables.
//!
//! ```toml
//! benchmark = ["nb201-seed0.tsv", "nb201-seed1.tsv"]
//! workers = 4
//! seeds = [0, 1, 2, 3, 4]
//! eta = 3
//! max_resource = 200
//! num_configs = 256
//!
//! [[method]]
//! mode = "pasha"
//! ranking = "soft:0.025"
//!
//! [[method]]
//! name = "asha-eta4"
//! mode = "asha"
//! eta = 4
//! ```
//!
//! Command-line flags override the file; `--method` replaces the file's
//! method list.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub benchmark: Vec<PathBuf>,
    pub generate: Option<GenerateSection>,
    pub workers: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub eta: Option<u64>,
    pub min_resource: Option<u64>,
    pub max_resource: Option<u64>,
    pub num_configs: Option<usize>,
    pub ranking: Option<String>,
    pub rung_pairing: Option<String>,
    pub random_draws: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    #[serde(default)]
    pub method: Vec<MethodSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    pub name: Option<String>,
    pub mode: String,
    pub ranking: Option<String>,
    pub eta: Option<u64>,
    pub min_resource: Option<u64>,
    pub max_resource: Option<u64>,
    pub num_configs: Option<usize>,
    pub rung_pairing: Option<String>,
    pub random_draws: Option<usize>,
}

/// Generated benchmark, one table per seed.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSection {
    pub n_configs: usize,
    pub units: u64,
    pub seeds: Vec<u64>,
    pub family: Option<String>,
    pub rate: Option<f64>,
    pub noise: Option<f64>,
    pub horizon: Option<u64>,
    pub skew: Option<f64>,
    pub jitter: Option<f64>,
    pub crossing_rate: Option<f64>,
    #[serde(default)]
    pub allow_crossings: bool,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}
