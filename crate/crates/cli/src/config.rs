use std::path::{Path, PathBuf};

use serde::Deserialize;

use ggslab::quotient::DEFAULT_MAX_POINTS;
use ggslab::word_problem::DEFAULT_DEPTH_CAP;

/// Settings read from a TOML file; command-line flags win.
///
/// ```toml
/// group = "p=3; e=1,2"
/// max_points = 3125
/// depth_cap = 64
/// seed = 42
/// output_dir = "reports"
/// gens = ["a b", "b^2 a"]
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub group: Option<String>,
    pub max_points: Option<u64>,
    pub depth_cap: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub gens: Option<Vec<String>>,
}

pub const ENV_VAR: &str = "GGSLAB_CONFIG";

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let config: Config =
            toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
        if config.max_points == Some(0) {
            return Err("max_points must be positive".into());
        }
        if config.depth_cap == Some(0) {
            return Err("depth_cap must be positive".into());
        }
        Ok(config)
    }

    pub fn max_points(&self) -> u64 {
        self.max_points.unwrap_or(DEFAULT_MAX_POINTS)
    }

    pub fn depth_cap(&self) -> usize {
        self.depth_cap.unwrap_or(DEFAULT_DEPTH_CAP)
    }
}
