use serde::Serialize;

use crate::corpus::DEFAULT_EPOCH_SIZE;
use crate::disk::RhoMode;
use crate::metric::Normalization;
use crate::neighbors::DEFAULT_TOP_K;

pub const DEFAULT_WINDOW: usize = 3;
pub const DEFAULT_MIN_COUNT: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Tsv,
    Json,
    Svg,
}

/// Settings shared by every pipeline stage; echoed into output metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub window: usize,
    pub min_count: u64,
    pub k: usize,
    pub normalization: Normalization,
    pub rho_mode: RhoMode,
    pub epoch_size: usize,
    pub epsilon_rho: f64,
    pub epsilon_theta: f64,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window: DEFAULT_WINDOW,
            min_count: DEFAULT_MIN_COUNT,
            k: DEFAULT_TOP_K,
            normalization: Normalization::Relative,
            rho_mode: RhoMode::Squared,
            epoch_size: DEFAULT_EPOCH_SIZE,
            epsilon_rho: crate::disk::DEFAULT_EPSILON,
            epsilon_theta: crate::disk::DEFAULT_EPSILON,
            format: OutputFormat::Tsv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.window == 0 {
            return Err("--window must be >= 1".into());
        }
        if self.k == 0 {
            return Err("--top-k must be >= 1".into());
        }
        if self.epoch_size == 0 {
            return Err("--epoch-size must be >= 1".into());
        }
        for (name, eps) in [("--epsilon-rho", self.epsilon_rho), ("--epsilon-theta", self.epsilon_theta)] {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(format!("{name} must be a positive number"));
            }
        }
        Ok(())
    }
}
