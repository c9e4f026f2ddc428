use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::BOOTSTRAP_ITERATIONS;
use crate::numerics::DistanceKind;
use crate::stability::SheshaConfig;
use crate::synthetic::DEFAULT_SEED;

pub const SEED_ENV: &str = "GSTB_SEED";

/// Seed from `GSTB_SEED` when set, else the default.
pub fn env_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::InvalidParameter(format!("{SEED_ENV}='{v}' is not a u64"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub splits: usize,
    pub distance: DistanceKind,
    pub max_samples: Option<usize>,
    pub bootstrap_iterations: usize,
    pub output: Option<String>,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SheshaConfig::default();
        Self {
            seed: DEFAULT_SEED,
            splits: s.n_splits,
            distance: s.distance,
            max_samples: s.max_samples,
            bootstrap_iterations: BOOTSTRAP_ITERATIONS,
            output: None,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

impl RunConfig {
    pub fn shesha(&self) -> SheshaConfig {
        SheshaConfig::default()
            .with_seed(self.seed)
            .with_splits(self.splits)
            .with_distance(self.distance)
            .with_max_samples(self.max_samples)
    }

    /// Parameters echoed into reports; the worker count and output path are
    /// left out because they never change results.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "splits": self.splits,
            "distance": self.distance,
            "max_samples": self.max_samples,
            "bootstrap_iterations": self.bootstrap_iterations,
        })
    }
}
