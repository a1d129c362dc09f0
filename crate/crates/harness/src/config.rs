use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gridroute::ground::GroundStationDb;
use gridroute::ConstellationConfig;

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Frr,
    Validation,
    MultiGs,
    Assumptions,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    /// All failures hit the path the packet was sent on.
    Simultaneous,
    /// The source learns every failure but the last before sending.
    Consecutive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub trials: usize,
    pub failure_count: u32,
    pub failure_mode: FailureMode,
    pub rng_seed: u64,
    pub constellation: Option<PathBuf>,
    pub ground_stations: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Routing state (source paths, LFA and bypass tables) is refreshed on this period.
    pub recompute_period_s: f64,
    /// Packets leave up to this long after the last failure, on stale headers.
    pub notification_window_s: f64,
    pub stretch_thresholds_pct: Vec<f64>,
    pub botnet_sizes: Vec<usize>,
    pub bench_headers: usize,
    pub assumption_samples: usize,
    pub assumption_pairs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Frr,
            trials: 1000,
            failure_count: 1,
            failure_mode: FailureMode::Simultaneous,
            rng_seed: 1,
            constellation: None,
            ground_stations: None,
            output: None,
            recompute_period_s: 1.0,
            notification_window_s: 0.1,
            stretch_thresholds_pct: vec![10.0, 20.0],
            botnet_sizes: vec![100, 500, 1000],
            bench_headers: 10_000,
            assumption_samples: 50,
            assumption_pairs: 20,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.failure_count > 3 {
            return Err(HarnessError::Config(format!("failure_count {} exceeds 3", self.failure_count)));
        }
        if !(self.recompute_period_s > 0.0) || !(self.notification_window_s >= 0.0) {
            return Err(HarnessError::Config("timing parameters must be positive".into()));
        }
        if self.stretch_thresholds_pct.iter().any(|p| !(*p >= 0.0)) {
            return Err(HarnessError::Config("stretch thresholds must be non-negative".into()));
        }
        Ok(())
    }

    pub fn constellation(&self) -> Result<ConstellationConfig> {
        match &self.constellation {
            Some(p) => Ok(ConstellationConfig::load(p)?),
            None => Ok(ConstellationConfig::default()),
        }
    }

    pub fn ground_stations(&self) -> Result<GroundStationDb> {
        match &self.ground_stations {
            Some(p) => Ok(GroundStationDb::load(p)?),
            None => Ok(GroundStationDb::cities()),
        }
    }
}
