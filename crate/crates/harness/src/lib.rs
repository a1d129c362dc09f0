//! Experiment runners for the `gridroute` library: fast-reroute campaigns,
//! validation accuracy, multi-station attack campaigns, assumption checks and
//! validation microbenchmarks.

pub mod bench;
pub mod config;
pub mod frr;
pub mod multigs;
pub mod output;
pub mod validation;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridroute::{ConstellationConfig, SatelliteId};

pub use config::{ExperimentConfig, FailureMode, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] gridroute::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("invalid experiment config: {0}")]
    Config(String),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// Independent stream for one trial; identical for any thread count.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial))
}

pub fn random_sat(cfg: &ConstellationConfig, rng: &mut impl Rng) -> SatelliteId {
    cfg.sat_at(rng.gen_range(0..cfg.sat_count()))
}

pub fn random_pair(cfg: &ConstellationConfig, rng: &mut impl Rng) -> (SatelliteId, SatelliteId) {
    let s = random_sat(cfg, rng);
    loop {
        let d = random_sat(cfg, rng);
        if d != s {
            return (s, d);
        }
    }
}

pub fn random_time(cfg: &ConstellationConfig, rng: &mut impl Rng) -> f64 {
    rng.gen_range(0.0..cfg.period_s())
}

/// Value at the given quantile of `xs` (nearest rank); NaN when empty.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let idx = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    v[idx]
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
