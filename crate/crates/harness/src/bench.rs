//! Per-packet timing of header validation against the delay-threshold baseline.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use gridroute::baselines::{delay_threshold_validate, dijkstra, WeightedSnapshot};
use gridroute::codec::{encode_path, PacketHeader};
use gridroute::forwarding::LinkStateMap;
use gridroute::validator::{validate_checks, ValidatorOptions};
use gridroute::{SatelliteId, Snapshot};

use crate::validation::pick_endpoints;
use crate::{median, quantile, trial_rng, ExperimentConfig, Result};

const DISTINCT_HEADERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub p5_ns: f64,
    pub median_ns: f64,
    pub p95_ns: f64,
}

impl Timing {
    fn of(samples: &[f64]) -> Self {
        Self {
            p5_ns: quantile(samples, 0.05),
            median_ns: median(samples),
            p95_ns: quantile(samples, 0.95),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub headers: usize,
    pub distinct_headers: usize,
    pub validator: Timing,
    pub baseline: Timing,
    pub speedup_median: f64,
    pub validations_per_s: f64,
    pub max_tag_passes: u32,
    pub passed: usize,
}

pub fn run_bench(exp: &ExperimentConfig) -> Result<BenchReport> {
    let cfg = exp.constellation()?;
    let db = exp.ground_stations()?;
    let opts = ValidatorOptions::default();
    let none = LinkStateMap::new();
    let threshold = exp.stretch_thresholds_pct.first().copied().unwrap_or(10.0);

    let mut cases: Vec<(Snapshot, PacketHeader, SatelliteId)> = Vec::with_capacity(DISTINCT_HEADERS);
    for i in 0..DISTINCT_HEADERS {
        let mut rng = trial_rng(exp.rng_seed, i as u64);
        let (src, dst, snap, ingress, egress) = pick_endpoints(&cfg, &db, &mut rng);
        let net = WeightedSnapshot::new(&snap, &none);
        let Some(path) = dijkstra(&net, ingress, egress) else { continue };
        let Ok(header) = PacketHeader::new(src, dst, encode_path(&cfg, &path)) else { continue };
        cases.push((snap, header, ingress));
    }
    let n = exp.bench_headers.max(1);
    let batch = |i: usize| &cases[i % cases.len()];

    let mut sg = Vec::with_capacity(n);
    let mut base = Vec::with_capacity(n);
    let mut max_tag_passes = 0;
    let mut passed = 0;
    for i in 0..n {
        let (snap, header, ingress) = batch(i);
        let start = Instant::now();
        let v = black_box(validate_checks(&cfg, &db, &opts, black_box(header), *ingress, snap.time()));
        sg.push(start.elapsed().as_nanos() as f64);
        max_tag_passes = max_tag_passes.max(v.metrics.tag_passes);
        passed += usize::from(v.passed);

        let net = WeightedSnapshot::new(snap, &none);
        let start = Instant::now();
        black_box(delay_threshold_validate(&net, black_box(&header.tags), *ingress, threshold));
        base.push(start.elapsed().as_nanos() as f64);
    }

    let start = Instant::now();
    for i in 0..n {
        let (snap, header, ingress) = batch(i);
        black_box(validate_checks(&cfg, &db, &opts, black_box(header), *ingress, snap.time()));
    }
    let validations_per_s = n as f64 / start.elapsed().as_secs_f64();

    let validator = Timing::of(&sg);
    let baseline = Timing::of(&base);
    Ok(BenchReport {
        headers: n,
        distinct_headers: cases.len(),
        speedup_median: baseline.median_ns / validator.median_ns.max(1.0),
        validator,
        baseline,
        validations_per_s,
        max_tag_passes,
        passed,
    })
}
