use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{neighbor, ConstellationConfig, Direction, Heading, SatelliteId, Snapshot};

const ASSUMPTION_SEED: u64 = 0x5eed_a55e_0001;
const LAT_EPS: f64 = 1e-9;
const DELTA_EPS: f64 = 1e-9;
const LENGTH_EPS_M: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub samples: usize,
    pub violations: usize,
    /// Smallest slack observed; negative means violated. `None` until a sample is taken.
    pub worst_margin: Option<f64>,
}

impl AssumptionCheck {
    fn new() -> Self {
        Self {
            samples: 0,
            violations: 0,
            worst_margin: None,
        }
    }

    fn record(&mut self, margin: f64, violated: bool) {
        self.worst_margin = Some(self.worst_margin.map_or(margin, |m| m.min(margin)));
        if violated {
            self.violations += 1;
        }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub config: ConstellationConfig,
    pub sample_times: Vec<f64>,
    /// Intra-orbit lengths; margin is tolerance minus measured spread.
    pub property1: AssumptionCheck,
    pub intra_length_spread: f64,
    /// Per-column anti-monotone length order against equator distance; margin in meters.
    pub property2: AssumptionCheck,
    /// Pure row/column path versus the best mixed path; margin in seconds.
    pub assumption1: AssumptionCheck,
    /// Equator-spanning cross links per column and half-orbit.
    pub assumption2: AssumptionCheck,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.property1.holds()
            && self.property2.holds()
            && self.assumption1.holds()
            && self.assumption2.holds()
    }
}

pub fn verify_model_assumptions(
    cfg: &ConstellationConfig,
    sample_times: &[f64],
    sample_pairs: usize,
) -> AssumptionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(ASSUMPTION_SEED);
    let mut report = AssumptionReport {
        config: *cfg,
        sample_times: sample_times.to_vec(),
        property1: AssumptionCheck::new(),
        intra_length_spread: 0.0,
        property2: AssumptionCheck::new(),
        assumption1: AssumptionCheck::new(),
        assumption2: AssumptionCheck::new(),
    };
    let mut intra_min = f64::INFINITY;
    let mut intra_max = 0.0_f64;

    for &t in sample_times {
        let snap = Snapshot::at(cfg, t);
        for sat in cfg.satellites() {
            let len = snap.distance_m(sat, neighbor(cfg, sat, Direction::Prograde));
            intra_min = intra_min.min(len);
            intra_max = intra_max.max(len);
        }
        report.property1.samples += 1;
        for plane in 0..cfg.num_planes {
            check_column(cfg, &snap, plane, &mut report);
        }
        for _ in 0..sample_pairs {
            check_pure_path(cfg, &snap, &mut rng, &mut report.assumption1);
        }
    }

    if intra_min.is_finite() {
        report.intra_length_spread = (intra_max - intra_min) / intra_min;
        let margin = cfg.intra_length_tolerance - report.intra_length_spread;
        report.property1.record(margin, margin < 0.0);
    }
    report
}

fn check_column(cfg: &ConstellationConfig, snap: &Snapshot, plane: u32, report: &mut AssumptionReport) {
    let s = cfg.sats_per_plane;
    let mut links = Vec::with_capacity(s as usize);
    let mut straddles = [0usize; 2];
    let mut parallel = 0usize;
    for index in 0..s {
        let west = SatelliteId::new(plane, index);
        let east = neighbor(cfg, west, Direction::East);
        let (lw, le) = (snap.latitude(west), snap.latitude(east));
        if lw.abs() < LAT_EPS && le.abs() < LAT_EPS {
            parallel += 1;
        } else if lw * le < 0.0 || (lw.abs() < LAT_EPS) != (le.abs() < LAT_EPS) {
            let region = match snap.heading(west) {
                Heading::Northbound => 0,
                Heading::Southbound => 1,
            };
            straddles[region] += 1;
        }
        links.push((snap.midpoint_latitude(west, east).abs(), snap.distance_m(west, east)));
    }

    // Property 2: farther from the equator means strictly shorter.
    report.property2.samples += 1;
    let mut column_violation = false;
    for (i, &(di, li)) in links.iter().enumerate() {
        for &(dj, lj) in &links[i + 1..] {
            let (near, far) = match di.partial_cmp(&dj) {
                _ if (di - dj).abs() <= DELTA_EPS => continue,
                Some(Ordering::Less) => ((di, li), (dj, lj)),
                _ => ((dj, lj), (di, li)),
            };
            let margin = near.1 - far.1;
            report.property2.record(margin, false);
            column_violation |= margin <= -LENGTH_EPS_M;
        }
    }
    if column_violation {
        report.property2.violations += 1;
    }

    report.assumption2.samples += 1;
    let worst = straddles[0].max(straddles[1]);
    let margin = 1.0 - worst as f64 - parallel as f64;
    report.assumption2.record(margin, worst > 1 || parallel > 0);
}

fn check_pure_path(
    cfg: &ConstellationConfig,
    snap: &Snapshot,
    rng: &mut ChaCha8Rng,
    check: &mut AssumptionCheck,
) {
    let p = cfg.num_planes as i64;
    let s = cfg.sats_per_plane as i64;
    let src = cfg.sat(rng.gen_range(0..p), rng.gen_range(0..s));
    let same_row = rng.gen_bool(0.5);
    let (dst, pure) = if same_row {
        let span = rng.gen_range(1..=p / 2);
        let dst = cfg.sat(src.plane as i64 + span, src.index as i64);
        let east = straight_delay(cfg, snap, src, Direction::East, span);
        let west = straight_delay(cfg, snap, src, Direction::West, p - span);
        (dst, east.min(west))
    } else {
        let span = rng.gen_range(1..=s / 2);
        let dst = cfg.sat(src.plane as i64, src.index as i64 + span);
        let pro = straight_delay(cfg, snap, src, Direction::Prograde, span);
        let retro = straight_delay(cfg, snap, src, Direction::Retrograde, s - span);
        (dst, pro.min(retro))
    };
    let mixed = best_mixed_delay(cfg, snap, src, dst);
    check.samples += 1;
    let margin = mixed - pure;
    check.record(margin, margin <= 0.0);
}

fn straight_delay(cfg: &ConstellationConfig, snap: &Snapshot, from: SatelliteId, dir: Direction, steps: i64) -> f64 {
    let mut cur = from;
    let mut total = 0.0;
    for _ in 0..steps {
        let next = neighbor(cfg, cur, dir);
        total += snap.hop_delay_s(cur, next);
        cur = next;
    }
    total
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest delay over paths that use at least one link of each kind.
fn best_mixed_delay(cfg: &ConstellationConfig, snap: &Snapshot, src: SatelliteId, dst: SatelliteId) -> f64 {
    // state = sat * 4 + (used_intra | used_cross << 1)
    let n = cfg.sat_count();
    let mut dist = vec![f64::INFINITY; n * 4];
    let start = cfg.sat_index(src) * 4;
    dist[start] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, start));
    let goal = cfg.sat_index(dst) * 4 + 3;
    while let Some(Entry(d, state)) = heap.pop() {
        if d > dist[state] {
            continue;
        }
        if state == goal {
            return d;
        }
        let sat = cfg.sat_at(state / 4);
        let flags = state % 4;
        for dir in Direction::ALL {
            let next = neighbor(cfg, sat, dir);
            let bit = if dir.is_intra_orbit() { 1 } else { 2 };
            let ns = cfg.sat_index(next) * 4 + (flags | bit);
            let nd = d + snap.hop_delay_s(sat, next);
            if nd < dist[ns] {
                dist[ns] = nd;
                heap.push(Entry(nd, ns));
            }
        }
    }
    f64::INFINITY
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times(cfg: &ConstellationConfig, k: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k).map(|_| rng.gen_range(0.0..cfg.period_s())).collect()
    }

    #[test]
    fn default_shell_has_no_property2_violations() {
        let cfg = ConstellationConfig::default();
        let r = verify_model_assumptions(&cfg, &times(&cfg, 50, 1), 0);
        assert_eq!(r.property2.samples, 50 * 24);
        assert_eq!(r.property2.violations, 0, "{r:?}");
        assert!(r.property1.holds());
        assert!(r.intra_length_spread <= 0.02);
    }

    #[test]
    fn equatorial_shell_violates_assumption2() {
        let cfg = ConstellationConfig {
            inclination_deg: 0.0,
            ..ConstellationConfig::small(8, 12)
        };
        let r = verify_model_assumptions(&cfg, &[0.0, 100.0], 0);
        assert!(r.assumption2.violations > 0);
        assert!(r.assumption2.worst_margin.unwrap() < 0.0);
    }

    #[test]
    fn small_shell_same_column_margin_positive() {
        let cfg = ConstellationConfig::small(8, 12);
        let r = verify_model_assumptions(&cfg, &times(&cfg, 20, 2), 4);
        assert_eq!(r.assumption1.samples, 80);
        assert_eq!(r.assumption1.violations, 0);
        assert!(r.assumption1.worst_margin.unwrap() > 0.0);
    }

    #[test]
    fn report_serializes_to_json() {
        let cfg = ConstellationConfig::small(4, 8);
        let r = verify_model_assumptions(&cfg, &[0.0], 1);
        let text = serde_json::to_string(&r).unwrap();
        let back: AssumptionReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.assumption1.samples, 1);
    }
}
