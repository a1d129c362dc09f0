//! Fast-reroute campaigns against LFA, MPLS FRR and the two optimal references.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gridroute::baselines::{dijkstra, lfa_route, mpls_frr_route, SchemeOutcome, WeightedSnapshot};
use gridroute::codec::{encode_path, PacketHeader};
use gridroute::forwarding::{route_packet_in, LinkStateMap, Outcome};
use gridroute::grid::theory_shortest_path_in;
use gridroute::{ConstellationConfig, Error, LinkId, LinkKind, Path, SatelliteId, Snapshot};

use crate::{random_pair, random_time, trial_rng, ExperimentConfig, FailureMode, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Starglider,
    Lfa,
    MplsFrr,
    OptimalLocal,
    OptimalGlobal,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Starglider,
        Scheme::Lfa,
        Scheme::MplsFrr,
        Scheme::OptimalLocal,
        Scheme::OptimalGlobal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Starglider => "starglider",
            Scheme::Lfa => "lfa",
            Scheme::MplsFrr => "mpls_frr",
            Scheme::OptimalLocal => "optimal_local",
            Scheme::OptimalGlobal => "optimal_global",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub delivered: bool,
    /// Infinite when not delivered.
    pub delay_s: f64,
    pub hops: Option<usize>,
    /// Percent over the post-failure optimum; infinite when not delivered.
    pub delay_stretch_pct: f64,
    pub hop_stretch: Option<i64>,
    pub reroutes: u32,
    pub drop_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrrTrial {
    pub trial: usize,
    /// Failure event within the trial, from 0.
    pub event: usize,
    pub src: SatelliteId,
    pub dst: SatelliteId,
    pub failure_time_s: f64,
    pub send_time_s: f64,
    pub failures: Vec<LinkId>,
    pub header_tags: usize,
    pub results: Vec<SchemeResult>,
}

impl FrrTrial {
    pub fn result(&self, scheme: Scheme) -> &SchemeResult {
        self.results.iter().find(|r| r.scheme == scheme).expect("all schemes recorded")
    }
}

struct Reference {
    delay_s: f64,
    hops: usize,
}

fn scored(scheme: Scheme, path: Option<&Path>, snap: &Snapshot, opt: &Reference) -> SchemeResult {
    match path {
        Some(p) => {
            let delay_s = p.delay(snap);
            SchemeResult {
                scheme,
                delivered: true,
                delay_s,
                hops: Some(p.hops()),
                delay_stretch_pct: stretch_pct(delay_s, opt.delay_s),
                hop_stretch: Some(p.hops() as i64 - opt.hops as i64),
                reroutes: 0,
                drop_reason: None,
            }
        }
        None => SchemeResult {
            scheme,
            delivered: false,
            delay_s: f64::INFINITY,
            hops: None,
            delay_stretch_pct: f64::INFINITY,
            hop_stretch: None,
            reroutes: 0,
            drop_reason: Some("no_backup".into()),
        },
    }
}

fn stretch_pct(delay: f64, best: f64) -> f64 {
    if delay.is_finite() {
        ((delay / best - 1.0) * 100.0).max(0.0)
    } else {
        f64::INFINITY
    }
}

/// Fails links one at a time, each on the shortest path that survives the
/// earlier ones.
fn place_failures(
    snap: &Snapshot,
    s: SatelliteId,
    d: SatelliteId,
    count: u32,
    rng: &mut impl Rng,
) -> Result<Vec<LinkId>> {
    let cfg = snap.config();
    let mut failures = LinkStateMap::new();
    let mut order = Vec::new();
    for _ in 0..count {
        let net = WeightedSnapshot::new(snap, &failures);
        let current = dijkstra(&net, s, d).ok_or(Error::NoPath { from: s, to: d })?;
        let links: Vec<LinkId> = current.links(cfg).collect();
        let link = links[rng.gen_range(0..links.len())];
        failures.fail_link(link);
        order.push(link);
    }
    Ok(order)
}

fn link_map(links: &[LinkId]) -> LinkStateMap {
    let mut m = LinkStateMap::new();
    for &l in links {
        m.fail_link(l);
    }
    m
}

/// One row group per failure event. Simultaneous failures form a single
/// event on the pre-failure path; consecutive failures form one event each,
/// with the source already routing around the earlier ones.
pub fn frr_trial(cfg: &ConstellationConfig, exp: &ExperimentConfig, trial: usize) -> Result<Vec<FrrTrial>> {
    let mut rng = trial_rng(exp.rng_seed, trial as u64);
    let (s, d) = random_pair(cfg, &mut rng);
    let failure_time_s = random_time(cfg, &mut rng);
    let route_time = (failure_time_s / exp.recompute_period_s).floor() * exp.recompute_period_s;
    let send_time_s = failure_time_s + rng.gen::<f64>() * exp.notification_window_s;
    let route_snap = Snapshot::at(cfg, route_time);
    let send_snap = Snapshot::at(cfg, send_time_s);
    let order = place_failures(&route_snap, s, d, exp.failure_count, &mut rng)?;

    let events: Vec<(usize, usize)> = match exp.failure_mode {
        FailureMode::Simultaneous => vec![(0, order.len())],
        FailureMode::Consecutive if order.is_empty() => vec![(0, 0)],
        FailureMode::Consecutive => (1..=order.len()).map(|k| (k - 1, k)).collect(),
    };
    let mut out = Vec::with_capacity(events.len());
    for (event, &(known_n, actual_n)) in events.iter().enumerate() {
        let known = link_map(&order[..known_n]);
        let failures = link_map(&order[..actual_n]);
        let results = evaluate(&route_snap, &send_snap, s, d, &known, &failures, actual_n > 0)?;
        out.push(FrrTrial {
            trial,
            event,
            src: s,
            dst: d,
            failure_time_s,
            send_time_s,
            failures: order[..actual_n].to_vec(),
            header_tags: results.0,
            results: results.1,
        });
    }
    Ok(out)
}

fn evaluate(
    route_snap: &Snapshot,
    send_snap: &Snapshot,
    s: SatelliteId,
    d: SatelliteId,
    known: &LinkStateMap,
    failures: &LinkStateMap,
    any_failure: bool,
) -> Result<(usize, Vec<SchemeResult>)> {
    let cfg = route_snap.config();
    let pre = WeightedSnapshot::new(route_snap, known);
    let primary = dijkstra(&pre, s, d).ok_or(Error::NoPath { from: s, to: d })?;
    let post = WeightedSnapshot::new(send_snap, failures);
    let optimum = dijkstra(&post, s, d).ok_or(Error::NoPath { from: s, to: d })?;
    let opt = Reference {
        delay_s: optimum.delay(send_snap),
        hops: optimum.hops(),
    };

    let mut results = Vec::with_capacity(Scheme::ALL.len());

    let header = PacketHeader::new(0, 0, encode_path(cfg, &primary))?;
    let traj = route_packet_in(send_snap, s, &header, failures)?;
    let mut sg = match traj.outcome {
        Outcome::Delivered { at } if at == d => scored(Scheme::Starglider, Some(&traj.path()), send_snap, &opt),
        Outcome::Delivered { .. } => {
            let mut r = scored(Scheme::Starglider, None, send_snap, &opt);
            r.drop_reason = Some("wrong_terminal".into());
            r
        }
        Outcome::Dropped { reason, .. } => {
            let mut r = scored(Scheme::Starglider, None, send_snap, &opt);
            r.drop_reason = Some(serde_json::to_value(reason)?.as_str().unwrap_or("dropped").to_string());
            r
        }
    };
    sg.reroutes = traj.reroute_count as u32;
    results.push(sg);

    let lfa = lfa_route(&pre, failures, s, d);
    let mut r = scored(Scheme::Lfa, lfa.delivered(), send_snap, &opt);
    r.reroutes = u32::from(r.delivered && any_failure);
    results.push(r);

    let mpls = mpls_frr_route(&pre, failures, &primary);
    let mut r = scored(Scheme::MplsFrr, mpls.delivered(), send_snap, &opt);
    r.reroutes = u32::from(r.delivered && any_failure);
    results.push(r);

    let local = optimal_local(cfg, &post, &primary, failures, d);
    results.push(scored(Scheme::OptimalLocal, local.delivered(), send_snap, &opt));
    results.push(scored(Scheme::OptimalGlobal, Some(&optimum), send_snap, &opt));
    Ok((header.tags.len(), results))
}

/// Primary path up to the first failed link, then the post-failure optimum
/// from there.
fn optimal_local(
    cfg: &ConstellationConfig,
    post: &WeightedSnapshot<'_>,
    primary: &Path,
    failures: &LinkStateMap,
    d: SatelliteId,
) -> SchemeOutcome {
    let sats = primary.satellites();
    let cut = primary.links(cfg).position(|l| !failures.is_link_up(l));
    let Some(i) = cut else {
        return SchemeOutcome::Delivered(primary.clone());
    };
    match dijkstra(post, sats[i], d) {
        Some(rest) => {
            let mut all = sats[..i].to_vec();
            all.extend_from_slice(rest.satellites());
            SchemeOutcome::Delivered(Path::walk(cfg, all).expect("joined walk"))
        }
        None => SchemeOutcome::Dropped(sats[i]),
    }
}

pub fn run_frr(exp: &ExperimentConfig) -> Result<Vec<FrrTrial>> {
    let cfg = exp.constellation()?;
    let per_trial: Vec<Vec<FrrTrial>> = (0..exp.trials)
        .into_par_iter()
        .map(|i| frr_trial(&cfg, exp, i))
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub trials: usize,
    pub delivery_rate: f64,
    pub stretch_le_5pct: f64,
    pub stretch_gt_20pct: f64,
    pub max_reroutes: u32,
    pub loops: usize,
}

pub fn summarize(trials: &[FrrTrial]) -> Vec<SchemeSummary> {
    let n = trials.len().max(1) as f64;
    Scheme::ALL
        .iter()
        .map(|&scheme| {
            let rs: Vec<&SchemeResult> = trials.iter().map(|t| t.result(scheme)).collect();
            SchemeSummary {
                scheme,
                trials: trials.len(),
                delivery_rate: rs.iter().filter(|r| r.delivered).count() as f64 / n,
                stretch_le_5pct: rs.iter().filter(|r| r.delay_stretch_pct <= 5.0).count() as f64 / n,
                stretch_gt_20pct: rs.iter().filter(|r| r.delay_stretch_pct > 20.0).count() as f64 / n,
                max_reroutes: rs.iter().map(|r| r.reroutes).max().unwrap_or(0),
                loops: rs
                    .iter()
                    .filter(|r| r.drop_reason.as_deref() == Some("forwarding_loop"))
                    .count(),
            }
        })
        .collect()
}

/// One packet over a theory path with a single failed link or satellite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTrial {
    pub trial: usize,
    pub src: SatelliteId,
    pub dst: SatelliteId,
    pub time_s: f64,
    pub node_failure: bool,
    pub delivered: bool,
    pub original_hops: usize,
    pub hop_stretch: i64,
    pub delay_increase_s: f64,
    /// Larger of twice the longest link on the detour and the cross-orbit
    /// delay difference between the detour and the segment it replaces.
    pub bound_s: f64,
    pub tags_before: usize,
    pub tags_after: usize,
    pub reroutes: u8,
}

impl BoundTrial {
    pub fn within_bounds(&self) -> bool {
        self.delivered && self.hop_stretch <= 2 && self.delay_increase_s <= self.bound_s * (1.0 + 1e-9) + 1e-15
    }
}

pub fn bound_trial(cfg: &ConstellationConfig, seed: u64, trial: usize, node_failure: bool) -> Result<BoundTrial> {
    let mut rng = trial_rng(seed, trial as u64);
    loop {
        let (s, d) = random_pair(cfg, &mut rng);
        let t = random_time(cfg, &mut rng);
        let snap = Snapshot::at(cfg, t);
        let path = theory_shortest_path_in(&snap, s, d);
        let sats = path.satellites();
        let mut failures = LinkStateMap::new();
        if node_failure {
            if path.hops() < 2 {
                continue;
            }
            failures.fail_sat(sats[rng.gen_range(1..sats.len() - 1)]);
        } else {
            let links: Vec<LinkId> = path.links(cfg).collect();
            failures.fail_link(links[rng.gen_range(0..links.len())]);
        }
        let header = PacketHeader::new(0, 0, encode_path(cfg, &path))?;
        let traj = route_packet_in(&snap, s, &header, &failures)?;
        let delivered = matches!(traj.outcome, Outcome::Delivered { at } if at == d);
        let taken = traj.satellites();
        let (delay_increase_s, bound_s) = if delivered {
            (traj.total_delay_s - path.delay(&snap), detour_bound(&snap, sats, &taken))
        } else {
            (f64::INFINITY, f64::NAN)
        };
        return Ok(BoundTrial {
            trial,
            src: s,
            dst: d,
            time_s: t,
            node_failure,
            delivered,
            original_hops: path.hops(),
            hop_stretch: traj.hop_count() as i64 - path.hops() as i64,
            delay_increase_s,
            bound_s,
            tags_before: header.tags.len(),
            tags_after: traj.final_header.tags.len(),
            reroutes: traj.reroute_count,
        });
    }
}

fn detour_bound(snap: &Snapshot, original: &[SatelliteId], taken: &[SatelliteId]) -> f64 {
    let cfg = snap.config();
    let Some(i) = (0..taken.len().min(original.len()) - 1).find(|&i| taken[i + 1] != original[i + 1]) else {
        return 0.0;
    };
    let rejoin = (i + 1..taken.len()).find_map(|j| {
        original[i + 1..]
            .iter()
            .position(|&x| x == taken[j])
            .map(|p| (j, i + 1 + p))
    });
    let Some((j, pj)) = rejoin else {
        return f64::NAN;
    };
    let cross = |seg: &[SatelliteId]| -> f64 {
        seg.windows(2)
            .filter(|w| LinkId::between(cfg, w[0], w[1]).map(|l| l.kind) == Some(LinkKind::CrossOrbit))
            .map(|w| snap.hop_delay_s(w[0], w[1]))
            .sum()
    };
    let detour = &taken[i..=j];
    let longest = detour
        .windows(2)
        .map(|w| snap.hop_delay_s(w[0], w[1]))
        .fold(0.0, f64::max);
    let row_diff = (cross(detour) - cross(&original[i..=pj])).abs();
    (2.0 * longest).max(row_diff)
}

pub fn run_bound_trials(cfg: &ConstellationConfig, seed: u64, trials: usize, node_failure: bool) -> Result<Vec<BoundTrial>> {
    (0..trials)
        .into_par_iter()
        .map(|i| bound_trial(cfg, seed, i, node_failure))
        .collect()
}
