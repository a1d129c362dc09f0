//! Link-flooding campaigns from botnets of ground-station pairs.

use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rayon::prelude::*;
use serde::Serialize;

use gridroute::baselines::{ShortestPathTree, WeightedSnapshot};
use gridroute::codec::{encode_path, PacketHeader, MAX_TAGS};
use gridroute::forwarding::LinkStateMap;
use gridroute::ground::{visible_sats_in, GroundStationDb};
use gridroute::validator::{validate_checks, ValidatorOptions};
use gridroute::{ConstellationConfig, Direction, LinkId, Path, SatelliteId, Snapshot};

use crate::{random_time, trial_rng, ExperimentConfig, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiGsSetting {
    pub botnet_size: usize,
    pub setting: usize,
    pub time_s: f64,
    pub target: LinkId,
    /// Pairs with a visible satellite at both ends.
    pub active_pairs: usize,
    pub usable_pairs: usize,
    pub usable_fraction: f64,
    /// Median over usable pairs of the number of ingress satellites that
    /// carry at least one passing attack header; NaN when no pair is usable.
    pub critical_satellites: f64,
}

/// Headers from `ingress` through `target` to `egress` in both orientations.
fn through_target(
    cfg: &ConstellationConfig,
    from_a: &ShortestPathTree,
    from_b: &ShortestPathTree,
    target: LinkId,
    ingress: SatelliteId,
    egress: SatelliteId,
) -> Vec<Path> {
    let mut out = Vec::new();
    for (first, second, near, far) in [(from_a, from_b, target.a, target.b), (from_b, from_a, target.b, target.a)] {
        let (Some(head), Some(tail)) = (first.path_to(ingress), second.path_to(egress)) else { continue };
        let mut sats: Vec<SatelliteId> = head.satellites().iter().rev().copied().collect();
        debug_assert_eq!(sats.last(), Some(&near));
        sats.extend_from_slice(tail.satellites());
        debug_assert_eq!(sats[sats.len() - tail.satellites().len()], far);
        if let Ok(p) = Path::walk(cfg, sats) {
            out.push(p);
        }
    }
    out
}

pub fn multigs_setting(
    cfg: &ConstellationConfig,
    db: &GroundStationDb,
    exp: &ExperimentConfig,
    botnet_size: usize,
    setting: usize,
) -> Result<MultiGsSetting> {
    let seed = exp.rng_seed ^ (botnet_size as u64).rotate_left(32);
    let mut rng = trial_rng(seed, setting as u64);
    let ids: Vec<u32> = db.iter().map(|g| g.id).collect();
    let all_pairs = ids
        .iter()
        .flat_map(|&a| ids.iter().filter(move |&&b| b != a).map(move |&b| (a, b)));
    let botnet: Vec<(u32, u32)> = all_pairs.choose_multiple(&mut rng, botnet_size);
    let snap = Snapshot::at(cfg, random_time(cfg, &mut rng));
    let opts = ValidatorOptions::default();
    let none = LinkStateMap::new();
    let net = WeightedSnapshot::new(&snap, &none);

    let visible = |id: u32| -> Vec<SatelliteId> {
        visible_sats_in(&snap, db.get(id).expect("id from db"))
            .into_iter()
            .map(|(s, _)| s)
            .collect()
    };
    let views: Vec<(u32, u32, Vec<SatelliteId>, Vec<SatelliteId>)> = botnet
        .iter()
        .map(|&(s, d)| (s, d, visible(s), visible(d)))
        .filter(|(_, _, vs, vd)| !vs.is_empty() && !vd.is_empty())
        .collect();

    let links: Vec<LinkId> = cfg
        .satellites()
        .flat_map(|s| [Direction::East, Direction::Prograde].map(|d| LinkId::from_step(cfg, s, d)))
        .collect();
    let target = *links.choose(&mut rng).expect("constellation has links");

    let from_a = ShortestPathTree::build(&net, target.a);
    let from_b = ShortestPathTree::build(&net, target.b);
    let mut usable = 0;
    let mut critical_counts: Vec<f64> = Vec::new();
    for (src, dst, vs, vd) in &views {
        let mut critical = BTreeSet::new();
        for &ingress in vs {
            for &egress in vd {
                if ingress == egress {
                    continue;
                }
                for path in through_target(cfg, &from_a, &from_b, target, ingress, egress) {
                    let tags = encode_path(cfg, &path);
                    if tags.len() > MAX_TAGS {
                        continue;
                    }
                    let header = PacketHeader::new(*src, *dst, tags)?;
                    if validate_checks(cfg, db, &opts, &header, ingress, snap.time()).passed {
                        critical.insert(ingress);
                    }
                }
            }
        }
        if !critical.is_empty() {
            usable += 1;
            critical_counts.push(critical.len() as f64);
        }
    }
    Ok(MultiGsSetting {
        botnet_size,
        setting,
        time_s: snap.time(),
        target,
        active_pairs: views.len(),
        usable_pairs: usable,
        usable_fraction: if botnet.is_empty() { 0.0 } else { usable as f64 / botnet.len() as f64 },
        critical_satellites: crate::median(&critical_counts),
    })
}

/// `exp.trials` settings per botnet size.
pub fn run_multigs(exp: &ExperimentConfig) -> Result<Vec<MultiGsSetting>> {
    let cfg = exp.constellation()?;
    let db = exp.ground_stations()?;
    let jobs: Vec<(usize, usize)> = exp
        .botnet_sizes
        .iter()
        .flat_map(|&b| (0..exp.trials).map(move |i| (b, i)))
        .collect();
    jobs.into_par_iter()
        .map(|(b, i)| multigs_setting(&cfg, &db, exp, b, i))
        .collect()
}
