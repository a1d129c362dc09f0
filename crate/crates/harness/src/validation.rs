//! Validation accuracy on legitimate and attack headers, against
//! delay-threshold baselines.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gridroute::baselines::{delay_threshold_validate, dijkstra, WeightedSnapshot};
use gridroute::codec::{encode_path, PacketHeader};
use gridroute::constellation::neighbor;
use gridroute::forwarding::LinkStateMap;
use gridroute::ground::{attack_paths, visible_sats_in, AttackTarget, AttackVariant, GroundStationDb};
use gridroute::validator::{validate_checks, Check, ValidatorOptions};
use gridroute::{ConstellationConfig, Direction, Error, LinkId, Path, SatelliteId, Snapshot};

use crate::{random_time, trial_rng, ExperimentConfig, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PacketClass {
    Legit0f,
    Legit1f,
    Legit2f,
    Attack1hop,
    Attack2hop,
    Attack3hop,
}

impl PacketClass {
    pub const ALL: [PacketClass; 6] = [
        PacketClass::Legit0f,
        PacketClass::Legit1f,
        PacketClass::Legit2f,
        PacketClass::Attack1hop,
        PacketClass::Attack2hop,
        PacketClass::Attack3hop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PacketClass::Legit0f => "legit_0f",
            PacketClass::Legit1f => "legit_1f",
            PacketClass::Legit2f => "legit_2f",
            PacketClass::Attack1hop => "attack_1hop",
            PacketClass::Attack2hop => "attack_2hop",
            PacketClass::Attack3hop => "attack_3hop",
        }
    }

    pub fn is_attack(self) -> bool {
        matches!(self, PacketClass::Attack1hop | PacketClass::Attack2hop | PacketClass::Attack3hop)
    }

    fn attack(hops: u32) -> Self {
        match hops {
            1 => PacketClass::Attack1hop,
            2 => PacketClass::Attack2hop,
            _ => PacketClass::Attack3hop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub trial: usize,
    pub class: PacketClass,
    pub variant: Option<AttackVariant>,
    pub src_gs: u32,
    pub dst_gs: u32,
    pub ingress: SatelliteId,
    pub egress: SatelliteId,
    pub time_s: f64,
    pub tag_count: usize,
    pub hops: usize,
    pub passed: bool,
    pub failed_check: Option<Check>,
    pub inversions: u32,
    pub inversion_steps: u32,
    pub excess: u32,
    pub r_min: u32,
    pub c_min: u32,
    /// Delay-threshold verdicts, one per configured stretch percentage.
    pub threshold_pass: Vec<bool>,
}

/// Source station, destination station, time, ingress and egress with
/// distinct satellites visible at both ends.
pub(crate) fn pick_endpoints(
    cfg: &ConstellationConfig,
    db: &GroundStationDb,
    rng: &mut impl Rng,
) -> (u32, u32, Snapshot, SatelliteId, SatelliteId) {
    let ids: Vec<u32> = db.iter().map(|g| g.id).collect();
    loop {
        let src = *ids.choose(rng).expect("non-empty station list");
        let dst = *ids.choose(rng).expect("non-empty station list");
        if src == dst {
            continue;
        }
        let snap = Snapshot::at(cfg, random_time(cfg, rng));
        let (Some(&(ingress, _)), Some(&(egress, _))) = (
            visible_sats_in(&snap, db.get(src).unwrap()).first(),
            visible_sats_in(&snap, db.get(dst).unwrap()).first(),
        ) else {
            continue;
        };
        if ingress != egress {
            return (src, dst, snap, ingress, egress);
        }
    }
}

/// Satellites exactly `k` hops from the closest satellite of `region`.
pub fn satellites_at_distance(cfg: &ConstellationConfig, region: &[SatelliteId], k: u32) -> Vec<SatelliteId> {
    let mut dist = vec![u32::MAX; cfg.sat_count()];
    let mut queue = VecDeque::new();
    for &s in region {
        dist[cfg.sat_index(s)] = 0;
        queue.push_back(s);
    }
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        let ds = dist[cfg.sat_index(s)];
        if ds == k {
            out.push(s);
            continue;
        }
        for dir in Direction::ALL {
            let n = neighbor(cfg, s, dir);
            let j = cfg.sat_index(n);
            if dist[j] == u32::MAX {
                dist[j] = ds + 1;
                queue.push_back(n);
            }
        }
    }
    out.sort();
    out
}

struct Ctx<'a> {
    cfg: &'a ConstellationConfig,
    db: &'a GroundStationDb,
    opts: ValidatorOptions,
    thresholds: &'a [f64],
}

#[allow(clippy::too_many_arguments)]
fn record(
    ctx: &Ctx<'_>,
    snap: &Snapshot,
    trial: usize,
    class: PacketClass,
    variant: Option<AttackVariant>,
    header: &PacketHeader,
    hops: usize,
    ingress: SatelliteId,
    egress: SatelliteId,
) -> ValidationRecord {
    let v = validate_checks(ctx.cfg, ctx.db, &ctx.opts, header, ingress, snap.time());
    let none = LinkStateMap::new();
    let net = WeightedSnapshot::new(snap, &none);
    ValidationRecord {
        trial,
        class,
        variant,
        src_gs: header.src_gs,
        dst_gs: header.dst_gs,
        ingress,
        egress,
        time_s: snap.time(),
        tag_count: header.tags.len(),
        hops,
        passed: v.passed,
        failed_check: v.failed_check,
        inversions: v.metrics.inversion_count,
        inversion_steps: v.metrics.inversion_steps,
        excess: v.metrics.excess,
        r_min: v.metrics.r_min,
        c_min: v.metrics.c_min,
        threshold_pass: ctx
            .thresholds
            .iter()
            .map(|&p| delay_threshold_validate(&net, &header.tags, ingress, p))
            .collect(),
    }
}

pub fn validation_trial(
    cfg: &ConstellationConfig,
    db: &GroundStationDb,
    exp: &ExperimentConfig,
    trial: usize,
) -> Result<Vec<ValidationRecord>> {
    let mut rng = trial_rng(exp.rng_seed, trial as u64);
    let (src_gs, dst_gs, snap, ingress, egress) = pick_endpoints(cfg, db, &mut rng);
    let ctx = Ctx {
        cfg,
        db,
        opts: ValidatorOptions::default(),
        thresholds: &exp.stretch_thresholds_pct,
    };
    let mut out = Vec::new();

    let mut failures = LinkStateMap::new();
    let mut legit: Vec<Path> = Vec::new();
    for class in [PacketClass::Legit0f, PacketClass::Legit1f, PacketClass::Legit2f] {
        if let Some(prev) = legit.last() {
            let links: Vec<LinkId> = prev.links(cfg).collect();
            failures.fail_link(links[rng.gen_range(0..links.len())]);
        }
        let net = WeightedSnapshot::new(&snap, &failures);
        let path = dijkstra(&net, ingress, egress).ok_or(Error::NoPath { from: ingress, to: egress })?;
        let tags = encode_path(cfg, &path);
        if let Ok(header) = PacketHeader::new(src_gs, dst_gs, tags) {
            out.push(record(&ctx, &snap, trial, class, None, &header, path.hops(), ingress, egress));
        }
        legit.push(path);
    }

    for k in 1..=3u32 {
        let candidates = satellites_at_distance(cfg, legit[0].satellites(), k);
        let Some(&target) = candidates.choose(&mut rng) else { continue };
        let attacks = match attack_paths(
            &snap,
            ingress,
            egress,
            AttackTarget::Satellite(target),
            src_gs,
            dst_gs,
            &mut rng,
        ) {
            Ok(a) => a,
            Err(Error::TargetOnPath) => continue,
            Err(e) => return Err(e.into()),
        };
        for a in attacks {
            out.push(record(
                &ctx,
                &snap,
                trial,
                PacketClass::attack(k),
                Some(a.variant),
                &a.header,
                a.path.hops(),
                ingress,
                egress,
            ));
        }
    }
    Ok(out)
}

pub fn run_validation(exp: &ExperimentConfig) -> Result<Vec<ValidationRecord>> {
    let cfg = exp.constellation()?;
    let db = exp.ground_stations()?;
    let per_trial: Vec<Vec<ValidationRecord>> = (0..exp.trials)
        .into_par_iter()
        .map(|i| validation_trial(&cfg, &db, exp, i))
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSummary {
    pub class: PacketClass,
    pub variant: Option<AttackVariant>,
    pub packets: usize,
    /// Share of verdicts that are correct: passes for legit, blocks for attacks.
    pub starglider_correct: f64,
    pub threshold_correct: Vec<f64>,
}

pub fn summarize(records: &[ValidationRecord]) -> Vec<ClassSummary> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert((r.class, r.variant)) {
            continue;
        }
        let rs: Vec<&ValidationRecord> = records
            .iter()
            .filter(|x| x.class == r.class && x.variant == r.variant)
            .collect();
        let n = rs.len() as f64;
        let correct = |pass: bool| pass != r.class.is_attack();
        out.push(ClassSummary {
            class: r.class,
            variant: r.variant,
            packets: rs.len(),
            starglider_correct: rs.iter().filter(|x| correct(x.passed)).count() as f64 / n,
            threshold_correct: (0..r.threshold_pass.len())
                .map(|i| rs.iter().filter(|x| correct(x.threshold_pass[i])).count() as f64 / n)
                .collect(),
        });
    }
    out.sort_by_key(|s| (PacketClass::ALL.iter().position(|&c| c == s.class), s.variant.map(|v| v as u8)));
    out
}
