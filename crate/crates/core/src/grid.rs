//! Source/destination grids and the closed-form shortest-path constructions.
//!
//! A grid is the parallelogram of the torus spanned by walking from the source
//! in one plane direction and one in-plane direction until the destination's
//! plane and index are reached. Local coordinates `(k, m)` count plane steps
//! and index steps from the source, so `(0, 0)` is the source and
//! `(plane_steps, index_steps)` the destination. Row `m` is the chain of
//! cross-orbit links at index offset `m`; link column `k` holds the cross-orbit
//! links between plane offsets `k` and `k + 1`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::constellation::{ConstellationConfig, Direction, LinkId, SatelliteId, Snapshot};
use crate::error::{Error, Result};
use crate::path::Path;

const LAT_EPS: f64 = 1e-9;
const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    pub source: SatelliteId,
    pub destination: SatelliteId,
    /// East or West.
    pub plane_dir: Direction,
    pub plane_steps: u32,
    /// Prograde or Retrograde.
    pub index_dir: Direction,
    pub index_steps: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridType {
    TypeA,
    TypeB,
    SinglePath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pole {
    North,
    South,
}

impl Pole {
    fn sign(self) -> f64 {
        match self {
            Pole::North => 1.0,
            Pole::South => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionClass {
    SameDirection,
    DiffDirSingleExtreme(Pole),
    DiffDirBothExtremes,
}

impl Grid {
    fn with(cfg: &ConstellationConfig, s: SatelliteId, d: SatelliteId, pdir: Direction, idir: Direction) -> Self {
        let p = cfg.num_planes as i64;
        let n = cfg.sats_per_plane as i64;
        let dp = (d.plane as i64 - s.plane as i64) * pdir.delta().0;
        let di = (d.index as i64 - s.index as i64) * idir.delta().1;
        Self {
            source: s,
            destination: d,
            plane_dir: pdir,
            plane_steps: dp.rem_euclid(p) as u32,
            index_dir: idir,
            index_steps: di.rem_euclid(n) as u32,
        }
    }

    pub fn is_single_path(&self) -> bool {
        self.plane_steps == 0 || self.index_steps == 0
    }

    pub fn num_rows(&self) -> u32 {
        self.index_steps + 1
    }

    pub fn num_columns(&self) -> u32 {
        self.plane_steps + 1
    }

    pub fn size(&self) -> u64 {
        self.num_rows() as u64 * self.num_columns() as u64
    }

    /// Satellite at local coordinates `(k, m)`.
    pub fn sat(&self, cfg: &ConstellationConfig, k: u32, m: u32) -> SatelliteId {
        cfg.sat(
            self.source.plane as i64 + self.plane_dir.delta().0 * k as i64,
            self.source.index as i64 + self.index_dir.delta().1 * m as i64,
        )
    }

    pub fn local(&self, cfg: &ConstellationConfig, sat: SatelliteId) -> Option<(u32, u32)> {
        let k = ((sat.plane as i64 - self.source.plane as i64) * self.plane_dir.delta().0)
            .rem_euclid(cfg.num_planes as i64) as u32;
        let m = ((sat.index as i64 - self.source.index as i64) * self.index_dir.delta().1)
            .rem_euclid(cfg.sats_per_plane as i64) as u32;
        (k <= self.plane_steps && m <= self.index_steps).then_some((k, m))
    }

    pub fn contains(&self, cfg: &ConstellationConfig, sat: SatelliteId) -> bool {
        self.local(cfg, sat).is_some()
    }

    pub fn satellites<'a>(&'a self, cfg: &'a ConstellationConfig) -> impl Iterator<Item = SatelliteId> + 'a {
        (0..=self.plane_steps).flat_map(move |k| (0..=self.index_steps).map(move |m| self.sat(cfg, k, m)))
    }

    /// Far end of the source row.
    pub fn c1(&self, cfg: &ConstellationConfig) -> SatelliteId {
        self.sat(cfg, self.plane_steps, 0)
    }

    /// Far end of the source column.
    pub fn c2(&self, cfg: &ConstellationConfig) -> SatelliteId {
        self.sat(cfg, 0, self.index_steps)
    }

    pub fn cross_link(&self, cfg: &ConstellationConfig, k: u32, m: u32) -> LinkId {
        LinkId::from_step(cfg, self.sat(cfg, k, m), self.plane_dir)
    }

    pub fn intra_link(&self, cfg: &ConstellationConfig, k: u32, m: u32) -> LinkId {
        LinkId::from_step(cfg, self.sat(cfg, k, m), self.index_dir)
    }

    pub fn rows(&self, cfg: &ConstellationConfig) -> Vec<Vec<LinkId>> {
        (0..=self.index_steps)
            .map(|m| (0..self.plane_steps).map(|k| self.cross_link(cfg, k, m)).collect())
            .collect()
    }

    pub fn columns(&self, cfg: &ConstellationConfig) -> Vec<Vec<LinkId>> {
        (0..self.plane_steps)
            .map(|k| (0..=self.index_steps).map(|m| self.cross_link(cfg, k, m)).collect())
            .collect()
    }

    pub fn links(&self, cfg: &ConstellationConfig) -> Vec<LinkId> {
        let mut out: Vec<LinkId> = self.rows(cfg).into_iter().flatten().collect();
        for k in 0..=self.plane_steps {
            for m in 0..self.index_steps {
                out.push(self.intra_link(cfg, k, m));
            }
        }
        out
    }

    pub fn border(&self, cfg: &ConstellationConfig) -> Vec<SatelliteId> {
        let mut set = BTreeSet::new();
        for k in 0..=self.plane_steps {
            set.insert(self.sat(cfg, k, 0));
            set.insert(self.sat(cfg, k, self.index_steps));
        }
        for m in 0..=self.index_steps {
            set.insert(self.sat(cfg, 0, m));
            set.insert(self.sat(cfg, self.plane_steps, m));
        }
        set.into_iter().collect()
    }

    /// Path taking the cross-orbit link of column `k` on row `rows[k]`,
    /// joined by intra-orbit runs.
    pub fn staircase(&self, cfg: &ConstellationConfig, rows: &[u32]) -> Path {
        assert_eq!(rows.len(), self.plane_steps as usize);
        let mut sats = vec![self.source];
        let mut m = 0u32;
        let walk = |sats: &mut Vec<SatelliteId>, k: u32, from: u32, to: u32| {
            let mut cur = from;
            while cur != to {
                cur = if to > cur { cur + 1 } else { cur - 1 };
                sats.push(self.sat(cfg, k, cur));
            }
        };
        for (k, &r) in rows.iter().enumerate() {
            walk(&mut sats, k as u32, m, r);
            m = r;
            sats.push(self.sat(cfg, k as u32 + 1, m));
        }
        walk(&mut sats, self.plane_steps, m, self.index_steps);
        Path::from_vec_unchecked(sats)
    }

    pub fn row_path(&self, cfg: &ConstellationConfig, row: u32) -> Path {
        self.staircase(cfg, &vec![row; self.plane_steps as usize])
    }

    /// Whether a plane walk of the grid passes between the last and first
    /// plane, where same-index cross links are skewed against the other columns.
    pub fn crosses_seam(&self, cfg: &ConstellationConfig) -> bool {
        match self.plane_dir {
            Direction::East => self.source.plane + self.plane_steps >= cfg.num_planes,
            _ => self.plane_steps > self.source.plane,
        }
    }

    /// Unwrapped phase offset of `(k, m)` from the source, in radians.
    fn relative_phase(&self, cfg: &ConstellationConfig, k: u32, m: u32) -> f64 {
        let sat = self.sat(cfg, k, m);
        let dplane = sat.plane as f64 - self.source.plane as f64;
        let slots = self.index_dir.delta().1 as f64 * m as f64 + cfg.phase_offset * dplane;
        TAU * slots / cfg.sats_per_plane as f64
    }
}

pub fn enumerate_grids(cfg: &ConstellationConfig, s: SatelliteId, d: SatelliteId) -> Result<Vec<Grid>> {
    if s == d {
        return Err(Error::SameEndpoints(s));
    }
    use Direction::*;
    let grids = if s.plane == d.plane {
        vec![Grid::with(cfg, s, d, East, Prograde), Grid::with(cfg, s, d, East, Retrograde)]
    } else if s.index == d.index {
        vec![Grid::with(cfg, s, d, East, Prograde), Grid::with(cfg, s, d, West, Prograde)]
    } else {
        vec![
            Grid::with(cfg, s, d, East, Prograde),
            Grid::with(cfg, s, d, East, Retrograde),
            Grid::with(cfg, s, d, West, Prograde),
            Grid::with(cfg, s, d, West, Retrograde),
        ]
    };
    Ok(grids)
}

/// Smallest grid by satellite count, then fewer columns, then enumeration order.
/// Returns the grid with its row and column counts.
pub fn minimal_grid(cfg: &ConstellationConfig, s: SatelliteId, d: SatelliteId) -> Result<(Grid, u32, u32)> {
    let grids = enumerate_grids(cfg, s, d)?;
    let g = grids
        .into_iter()
        .min_by_key(|g| (g.size(), g.num_columns()))
        .expect("at least one grid");
    Ok((g, g.num_rows(), g.num_columns()))
}

pub fn classify_type(cfg: &ConstellationConfig, grid: &Grid) -> GridType {
    classify_type_at(cfg, grid, 0.0)
}

/// Classifies at the first equator crossing of the source at or after `epoch`.
pub fn classify_type_at(cfg: &ConstellationConfig, grid: &Grid, epoch: f64) -> GridType {
    if grid.is_single_path() {
        return GridType::SinglePath;
    }
    let u = cfg.argument_of_latitude(grid.source, epoch);
    let mut to_go = PI - u.rem_euclid(PI);
    if to_go >= PI {
        to_go = 0.0;
    }
    let t = epoch + to_go / cfg.mean_motion_rad_s();
    if straddling_links(cfg, grid, t) == 0 {
        GridType::TypeA
    } else {
        GridType::TypeB
    }
}

/// Grid links whose endpoints lie strictly on opposite sides of the equator at `t`.
pub fn straddling_links(cfg: &ConstellationConfig, grid: &Grid, t: f64) -> usize {
    let sin_i = cfg.inclination_rad().sin();
    let lat = |sat: SatelliteId| {
        let v = cfg.argument_of_latitude(sat, t).sin() * sin_i;
        if v.abs() < LAT_EPS {
            0.0
        } else {
            v
        }
    };
    let (dp, di) = (grid.plane_steps, grid.index_steps);
    let lats: Vec<f64> = (0..=dp)
        .flat_map(|k| (0..=di).map(move |m| (k, m)))
        .map(|(k, m)| lat(grid.sat(cfg, k, m)))
        .collect();
    let at = |k: u32, m: u32| lats[(k * (di + 1) + m) as usize];
    let mut count = 0;
    for k in 0..=dp {
        for m in 0..=di {
            let here = at(k, m);
            if k < dp && here * at(k + 1, m) < 0.0 {
                count += 1;
            }
            if m < di && here * at(k, m + 1) < 0.0 {
                count += 1;
            }
        }
    }
    count
}

pub fn classify_motion(cfg: &ConstellationConfig, grid: &Grid, t: f64) -> MotionClass {
    classify_motion_in(&Snapshot::at(cfg, t), grid)
}

pub fn classify_motion_in(snap: &Snapshot, grid: &Grid) -> MotionClass {
    let cfg = snap.config();
    let heading = snap.heading(grid.source);
    if grid.satellites(cfg).all(|s| snap.heading(s) == heading) {
        return MotionClass::SameDirection;
    }
    let u_s = snap.argument_of_latitude(grid.source);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=grid.plane_steps {
        for m in 0..=grid.index_steps {
            let phi = u_s + grid.relative_phase(cfg, k, m);
            lo = lo.min(phi);
            hi = hi.max(phi);
        }
    }
    let (north, south) = extremes_within(lo, hi);
    let pole = match (north, south) {
        (1, 0) => Pole::North,
        (0, 1) => Pole::South,
        _ => return MotionClass::DiffDirBothExtremes,
    };
    let half = cfg.inclination_rad() / 2.0;
    let near = |sat: SatelliteId| pole.sign() * snap.latitude(sat) > -half;
    let end_rows_ok = (0..=grid.plane_steps)
        .all(|k| near(grid.sat(cfg, k, 0)) && near(grid.sat(cfg, k, grid.index_steps)));
    if end_rows_ok {
        MotionClass::DiffDirSingleExtreme(pole)
    } else {
        MotionClass::DiffDirBothExtremes
    }
}

/// Number of northern (pi/2 mod 2pi) and southern (3pi/2 mod 2pi) turning
/// phases inside `[lo, hi]`.
fn extremes_within(lo: f64, hi: f64) -> (usize, usize) {
    let count = |offset: f64| {
        let first = ((lo - offset) / TAU).ceil();
        let last = ((hi - offset) / TAU).floor();
        (last - first + 1.0).max(0.0) as usize
    };
    (count(FRAC_PI_2), count(3.0 * FRAC_PI_2))
}

fn cross_mid_lat(snap: &Snapshot, grid: &Grid, k: u32, m: u32) -> f64 {
    let cfg = snap.config();
    snap.midpoint_latitude(grid.sat(cfg, k, m), grid.sat(cfg, k + 1, m))
}

/// Row in `rows` maximising `score(k, m)`; ties go to the row nearest the source.
fn argmax_row(rows: impl Iterator<Item = u32>, score: impl Fn(u32) -> f64) -> u32 {
    let mut best: Option<(u32, f64)> = None;
    for m in rows {
        let v = score(m);
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((m, v));
        }
    }
    best.expect("non-empty row range").0
}

/// Cheapest staircase whose rows never move back toward the source row.
pub fn monotone_staircase(snap: &Snapshot, grid: &Grid) -> Path {
    let cfg = snap.config();
    let (dp, di) = (grid.plane_steps as usize, grid.index_steps as usize);
    // best[m]: cheapest cost of reaching column k on row m, cross links only;
    // intra-orbit cost is the same for every monotone staircase.
    let mut best = vec![0.0f64; di + 1];
    let mut choice = vec![vec![0u32; di + 1]; dp];
    for k in 0..dp {
        let mut run = (f64::INFINITY, 0u32);
        let mut next = vec![0.0; di + 1];
        for m in 0..=di {
            if best[m] < run.0 {
                run = (best[m], m as u32);
            }
            let link = snap.distance_m(grid.sat(cfg, k as u32, m as u32), grid.sat(cfg, k as u32 + 1, m as u32));
            next[m] = run.0 + link;
            choice[k][m] = run.1;
        }
        best = next;
    }
    let mut m = (0..=di)
        .min_by(|&a, &b| best[a].total_cmp(&best[b]).then(a.cmp(&b)))
        .expect("grid has rows") as u32;
    let mut rows = vec![0u32; dp];
    for k in (0..dp).rev() {
        rows[k] = m;
        m = choice[k][m as usize];
    }
    grid.staircase(cfg, &rows)
}

pub fn candidate_paths(cfg: &ConstellationConfig, grid: &Grid, t: f64) -> Vec<Path> {
    let snap = Snapshot::at(cfg, t);
    candidate_paths_in(&snap, grid, classify_type(cfg, grid))
}

/// Candidate shortest paths inside `grid` at the snapshot instant. `ty` is the
/// time-invariant grid type, passed in so callers can cache it. Grids that
/// cross the plane-numbering seam also get the best monotone staircase.
pub fn candidate_paths_in(snap: &Snapshot, grid: &Grid, ty: GridType) -> Vec<Path> {
    let mut out = closed_form_candidates(snap, grid, ty);
    if !grid.is_single_path() && grid.crosses_seam(snap.config()) {
        out.push(monotone_staircase(snap, grid));
    }
    out
}

/// The closed-form candidates alone, selected by grid type and motion class.
pub fn closed_form_candidates(snap: &Snapshot, grid: &Grid, ty: GridType) -> Vec<Path> {
    let cfg = snap.config();
    if ty == GridType::SinglePath || grid.is_single_path() {
        return vec![grid.row_path(cfg, 0)];
    }
    let (dp, di) = (grid.plane_steps, grid.index_steps);
    let last = dp - 1;
    let delta = |k: u32, m: u32| cross_mid_lat(snap, grid, k, m).abs();
    match (ty, classify_motion_in(snap, grid)) {
        (GridType::TypeA, MotionClass::SameDirection) => {
            let rows: Vec<u32> = (0..dp).map(|k| argmax_row(0..=di, |m| delta(k, m))).collect();
            vec![grid.staircase(cfg, &rows)]
        }
        (_, MotionClass::SameDirection) => {
            let admissible: Vec<u32> = (0..=di)
                .filter(|&r| delta(0, r) >= delta(0, 0) && delta(last, r) >= delta(last, di))
                .collect();
            let rows = if admissible.is_empty() { (0..=di).collect() } else { admissible };
            rows.into_iter().map(|r| grid.row_path(cfg, r)).collect()
        }
        (GridType::TypeA, MotionClass::DiffDirSingleExtreme(pole)) => {
            let score = |k: u32, m: u32| pole.sign() * cross_mid_lat(snap, grid, k, m);
            let a = argmax_row(0..=di, |m| score(0, m));
            let b = argmax_row(0..=di, |m| score(last, m));
            (a.min(b)..=a.max(b)).map(|r| grid.row_path(cfg, r)).collect()
        }
        (_, MotionClass::DiffDirSingleExtreme(pole)) => {
            let score = |k: u32, m: u32| pole.sign() * cross_mid_lat(snap, grid, k, m);
            let rows: Vec<u32> = (0..dp).map(|k| argmax_row(0..=di, |m| score(k, m))).collect();
            if rows.windows(2).all(|w| w[0] <= w[1]) {
                vec![grid.staircase(cfg, &rows)]
            } else {
                // Near-tied columns near the turning point can pick rows out of order.
                vec![monotone_staircase(snap, grid)]
            }
        }
        (_, MotionClass::DiffDirBothExtremes) => {
            let allowed = both_extremes_cross_links(snap, grid);
            grid_dijkstra(snap, grid, |k, m| allowed.contains(&(k, m)))
                .into_iter()
                .collect()
        }
    }
}

/// Cross-orbit links `(k, m)` admitted when the grid spans both extreme
/// parallels. Rows are split into hemisphere runs (by mean latitude across the
/// grid's planes); in each run every row between the per-column
/// closest-to-extreme links is kept.
pub fn both_extremes_cross_links(snap: &Snapshot, grid: &Grid) -> BTreeSet<(u32, u32)> {
    let cfg = snap.config();
    let (dp, di) = (grid.plane_steps, grid.index_steps);
    let mean = |m: u32| (0..=dp).map(|k| snap.latitude(grid.sat(cfg, k, m))).sum::<f64>() / (dp + 1) as f64;
    let mut runs: Vec<(u32, u32, f64)> = Vec::new();
    for m in 0..=di {
        let sign = if mean(m) >= 0.0 { 1.0 } else { -1.0 };
        match runs.last_mut() {
            Some((_, hi, s)) if *s == sign => *hi = m,
            _ => runs.push((m, m, sign)),
        }
    }
    let mut out = BTreeSet::new();
    for (lo, hi, sign) in runs {
        let picks: Vec<u32> = (0..dp)
            .map(|k| argmax_row(lo..=hi, |m| sign * cross_mid_lat(snap, grid, k, m)))
            .collect();
        let band_lo = *picks.iter().min().expect("grid has columns");
        let band_hi = *picks.iter().max().expect("grid has columns");
        for k in 0..dp {
            for m in band_lo..=band_hi {
                out.insert((k, m));
            }
        }
    }
    out
}

#[derive(PartialEq)]
struct Entry {
    delay: f64,
    hops: u32,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .delay
            .total_cmp(&self.delay)
            .then_with(|| other.hops.cmp(&self.hops))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-delay path from source to destination using all intra-orbit links
/// of the grid and the cross-orbit links accepted by `allow_cross(k, m)`.
pub fn grid_dijkstra(snap: &Snapshot, grid: &Grid, allow_cross: impl Fn(u32, u32) -> bool) -> Option<Path> {
    let cfg = snap.config();
    let (dp, di) = (grid.plane_steps, grid.index_steps);
    let w = di + 1;
    let n = ((dp + 1) * w) as usize;
    let id = |k: u32, m: u32| (k * w + m) as usize;
    let mut best = vec![(f64::INFINITY, u32::MAX); n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    best[0] = (0.0, 0);
    heap.push(Entry { delay: 0.0, hops: 0, node: 0 });
    let target = id(dp, di);
    while let Some(Entry { delay, hops, node }) = heap.pop() {
        if (delay, hops) > best[node] {
            continue;
        }
        if node == target {
            break;
        }
        let (k, m) = (node as u32 / w, node as u32 % w);
        let here = grid.sat(cfg, k, m);
        let mut steps = Vec::with_capacity(4);
        if k < dp && allow_cross(k, m) {
            steps.push((k + 1, m));
        }
        if k > 0 && allow_cross(k - 1, m) {
            steps.push((k - 1, m));
        }
        if m < di {
            steps.push((k, m + 1));
        }
        if m > 0 {
            steps.push((k, m - 1));
        }
        for (nk, nm) in steps {
            let next = id(nk, nm);
            let nd = delay + snap.hop_delay_s(here, grid.sat(cfg, nk, nm));
            if (nd, hops + 1) < best[next] {
                best[next] = (nd, hops + 1);
                prev[next] = node;
                heap.push(Entry { delay: nd, hops: hops + 1, node: next });
            }
        }
    }
    if !best[target].0.is_finite() {
        return None;
    }
    let mut nodes = vec![target];
    while *nodes.last().unwrap() != 0 {
        nodes.push(prev[*nodes.last().unwrap()]);
    }
    nodes.reverse();
    Some(Path::from_vec_unchecked(
        nodes.into_iter().map(|x| grid.sat(cfg, x as u32 / w, x as u32 % w)).collect(),
    ))
}

/// Candidate evaluation for one `(s, d)` pair; keeps grid types so repeated
/// queries at different times skip reclassification.
#[derive(Debug, Clone)]
pub struct PairGrids {
    pub grids: Vec<(Grid, GridType)>,
}

impl PairGrids {
    pub fn new(cfg: &ConstellationConfig, s: SatelliteId, d: SatelliteId) -> Result<Self> {
        let grids = enumerate_grids(cfg, s, d)?
            .into_iter()
            .map(|g| (g, classify_type(cfg, &g)))
            .collect();
        Ok(Self { grids })
    }

    pub fn shortest(&self, snap: &Snapshot) -> Path {
        let mut best: Option<(f64, Path)> = None;
        for (grid, ty) in &self.grids {
            for cand in candidate_paths_in(snap, grid, *ty) {
                let d = cand.delay(snap);
                let better = match &best {
                    None => true,
                    Some((bd, bp)) => {
                        if (d - bd).abs() <= TIE_REL * bd.max(d) {
                            (cand.hops(), cand.satellites()) < (bp.hops(), bp.satellites())
                        } else {
                            d < *bd
                        }
                    }
                };
                if better {
                    best = Some((d, cand));
                }
            }
        }
        best.expect("every grid yields a candidate").1
    }
}

pub fn theory_shortest_path(cfg: &ConstellationConfig, s: SatelliteId, d: SatelliteId, t: f64) -> Path {
    theory_shortest_path_in(&Snapshot::at(cfg, t), s, d)
}

pub fn theory_shortest_path_in(snap: &Snapshot, s: SatelliteId, d: SatelliteId) -> Path {
    if s == d {
        return Path::empty();
    }
    PairGrids::new(snap.config(), s, d)
        .expect("distinct endpoints")
        .shortest(snap)
}
