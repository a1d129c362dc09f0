//! Ingress-satellite packet validation: admission pre-check and the three
//! header checks.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::codec::{PacketHeader, PathTag};
use crate::constellation::{satellite_geo, ConstellationConfig, Frame, SatelliteId};
use crate::error::Result;
use crate::grid::minimal_grid;
use crate::ground::GroundStationDb;

/// Bucket depth in seconds of contracted rate.
pub const BUCKET_WINDOW_S: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenBucket {
    pub rate_bps: f64,
    pub capacity_bits: f64,
    tokens: f64,
    last_t: Option<f64>,
}

impl TokenBucket {
    pub fn new(rate_bps: f64) -> Self {
        let capacity_bits = BUCKET_WINDOW_S * rate_bps;
        Self {
            rate_bps,
            capacity_bits,
            tokens: capacity_bits,
            last_t: None,
        }
    }

    pub fn tokens(&self) -> f64 {
        self.tokens
    }

    /// Refill up to `t` and take `size_bits` if available.
    pub fn admit(&mut self, size_bits: f64, t: f64) -> bool {
        if let Some(last) = self.last_t {
            if t > last {
                self.tokens = (self.tokens + (t - last) * self.rate_bps).min(self.capacity_bits);
            }
        }
        self.last_t = Some(self.last_t.map_or(t, |l| l.max(t)));
        if self.tokens >= size_bits {
            self.tokens -= size_bits;
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionEntry {
    pub src_gs: u32,
    pub dst_gs: u32,
    pub ingress: SatelliteId,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdmissionTable {
    entries: BTreeMap<(u32, u32), (SatelliteId, TokenBucket)>,
}

impl AdmissionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, src_gs: u32, dst_gs: u32, ingress: SatelliteId, rate_bps: f64) {
        self.entries.insert((src_gs, dst_gs), (ingress, TokenBucket::new(rate_bps)));
    }

    pub fn from_entries(entries: impl IntoIterator<Item = AdmissionEntry>) -> Self {
        let mut table = Self::new();
        for e in entries {
            table.register(e.src_gs, e.dst_gs, e.ingress, e.rate_bps);
        }
        table
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let entries: Vec<AdmissionEntry> = serde_json::from_str(text)?;
        Ok(Self::from_entries(entries))
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn entries(&self) -> Vec<AdmissionEntry> {
        self.entries
            .iter()
            .map(|(&(src_gs, dst_gs), (ingress, bucket))| AdmissionEntry {
                src_gs,
                dst_gs,
                ingress: *ingress,
                rate_bps: bucket.rate_bps,
            })
            .collect()
    }

    pub fn ingress_for(&self, src_gs: u32, dst_gs: u32) -> Option<SatelliteId> {
        self.entries.get(&(src_gs, dst_gs)).map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pre_check(&mut self, header: &PacketHeader, ingress: SatelliteId, size_bits: f64, t: f64) -> bool {
        match self.entries.get_mut(&(header.src_gs, header.dst_gs)) {
            Some((allowed, bucket)) if *allowed == ingress => bucket.admit(size_bits, t),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Pre,
    Check1,
    Check2,
    Check3,
}

/// Everything checks 1-3 need from the tag list, gathered in one pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagScan {
    pub plane_offset: i64,
    pub index_offset: i64,
    pub intra_steps: u32,
    pub cross_steps: u32,
    pub inversion_count: u32,
    pub inversion_steps: u32,
}

pub fn scan_tags(tags: &[PathTag]) -> TagScan {
    let mut scan = TagScan::default();
    // Directions seen so far, indexed by `Direction as usize`.
    let mut seen = [false; 4];
    for tag in tags {
        let (dp, di) = tag.direction.delta();
        let steps = tag.steps as u32;
        scan.plane_offset += dp * steps as i64;
        scan.index_offset += di * steps as i64;
        if tag.direction.is_intra_orbit() {
            scan.intra_steps += steps;
        } else {
            scan.cross_steps += steps;
        }
        if steps == 0 {
            continue;
        }
        if seen[tag.direction.opposite() as usize] {
            scan.inversion_count += 1;
            scan.inversion_steps += steps;
        }
        seen[tag.direction as usize] = true;
    }
    scan
}

/// Minimal-grid dimensions between two satellites; a 1x1 single-path grid
/// when they coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GminInfo {
    pub r_min: u32,
    pub c_min: u32,
    pub single_path: bool,
}

impl GminInfo {
    pub fn between(cfg: &ConstellationConfig, s: SatelliteId, d: SatelliteId) -> Self {
        match minimal_grid(cfg, s, d) {
            Ok((g, r_min, c_min)) => Self {
                r_min,
                c_min,
                single_path: g.is_single_path(),
            },
            Err(_) => Self {
                r_min: 1,
                c_min: 1,
                single_path: true,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidatorOptions {
    pub max_inversions: u32,
    pub max_inversion_steps: u32,
    pub max_excess: u32,
    /// Subtracted from `r_min` and `c_min` to get the per-axis step budgets.
    pub budget_offset: u32,
    pub packet_bits: f64,
}

impl Default for ValidatorOptions {
    fn default() -> Self {
        Self {
            max_inversions: 1,
            max_inversion_steps: 3,
            max_excess: 2,
            budget_offset: 1,
            packet_bits: 12_000.0,
        }
    }
}

pub fn check1(
    cfg: &ConstellationConfig,
    terminal: SatelliteId,
    dst_gs: u32,
    t: f64,
    gs_db: &GroundStationDb,
) -> bool {
    let Some(gs) = gs_db.get(dst_gs) else {
        return false;
    };
    let p = satellite_geo(cfg, terminal, t, Frame::EarthFixed).position_m;
    gs.elevation_deg(cfg, p) >= gs.min_elevation_deg
}

pub fn check2(scan: &TagScan, gmin: &GminInfo, opts: &ValidatorOptions) -> bool {
    scan.inversion_count <= opts.max_inversions
        && (gmin.single_path || scan.inversion_steps <= opts.max_inversion_steps)
}

pub fn link_excess(scan: &TagScan, gmin: &GminInfo, budget_offset: u32) -> u32 {
    let intra_budget = gmin.r_min.saturating_sub(budget_offset);
    let cross_budget = gmin.c_min.saturating_sub(budget_offset);
    scan.intra_steps.saturating_sub(intra_budget) + scan.cross_steps.saturating_sub(cross_budget)
}

pub fn check3(scan: &TagScan, gmin: &GminInfo, opts: &ValidatorOptions) -> bool {
    link_excess(scan, gmin, opts.budget_offset) <= opts.max_excess
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationMetrics {
    pub inversion_count: u32,
    pub inversion_steps: u32,
    pub intra_steps: u32,
    pub cross_steps: u32,
    pub r_min: u32,
    pub c_min: u32,
    pub excess: u32,
    /// Number of passes over the tag list.
    pub tag_passes: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub passed: bool,
    pub failed_check: Option<Check>,
    pub metrics: ValidationMetrics,
}

impl ValidationVerdict {
    fn fail(check: Check, metrics: ValidationMetrics) -> Self {
        Self {
            passed: false,
            failed_check: Some(check),
            metrics,
        }
    }
}

pub struct Validator<'a> {
    cfg: &'a ConstellationConfig,
    gs_db: &'a GroundStationDb,
    pub admission: AdmissionTable,
    pub options: ValidatorOptions,
}

impl<'a> Validator<'a> {
    pub fn new(cfg: &'a ConstellationConfig, gs_db: &'a GroundStationDb, admission: AdmissionTable) -> Self {
        Self {
            cfg,
            gs_db,
            admission,
            options: ValidatorOptions::default(),
        }
    }

    pub fn with_options(mut self, options: ValidatorOptions) -> Self {
        self.options = options;
        self
    }

    /// Pre-check followed by checks 1-3, stopping at the first failure.
    pub fn validate(&mut self, header: &PacketHeader, ingress: SatelliteId, size_bits: f64, t: f64) -> ValidationVerdict {
        if !self.admission.pre_check(header, ingress, size_bits, t) {
            return ValidationVerdict::fail(Check::Pre, ValidationMetrics::default());
        }
        self.validate_checks(header, ingress, t)
    }

    /// Checks 1-3 only. Pure.
    pub fn validate_checks(&self, header: &PacketHeader, ingress: SatelliteId, t: f64) -> ValidationVerdict {
        validate_checks(self.cfg, self.gs_db, &self.options, header, ingress, t)
    }
}

pub fn validate_checks(
    cfg: &ConstellationConfig,
    gs_db: &GroundStationDb,
    opts: &ValidatorOptions,
    header: &PacketHeader,
    ingress: SatelliteId,
    t: f64,
) -> ValidationVerdict {
    let scan = scan_tags(&header.tags);
    let terminal = cfg.sat(
        ingress.plane as i64 + scan.plane_offset,
        ingress.index as i64 + scan.index_offset,
    );
    let gmin = GminInfo::between(cfg, ingress, terminal);
    let metrics = ValidationMetrics {
        inversion_count: scan.inversion_count,
        inversion_steps: scan.inversion_steps,
        intra_steps: scan.intra_steps,
        cross_steps: scan.cross_steps,
        r_min: gmin.r_min,
        c_min: gmin.c_min,
        excess: link_excess(&scan, &gmin, opts.budget_offset),
        tag_passes: 1,
    };
    if !check1(cfg, terminal, header.dst_gs, t, gs_db) {
        return ValidationVerdict::fail(Check::Check1, metrics);
    }
    if !check2(&scan, &gmin, opts) {
        return ValidationVerdict::fail(Check::Check2, metrics);
    }
    if !check3(&scan, &gmin, opts) {
        return ValidationVerdict::fail(Check::Check3, metrics);
    }
    ValidationVerdict {
        passed: true,
        failed_check: None,
        metrics,
    }
}
