//! Single-shell +Grid constellation: torus adjacency and circular-orbit geometry.
//!
//! Satellite `(plane, index)` sits on a circular orbit with right ascension
//! `2π·plane/num_planes` and argument of latitude
//! `2π·(index + plane·phase_offset)/sats_per_plane + n·t`, where `n` is the
//! mean motion. Adjacency never depends on the geometry: every satellite links
//! to its two in-plane neighbours and to the same index in the two adjacent
//! planes, with wraparound on both axes.

mod assumptions;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assumptions::{verify_model_assumptions, AssumptionCheck, AssumptionReport};

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstellationConfig {
    pub num_planes: u32,
    pub sats_per_plane: u32,
    pub altitude_m: f64,
    pub inclination_deg: f64,
    /// Fraction of the in-plane spacing by which each plane is shifted
    /// relative to its western neighbour.
    pub phase_offset: f64,
    pub earth_radius_m: f64,
    pub mu_m3s2: f64,
    pub earth_rotation_rad_s: f64,
    pub light_speed_m_s: f64,
    /// Allowed relative spread of intra-orbit link lengths.
    pub intra_length_tolerance: f64,
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        Self {
            num_planes: 24,
            sats_per_plane: 66,
            altitude_m: 550_000.0,
            inclination_deg: 53.0,
            phase_offset: DEFAULT_PHASE_OFFSET,
            earth_radius_m: 6_371_000.0,
            mu_m3s2: 3.986_004_418e14,
            earth_rotation_rad_s: 7.292_115_9e-5,
            light_speed_m_s: 299_792_458.0,
            intra_length_tolerance: 0.02,
        }
    }
}

pub const DEFAULT_PHASE_OFFSET: f64 = 1.0 / 24.0;

impl ConstellationConfig {
    /// A smaller shell used by tests and quick experiments.
    pub fn small(num_planes: u32, sats_per_plane: u32) -> Self {
        Self {
            num_planes,
            sats_per_plane,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_planes < 3 {
            return fail(format!("num_planes = {} (need >= 3)", self.num_planes));
        }
        if self.sats_per_plane < 4 {
            return fail(format!("sats_per_plane = {} (need >= 4)", self.sats_per_plane));
        }
        if self.sats_per_plane > 128 || self.num_planes > 128 {
            return fail("at most 128 planes and 128 satellites per plane fit in 7-bit tags".into());
        }
        if !(self.inclination_deg > 0.0 && self.inclination_deg < 90.0) {
            return fail(format!("inclination {} deg outside (0, 90)", self.inclination_deg));
        }
        if !(0.0..1.0).contains(&self.phase_offset) {
            return fail(format!("phase_offset {} outside [0, 1)", self.phase_offset));
        }
        for (name, v) in [
            ("altitude_m", self.altitude_m),
            ("earth_radius_m", self.earth_radius_m),
            ("mu_m3s2", self.mu_m3s2),
            ("light_speed_m_s", self.light_speed_m_s),
            ("intra_length_tolerance", self.intra_length_tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be finite and positive"));
            }
        }
        if !self.earth_rotation_rad_s.is_finite() {
            return fail("earth_rotation_rad_s must be finite".into());
        }
        let period = self.period_s();
        if !(period.is_finite() && period > 0.0) {
            return fail("orbital period is not finite".into());
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn semi_major_axis_m(&self) -> f64 {
        self.earth_radius_m + self.altitude_m
    }

    pub fn mean_motion_rad_s(&self) -> f64 {
        (self.mu_m3s2 / self.semi_major_axis_m().powi(3)).sqrt()
    }

    pub fn period_s(&self) -> f64 {
        TAU * (self.semi_major_axis_m().powi(3) / self.mu_m3s2).sqrt()
    }

    pub fn inclination_rad(&self) -> f64 {
        self.inclination_deg.to_radians()
    }

    pub fn sat_count(&self) -> usize {
        self.num_planes as usize * self.sats_per_plane as usize
    }

    pub fn sat_index(&self, sat: SatelliteId) -> usize {
        sat.plane as usize * self.sats_per_plane as usize + sat.index as usize
    }

    pub fn sat_at(&self, idx: usize) -> SatelliteId {
        let spp = self.sats_per_plane as usize;
        SatelliteId {
            plane: (idx / spp) as u32,
            index: (idx % spp) as u32,
        }
    }

    pub fn satellites(&self) -> impl Iterator<Item = SatelliteId> + '_ {
        (0..self.sat_count()).map(|i| self.sat_at(i))
    }

    /// Canonical id for any integer coordinates.
    pub fn sat(&self, plane: i64, index: i64) -> SatelliteId {
        SatelliteId {
            plane: plane.rem_euclid(self.num_planes as i64) as u32,
            index: index.rem_euclid(self.sats_per_plane as i64) as u32,
        }
    }

    /// Phase of a satellite at `t = 0`, in units of the in-plane spacing.
    pub fn phase_slots(&self, sat: SatelliteId) -> f64 {
        sat.index as f64 + sat.plane as f64 * self.phase_offset
    }

    /// Argument of latitude at time `t`, wrapped to `[0, 2π)`.
    pub fn argument_of_latitude(&self, sat: SatelliteId, t: f64) -> f64 {
        let u0 = TAU * self.phase_slots(sat) / self.sats_per_plane as f64;
        (u0 + self.mean_motion_rad_s() * t).rem_euclid(TAU)
    }

    pub fn raan_rad(&self, plane: u32) -> f64 {
        TAU * plane as f64 / self.num_planes as f64
    }

    /// Chord length of an intra-orbit link.
    pub fn intra_link_length_m(&self) -> f64 {
        2.0 * self.semi_major_axis_m() * (PI / self.sats_per_plane as f64).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SatelliteId {
    pub plane: u32,
    pub index: u32,
}

impl SatelliteId {
    pub const fn new(plane: u32, index: u32) -> Self {
        Self { plane, index }
    }
}

impl fmt::Display for SatelliteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.plane, self.index)
    }
}

/// Absolute torus direction. East/West move across planes, Prograde/Retrograde
/// move along the plane in (or against) the direction of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    East,
    West,
    Prograde,
    Retrograde,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::East,
        Direction::West,
        Direction::Prograde,
        Direction::Retrograde,
    ];

    pub fn opposite(self) -> Self {
        match self {
            Direction::East => Direction::West,
            Direction::West => Direction::East,
            Direction::Prograde => Direction::Retrograde,
            Direction::Retrograde => Direction::Prograde,
        }
    }

    pub fn is_intra_orbit(self) -> bool {
        matches!(self, Direction::Prograde | Direction::Retrograde)
    }

    pub fn link_kind(self) -> LinkKind {
        if self.is_intra_orbit() {
            LinkKind::IntraOrbit
        } else {
            LinkKind::CrossOrbit
        }
    }

    /// Unit step `(d_plane, d_index)`.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
            Direction::Prograde => (0, 1),
            Direction::Retrograde => (0, -1),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Direction::East => 'E',
            Direction::West => 'W',
            Direction::Prograde => 'P',
            Direction::Retrograde => 'R',
        }
    }
}

pub fn neighbor(cfg: &ConstellationConfig, sat: SatelliteId, dir: Direction) -> SatelliteId {
    let (dp, di) = dir.delta();
    cfg.sat(sat.plane as i64 + dp, sat.index as i64 + di)
}

/// Direction of the single hop `from -> to`, if they are adjacent.
pub fn direction_between(
    cfg: &ConstellationConfig,
    from: SatelliteId,
    to: SatelliteId,
) -> Option<Direction> {
    Direction::ALL
        .into_iter()
        .find(|&d| neighbor(cfg, from, d) == to)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    IntraOrbit,
    CrossOrbit,
}

/// An undirected ISL; endpoints are stored in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkId {
    pub kind: LinkKind,
    pub a: SatelliteId,
    pub b: SatelliteId,
}

impl LinkId {
    pub fn between(cfg: &ConstellationConfig, x: SatelliteId, y: SatelliteId) -> Option<Self> {
        let dir = direction_between(cfg, x, y)?;
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Some(Self {
            kind: dir.link_kind(),
            a,
            b,
        })
    }

    pub fn from_step(cfg: &ConstellationConfig, sat: SatelliteId, dir: Direction) -> Self {
        let other = neighbor(cfg, sat, dir);
        let (a, b) = if sat <= other { (sat, other) } else { (other, sat) };
        Self {
            kind: dir.link_kind(),
            a,
            b,
        }
    }

    pub fn touches(&self, sat: SatelliteId) -> bool {
        self.a == sat || self.b == sat
    }

    pub fn other(&self, sat: SatelliteId) -> Option<SatelliteId> {
        if self.a == sat {
            Some(self.b)
        } else if self.b == sat {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            LinkKind::IntraOrbit => "intra",
            LinkKind::CrossOrbit => "cross",
        };
        write!(f, "{tag}{}-{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heading {
    Northbound,
    Southbound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Earth-centred inertial; ISL geometry lives here.
    Inertial,
    /// Rotates with the Earth; used for ground-station visibility.
    EarthFixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoState {
    pub latitude_rad: f64,
    pub longitude_rad: f64,
    pub position_m: Vec3,
    pub heading: Heading,
}

fn heading_at(u: f64) -> Heading {
    if u.cos() >= 0.0 {
        Heading::Northbound
    } else {
        Heading::Southbound
    }
}

fn inertial_position(cfg: &ConstellationConfig, plane: u32, u: f64) -> Vec3 {
    let a = cfg.semi_major_axis_m();
    let raan = cfg.raan_rad(plane);
    let (so, co) = raan.sin_cos();
    let (su, cu) = u.sin_cos();
    let (si, ci) = cfg.inclination_rad().sin_cos();
    [
        a * (co * cu - so * su * ci),
        a * (so * cu + co * su * ci),
        a * (su * si),
    ]
}

pub(crate) fn rotate_to_earth_fixed(cfg: &ConstellationConfig, p: Vec3, t: f64) -> Vec3 {
    let (s, c) = (-cfg.earth_rotation_rad_s * t).sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
}

pub fn satellite_geo(cfg: &ConstellationConfig, sat: SatelliteId, t: f64, frame: Frame) -> GeoState {
    let u = cfg.argument_of_latitude(sat, t);
    let inertial = inertial_position(cfg, sat.plane, u);
    let position_m = match frame {
        Frame::Inertial => inertial,
        Frame::EarthFixed => rotate_to_earth_fixed(cfg, inertial, t),
    };
    let latitude_rad = (u.sin() * cfg.inclination_rad().sin()).asin();
    GeoState {
        latitude_rad,
        longitude_rad: position_m[1].atan2(position_m[0]),
        position_m,
        heading: heading_at(u),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub length_m: f64,
    pub delay_s: f64,
    pub midpoint_latitude_rad: f64,
    /// Distance of the link midpoint from the equator, as an absolute latitude.
    pub equator_distance_rad: f64,
}

fn geometry_of(cfg: &ConstellationConfig, pa: Vec3, pb: Vec3) -> LinkGeometry {
    let length_m = dist(pa, pb);
    let mid = [
        0.5 * (pa[0] + pb[0]),
        0.5 * (pa[1] + pb[1]),
        0.5 * (pa[2] + pb[2]),
    ];
    let midpoint_latitude_rad = (mid[2] / norm(mid)).asin();
    LinkGeometry {
        length_m,
        delay_s: length_m / cfg.light_speed_m_s,
        midpoint_latitude_rad,
        equator_distance_rad: midpoint_latitude_rad.abs(),
    }
}

pub fn link_delay(cfg: &ConstellationConfig, link: LinkId, t: f64) -> LinkGeometry {
    let pa = satellite_geo(cfg, link.a, t, Frame::Inertial).position_m;
    let pb = satellite_geo(cfg, link.b, t, Frame::Inertial).position_m;
    geometry_of(cfg, pa, pb)
}

pub(crate) fn dist(a: Vec3, b: Vec3) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

pub(crate) fn norm(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Positions of every satellite at one instant. Cheap to share between threads.
#[derive(Debug, Clone)]
pub struct Snapshot {
    cfg: ConstellationConfig,
    t: f64,
    positions: Vec<Vec3>,
    phases: Vec<f64>,
}

impl Snapshot {
    pub fn at(cfg: &ConstellationConfig, t: f64) -> Self {
        let mut positions = Vec::with_capacity(cfg.sat_count());
        let mut phases = Vec::with_capacity(cfg.sat_count());
        for sat in cfg.satellites() {
            let u = cfg.argument_of_latitude(sat, t);
            positions.push(inertial_position(cfg, sat.plane, u));
            phases.push(u);
        }
        Self {
            cfg: *cfg,
            t,
            positions,
            phases,
        }
    }

    pub fn config(&self) -> &ConstellationConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn position(&self, sat: SatelliteId) -> Vec3 {
        self.positions[self.cfg.sat_index(sat)]
    }

    pub fn argument_of_latitude(&self, sat: SatelliteId) -> f64 {
        self.phases[self.cfg.sat_index(sat)]
    }

    pub fn latitude(&self, sat: SatelliteId) -> f64 {
        let p = self.position(sat);
        (p[2] / norm(p)).asin()
    }

    pub fn heading(&self, sat: SatelliteId) -> Heading {
        heading_at(self.argument_of_latitude(sat))
    }

    pub fn distance_m(&self, x: SatelliteId, y: SatelliteId) -> f64 {
        dist(self.position(x), self.position(y))
    }

    pub fn hop_delay_s(&self, x: SatelliteId, y: SatelliteId) -> f64 {
        self.distance_m(x, y) / self.cfg.light_speed_m_s
    }

    pub fn link_geometry(&self, link: LinkId) -> LinkGeometry {
        geometry_of(&self.cfg, self.position(link.a), self.position(link.b))
    }

    pub fn midpoint_latitude(&self, x: SatelliteId, y: SatelliteId) -> f64 {
        geometry_of(&self.cfg, self.position(x), self.position(y)).midpoint_latitude_rad
    }
}
