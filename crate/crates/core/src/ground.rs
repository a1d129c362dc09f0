//! Ground stations, elevation-mask visibility, source routing and attacker
//! path generators.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{dijkstra, WeightedSnapshot};
use crate::codec::{encode_path, PacketHeader, MAX_TAGS};
use crate::constellation::{dist, rotate_to_earth_fixed, ConstellationConfig, LinkId, SatelliteId, Snapshot, Vec3};
use crate::error::{Error, Result};
use crate::forwarding::LinkStateMap;
use crate::grid::theory_shortest_path_in;
use crate::path::Path;

pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 25.0;

const CITIES_CSV: &str = include_str!("../data/cities.csv");

fn default_min_elevation() -> f64 {
    DEFAULT_MIN_ELEVATION_DEG
}

fn default_antennas() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStation {
    pub id: u32,
    #[serde(default)]
    pub name: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default = "default_min_elevation")]
    pub min_elevation_deg: f64,
    #[serde(default = "default_antennas")]
    pub antenna_count: u32,
}

impl GroundStation {
    pub fn new(id: u32, latitude_deg: f64, longitude_deg: f64) -> Self {
        Self {
            id,
            name: String::new(),
            latitude_deg,
            longitude_deg,
            min_elevation_deg: DEFAULT_MIN_ELEVATION_DEG,
            antenna_count: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_elevation_deg > 0.0 && self.min_elevation_deg < 90.0) {
            return Err(Error::InvalidGroundStation(format!(
                "station {}: min elevation {} outside (0, 90)",
                self.id, self.min_elevation_deg
            )));
        }
        if !(-90.0..=90.0).contains(&self.latitude_deg) || !self.longitude_deg.is_finite() {
            return Err(Error::InvalidGroundStation(format!("station {}: bad coordinates", self.id)));
        }
        if self.antenna_count == 0 {
            return Err(Error::InvalidGroundStation(format!("station {}: no antenna", self.id)));
        }
        Ok(())
    }

    /// Earth-fixed position on a spherical Earth.
    pub fn position(&self, cfg: &ConstellationConfig) -> Vec3 {
        let (lat, lon) = (self.latitude_deg.to_radians(), self.longitude_deg.to_radians());
        let r = cfg.earth_radius_m;
        [r * lat.cos() * lon.cos(), r * lat.cos() * lon.sin(), r * lat.sin()]
    }

    /// Elevation in degrees of a point given in the Earth-fixed frame.
    pub fn elevation_deg(&self, cfg: &ConstellationConfig, target: Vec3) -> f64 {
        let g = self.position(cfg);
        let v = [target[0] - g[0], target[1] - g[1], target[2] - g[2]];
        let up = cfg.earth_radius_m;
        let dot = (v[0] * g[0] + v[1] * g[1] + v[2] * g[2]) / up;
        (dot / dist(target, g)).clamp(-1.0, 1.0).asin().to_degrees()
    }
}

/// Elevation of `sat` seen from `gs` at the snapshot instant.
pub fn elevation_of(snap: &Snapshot, gs: &GroundStation, sat: SatelliteId) -> f64 {
    let cfg = snap.config();
    let p = rotate_to_earth_fixed(cfg, snap.position(sat), snap.time());
    gs.elevation_deg(cfg, p)
}

pub fn is_visible(cfg: &ConstellationConfig, gs: &GroundStation, sat: SatelliteId, t: f64) -> bool {
    let geo = crate::constellation::satellite_geo(cfg, sat, t, crate::constellation::Frame::EarthFixed);
    gs.elevation_deg(cfg, geo.position_m) >= gs.min_elevation_deg
}

pub fn visible_sats(cfg: &ConstellationConfig, gs: &GroundStation, t: f64) -> Vec<SatelliteId> {
    visible_sats_in(&Snapshot::at(cfg, t), gs)
        .into_iter()
        .map(|(s, _)| s)
        .collect()
}

/// Visible satellites with their elevation, highest first.
pub fn visible_sats_in(snap: &Snapshot, gs: &GroundStation) -> Vec<(SatelliteId, f64)> {
    let cfg = snap.config();
    let mut out: Vec<(SatelliteId, f64)> = cfg
        .satellites()
        .map(|s| (s, elevation_of(snap, gs, s)))
        .filter(|&(_, e)| e >= gs.min_elevation_deg)
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroundStationDb {
    stations: BTreeMap<u32, GroundStation>,
}

impl GroundStationDb {
    pub fn new(stations: impl IntoIterator<Item = GroundStation>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for gs in stations {
            gs.validate()?;
            if map.insert(gs.id, gs).is_some() {
                return Err(Error::InvalidGroundStation("duplicate id".into()));
            }
        }
        Ok(Self { stations: map })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let list: Vec<GroundStation> = serde_json::from_str(text)?;
        Self::new(list)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The bundled corpus of 55 large cities.
    pub fn cities() -> Self {
        Self::new(cities()).expect("bundled corpus is valid")
    }

    pub fn get(&self, id: u32) -> Option<&GroundStation> {
        self.stations.get(&id)
    }

    pub fn insert(&mut self, gs: GroundStation) -> Result<()> {
        gs.validate()?;
        self.stations.insert(gs.id, gs);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundStation> {
        self.stations.values()
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }
}

#[derive(Deserialize)]
struct CityRow {
    id: u32,
    name: String,
    latitude_deg: f64,
    longitude_deg: f64,
}

pub fn cities() -> Vec<GroundStation> {
    let mut reader = csv::Reader::from_reader(CITIES_CSV.as_bytes());
    reader
        .deserialize::<CityRow>()
        .map(|row| {
            let row = row.expect("bundled corpus parses");
            GroundStation {
                name: row.name,
                ..GroundStation::new(row.id, row.latitude_deg, row.longitude_deg)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteMode {
    Dijkstra,
    Theory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRoute {
    pub header: PacketHeader,
    pub ingress: SatelliteId,
    pub egress: SatelliteId,
    pub path: Path,
}

fn best_visible(snap: &Snapshot, gs: &GroundStation) -> Result<SatelliteId> {
    visible_sats_in(snap, gs)
        .first()
        .map(|&(s, _)| s)
        .ok_or(Error::NoVisibleSatellite(gs.id))
}

/// Header for the current best path between two stations, entering and
/// leaving through their highest-elevation satellites.
pub fn source_route(
    snap: &Snapshot,
    db: &GroundStationDb,
    src_gs: u32,
    dst_gs: u32,
    mode: RouteMode,
    failures_known: &LinkStateMap,
) -> Result<SourceRoute> {
    let src = db.get(src_gs).ok_or(Error::UnknownGroundStation(src_gs))?;
    let dst = db.get(dst_gs).ok_or(Error::UnknownGroundStation(dst_gs))?;
    let ingress = best_visible(snap, src)?;
    let egress = best_visible(snap, dst)?;
    let path = route_between(snap, ingress, egress, mode, failures_known)?;
    let header = PacketHeader::new(src_gs, dst_gs, encode_path(snap.config(), &path))?;
    Ok(SourceRoute {
        header,
        ingress,
        egress,
        path,
    })
}

/// Satellite path under `mode`. Theory paths that touch a known failure are
/// replaced by the Dijkstra path on the surviving topology.
pub fn route_between(
    snap: &Snapshot,
    s: SatelliteId,
    d: SatelliteId,
    mode: RouteMode,
    failures_known: &LinkStateMap,
) -> Result<Path> {
    let cfg = snap.config();
    let net = WeightedSnapshot::new(snap, failures_known);
    let dijkstra_path = || dijkstra(&net, s, d).ok_or(Error::NoPath { from: s, to: d });
    match mode {
        RouteMode::Dijkstra => dijkstra_path(),
        RouteMode::Theory => {
            if s == d {
                return Ok(Path::from_vec_unchecked(vec![s]));
            }
            let p = theory_shortest_path_in(snap, s, d);
            if p.links(cfg).all(|l| failures_known.is_link_up(l)) {
                Ok(p)
            } else {
                dijkstra_path()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackTarget {
    Satellite(SatelliteId),
    Link(LinkId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackPath {
    pub variant: AttackVariant,
    pub path: Path,
    pub header: PacketHeader,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackVariant {
    /// Shortest path to the target, then shortest path to the destination.
    Concatenated,
    /// Shortest path to a random on-path satellite, then through the target.
    RandomDetour,
}

fn join(parts: &[&Path]) -> Path {
    let mut sats: Vec<SatelliteId> = Vec::new();
    for p in parts {
        let s = p.satellites();
        let skip = usize::from(!sats.is_empty() && s.first() == sats.last());
        sats.extend_from_slice(&s[skip..]);
    }
    Path::from_vec_unchecked(sats)
}

/// Malicious headers steering traffic from `src_sat` to `dst_sat` through
/// `target`. Variants needing more than the header's tag capacity are left out.
#[allow(clippy::too_many_arguments)]
pub fn attack_paths(
    snap: &Snapshot,
    src_sat: SatelliteId,
    dst_sat: SatelliteId,
    target: AttackTarget,
    src_gs: u32,
    dst_gs: u32,
    rng: &mut impl Rng,
) -> Result<Vec<AttackPath>> {
    let cfg = snap.config();
    let none = LinkStateMap::new();
    let net = WeightedSnapshot::new(snap, &none);
    let sp = |a: SatelliteId, b: SatelliteId| dijkstra(&net, a, b).ok_or(Error::NoPath { from: a, to: b });
    let shortest = sp(src_sat, dst_sat)?;
    let on_path = match target {
        AttackTarget::Satellite(x) => shortest.contains(x),
        AttackTarget::Link(l) => shortest.uses_link(cfg, l),
    };
    if on_path {
        return Err(Error::TargetOnPath);
    }
    let via = |from: SatelliteId| -> Result<Path> {
        match target {
            AttackTarget::Satellite(x) => Ok(join(&[&sp(from, x)?, &sp(x, dst_sat)?])),
            AttackTarget::Link(l) => {
                let ab = join(&[&sp(from, l.a)?, &Path::from_vec_unchecked(vec![l.a, l.b]), &sp(l.b, dst_sat)?]);
                let ba = join(&[&sp(from, l.b)?, &Path::from_vec_unchecked(vec![l.b, l.a]), &sp(l.a, dst_sat)?]);
                Ok(if ab.delay(snap) <= ba.delay(snap) { ab } else { ba })
            }
        }
    };
    let concatenated = via(src_sat)?;
    let pivot = shortest.satellites()[rng.gen_range(0..shortest.hops().max(1))];
    let detour = join(&[&sp(src_sat, pivot)?, &via(pivot)?]);

    let mut out = Vec::new();
    for (variant, path) in [(AttackVariant::Concatenated, concatenated), (AttackVariant::RandomDetour, detour)] {
        let tags = encode_path(cfg, &path);
        if tags.len() > MAX_TAGS {
            continue;
        }
        out.push(AttackPath {
            variant,
            header: PacketHeader::new(src_gs, dst_gs, tags)?,
            path,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_has_55_cities() {
        let db = GroundStationDb::cities();
        assert_eq!(db.len(), 55);
        assert_eq!(db.get(1).unwrap().name, "Tokyo");
        assert!(db.iter().all(|g| g.min_elevation_deg == DEFAULT_MIN_ELEVATION_DEG));
    }

    #[test]
    fn zenith_and_antipode() {
        let cfg = ConstellationConfig::default();
        let sat = SatelliteId::new(5, 9);
        let t = 321.0;
        let geo = crate::constellation::satellite_geo(&cfg, sat, t, crate::constellation::Frame::EarthFixed);
        let below = GroundStation::new(1, geo.latitude_rad.to_degrees(), geo.longitude_rad.to_degrees());
        assert!((below.elevation_deg(&cfg, geo.position_m) - 90.0).abs() < 1e-6);
        assert!(is_visible(&cfg, &below, sat, t));
        let vis = visible_sats(&cfg, &below, t);
        assert_eq!(vis[0], sat);
        let anti = GroundStation::new(2, -below.latitude_deg, below.longitude_deg + 180.0);
        assert!(anti.elevation_deg(&cfg, geo.position_m) < 0.0);
        assert!(!is_visible(&cfg, &anti, sat, t));
    }

    #[test]
    fn rejects_bad_stations() {
        let mut gs = GroundStation::new(1, 0.0, 0.0);
        gs.min_elevation_deg = 0.0;
        assert!(GroundStationDb::new([gs]).is_err());
        let json = r#"[{"id": 7, "latitude_deg": 10.0, "longitude_deg": 20.0}]"#;
        let db = GroundStationDb::from_json(json).unwrap();
        assert_eq!(db.get(7).unwrap().min_elevation_deg, 25.0);
    }

    #[test]
    fn join_drops_shared_endpoint() {
        let s = SatelliteId::new;
        let a = Path::from_vec_unchecked(vec![s(0, 0), s(1, 0)]);
        let b = Path::from_vec_unchecked(vec![s(1, 0), s(1, 1)]);
        assert_eq!(join(&[&a, &b]).satellites(), &[s(0, 0), s(1, 0), s(1, 1)]);
    }
}
