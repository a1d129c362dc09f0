use serde::{Deserialize, Serialize};

use crate::constellation::{direction_between, ConstellationConfig, Direction, LinkId, SatelliteId, Snapshot};
use crate::error::{Error, Result};

/// A walk over the +Grid. Built through [`Path::new`] it is loop-free; raw
/// trajectories use [`Path::walk`] and may revisit satellites.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    sats: Vec<SatelliteId>,
}

impl Path {
    pub fn new(cfg: &ConstellationConfig, sats: Vec<SatelliteId>) -> Result<Self> {
        let path = Self::walk(cfg, sats)?;
        let mut seen = path.sats.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedSatellite(w[0]));
        }
        Ok(path)
    }

    /// Adjacency-checked, but repeated satellites are allowed.
    pub fn walk(cfg: &ConstellationConfig, sats: Vec<SatelliteId>) -> Result<Self> {
        for w in sats.windows(2) {
            if direction_between(cfg, w[0], w[1]).is_none() {
                return Err(Error::NotAdjacent { from: w[0], to: w[1] });
            }
        }
        Ok(Self { sats })
    }

    pub(crate) fn from_vec_unchecked(sats: Vec<SatelliteId>) -> Self {
        Self { sats }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn satellites(&self) -> &[SatelliteId] {
        &self.sats
    }

    pub fn into_satellites(self) -> Vec<SatelliteId> {
        self.sats
    }

    pub fn is_empty(&self) -> bool {
        self.sats.is_empty()
    }

    pub fn hops(&self) -> usize {
        self.sats.len().saturating_sub(1)
    }

    pub fn first(&self) -> Option<SatelliteId> {
        self.sats.first().copied()
    }

    pub fn last(&self) -> Option<SatelliteId> {
        self.sats.last().copied()
    }

    pub fn contains(&self, sat: SatelliteId) -> bool {
        self.sats.contains(&sat)
    }

    pub fn links<'a>(&'a self, cfg: &'a ConstellationConfig) -> impl Iterator<Item = LinkId> + 'a {
        self.sats
            .windows(2)
            .map(move |w| LinkId::between(cfg, w[0], w[1]).expect("path satellites are adjacent"))
    }

    pub fn directions<'a>(&'a self, cfg: &'a ConstellationConfig) -> impl Iterator<Item = Direction> + 'a {
        self.sats
            .windows(2)
            .map(move |w| direction_between(cfg, w[0], w[1]).expect("path satellites are adjacent"))
    }

    pub fn uses_link(&self, cfg: &ConstellationConfig, link: LinkId) -> bool {
        self.links(cfg).any(|l| l == link)
    }

    pub fn delay(&self, snap: &Snapshot) -> f64 {
        self.sats.windows(2).map(|w| snap.hop_delay_s(w[0], w[1])).sum()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = self.sats.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == self.sats.len()
    }

    pub fn record(&self, snap: &Snapshot) -> PathRecord {
        let link_delays_s: Vec<f64> = self.sats.windows(2).map(|w| snap.hop_delay_s(w[0], w[1])).collect();
        PathRecord {
            time_s: snap.time(),
            total_delay_s: link_delays_s.iter().sum(),
            satellites: self.sats.clone(),
            link_delays_s,
        }
    }
}

/// JSON form of a path evaluated at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub time_s: f64,
    pub satellites: Vec<SatelliteId>,
    pub link_delays_s: Vec<f64>,
    pub total_delay_s: f64,
}
