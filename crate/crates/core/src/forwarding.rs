//! Per-satellite tag processing with local fast reroute.
//!
//! The sending satellite decrements the tag whose direction it uses; the
//! receiving satellite only skips tags that have reached zero. When the link
//! named by the current tag is down, the satellite either borrows one step from
//! the next unconsumed tag or, if none is left, sidesteps orthogonally and
//! appends a one-step tag that undoes the sidestep. A two-bit loop flag caps
//! this at two reroutes per packet.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::codec::{PacketHeader, PathTag, MAX_LOOP_FLAG, MAX_TAGS};
use crate::constellation::{neighbor, ConstellationConfig, Direction, LinkId, SatelliteId, Snapshot};
use crate::error::Result;
use crate::path::Path;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkStateMap {
    pub failed_links: BTreeSet<LinkId>,
    pub failed_sats: BTreeSet<SatelliteId>,
}

impl LinkStateMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fail_link(&mut self, link: LinkId) {
        self.failed_links.insert(link);
    }

    pub fn fail_sat(&mut self, sat: SatelliteId) {
        self.failed_sats.insert(sat);
    }

    pub fn is_empty(&self) -> bool {
        self.failed_links.is_empty() && self.failed_sats.is_empty()
    }

    pub fn is_sat_failed(&self, sat: SatelliteId) -> bool {
        self.failed_sats.contains(&sat)
    }

    pub fn is_link_up(&self, link: LinkId) -> bool {
        !self.failed_links.contains(&link) && !self.is_sat_failed(link.a) && !self.is_sat_failed(link.b)
    }

    pub fn is_up(&self, cfg: &ConstellationConfig, sat: SatelliteId, dir: Direction) -> bool {
        self.is_link_up(LinkId::from_step(cfg, sat, dir))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    RerouteLinkFailed,
    LoopFlagExhausted,
    TagOverflow,
    /// Guard rails; never produced by well-formed headers.
    ForwardingLoop,
    HopLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardDecision {
    Deliver,
    Drop(DropReason),
    Forward { direction: Direction, header: PacketHeader },
}

fn same_axis(a: Direction, b: Direction) -> bool {
    a.is_intra_orbit() == b.is_intra_orbit()
}

/// Decides what `sat` does with a packet carrying `header`. Reads only the
/// header and the liveness of links incident to `sat`.
pub fn process_tags(
    cfg: &ConstellationConfig,
    sat: SatelliteId,
    header: &PacketHeader,
    links: &LinkStateMap,
) -> Result<ForwardDecision> {
    header.check()?;
    let mut h = header.clone();
    let count = h.tags.len();
    let mut cur = h.curr_index as usize;
    while cur < count && h.tags[cur].steps == 0 {
        cur += 1;
    }
    h.curr_index = cur as u8;
    if cur == count {
        return Ok(ForwardDecision::Deliver);
    }

    let dir = h.tags[cur].direction;
    if links.is_up(cfg, sat, dir) {
        h.tags[cur].steps -= 1;
        return Ok(ForwardDecision::Forward { direction: dir, header: h });
    }

    if h.loop_flag >= MAX_LOOP_FLAG {
        return Ok(ForwardDecision::Drop(DropReason::LoopFlagExhausted));
    }
    h.loop_flag += 1;

    if let Some(next) = (cur + 1..count).find(|&j| h.tags[j].steps > 0) {
        let dir2 = h.tags[next].direction;
        if !links.is_up(cfg, sat, dir2) {
            return Ok(ForwardDecision::Drop(DropReason::RerouteLinkFailed));
        }
        h.tags[next].steps -= 1;
        return Ok(ForwardDecision::Forward { direction: dir2, header: h });
    }

    let dir2 = h.tags[..cur]
        .iter()
        .rev()
        .map(|t| t.direction)
        .find(|&d| !same_axis(d, dir))
        .unwrap_or(if dir.is_intra_orbit() { Direction::East } else { Direction::Prograde });
    if !links.is_up(cfg, sat, dir2) {
        return Ok(ForwardDecision::Drop(DropReason::RerouteLinkFailed));
    }
    if count + 1 > MAX_TAGS {
        return Ok(ForwardDecision::Drop(DropReason::TagOverflow));
    }
    h.tags.push(PathTag::new(dir2.opposite(), 1));
    Ok(ForwardDecision::Forward { direction: dir2, header: h })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Outcome {
    Delivered { at: SatelliteId },
    Dropped { reason: DropReason, at: SatelliteId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hop {
    pub from: SatelliteId,
    pub link: LinkId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub hops: Vec<Hop>,
    pub outcome: Outcome,
    pub total_delay_s: f64,
    pub reroute_count: u8,
    pub final_header: PacketHeader,
}

impl Trajectory {
    pub fn delivered(&self) -> bool {
        matches!(self.outcome, Outcome::Delivered { .. })
    }

    pub fn hop_count(&self) -> usize {
        self.hops.len()
    }

    /// Visited satellites in order, starting at the ingress. May repeat.
    pub fn satellites(&self) -> Vec<SatelliteId> {
        let mut out: Vec<SatelliteId> = self.hops.iter().map(|h| h.from).collect();
        let last = match self.outcome {
            Outcome::Delivered { at } | Outcome::Dropped { at, .. } => at,
        };
        out.push(last);
        out
    }

    pub fn path(&self) -> Path {
        Path::from_vec_unchecked(self.satellites())
    }
}

pub fn route_packet(
    cfg: &ConstellationConfig,
    ingress: SatelliteId,
    header: &PacketHeader,
    links: &LinkStateMap,
    t: f64,
) -> Result<Trajectory> {
    route_packet_in(&Snapshot::at(cfg, t), ingress, header, links)
}

/// Applies [`process_tags`] hop by hop, summing link delays of the snapshot.
pub fn route_packet_in(
    snap: &Snapshot,
    ingress: SatelliteId,
    header: &PacketHeader,
    links: &LinkStateMap,
) -> Result<Trajectory> {
    let cfg = snap.config();
    let limit = cfg.sat_count();
    let mut seen = HashSet::new();
    let mut hops = Vec::new();
    let mut h = header.clone();
    let mut cur = ingress;
    let mut delay = 0.0;
    let outcome = loop {
        let decision = process_tags(cfg, cur, &h, links)?;
        let (direction, next_header) = match decision {
            ForwardDecision::Deliver => break Outcome::Delivered { at: cur },
            ForwardDecision::Drop(reason) => break Outcome::Dropped { reason, at: cur },
            ForwardDecision::Forward { direction, header } => (direction, header),
        };
        let ci = next_header.curr_index as usize;
        let state = (cur, ci, next_header.tags.get(ci).map(|t| t.steps), next_header.loop_flag);
        if !seen.insert(state) {
            break Outcome::Dropped { reason: DropReason::ForwardingLoop, at: cur };
        }
        if hops.len() >= limit {
            break Outcome::Dropped { reason: DropReason::HopLimit, at: cur };
        }
        let next = neighbor(cfg, cur, direction);
        hops.push(Hop {
            from: cur,
            link: LinkId::from_step(cfg, cur, direction),
        });
        delay += snap.hop_delay_s(cur, next);
        cur = next;
        h = next_header;
    };
    Ok(Trajectory {
        hops,
        outcome,
        total_delay_s: delay,
        reroute_count: h.loop_flag,
        final_header: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::*;

    fn s(p: u32, i: u32) -> SatelliteId {
        SatelliteId::new(p, i)
    }

    fn header(tags: Vec<PathTag>, curr: u8) -> PacketHeader {
        PacketHeader {
            src_gs: 1,
            dst_gs: 2,
            loop_flag: 0,
            curr_index: curr,
            tags,
        }
    }

    #[test]
    fn borrows_from_next_tag() {
        let cfg = ConstellationConfig::default();
        let x = s(8, 40);
        let h = header(vec![PathTag::new(East, 0), PathTag::new(Retrograde, 7), PathTag::new(East, 9)], 1);
        let mut links = LinkStateMap::new();
        links.fail_link(LinkId::from_step(&cfg, x, Retrograde));
        let ForwardDecision::Forward { direction, header } = process_tags(&cfg, x, &h, &links).unwrap() else {
            panic!("expected forward")
        };
        assert_eq!(direction, East);
        assert_eq!(header.loop_flag, 1);
        assert_eq!(header.curr_index, 1);
        assert_eq!(header.tags[1], PathTag::new(Retrograde, 7));
        assert_eq!(header.tags[2], PathTag::new(East, 8));
    }

    #[test]
    fn sidesteps_when_last_tag() {
        let cfg = ConstellationConfig::default();
        let x = s(3, 3);
        let h = header(vec![PathTag::new(Prograde, 0), PathTag::new(East, 3)], 1);
        let mut links = LinkStateMap::new();
        links.fail_link(LinkId::from_step(&cfg, x, East));
        let ForwardDecision::Forward { direction, header } = process_tags(&cfg, x, &h, &links).unwrap() else {
            panic!("expected forward")
        };
        assert_eq!(direction, Prograde);
        assert_eq!(header.tags.len(), 3);
        assert_eq!(header.tags[2], PathTag::new(Retrograde, 1));
        assert_eq!(header.tags[1], PathTag::new(East, 3));
    }

    #[test]
    fn delivers_and_drops() {
        let cfg = ConstellationConfig::default();
        let x = s(0, 0);
        let none = LinkStateMap::new();
        let done = header(vec![PathTag::new(East, 0)], 0);
        assert_eq!(process_tags(&cfg, x, &done, &none).unwrap(), ForwardDecision::Deliver);

        let mut links = LinkStateMap::new();
        links.fail_link(LinkId::from_step(&cfg, x, East));
        let mut h = header(vec![PathTag::new(East, 2)], 0);
        h.loop_flag = 2;
        assert_eq!(
            process_tags(&cfg, x, &h, &links).unwrap(),
            ForwardDecision::Drop(DropReason::LoopFlagExhausted)
        );

        links.fail_link(LinkId::from_step(&cfg, x, Prograde));
        let h = header(vec![PathTag::new(East, 2), PathTag::new(Prograde, 1)], 0);
        assert_eq!(
            process_tags(&cfg, x, &h, &links).unwrap(),
            ForwardDecision::Drop(DropReason::RerouteLinkFailed)
        );

        let mut full = vec![PathTag::new(Prograde, 0); 14];
        full.push(PathTag::new(East, 1));
        let mut links = LinkStateMap::new();
        links.fail_link(LinkId::from_step(&cfg, x, East));
        assert_eq!(
            process_tags(&cfg, x, &header(full, 14), &links).unwrap(),
            ForwardDecision::Drop(DropReason::TagOverflow)
        );
    }

    #[test]
    fn failed_satellite_kills_incident_links() {
        let cfg = ConstellationConfig::small(8, 12);
        let mut links = LinkStateMap::new();
        links.fail_sat(s(2, 2));
        for d in Direction::ALL {
            assert!(!links.is_up(&cfg, s(2, 2), d));
            assert!(!links.is_up(&cfg, neighbor(&cfg, s(2, 2), d), d.opposite()));
        }
        assert!(links.is_up(&cfg, s(3, 3), East));
    }

    #[test]
    fn clean_route_matches_tags() {
        let cfg = ConstellationConfig::small(8, 12);
        let tags = vec![PathTag::new(East, 2), PathTag::new(Retrograde, 3)];
        let h = header(tags.clone(), 0);
        let tr = route_packet(&cfg, s(7, 1), &h, &LinkStateMap::new(), 20.0).unwrap();
        let expected = crate::codec::expand_tags(&cfg, &tags, s(7, 1));
        assert!(tr.delivered());
        assert_eq!(tr.satellites(), expected.satellites());
        assert_eq!(tr.reroute_count, 0);
        let snap = Snapshot::at(&cfg, 20.0);
        assert!((tr.total_delay_s - expected.delay(&snap)).abs() < 1e-15);
    }

    #[test]
    fn two_reroutes_then_drop() {
        // E4 then P3; the east link fails at three consecutive satellites.
        let cfg = ConstellationConfig::small(8, 12);
        let o = s(0, 0);
        let h = header(vec![PathTag::new(East, 4), PathTag::new(Prograde, 3)], 0);
        let mut links = LinkStateMap::new();
        for sat in [s(0, 0), s(0, 1), s(0, 2)] {
            links.fail_link(LinkId::from_step(&cfg, sat, East));
        }
        let tr = route_packet(&cfg, o, &h, &links, 0.0).unwrap();
        assert_eq!(
            tr.outcome,
            Outcome::Dropped { reason: DropReason::LoopFlagExhausted, at: s(0, 2) }
        );
        assert_eq!(tr.reroute_count, 2);
        assert_eq!(tr.hop_count(), 2);
    }
}
