//! Snapshot Dijkstra and the comparison schemes: loop-free alternates, MPLS
//! link-protection bypasses, and delay-threshold path validation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::codec::{expand_tags, terminal, PathTag};
use crate::constellation::{neighbor, ConstellationConfig, Direction, LinkId, SatelliteId, Snapshot};
use crate::forwarding::LinkStateMap;
use crate::path::Path;

/// Link delays at one instant with failed elements removed.
#[derive(Debug, Clone, Copy)]
pub struct WeightedSnapshot<'a> {
    pub snap: &'a Snapshot,
    pub failures: &'a LinkStateMap,
}

impl<'a> WeightedSnapshot<'a> {
    pub fn new(snap: &'a Snapshot, failures: &'a LinkStateMap) -> Self {
        Self { snap, failures }
    }

    pub fn config(&self) -> &'a ConstellationConfig {
        self.snap.config()
    }

    pub fn weight(&self, from: SatelliteId, dir: Direction) -> Option<(SatelliteId, f64)> {
        let cfg = self.snap.config();
        if !self.failures.is_up(cfg, from, dir) {
            return None;
        }
        let to = neighbor(cfg, from, dir);
        Some((to, self.snap.hop_delay_s(from, to)))
    }
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

/// Single-source shortest paths. Ties on delay go to fewer hops, then to the
/// lower predecessor index.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    root: SatelliteId,
    cfg: ConstellationConfig,
    delay: Vec<f64>,
    hops: Vec<u32>,
    prev: Vec<usize>,
}

impl ShortestPathTree {
    pub fn build(net: &WeightedSnapshot<'_>, root: SatelliteId) -> Self {
        Self::build_until(net, root, None)
    }

    fn build_until(net: &WeightedSnapshot<'_>, root: SatelliteId, stop: Option<usize>) -> Self {
        let cfg = *net.config();
        let n = cfg.sat_count();
        let mut delay = vec![f64::INFINITY; n];
        let mut hops = vec![u32::MAX; n];
        let mut prev = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let start = cfg.sat_index(root);
        let mut heap = BinaryHeap::new();
        if !net.failures.is_sat_failed(root) {
            delay[start] = 0.0;
            hops[start] = 0;
            heap.push(Entry { delay: 0.0, hops: 0, node: start });
        }
        while let Some(Entry { delay: d, hops: h, node }) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            if Some(node) == stop {
                break;
            }
            let sat = cfg.sat_at(node);
            for dir in Direction::ALL {
                let Some((next, w)) = net.weight(sat, dir) else { continue };
                let j = cfg.sat_index(next);
                if done[j] {
                    continue;
                }
                let cand = (d + w, h + 1, node);
                if cand.0 < delay[j]
                    || (cand.0 == delay[j] && (cand.1, cand.2) < (hops[j], prev[j]))
                {
                    delay[j] = cand.0;
                    hops[j] = cand.1;
                    prev[j] = node;
                    heap.push(Entry { delay: cand.0, hops: cand.1, node: j });
                }
            }
        }
        Self { root, cfg, delay, hops, prev }
    }

    pub fn root(&self) -> SatelliteId {
        self.root
    }

    pub fn delay_to(&self, sat: SatelliteId) -> f64 {
        self.delay[self.cfg.sat_index(sat)]
    }

    pub fn hops_to(&self, sat: SatelliteId) -> Option<u32> {
        let h = self.hops[self.cfg.sat_index(sat)];
        (h != u32::MAX).then_some(h)
    }

    pub fn reaches(&self, sat: SatelliteId) -> bool {
        self.delay_to(sat).is_finite()
    }

    /// Path from the root to `sat`.
    pub fn path_to(&self, sat: SatelliteId) -> Option<Path> {
        if !self.reaches(sat) {
            return None;
        }
        let mut sats = vec![sat];
        let mut cur = self.cfg.sat_index(sat);
        while self.prev[cur] != usize::MAX {
            cur = self.prev[cur];
            sats.push(self.cfg.sat_at(cur));
        }
        sats.reverse();
        Some(Path::from_vec_unchecked(sats))
    }

    /// Next hop from `sat` toward the root, for a tree built at the destination.
    pub fn next_hop_toward_root(&self, sat: SatelliteId) -> Option<SatelliteId> {
        let p = self.prev[self.cfg.sat_index(sat)];
        (p != usize::MAX).then(|| self.cfg.sat_at(p))
    }
}

/// Minimum-delay path, or `None` when `d` is unreachable. `s == d` yields the
/// one-satellite path.
pub fn dijkstra(net: &WeightedSnapshot<'_>, s: SatelliteId, d: SatelliteId) -> Option<Path> {
    let stop = net.config().sat_index(d);
    ShortestPathTree::build_until(net, s, Some(stop)).path_to(d)
}

pub fn dijkstra_delay(net: &WeightedSnapshot<'_>, s: SatelliteId, d: SatelliteId) -> f64 {
    let stop = net.config().sat_index(d);
    ShortestPathTree::build_until(net, s, Some(stop)).delay_to(d)
}

/// Loop-free alternate for `u` when its link to `v` fails. Distances come from
/// `net`, the topology the backup was computed on. Picks the neighbour
/// minimising `dist(u, n) + dist(n, d)` among those with
/// `dist(n, d) < dist(n, u) + dist(u, d)`.
pub fn lfa_backup(
    net: &WeightedSnapshot<'_>,
    u: SatelliteId,
    v: SatelliteId,
    to_dest: &ShortestPathTree,
) -> Option<SatelliteId> {
    let from_u = ShortestPathTree::build(net, u);
    lfa_backup_with(net, u, v, to_dest, &from_u)
}

pub fn lfa_backup_with(
    net: &WeightedSnapshot<'_>,
    u: SatelliteId,
    v: SatelliteId,
    to_dest: &ShortestPathTree,
    from_u: &ShortestPathTree,
) -> Option<SatelliteId> {
    let du_d = to_dest.delay_to(u);
    let mut best: Option<(f64, SatelliteId)> = None;
    for dir in Direction::ALL {
        let Some((n, w)) = net.weight(u, dir) else { continue };
        if n == v {
            continue;
        }
        let dn_d = to_dest.delay_to(n);
        if !(dn_d < from_u.delay_to(n) + du_d) {
            continue;
        }
        let cost = w + dn_d;
        if best.map_or(true, |(c, b)| cost < c || (cost == c && n < b)) {
            best = Some((cost, n));
        }
    }
    best.map(|(_, n)| n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemeOutcome {
    Delivered(Path),
    /// Packet lost at the given satellite.
    Dropped(SatelliteId),
}

impl SchemeOutcome {
    pub fn delivered(&self) -> Option<&Path> {
        match self {
            SchemeOutcome::Delivered(p) => Some(p),
            SchemeOutcome::Dropped(_) => None,
        }
    }
}

/// Hop-by-hop destination routing with per-link LFA protection. Routing state
/// (`pre`) predates the failures in `actual`; a revisited satellite counts as
/// a loop and drops the packet.
pub fn lfa_route(pre: &WeightedSnapshot<'_>, actual: &LinkStateMap, s: SatelliteId, d: SatelliteId) -> SchemeOutcome {
    let cfg = pre.config();
    let to_dest = ShortestPathTree::build(pre, d);
    let mut sats = vec![s];
    let mut visited = std::collections::HashSet::from([s]);
    let mut cur = s;
    while cur != d {
        let Some(primary) = to_dest.next_hop_toward_root(cur) else {
            return SchemeOutcome::Dropped(cur);
        };
        let link = LinkId::between(cfg, cur, primary).expect("tree edges are links");
        let next = if actual.is_link_up(link) {
            primary
        } else {
            match lfa_backup(pre, cur, primary, &to_dest) {
                Some(n) if actual.is_link_up(LinkId::between(cfg, cur, n).expect("neighbour")) => n,
                _ => return SchemeOutcome::Dropped(cur),
            }
        };
        if !visited.insert(next) {
            return SchemeOutcome::Dropped(next);
        }
        sats.push(next);
        cur = next;
    }
    SchemeOutcome::Delivered(Path::from_vec_unchecked(sats))
}

/// Bypass from `u` to `v` avoiding the link between them, spliced into
/// `primary` with any resulting cycles cut out.
pub fn mpls_frr_backup(net: &WeightedSnapshot<'_>, primary: &Path, u: SatelliteId, v: SatelliteId) -> Option<Path> {
    let cfg = net.config();
    let link = LinkId::between(cfg, u, v)?;
    let pos = primary.satellites().iter().position(|&x| x == u)?;
    if primary.satellites().get(pos + 1) != Some(&v) {
        return None;
    }
    let mut avoid = net.failures.clone();
    avoid.fail_link(link);
    let bypass = dijkstra(&WeightedSnapshot::new(net.snap, &avoid), u, v)?;
    let mut sats: Vec<SatelliteId> = primary.satellites()[..pos].to_vec();
    sats.extend_from_slice(bypass.satellites());
    sats.extend_from_slice(&primary.satellites()[pos + 2..]);
    Some(Path::from_vec_unchecked(remove_loops(sats)))
}

/// Drops every cycle: when a satellite reappears, the walk since its first
/// visit is discarded.
pub fn remove_loops(sats: Vec<SatelliteId>) -> Vec<SatelliteId> {
    let mut out: Vec<SatelliteId> = Vec::with_capacity(sats.len());
    for s in sats {
        if let Some(i) = out.iter().position(|&x| x == s) {
            out.truncate(i + 1);
        } else {
            out.push(s);
        }
    }
    out
}

/// Walks `primary`; at a failed primary link, switches to the bypass
/// computed on `pre`. Bypass links are unprotected: a failure there drops.
pub fn mpls_frr_route(pre: &WeightedSnapshot<'_>, actual: &LinkStateMap, primary: &Path) -> SchemeOutcome {
    let cfg = pre.config();
    let protected: Vec<LinkId> = primary.links(cfg).collect();
    let mut route: Vec<SatelliteId> = primary.satellites().to_vec();
    let mut i = 0;
    while i + 1 < route.len() {
        let (u, v) = (route[i], route[i + 1]);
        let link = LinkId::between(cfg, u, v).expect("route is a walk");
        if actual.is_link_up(link) {
            i += 1;
            continue;
        }
        if !protected.contains(&link) {
            return SchemeOutcome::Dropped(u);
        }
        let mut avoid = pre.failures.clone();
        avoid.fail_link(link);
        let Some(bypass) = dijkstra(&WeightedSnapshot::new(pre.snap, &avoid), u, v) else {
            return SchemeOutcome::Dropped(u);
        };
        let mut rest = bypass.into_satellites();
        rest.extend_from_slice(&route[i + 2..]);
        route.truncate(i);
        route.extend(remove_loops(rest));
    }
    SchemeOutcome::Delivered(Path::from_vec_unchecked(route))
}

/// Passes when the expanded path is at most `stretch_pct` percent slower than
/// the snapshot optimum between its endpoints. Inclusive at the boundary.
pub fn delay_threshold_validate(
    net: &WeightedSnapshot<'_>,
    tags: &[PathTag],
    ingress: SatelliteId,
    stretch_pct: f64,
) -> bool {
    let cfg = net.config();
    let path = expand_tags(cfg, tags, ingress);
    let end = terminal(cfg, tags, ingress);
    let best = dijkstra_delay(net, ingress, end);
    if !best.is_finite() {
        return false;
    }
    let limit = (1.0 + stretch_pct / 100.0) * best;
    path.delay(net.snap) <= limit * (1.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: u32, i: u32) -> SatelliteId {
        SatelliteId::new(p, i)
    }

    #[test]
    fn trivial_paths() {
        let cfg = ConstellationConfig::small(8, 12);
        let snap = Snapshot::at(&cfg, 50.0);
        let none = LinkStateMap::default();
        let net = WeightedSnapshot::new(&snap, &none);
        assert_eq!(dijkstra(&net, s(1, 1), s(1, 1)).unwrap().satellites(), &[s(1, 1)]);
        assert_eq!(dijkstra(&net, s(1, 1), s(2, 1)).unwrap().satellites(), &[s(1, 1), s(2, 1)]);
    }

    #[test]
    fn unreachable_is_none() {
        let cfg = ConstellationConfig::small(4, 6);
        let snap = Snapshot::at(&cfg, 0.0);
        let mut f = LinkStateMap::default();
        for dir in Direction::ALL {
            f.fail_link(LinkId::from_step(&cfg, s(2, 2), dir));
        }
        let net = WeightedSnapshot::new(&snap, &f);
        assert!(dijkstra(&net, s(0, 0), s(2, 2)).is_none());
        assert!(dijkstra_delay(&net, s(0, 0), s(2, 2)).is_infinite());
    }

    #[test]
    fn loop_removal() {
        let v = vec![s(0, 0), s(1, 0), s(1, 1), s(0, 1), s(0, 0), s(0, 11)];
        assert_eq!(remove_loops(v), vec![s(0, 0), s(0, 11)]);
    }

    #[test]
    fn bypass_goes_around_the_square() {
        let cfg = ConstellationConfig::small(8, 12);
        let snap = Snapshot::at(&cfg, 300.0);
        let none = LinkStateMap::default();
        let net = WeightedSnapshot::new(&snap, &none);
        let primary = Path::new(&cfg, vec![s(0, 0), s(1, 0), s(2, 0)]).unwrap();
        let spliced = mpls_frr_backup(&net, &primary, s(0, 0), s(1, 0)).unwrap();
        assert_eq!(spliced.hops(), 4);
        assert!(spliced.is_simple());
        assert!(!spliced.uses_link(&cfg, LinkId::between(&cfg, s(0, 0), s(1, 0)).unwrap()));
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        let cfg = ConstellationConfig::small(8, 12);
        let snap = Snapshot::at(&cfg, 0.0);
        let none = LinkStateMap::default();
        let net = WeightedSnapshot::new(&snap, &none);
        let sp = dijkstra(&net, s(0, 0), s(2, 3)).unwrap();
        let tags = crate::codec::encode_path(&cfg, &sp);
        assert!(delay_threshold_validate(&net, &tags, s(0, 0), 0.0));
    }
}
