use gridroute::codec::{
    encode_path, expand_tags, pack_header, terminal, unpack_header, wire_len, PacketHeader, PathTag, MAX_LOOP_FLAG,
    MAX_STEPS, MAX_TAGS,
};
use gridroute::constellation::neighbor;
use gridroute::{ConstellationConfig, Direction, Path, SatelliteId};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

fn header() -> impl Strategy<Value = PacketHeader> {
    (
        any::<u32>(),
        any::<u32>(),
        0..=MAX_LOOP_FLAG,
        prop::collection::vec((direction(), 1..=MAX_STEPS), 0..=MAX_TAGS),
    )
        .prop_flat_map(|(src, dst, lf, raw)| {
            let n = raw.len();
            (Just((src, dst, lf, raw)), 0..=n)
        })
        .prop_map(|((src_gs, dst_gs, loop_flag, raw), curr)| {
            let tags = raw
                .into_iter()
                .enumerate()
                .map(|(i, (d, s))| PathTag::new(d, if i < curr { 0 } else { s }))
                .collect();
            PacketHeader {
                src_gs,
                dst_gs,
                loop_flag,
                curr_index: curr as u8,
                tags,
            }
        })
}

/// A walk from `start` that never immediately reverses.
fn walk(cfg: &ConstellationConfig, start: SatelliteId, dirs: &[Direction]) -> Vec<SatelliteId> {
    let mut sats = vec![start];
    let mut last: Option<Direction> = None;
    for &d in dirs {
        if last == Some(d.opposite()) {
            continue;
        }
        sats.push(neighbor(cfg, *sats.last().unwrap(), d));
        last = Some(d);
    }
    sats
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn pack_unpack_is_byte_exact(h in header()) {
        let bytes = pack_header(&h).unwrap();
        prop_assert_eq!(bytes.len(), wire_len(h.tags.len()));
        prop_assert_eq!(bytes.len(), (74 + 9 * h.tags.len()).div_ceil(8));
        let back = unpack_header(&bytes).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(pack_header(&back).unwrap(), bytes);
    }

    #[test]
    fn nonzero_padding_is_rejected(h in header(), bit in 0usize..8) {
        let mut bytes = pack_header(&h).unwrap();
        let pad = bytes.len() * 8 - (74 + 9 * h.tags.len());
        prop_assume!(pad > 0);
        let b = bit % pad;
        *bytes.last_mut().unwrap() |= 1 << b;
        prop_assert!(unpack_header(&bytes).is_err());
    }

    #[test]
    fn truncated_or_extended_bytes_are_rejected(h in header()) {
        let bytes = pack_header(&h).unwrap();
        prop_assert!(unpack_header(&bytes[..bytes.len() - 1]).is_err());
        let mut long = bytes.clone();
        long.push(0);
        prop_assert!(unpack_header(&long).is_err());
    }

    #[test]
    fn expand_inverts_encode(
        plane in 0u32..24,
        index in 0u32..66,
        dirs in prop::collection::vec(direction(), 0..200),
    ) {
        let cfg = ConstellationConfig::default();
        let start = SatelliteId::new(plane, index);
        let sats = walk(&cfg, start, &dirs);
        let path = Path::walk(&cfg, sats.clone()).unwrap();
        let tags = encode_path(&cfg, &path);
        prop_assert!(tags.iter().all(|t| t.steps >= 1 && t.steps <= MAX_STEPS));
        prop_assert!(tags.windows(2).all(|w| w[0].direction != w[1].direction || w[0].steps == MAX_STEPS));
        let expanded = expand_tags(&cfg, &tags, start);
        prop_assert_eq!(expanded.satellites(), &sats[..]);
        prop_assert_eq!(terminal(&cfg, &tags, start), *sats.last().unwrap());
    }

    #[test]
    fn encode_inverts_expand(
        plane in 0u32..24,
        index in 0u32..66,
        raw in prop::collection::vec((direction(), 1..=MAX_STEPS), 0..8),
    ) {
        let cfg = ConstellationConfig::default();
        // Canonical tag lists: adjacent tags differ in direction and never reverse.
        let mut tags: Vec<PathTag> = Vec::new();
        for (d, s) in raw {
            if tags.last().map_or(true, |t| t.direction != d && t.direction != d.opposite()) {
                tags.push(PathTag::new(d, s));
            }
        }
        let start = SatelliteId::new(plane, index);
        let path = expand_tags(&cfg, &tags, start);
        prop_assert_eq!(encode_path(&cfg, &path), tags);
    }

    #[test]
    fn neighbor_steps_invert(plane in 0u32..24, index in 0u32..66, d in direction()) {
        let cfg = ConstellationConfig::default();
        let s = SatelliteId::new(plane, index);
        prop_assert_eq!(neighbor(&cfg, neighbor(&cfg, s, d), d.opposite()), s);
    }
}
