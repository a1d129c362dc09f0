//! Run-length path tags and the packet header wire format.
//!
//! Header layout, most significant bit first:
//!
//! ```text
//! src_gs:32 | dst_gs:32 | loop_flag:2 | curr_index:4 | tag_count:4 | tag_count x (dir:2 | steps:7) | zero padding
//! ```
//!
//! Direction codes: `00` East, `01` West, `10` Prograde, `11` Retrograde.

use serde::{Deserialize, Serialize};

use crate::constellation::{neighbor, ConstellationConfig, Direction, SatelliteId};
use crate::error::{Error, Result};
use crate::path::Path;

pub const MAX_TAGS: usize = 15;
pub const MAX_STEPS: u8 = 127;
pub const MAX_LOOP_FLAG: u8 = 2;
pub const TAG_BITS: usize = 9;
pub const FIXED_BITS: usize = 32 + 32 + 2 + 4 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathTag {
    pub direction: Direction,
    pub steps: u8,
}

impl PathTag {
    pub const fn new(direction: Direction, steps: u8) -> Self {
        Self { direction, steps }
    }
}

impl std::fmt::Display for PathTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.direction.letter(), self.steps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PacketHeader {
    pub src_gs: u32,
    pub dst_gs: u32,
    pub loop_flag: u8,
    pub curr_index: u8,
    /// All tags, consumed ones included.
    pub tags: Vec<PathTag>,
}

impl PacketHeader {
    pub fn new(src_gs: u32, dst_gs: u32, tags: Vec<PathTag>) -> Result<Self> {
        if tags.len() > MAX_TAGS {
            return Err(Error::TooManyTags(tags.len()));
        }
        let h = Self {
            src_gs,
            dst_gs,
            loop_flag: 0,
            curr_index: 0,
            tags,
        };
        h.check()?;
        Ok(h)
    }

    pub fn tag_count(&self) -> usize {
        self.tags.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.tags.len() > MAX_TAGS {
            return Err(Error::TooManyTags(self.tags.len()));
        }
        if self.loop_flag > MAX_LOOP_FLAG {
            return Err(Error::MalformedHeader("loop flag above 2"));
        }
        if self.curr_index as usize > self.tags.len() {
            return Err(Error::MalformedHeader("current index past tag count"));
        }
        if self.tags.iter().any(|t| t.steps > MAX_STEPS) {
            return Err(Error::MalformedHeader("tag steps above 127"));
        }
        if self.tags[..self.curr_index as usize].iter().any(|t| t.steps != 0) {
            return Err(Error::MalformedHeader("unconsumed tag before current index"));
        }
        Ok(())
    }

    pub fn remaining(&self) -> &[PathTag] {
        &self.tags[self.curr_index as usize..]
    }

    pub fn wire_len(&self) -> usize {
        wire_len(self.tags.len())
    }
}

pub fn tag_payload_bits(tag_count: usize) -> usize {
    tag_count * TAG_BITS
}

pub fn wire_len(tag_count: usize) -> usize {
    (FIXED_BITS + tag_payload_bits(tag_count)).div_ceil(8)
}

/// Maximal same-direction runs in traversal order, split at 127 steps.
pub fn encode_path(cfg: &ConstellationConfig, path: &Path) -> Vec<PathTag> {
    let mut tags: Vec<PathTag> = Vec::new();
    for dir in path.directions(cfg) {
        match tags.last_mut() {
            Some(t) if t.direction == dir && t.steps < MAX_STEPS => t.steps += 1,
            _ => tags.push(PathTag::new(dir, 1)),
        }
    }
    tags
}

pub fn expand_tags(cfg: &ConstellationConfig, tags: &[PathTag], origin: SatelliteId) -> Path {
    let mut sats = vec![origin];
    let mut cur = origin;
    for tag in tags {
        for _ in 0..tag.steps {
            cur = neighbor(cfg, cur, tag.direction);
            sats.push(cur);
        }
    }
    Path::from_vec_unchecked(sats)
}

/// Satellite reached from `origin` after all steps of `tags`.
pub fn terminal(cfg: &ConstellationConfig, tags: &[PathTag], origin: SatelliteId) -> SatelliteId {
    let (mut dp, mut di) = (0i64, 0i64);
    for tag in tags {
        let (a, b) = tag.direction.delta();
        dp += a * tag.steps as i64;
        di += b * tag.steps as i64;
    }
    cfg.sat(origin.plane as i64 + dp, origin.index as i64 + di)
}

fn dir_code(d: Direction) -> u64 {
    match d {
        Direction::East => 0b00,
        Direction::West => 0b01,
        Direction::Prograde => 0b10,
        Direction::Retrograde => 0b11,
    }
}

fn code_dir(c: u64) -> Direction {
    match c & 0b11 {
        0b00 => Direction::East,
        0b01 => Direction::West,
        0b10 => Direction::Prograde,
        _ => Direction::Retrograde,
    }
}

struct BitWriter {
    bytes: Vec<u8>,
    bits: usize,
}

impl BitWriter {
    fn with_capacity(bytes: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bytes),
            bits: 0,
        }
    }

    fn put(&mut self, value: u64, width: usize) {
        for shift in (0..width).rev() {
            if self.bits % 8 == 0 {
                self.bytes.push(0);
            }
            let bit = ((value >> shift) & 1) as u8;
            let last = self.bytes.last_mut().expect("byte pushed above");
            *last |= bit << (7 - self.bits % 8);
            self.bits += 1;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn take(&mut self, width: usize) -> Result<u64> {
        if self.pos + width > self.bytes.len() * 8 {
            return Err(Error::MalformedHeader("truncated"));
        }
        let mut v = 0u64;
        for _ in 0..width {
            let byte = self.bytes[self.pos / 8];
            v = (v << 1) | ((byte >> (7 - self.pos % 8)) & 1) as u64;
            self.pos += 1;
        }
        Ok(v)
    }
}

pub fn pack_header(h: &PacketHeader) -> Result<Vec<u8>> {
    h.check()?;
    let mut w = BitWriter::with_capacity(h.wire_len());
    w.put(h.src_gs as u64, 32);
    w.put(h.dst_gs as u64, 32);
    w.put(h.loop_flag as u64, 2);
    w.put(h.curr_index as u64, 4);
    w.put(h.tags.len() as u64, 4);
    for t in &h.tags {
        w.put(dir_code(t.direction), 2);
        w.put(t.steps as u64, 7);
    }
    Ok(w.bytes)
}

pub fn unpack_header(bytes: &[u8]) -> Result<PacketHeader> {
    let mut r = BitReader { bytes, pos: 0 };
    let src_gs = r.take(32)? as u32;
    let dst_gs = r.take(32)? as u32;
    let loop_flag = r.take(2)? as u8;
    let curr_index = r.take(4)? as u8;
    let tag_count = r.take(4)? as usize;
    if tag_count > MAX_TAGS {
        return Err(Error::MalformedHeader("tag count above 15"));
    }
    if bytes.len() != wire_len(tag_count) {
        return Err(Error::MalformedHeader("length does not match tag count"));
    }
    let mut tags = Vec::with_capacity(tag_count);
    for _ in 0..tag_count {
        let direction = code_dir(r.take(2)?);
        let steps = r.take(7)? as u8;
        tags.push(PathTag { direction, steps });
    }
    let pad = bytes.len() * 8 - r.pos;
    if r.take(pad)? != 0 {
        return Err(Error::MalformedHeader("nonzero padding"));
    }
    let h = PacketHeader {
        src_gs,
        dst_gs,
        loop_flag,
        curr_index,
        tags,
    };
    h.check()?;
    Ok(h)
}
