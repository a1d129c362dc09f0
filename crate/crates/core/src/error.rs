use std::io;

use thiserror::Error;

use crate::constellation::SatelliteId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid constellation config: {0}")]
    InvalidConfig(String),

    #[error("source and destination are the same satellite {0}")]
    SameEndpoints(SatelliteId),

    #[error("satellites {from} and {to} are not adjacent")]
    NotAdjacent { from: SatelliteId, to: SatelliteId },

    #[error("path visits satellite {0} twice")]
    RepeatedSatellite(SatelliteId),

    #[error("path needs {0} tags, at most {max} fit in a header", max = crate::codec::MAX_TAGS)]
    TooManyTags(usize),

    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),

    #[error("no path from {from} to {to}")]
    NoPath { from: SatelliteId, to: SatelliteId },

    #[error("ground station {0} has no visible satellite")]
    NoVisibleSatellite(u32),

    #[error("unknown ground station {0}")]
    UnknownGroundStation(u32),

    #[error("attack target lies on the shortest path")]
    TargetOnPath,

    #[error("invalid ground station: {0}")]
    InvalidGroundStation(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
