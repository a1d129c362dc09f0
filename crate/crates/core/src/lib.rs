//! Routing on +Grid LEO constellations: closed-form shortest paths over
//! source/destination grids, run-length tag headers, local fast reroute, and
//! stateless validation of source-routed packets at the ingress satellite.

pub mod baselines;
pub mod codec;
pub mod constellation;
pub mod error;
pub mod forwarding;
pub mod grid;
pub mod ground;
pub mod path;
pub mod validator;

pub use constellation::{ConstellationConfig, Direction, LinkId, LinkKind, SatelliteId, Snapshot};
pub use error::{Error, Result};
pub use path::Path;
