//! Exact analysis of vital edges in integer-capacity flow networks.
//!
//! An edge is *vital* when deleting it strictly lowers the maximum
//! (s,t)-flow value; its *vitality* is the size of that drop. This crate
//! computes vitality exactly for every edge, classifies the work between a
//! cheap forest-based pass and a per-edge forced-cut pass, and builds the
//! compact structures that answer cut and sensitivity queries afterwards:
//! covers of the vital edges by few mincuts, capacity-change and
//! edge-insertion oracles, mincut-family DAGs, hierarchies over terminal
//! sets, and per-vertex labels small enough to ship.
//!
//! Everything is integral: capacities are `u64` values with an explicit
//! infinity, so saturation tests are exact and results are reproducible
//! byte for byte.

pub mod error;
pub mod gen;
pub mod graph;
pub mod maxflow;
pub mod oracle;
pub mod pqdag;
pub mod vital;
pub mod cover;
pub mod labels;
pub mod steiner;
pub mod dvit;
pub mod cli;

pub use error::{Error, Result};
pub use graph::{CapacityValue, Edge, FlowNetwork, STCut};
pub use maxflow::FlowAssignment;
