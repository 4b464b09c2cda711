//! Multicommodity maximum flow by colored path selection.
//!
//! Each commodity is first solved as an ordinary single-commodity max-flow
//! problem ([`maxflow`]). The resulting flows are decomposed into paths, every
//! path gets its own color, and the colors are recorded on the edges they
//! use ([`tableaux`]). The greedy algorithm in [`heuristic`] then ships paths
//! in order of how many distinct colors they touch, discarding paths whose
//! edges run out of capacity. [`oracle`] computes the exact integral optimum
//! for small instances so the greedy result can be measured against it.

pub mod cli;
pub mod heuristic;
pub mod maxflow;
pub mod netmodel;
pub mod oracle;
pub mod tableaux;

pub use heuristic::{greedy_solve, Assignment};
pub use maxflow::{max_flow, Cut, FlowState};
pub use netmodel::{parse_network, EdgeId, Network, NodeId};
pub use tableaux::{initialize, TableauxBundle};
