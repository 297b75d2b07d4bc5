//! Topology toolkit for payment-channel networks.
//!
//! The crate is organised as a pipeline:
//!
//! - [`gossip`] parses BOLT#7 gossip (binary or a tab-separated line format)
//!   into typed, ordered records.
//! - [`snapshot`] replays a record stream and reconstructs the channel graph
//!   at chosen timestamps.
//! - [`graph`] turns a snapshot into an immutable undirected simple graph and
//!   provides traversal, components, degree distributions and ForestFire
//!   sampling.
//! - [`metrics`] evaluates the network-science metric catalog on a graph.
//! - [`stability`] compares consecutive snapshots (intersection rates, KS,
//!   Wasserstein-1).
//! - [`routing`] simulates payments with Dijkstra under client cost models and
//!   measures hop concentration.
//!
//! Heavy loops run on rayon when the `parallel` feature is enabled (default).
//! All parallel reductions combine partial results in a fixed order, so output
//! does not depend on the number of worker threads.

pub mod gossip;
pub mod graph;
pub mod metrics;
pub mod par;
pub mod routing;
pub mod snapshot;
pub mod stability;

pub use gossip::{GossipRecord, NodeId, ShortChannelId};
pub use graph::TopologyGraph;
pub use snapshot::Snapshot;
