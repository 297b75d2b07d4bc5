//! Payment routing simulation under approximated client cost models.
//!
//! A [`RoutingGraph`] turns a snapshot into a directed graph whose arc
//! weights are the cost of forwarding a fixed amount through each usable
//! channel direction. [`simulate`] routes uniformly drawn payments with
//! Dijkstra and tallies how often each node forwards.

mod cost;
mod dijkstra;
mod tally;

use thiserror::Error;

use crate::gossip::NodeId;

pub use cost::{edge_cost, CostModel, ModelKind};
pub use dijkstra::{find_route, PaymentRequest, RouteResult, RouteStatus, RoutingGraph};
pub use tally::{hop_statistics, payment_pairs, simulate, simulate_on, HopStatistics, HopTally, SimulationConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("policy unusable: {0}")]
    PolicyUnusable(String),
    #[error("node {0} not in snapshot")]
    NodeNotFound(NodeId),
    #[error("node index {0} out of range")]
    IndexNotFound(u32),
    #[error("snapshot has {0} nodes, need at least 2")]
    GraphTooSmall(usize),
    #[error("hop tally is empty")]
    EmptyTally,
}
