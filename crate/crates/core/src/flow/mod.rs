//! Bipartite flow networks (source → items → users → sink) and a FIFO
//! push-relabel maximum-flow solver whose final labels mark the items that
//! had to return flow to the source.

mod network;
mod solver;

pub use network::{BatchNodes, Edge, FlowNetwork, NodeId, NodeKind};
pub use solver::{low_capacity_left_nodes, max_flow, MaxFlow, SolverState};
