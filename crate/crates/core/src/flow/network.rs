use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::RankedBatch;
use crate::scalar::{Capacity, Real};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Source,
    Item(usize),
    User(usize),
    Sink,
}

#[derive(Debug, Clone)]
pub(crate) struct Arc<C> {
    pub(crate) to: NodeId,
    pub(crate) residual: C,
}

/// One forward edge with its current flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge<C> {
    pub from: NodeId,
    pub to: NodeId,
    pub capacity: C,
    pub flow: C,
}

/// Flow network with node layout `[source, items.., users.., sink]`.
///
/// Arcs are stored in pairs: arc `2e` is forward edge `e`, arc `2e + 1` its
/// reverse. The forward arc holds the residual capacity `w - f`, the reverse
/// arc holds `f`.
#[derive(Debug, Clone)]
pub struct FlowNetwork<C> {
    num_items: usize,
    num_users: usize,
    pub(crate) arcs: Vec<Arc<C>>,
    capacities: Vec<C>,
    from: Vec<NodeId>,
    pub(crate) adjacency: Vec<Vec<usize>>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(num_items: usize, num_users: usize) -> Self {
        Self {
            num_items,
            num_users,
            arcs: Vec::new(),
            capacities: Vec::new(),
            from: Vec::new(),
            adjacency: vec![Vec::new(); num_items + num_users + 2],
        }
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_nodes(&self) -> usize {
        self.num_items + self.num_users + 2
    }

    pub fn num_edges(&self) -> usize {
        self.capacities.len()
    }

    pub fn source(&self) -> NodeId {
        0
    }

    pub fn sink(&self) -> NodeId {
        self.num_items + self.num_users + 1
    }

    pub fn item_node(&self, item: usize) -> NodeId {
        debug_assert!(item < self.num_items);
        1 + item
    }

    pub fn user_node(&self, user: usize) -> NodeId {
        debug_assert!(user < self.num_users);
        1 + self.num_items + user
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        if node == 0 {
            NodeKind::Source
        } else if node <= self.num_items {
            NodeKind::Item(node - 1)
        } else if node <= self.num_items + self.num_users {
            NodeKind::User(node - 1 - self.num_items)
        } else {
            NodeKind::Sink
        }
    }

    fn add_arc_pair(&mut self, from: NodeId, to: NodeId, capacity: C) -> usize {
        assert!(capacity >= C::zero(), "capacities are non-negative");
        let id = self.capacities.len();
        self.adjacency[from].push(self.arcs.len());
        self.arcs.push(Arc { to, residual: capacity });
        self.adjacency[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, residual: C::zero() });
        self.capacities.push(capacity);
        self.from.push(from);
        id
    }

    pub fn add_source_edge(&mut self, item: usize, capacity: C) -> usize {
        let to = self.item_node(item);
        self.add_arc_pair(self.source(), to, capacity)
    }

    pub fn add_edge(&mut self, item: usize, user: usize, capacity: C) -> usize {
        let (from, to) = (self.item_node(item), self.user_node(user));
        self.add_arc_pair(from, to, capacity)
    }

    pub fn add_sink_edge(&mut self, user: usize, capacity: C) -> usize {
        let from = self.user_node(user);
        self.add_arc_pair(from, self.sink(), capacity)
    }

    pub fn edge(&self, id: usize) -> Edge<C> {
        let capacity = self.capacities[id];
        Edge {
            from: self.from[id],
            to: self.arcs[2 * id].to,
            capacity,
            flow: capacity - self.arcs[2 * id].residual,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge<C>> + '_ {
        (0..self.num_edges()).map(|id| self.edge(id))
    }

    /// Residual capacity of the arc from `from` to `to`, if such an arc exists.
    pub fn residual(&self, from: NodeId, to: NodeId) -> Option<C> {
        self.arc_between(from, to).map(|a| self.arcs[a].residual)
    }

    pub(crate) fn arc_between(&self, from: NodeId, to: NodeId) -> Option<usize> {
        let mut best: Option<usize> = None;
        for &a in &self.adjacency[from] {
            if self.arcs[a].to == to {
                match best {
                    Some(b) if self.arcs[b].residual >= self.arcs[a].residual => {}
                    _ => best = Some(a),
                }
            }
        }
        best
    }

    pub(crate) fn apply(&mut self, arc: usize, amount: C) {
        self.arcs[arc].residual = self.arcs[arc].residual - amount;
        self.arcs[arc ^ 1].residual = self.arcs[arc ^ 1].residual + amount;
    }

    /// Zeroes every flow.
    pub fn reset(&mut self) {
        for (id, &cap) in self.capacities.iter().enumerate() {
            self.arcs[2 * id].residual = cap;
            self.arcs[2 * id + 1].residual = C::zero();
        }
    }

    /// Net inflow of a node computed from edge flows.
    pub fn balance(&self, node: NodeId) -> C {
        self.edges().fold(C::zero(), |acc, e| {
            let mut acc = acc;
            if e.to == node {
                acc = acc + e.flow;
            }
            if e.from == node {
                acc = acc - e.flow;
            }
            acc
        })
    }

    /// Checks `0 <= f <= w` on every edge and that paired arcs sum to `w`.
    pub fn check_capacities(&self) -> Result<()> {
        for (id, &cap) in self.capacities.iter().enumerate() {
            let (fwd, bwd) = (self.arcs[2 * id].residual, self.arcs[2 * id + 1].residual);
            if fwd < C::zero() || bwd < C::zero() || fwd + bwd != cap {
                return Err(Error::InternalLogic(format!(
                    "edge {id}: residual {fwd} and reverse {bwd} do not split capacity {cap}"
                )));
            }
        }
        Ok(())
    }

    pub fn node_name(&self, node: NodeId) -> String {
        match self.kind(node) {
            NodeKind::Source => "s1".into(),
            NodeKind::Sink => "s2".into(),
            NodeKind::Item(i) => format!("i{i}"),
            NodeKind::User(u) => format!("u{u}"),
        }
    }

    /// Text edge list `from, to, capacity, flow`, tab separated.
    pub fn write_edge_list(&self, mut w: impl Write) -> std::io::Result<()> {
        for e in self.edges() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                self.node_name(e.from),
                self.node_name(e.to),
                e.capacity,
                e.flow
            )?;
        }
        Ok(())
    }

    /// Builds the network for a batch of long lists. Items are indexed in
    /// ascending id order, users in batch order.
    pub fn from_batch<R: Real>(
        batch: &RankedBatch<R>,
        edge_weights: &HashMap<(String, String), C>,
        source_weight: C,
        sink_weight: C,
    ) -> Result<(Self, BatchNodes)> {
        if source_weight < C::zero() || sink_weight < C::zero() {
            return Err(Error::Construction("terminal weights must be non-negative".into()));
        }
        let items: Vec<String> = batch
            .iter()
            .flat_map(|(_, l)| l.iter().map(|e| e.item.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let users: Vec<String> = batch.users().map(str::to_owned).collect();
        let item_index: HashMap<&str, usize> =
            items.iter().enumerate().map(|(k, i)| (i.as_str(), k)).collect();

        let mut net = Self::new(items.len(), users.len());
        for k in 0..items.len() {
            net.add_source_edge(k, source_weight);
        }
        let mut used = 0usize;
        for (u, (user, list)) in batch.iter().enumerate() {
            for e in list {
                let key = (e.item.clone(), user.to_owned());
                let w = *edge_weights.get(&key).ok_or_else(|| {
                    Error::Construction(format!("no weight for edge ({}, {user})", e.item))
                })?;
                if w < C::zero() {
                    return Err(Error::Construction(format!(
                        "negative weight {w} on edge ({}, {user})",
                        e.item
                    )));
                }
                net.add_edge(item_index[e.item.as_str()], u, w);
                used += 1;
            }
        }
        if used != edge_weights.len() {
            return Err(Error::Construction(format!(
                "{} weight(s) refer to pairs that were never recommended",
                edge_weights.len() - used
            )));
        }
        for u in 0..users.len() {
            net.add_sink_edge(u, sink_weight);
        }
        Ok((net, BatchNodes { items, users }))
    }
}

/// Ids behind the dense item and user indices of a network built from a batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchNodes {
    pub items: Vec<String>,
    pub users: Vec<String>,
}
