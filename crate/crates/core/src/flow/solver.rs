use std::collections::VecDeque;
use std::io::Write;

use super::network::{FlowNetwork, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::scalar::Capacity;

/// Labels, excesses and the FIFO queue of active nodes.
///
/// The source's excess is its (non-positive) net inflow; every other node's
/// excess is non-negative.
#[derive(Debug, Clone)]
pub struct SolverState<C> {
    labels: Vec<usize>,
    excess: Vec<C>,
    queue: VecDeque<NodeId>,
    queued: Vec<bool>,
    current_arc: Vec<usize>,
    operations: u64,
}

impl<C: Capacity> SolverState<C> {
    /// Resets all flow, then labels the source `|I| + |U| + 2`, items 2,
    /// users 1 and the sink 0, saturates every source edge and queues every
    /// item that received flow.
    pub fn preflow(net: &mut FlowNetwork<C>) -> Self {
        net.reset();
        let n = net.num_nodes();
        let mut labels = vec![0; n];
        for (node, label) in labels.iter_mut().enumerate() {
            *label = match net.kind(node) {
                NodeKind::Source => n,
                NodeKind::Item(_) => 2,
                NodeKind::User(_) => 1,
                NodeKind::Sink => 0,
            };
        }
        let mut state = Self {
            labels,
            excess: vec![C::zero(); n],
            queue: VecDeque::with_capacity(net.num_items()),
            queued: vec![false; n],
            current_arc: vec![0; n],
            operations: 0,
        };
        let source = net.source();
        for a in net.adjacency[source].clone() {
            if a % 2 == 1 {
                continue;
            }
            let amount = net.arcs[a].residual;
            let to = net.arcs[a].to;
            net.apply(a, amount);
            state.excess[source] = state.excess[source] - amount;
            state.excess[to] = state.excess[to] + amount;
            state.activate(net, to);
        }
        state
    }

    pub fn label(&self, node: NodeId) -> usize {
        self.labels[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn excess(&self, node: NodeId) -> C {
        self.excess[node]
    }

    pub fn queue(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.queue.iter().copied()
    }

    pub fn is_active(&self, node: NodeId) -> bool {
        self.queued[node]
    }

    /// Pushes + relabels performed so far.
    pub fn operations(&self) -> u64 {
        self.operations
    }

    fn activate(&mut self, net: &FlowNetwork<C>, node: NodeId) {
        if node != net.source()
            && node != net.sink()
            && !self.queued[node]
            && self.excess[node] > C::zero()
        {
            self.queued[node] = true;
            self.queue.push_back(node);
        }
    }

    /// Sends `min(excess(from), residual(from, to))` along the arc from
    /// `from` to `to`; the arc must be admissible.
    pub fn push(&mut self, net: &mut FlowNetwork<C>, from: NodeId, to: NodeId) -> Result<C> {
        let arc = net
            .arc_between(from, to)
            .ok_or_else(|| Error::InternalLogic(format!("no arc from {from} to {to}")))?;
        self.push_arc(net, from, arc)
    }

    fn push_arc(&mut self, net: &mut FlowNetwork<C>, from: NodeId, arc: usize) -> Result<C> {
        let to = net.arcs[arc].to;
        let residual = net.arcs[arc].residual;
        if self.excess[from] <= C::zero() {
            return Err(Error::InternalLogic(format!("push from inactive node {from}")));
        }
        if residual <= C::zero() {
            return Err(Error::InternalLogic(format!("push along saturated arc {from}->{to}")));
        }
        if self.labels[from] != self.labels[to] + 1 {
            return Err(Error::InternalLogic(format!(
                "push {from}->{to} with labels {} and {}",
                self.labels[from], self.labels[to]
            )));
        }
        let delta = self.excess[from].min(residual);
        net.apply(arc, delta);
        self.excess[from] = self.excess[from] - delta;
        self.excess[to] = self.excess[to] + delta;
        self.activate(net, to);
        self.operations += 1;
        Ok(delta)
    }

    /// Raises the label of an active node to one more than its lowest
    /// residual neighbour.
    pub fn relabel(&mut self, net: &FlowNetwork<C>, node: NodeId) -> Result<usize> {
        if self.excess[node] <= C::zero() {
            return Err(Error::InternalLogic(format!("relabel of inactive node {node}")));
        }
        let lowest = net.adjacency[node]
            .iter()
            .filter(|&&a| net.arcs[a].residual > C::zero())
            .map(|&a| self.labels[net.arcs[a].to])
            .min()
            .ok_or_else(|| Error::InternalLogic(format!("node {node} has no residual neighbour")))?;
        if lowest < self.labels[node] {
            return Err(Error::InternalLogic(format!(
                "relabel of node {node} at label {} with a residual neighbour at {lowest}",
                self.labels[node]
            )));
        }
        let label = lowest + 1;
        if label > 2 * net.num_nodes() + 1 {
            return Err(Error::InternalLogic(format!(
                "label {label} of node {node} exceeds 2|V| + 1"
            )));
        }
        self.labels[node] = label;
        self.operations += 1;
        Ok(label)
    }

    fn discharge(&mut self, net: &mut FlowNetwork<C>, node: NodeId, limit: u64) -> Result<()> {
        while self.excess[node] > C::zero() {
            if self.operations > limit {
                return Err(Error::SolverStuck { limit });
            }
            let adjacency = &net.adjacency[node];
            if self.current_arc[node] == adjacency.len() {
                self.relabel(net, node)?;
                self.current_arc[node] = 0;
                continue;
            }
            let arc = adjacency[self.current_arc[node]];
            let to = net.arcs[arc].to;
            if net.arcs[arc].residual > C::zero() && self.labels[node] == self.labels[to] + 1 {
                self.push_arc(net, node, arc)?;
            } else {
                self.current_arc[node] += 1;
            }
        }
        Ok(())
    }

    /// Dequeues the next active node and discharges it completely. Returns
    /// `false` once the queue is empty.
    pub fn discharge_next(&mut self, net: &mut FlowNetwork<C>) -> Result<bool> {
        let Some(node) = self.queue.pop_front() else {
            return Ok(false);
        };
        self.queued[node] = false;
        self.discharge(net, node, operation_limit(net))?;
        Ok(true)
    }

    /// Checks capacities and that every node's excess equals its flow balance.
    pub fn audit(&self, net: &FlowNetwork<C>) -> Result<()> {
        net.check_capacities()?;
        for node in 0..net.num_nodes() {
            let balance = net.balance(node);
            if balance != self.excess[node] {
                return Err(Error::InternalLogic(format!(
                    "node {node}: excess {} but flow balance {balance}",
                    self.excess[node]
                )));
            }
            if node != net.source() && balance < C::zero() {
                return Err(Error::InternalLogic(format!("node {node} has negative excess")));
            }
        }
        Ok(())
    }

    pub fn write_labels(&self, net: &FlowNetwork<C>, mut w: impl Write) -> std::io::Result<()> {
        for (node, label) in self.labels.iter().enumerate() {
            writeln!(w, "{}\t{label}\t{}", net.node_name(node), self.excess[node])?;
        }
        Ok(())
    }
}

/// Result of [`max_flow`].
#[derive(Debug, Clone)]
pub struct MaxFlow<C> {
    /// Total flow into the sink.
    pub value: C,
    pub state: SolverState<C>,
}

impl<C: Capacity> MaxFlow<C> {
    pub fn labels(&self) -> &[usize] {
        self.state.labels()
    }
}

/// Operation budget: the generic push-relabel bound `4|V|^2|E| + 2|V|^2`.
fn operation_limit<C: Capacity>(net: &FlowNetwork<C>) -> u64 {
    let v = net.num_nodes() as u64;
    let e = net.num_edges().max(1) as u64;
    4 * v * v * e + 2 * v * v
}

/// FIFO push-relabel from the labelled preflow until no node is active.
pub fn max_flow<C: Capacity>(net: &mut FlowNetwork<C>) -> Result<MaxFlow<C>> {
    let mut state = SolverState::preflow(net);
    while state.discharge_next(net)? {}
    let value = state.excess[net.sink()];
    Ok(MaxFlow { value, state })
}

/// Items whose final label rose above the source's label `|I| + |U| + 2`.
///
/// Such an item could not route all of its source flow and pushed the excess
/// back to the source. An item left exactly at the source's label may have
/// routed everything, so it is not selected.
pub fn low_capacity_left_nodes<C: Capacity>(labels: &[usize], net: &FlowNetwork<C>) -> Vec<usize> {
    let source_label = net.num_items() + net.num_users() + 2;
    (0..net.num_items())
        .filter(|&i| labels[net.item_node(i)] > source_label)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(source: i64, middle: i64, sink: i64) -> FlowNetwork<i64> {
        let mut net = FlowNetwork::new(1, 1);
        net.add_source_edge(0, source);
        net.add_edge(0, 0, middle);
        net.add_sink_edge(0, sink);
        net
    }

    #[test]
    fn preflow_single_pair() {
        let mut net = path(7, 3, 4);
        let state = SolverState::preflow(&mut net);
        assert_eq!(state.label(net.source()), 4);
        assert_eq!(state.label(net.item_node(0)), 2);
        assert_eq!(state.label(net.user_node(0)), 1);
        assert_eq!(state.label(net.sink()), 0);
        assert_eq!(state.excess(net.item_node(0)), 7);
        assert_eq!(state.queue().collect::<Vec<_>>(), [net.item_node(0)]);
        state.audit(&net).unwrap();
    }

    #[test]
    fn preflow_three_by_three_source_label() {
        let mut net = FlowNetwork::<i64>::new(3, 3);
        for i in 0..3 {
            net.add_source_edge(i, 2);
            for u in 0..3 {
                net.add_edge(i, u, 1);
            }
        }
        for u in 0..3 {
            net.add_sink_edge(u, 2);
        }
        let state = SolverState::preflow(&mut net);
        assert_eq!(state.label(net.source()), 8);
        let pushed: i64 = (0..3).map(|i| state.excess(net.item_node(i))).sum();
        assert_eq!(pushed, 3 * 2);
    }

    #[test]
    fn push_example_fifteen_eight_four() {
        let mut net = FlowNetwork::<i64>::new(1, 2);
        net.add_source_edge(0, 15);
        net.add_edge(0, 0, 8);
        net.add_edge(0, 1, 4);
        net.add_sink_edge(0, 100);
        net.add_sink_edge(1, 100);
        let mut state = SolverState::preflow(&mut net);
        let (u, v, k) = (net.item_node(0), net.user_node(0), net.user_node(1));
        assert_eq!(state.push(&mut net, u, v).unwrap(), 8);
        assert_eq!(state.push(&mut net, u, k).unwrap(), 4);
        assert_eq!(state.excess(u), 3);
        assert_eq!(net.residual(v, u), Some(8));
        assert_eq!(net.residual(k, u), Some(4));
        state.audit(&net).unwrap();
    }

    #[test]
    fn push_capped_by_excess() {
        let mut net = path(2, 8, 10);
        let mut state = SolverState::preflow(&mut net);
        let (i, u) = (net.item_node(0), net.user_node(0));
        assert_eq!(state.push(&mut net, i, u).unwrap(), 2);
    }

    #[test]
    fn push_precondition_violations() {
        let mut net = path(2, 8, 10);
        let mut state = SolverState::preflow(&mut net);
        let (i, u, s2) = (net.item_node(0), net.user_node(0), net.sink());
        // user has no excess yet
        assert!(matches!(state.push(&mut net, u, s2), Err(Error::InternalLogic(_))));
        // item to source is not downhill
        assert!(matches!(state.push(&mut net, i, 0), Err(Error::InternalLogic(_))));
    }

    #[test]
    fn relabel_to_source_plus_one() {
        let mut net = path(5, 0, 4);
        let mut state = SolverState::preflow(&mut net);
        let item = net.item_node(0);
        assert_eq!(state.relabel(&net, item).unwrap(), 1 + 1 + 3);
    }

    #[test]
    fn relabel_min_plus_one() {
        let mut net = FlowNetwork::<i64>::new(1, 2);
        net.add_source_edge(0, 5);
        net.add_edge(0, 0, 1);
        net.add_edge(0, 1, 1);
        net.add_sink_edge(0, 1);
        net.add_sink_edge(1, 1);
        let mut state = SolverState::preflow(&mut net);
        let item = net.item_node(0);
        // neighbours at labels {1, 1} but the item is already at 2: admissible, so relabel is refused
        assert!(state.relabel(&net, item).is_err());
        state.labels[item] = 1;
        assert_eq!(state.relabel(&net, item).unwrap(), 2);
    }

    #[test]
    fn single_path_bottleneck() {
        let mut net = path(5, 3, 4);
        let flow = max_flow(&mut net).unwrap();
        assert_eq!(flow.value, 3);
        flow.state.audit(&net).unwrap();
        assert_eq!(flow.state.excess(net.item_node(0)), 0);
    }

    #[test]
    fn zero_middle_capacity_returns_everything() {
        let mut net = FlowNetwork::<i64>::new(2, 2);
        for i in 0..2 {
            net.add_source_edge(i, 4);
            for u in 0..2 {
                net.add_edge(i, u, 0);
            }
        }
        for u in 0..2 {
            net.add_sink_edge(u, 9);
        }
        let flow = max_flow(&mut net).unwrap();
        assert_eq!(flow.value, 0);
        assert_eq!(flow.state.excess(net.source()), 0);
        for i in 0..2 {
            assert!(flow.labels()[net.item_node(i)] > net.num_nodes());
        }
        assert_eq!(low_capacity_left_nodes(flow.labels(), &net), [0, 1]);
    }

    #[test]
    fn ample_capacity_selects_nothing() {
        let mut net = FlowNetwork::<i64>::new(2, 2);
        for i in 0..2 {
            net.add_source_edge(i, 3);
            for u in 0..2 {
                net.add_edge(i, u, 10);
            }
        }
        for u in 0..2 {
            net.add_sink_edge(u, 10);
        }
        let flow = max_flow(&mut net).unwrap();
        assert_eq!(flow.value, 6);
        assert!(low_capacity_left_nodes(flow.labels(), &net).is_empty());
    }

    #[test]
    fn works_with_i32() {
        let mut net = FlowNetwork::<i32>::new(1, 1);
        net.add_source_edge(0, 5);
        net.add_edge(0, 0, 3);
        net.add_sink_edge(0, 4);
        assert_eq!(max_flow(&mut net).unwrap().value, 3);
    }
}
