//! Test-only oracles kept independent of the library's solver.
#![allow(dead_code)]

pub mod panel;

use std::collections::{BTreeMap, VecDeque};

use fairflow_core::flow::FlowNetwork;
use fairflow_core::{Batch, Entry};
use rand::Rng;

/// Random bipartite instance: capacities on source, middle and sink edges.
#[derive(Debug, Clone)]
pub struct Instance {
    pub items: usize,
    pub users: usize,
    pub source: Vec<i64>,
    pub middle: Vec<(usize, usize, i64)>,
    pub sink: Vec<i64>,
}

impl Instance {
    pub fn random(rng: &mut impl Rng, max_nodes: usize, max_cap: i64) -> Self {
        let inner = rng.gen_range(2..=max_nodes - 2);
        let items = rng.gen_range(1..inner);
        let users = inner - items;
        let source = (0..items).map(|_| rng.gen_range(0..=max_cap)).collect();
        let sink = (0..users).map(|_| rng.gen_range(0..=max_cap)).collect();
        let mut middle = Vec::new();
        for i in 0..items {
            for u in 0..users {
                if rng.gen_bool(0.6) {
                    middle.push((i, u, rng.gen_range(0..=max_cap)));
                }
            }
        }
        Self { items, users, source, middle, sink }
    }

    pub fn network(&self) -> FlowNetwork<i64> {
        let mut net = FlowNetwork::new(self.items, self.users);
        for (i, &c) in self.source.iter().enumerate() {
            net.add_source_edge(i, c);
        }
        for &(i, u, c) in &self.middle {
            net.add_edge(i, u, c);
        }
        for (u, &c) in self.sink.iter().enumerate() {
            net.add_sink_edge(u, c);
        }
        net
    }

    pub fn nodes(&self) -> usize {
        self.items + self.users + 2
    }

    /// Dense capacity matrix in the `[s1, items, users, s2]` layout.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let n = self.nodes();
        let mut cap = vec![vec![0; n]; n];
        for (i, &c) in self.source.iter().enumerate() {
            cap[0][1 + i] += c;
        }
        for &(i, u, c) in &self.middle {
            cap[1 + i][1 + self.items + u] += c;
        }
        for (u, &c) in self.sink.iter().enumerate() {
            cap[1 + self.items + u][n - 1] += c;
        }
        cap
    }
}

/// Edmonds-Karp over a dense capacity matrix.
pub struct ReferenceFlow {
    pub value: i64,
    pub capacity: Vec<Vec<i64>>,
    pub flow: Vec<Vec<i64>>,
}

impl ReferenceFlow {
    pub fn solve(capacity: Vec<Vec<i64>>, s: usize, t: usize) -> Self {
        let n = capacity.len();
        let mut flow = vec![vec![0i64; n]; n];
        let mut value = 0;
        loop {
            let mut parent = vec![usize::MAX; n];
            parent[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in 0..n {
                    if parent[w] == usize::MAX && capacity[v][w] - flow[v][w] > 0 {
                        parent[w] = v;
                        queue.push_back(w);
                    }
                }
            }
            if parent[t] == usize::MAX {
                break;
            }
            let mut bottleneck = i64::MAX;
            let mut w = t;
            while w != s {
                let v = parent[w];
                bottleneck = bottleneck.min(capacity[v][w] - flow[v][w]);
                w = v;
            }
            let mut w = t;
            while w != s {
                let v = parent[w];
                flow[v][w] += bottleneck;
                flow[w][v] -= bottleneck;
                w = v;
            }
            value += bottleneck;
        }
        Self { value, capacity, flow }
    }

    /// Nodes that can still reach `t` in the residual graph. This set is the
    /// same for every maximum flow.
    #[allow(clippy::needless_range_loop)]
    pub fn reaches_sink(&self, t: usize) -> Vec<bool> {
        let n = self.capacity.len();
        let mut seen = vec![false; n];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(w) = queue.pop_front() {
            for v in 0..n {
                if !seen[v] && self.capacity[v][w] > self.flow[v][w] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// Random complete batch: each user gets a random `t`-subset of the item pool
/// in random order, scores descending with position.
pub fn random_batch(rng: &mut impl Rng, users: usize, items: usize, t: usize) -> Batch {
    use rand::seq::SliceRandom;
    let pool: Vec<String> = (0..items).map(|i| format!("i{i:02}")).collect();
    let lists: BTreeMap<String, Vec<Entry<f64>>> = (0..users)
        .map(|u| {
            let picked: Vec<&String> = pool.choose_multiple(rng, t).collect();
            let list = picked
                .into_iter()
                .enumerate()
                .map(|(k, i)| Entry::new(i.clone(), (t - k) as f64))
                .collect();
            (format!("u{u:02}"), list)
        })
        .collect();
    Batch::new(lists, t).unwrap()
}

/// `users` lists over `items` items where list `u` is the cyclic window
/// starting at `u mod items`: every item appears equally often at each rank.
pub fn cyclic_batch(users: usize, items: usize, t: usize) -> Batch {
    let lists = (0..users)
        .map(|u| {
            let list = (0..t)
                .map(|k| Entry::new(format!("i{:02}", (u + k) % items), (t - k) as f64))
                .collect();
            (format!("u{u:02}"), list)
        })
        .collect();
    Batch::new(lists, t).unwrap()
}

pub fn items_of(batch: &Batch, user: &str) -> Vec<String> {
    batch.list(user).unwrap().iter().map(|e| e.item.clone()).collect()
}

/// Terminal capacities evaluated directly from their defining formulas with
/// 128-bit arithmetic.
pub fn terminal_capacities_oracle(total: u64, items: u64, users: u64) -> (u64, u64) {
    // binary gcd, independent of the library's Euclid
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        if a == 0 || b == 0 {
            return a | b;
        }
        let shift = (a | b).trailing_zeros();
        a >>= a.trailing_zeros();
        while b != 0 {
            b >>= b.trailing_zeros();
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            b -= a;
        }
        a << shift
    }
    let ceil = |a: u128, b: u128| a.div_ceil(b);
    let eq_i = ceil(total as u128, items as u128);
    let eq_u = ceil(total as u128, users as u128);
    let g = gcd(eq_i, eq_u);
    let source = ceil(eq_i.min(eq_u), g);
    let sink = ceil(eq_i, g);
    (source as u64, sink as u64)
}
