//! Register-oblivious scheduling.
//!
//! The dag is split recursively: independent components are scheduled one
//! after another, and a connected piece is cut at half its depth so that
//! the top half is finished before the bottom half starts. For an FFT dag
//! the top half falls apart into independent sub-transforms, which keeps
//! the number of simultaneously live values small without knowing the
//! register count. The recursive order then serves as the priority of a
//! list scheduler that issues, among the ready nodes, one that frees the
//! most live values.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use crate::dag::{Dag, NodeId};
use crate::GenError;

/// A topological order of the nodes of a dag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule(pub Vec<NodeId>);

impl Schedule {
    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    /// Checks that the order is a permutation in which operands come first.
    pub fn validate(&self, dag: &Dag) -> Result<(), GenError> {
        let len = dag.nodes.len();
        if self.0.len() != len {
            return Err(GenError::BadSchedule(format!(
                "{} entries for {len} nodes",
                self.0.len()
            )));
        }
        let mut pos = vec![usize::MAX; len];
        for (t, &id) in self.0.iter().enumerate() {
            if id >= len || pos[id] != usize::MAX {
                return Err(GenError::BadSchedule(format!("node {id} repeated or out of range")));
            }
            pos[id] = t;
        }
        for (id, op) in dag.nodes.iter().enumerate() {
            for a in op.operands() {
                if pos[a] > pos[id] {
                    return Err(GenError::BadSchedule(format!("node {id} scheduled before operand {a}")));
                }
            }
        }
        Ok(())
    }
}

fn depths(dag: &Dag) -> Vec<usize> {
    let mut d = vec![0; dag.nodes.len()];
    for (id, op) in dag.nodes.iter().enumerate() {
        d[id] = op.operands().map(|a| d[a] + 1).max().unwrap_or(0);
    }
    d
}

/// Nodes ordered by depth from the loads, ties by id.
pub fn breadth_order(dag: &Dag) -> Schedule {
    let d = depths(dag);
    let mut order: Vec<NodeId> = (0..dag.nodes.len()).collect();
    order.sort_by_key(|&id| (d[id], id));
    Schedule(order)
}

/// Largest number of values that are defined but still awaiting a use at
/// any point of `order`.
pub fn max_live(dag: &Dag, order: &Schedule) -> usize {
    let len = dag.nodes.len();
    let mut pos = vec![0; len];
    for (t, &id) in order.0.iter().enumerate() {
        pos[id] = t;
    }
    let mut last_use = vec![None; len];
    for (id, op) in dag.nodes.iter().enumerate() {
        for a in op.operands() {
            let p = pos[id];
            last_use[a] = Some(last_use[a].map_or(p, |q: usize| q.max(p)));
        }
    }
    // +1 when a value is defined, −1 after its last use
    let mut delta = vec![0i64; len + 1];
    for id in 0..len {
        if let Some(last) = last_use[id] {
            delta[pos[id]] += 1;
            delta[last] -= 1;
        }
    }
    let (mut cur, mut best) = (0i64, 0i64);
    for d in delta {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

struct Scheduler<'a> {
    dag: &'a Dag,
    mark: Vec<u32>,
    stamp: u32,
    parent: Vec<NodeId>,
    depth: Vec<usize>,
    out: Vec<NodeId>,
}

impl Scheduler<'_> {
    fn find(&mut self, mut v: NodeId) -> NodeId {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// `set` must be sorted by id.
    fn run(&mut self, set: Vec<NodeId>) {
        if set.len() <= 2 {
            self.out.extend(set);
            return;
        }
        self.stamp += 1;
        let stamp = self.stamp;
        for &v in &set {
            self.mark[v] = stamp;
            self.parent[v] = v;
        }
        for &v in &set {
            for a in self.dag.nodes[v].operands() {
                if self.mark[a] == stamp {
                    let (ra, rv) = (self.find(a), self.find(v));
                    if ra != rv {
                        self.parent[ra.max(rv)] = ra.min(rv);
                    }
                }
            }
        }
        let mut groups: Vec<(NodeId, Vec<NodeId>)> = Vec::new();
        for &v in &set {
            let r = self.find(v);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, g)) => g.push(v),
                None => groups.push((r, vec![v])),
            }
        }
        if groups.len() > 1 {
            for (_, g) in groups {
                self.run(g);
            }
            return;
        }
        let mut maxd = 0;
        for &v in &set {
            let d = self.dag.nodes[v]
                .operands()
                .filter(|&a| self.mark[a] == stamp)
                .map(|a| self.depth[a] + 1)
                .max()
                .unwrap_or(0);
            self.depth[v] = d;
            maxd = maxd.max(d);
        }
        let half = maxd.div_ceil(2);
        let (top, bottom): (Vec<NodeId>, Vec<NodeId>) =
            set.into_iter().partition(|&v| self.depth[v] < half);
        self.run(top);
        self.run(bottom);
    }
}

/// List scheduling that prefers nodes freeing the most values, ties going
/// to the earlier position in the recursive order `prio`.
fn refine(dag: &Dag, prio: &[NodeId]) -> Vec<NodeId> {
    let len = dag.nodes.len();
    let mut rank = vec![0; len];
    for (t, &id) in prio.iter().enumerate() {
        rank[id] = t;
    }
    let mut users = vec![Vec::new(); len];
    let mut missing = vec![0usize; len];
    let mut remaining = vec![0usize; len];
    for (id, op) in dag.nodes.iter().enumerate() {
        for a in op.operands() {
            users[a].push(id);
            missing[id] += 1;
            remaining[a] += 1;
        }
    }
    let score = |v: NodeId, remaining: &[usize]| -> i64 {
        let op = &dag.nodes[v];
        let ops: Vec<NodeId> = op.operands().collect();
        let kills = match ops[..] {
            [a, b] if a == b => (remaining[a] == 2) as i64,
            _ => ops.iter().filter(|&&a| remaining[a] == 1).count() as i64,
        };
        kills - (!op.is_store()) as i64
    };
    let mut ready: BTreeSet<(usize, NodeId)> = (0..len)
        .filter(|&v| missing[v] == 0)
        .map(|v| (rank[v], v))
        .collect();
    let mut out = Vec::with_capacity(len);
    while let Some(&(r, v)) = ready
        .iter()
        .max_by_key(|&&(r, v)| (score(v, &remaining), Reverse(r)))
    {
        ready.remove(&(r, v));
        out.push(v);
        for a in dag.nodes[v].operands() {
            remaining[a] -= 1;
        }
        for &u in &users[v] {
            missing[u] -= 1;
            if missing[u] == 0 {
                ready.insert((rank[u], u));
            }
        }
    }
    out
}

/// Computes the recursive schedule of `dag`. Deterministic.
pub fn schedule(dag: &Dag) -> Result<Schedule, GenError> {
    let len = dag.nodes.len();
    for (id, op) in dag.nodes.iter().enumerate() {
        if op.operands().any(|a| a >= id) {
            return Err(GenError::BadSchedule(format!("cycle through node {id}")));
        }
    }
    let mut s = Scheduler {
        dag,
        mark: vec![0; len],
        stamp: 0,
        parent: (0..len).collect(),
        depth: vec![0; len],
        out: Vec::with_capacity(len),
    };
    s.run((0..len).collect());
    let order = Schedule(refine(dag, &s.out));
    order.validate(dag)?;
    Ok(order)
}
