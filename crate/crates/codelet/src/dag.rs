//! Real-valued expression dags for small DFTs.
//!
//! A [`Dag`] is a single-assignment list of [`Op`]s in which every operand
//! refers to an earlier node, so the node order is always a valid
//! topological order. Complex arithmetic is expanded into real operations
//! when the dag is created; loads and stores address the real or imaginary
//! half of a complex input or output.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Index of a node inside its [`Dag`].
pub type NodeId = usize;

/// A complex-valued input of a codelet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Input {
    /// Transform input element.
    Data(usize),
    /// Twiddle factor passed to twiddle codelets, indexed from zero.
    Twiddle(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    LoadRe(Input),
    LoadIm(Input),
    /// The constant zero. Only produced transiently by simplification.
    Zero,
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Neg(NodeId),
    MulConst(NodeId, f64),
    /// Product of two variables; only used to apply twiddle inputs.
    Mul(NodeId, NodeId),
    StoreRe(usize, NodeId),
    StoreIm(usize, NodeId),
}

impl Op {
    pub fn operands(&self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match *self {
            Op::LoadRe(_) | Op::LoadIm(_) | Op::Zero => (None, None),
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) => (Some(a), Some(b)),
            Op::Neg(a) | Op::MulConst(a, _) | Op::StoreRe(_, a) | Op::StoreIm(_, a) => {
                (Some(a), None)
            }
        };
        a.into_iter().chain(b)
    }

    pub fn is_store(&self) -> bool {
        matches!(self, Op::StoreRe(..) | Op::StoreIm(..))
    }

    pub fn is_load(&self) -> bool {
        matches!(self, Op::LoadRe(_) | Op::LoadIm(_))
    }

    pub fn is_arith(&self) -> bool {
        matches!(
            self,
            Op::Add(..) | Op::Sub(..) | Op::Neg(_) | Op::MulConst(..) | Op::Mul(..)
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Op::LoadRe(_) => "LoadRe",
            Op::LoadIm(_) => "LoadIm",
            Op::Zero => "Zero",
            Op::Add(..) => "Add",
            Op::Sub(..) => "Sub",
            Op::Neg(_) => "Neg",
            Op::MulConst(..) => "MulConst",
            Op::Mul(..) => "Mul",
            Op::StoreRe(..) => "StoreRe",
            Op::StoreIm(..) => "StoreIm",
        }
    }

    fn remap(&self, map: &[NodeId]) -> Op {
        match *self {
            Op::Add(a, b) => Op::Add(map[a], map[b]),
            Op::Sub(a, b) => Op::Sub(map[a], map[b]),
            Op::Mul(a, b) => Op::Mul(map[a], map[b]),
            Op::Neg(a) => Op::Neg(map[a]),
            Op::MulConst(a, c) => Op::MulConst(map[a], c),
            Op::StoreRe(k, a) => Op::StoreRe(k, map[a]),
            Op::StoreIm(k, a) => Op::StoreIm(k, map[a]),
            op => op,
        }
    }
}

/// Structural identity of a node, used for common-subexpression elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    LoadRe(Input),
    LoadIm(Input),
    Zero,
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Neg(NodeId),
    MulConst(NodeId, u64),
    Mul(NodeId, NodeId),
    StoreRe(usize),
    StoreIm(usize),
}

impl Key {
    fn of(op: &Op) -> Key {
        match *op {
            Op::LoadRe(i) => Key::LoadRe(i),
            Op::LoadIm(i) => Key::LoadIm(i),
            Op::Zero => Key::Zero,
            // commutative operands are ordered canonically
            Op::Add(a, b) => Key::Add(a.min(b), a.max(b)),
            Op::Mul(a, b) => Key::Mul(a.min(b), a.max(b)),
            Op::Sub(a, b) => Key::Sub(a, b),
            Op::Neg(a) => Key::Neg(a),
            Op::MulConst(a, c) => Key::MulConst(a, c.to_bits()),
            Op::StoreRe(k, _) => Key::StoreRe(k),
            Op::StoreIm(k, _) => Key::StoreIm(k),
        }
    }
}

/// A codelet dag: `n` complex inputs and outputs plus `twiddles` complex
/// twiddle inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Dag {
    pub(crate) nodes: Vec<Op>,
    pub(crate) n: usize,
    pub(crate) twiddles: usize,
}

impl Dag {
    pub fn from_nodes(n: usize, twiddles: usize, nodes: Vec<Op>) -> Result<Dag, crate::GenError> {
        for (id, op) in nodes.iter().enumerate() {
            for a in op.operands() {
                if a >= id {
                    return Err(crate::GenError::Malformed(format!(
                        "node {id} refers to later node {a}"
                    )));
                }
                if nodes[a].is_store() {
                    return Err(crate::GenError::Malformed(format!(
                        "node {id} uses store node {a} as an operand"
                    )));
                }
            }
            match *op {
                Op::LoadRe(Input::Data(k)) | Op::LoadIm(Input::Data(k)) if k >= n => {
                    return Err(crate::GenError::Malformed(format!("load of input {k} >= {n}")))
                }
                Op::LoadRe(Input::Twiddle(k)) | Op::LoadIm(Input::Twiddle(k)) if k >= twiddles => {
                    return Err(crate::GenError::Malformed(format!("load of twiddle {k}")))
                }
                Op::StoreRe(k, _) | Op::StoreIm(k, _) if k >= n => {
                    return Err(crate::GenError::Malformed(format!("store of output {k} >= {n}")))
                }
                _ => {}
            }
        }
        Ok(Dag { nodes, n, twiddles })
    }

    /// Transform size (number of complex inputs and outputs).
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn twiddle_count(&self) -> usize {
        self.twiddles
    }

    pub fn nodes(&self) -> &[Op] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn has_mul(&self) -> bool {
        self.nodes.iter().any(|op| matches!(op, Op::Mul(..)))
    }

    /// Number of uses of every node.
    pub fn use_counts(&self) -> Vec<usize> {
        let mut uses = vec![0; self.nodes.len()];
        for op in &self.nodes {
            for a in op.operands() {
                uses[a] += 1;
            }
        }
        uses
    }

    /// Drops every node that does not contribute to a store and renumbers
    /// the survivors, keeping their relative order.
    pub fn prune(&self) -> Dag {
        let mut live = vec![false; self.nodes.len()];
        for (id, op) in self.nodes.iter().enumerate().rev() {
            if op.is_store() {
                live[id] = true;
            }
            if live[id] {
                for a in op.operands() {
                    live[a] = true;
                }
            }
        }
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (id, op) in self.nodes.iter().enumerate() {
            if live[id] {
                map[id] = nodes.len();
                nodes.push(op.remap(&map));
            }
        }
        Dag {
            nodes,
            n: self.n,
            twiddles: self.twiddles,
        }
    }

    /// Returns a dag whose nodes are permuted into `order`, which must be a
    /// topological order of all nodes.
    pub fn reordered(&self, order: &[NodeId]) -> Dag {
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::with_capacity(order.len());
        for &id in order {
            map[id] = nodes.len();
            nodes.push(self.nodes[id].remap(&map));
        }
        Dag {
            nodes,
            n: self.n,
            twiddles: self.twiddles,
        }
    }
}

/// Incremental dag constructor.
///
/// In raw mode every call appends a node verbatim. In simplifying mode the
/// constructors fold constants, drop multiplications by 0 and ±1, absorb
/// negations into neighbouring additions, keep every stored constant
/// positive and hash-cons structurally identical nodes.
pub struct Builder {
    nodes: Vec<Op>,
    n: usize,
    twiddles: usize,
    simplify: bool,
    table: HashMap<Key, NodeId>,
}

impl Builder {
    pub fn raw(n: usize, twiddles: usize) -> Builder {
        Builder {
            nodes: Vec::new(),
            n,
            twiddles,
            simplify: false,
            table: HashMap::new(),
        }
    }

    pub fn simplifying(n: usize, twiddles: usize) -> Builder {
        Builder {
            simplify: true,
            ..Builder::raw(n, twiddles)
        }
    }

    pub fn finish(self) -> Dag {
        let dag = Dag {
            nodes: self.nodes,
            n: self.n,
            twiddles: self.twiddles,
        };
        if self.simplify {
            dag.prune()
        } else {
            dag
        }
    }

    pub fn op(&self, id: NodeId) -> Op {
        self.nodes[id]
    }

    fn push(&mut self, op: Op) -> NodeId {
        if self.simplify || op.is_load() {
            let key = Key::of(&op);
            if let Some(&id) = self.table.get(&key) {
                return id;
            }
            let id = self.nodes.len();
            self.nodes.push(op);
            self.table.insert(key, id);
            id
        } else {
            self.nodes.push(op);
            self.nodes.len() - 1
        }
    }

    fn lookup(&self, op: Op) -> Option<NodeId> {
        self.table.get(&Key::of(&op)).copied()
    }

    pub fn load_re(&mut self, input: Input) -> NodeId {
        self.push(Op::LoadRe(input))
    }

    pub fn load_im(&mut self, input: Input) -> NodeId {
        self.push(Op::LoadIm(input))
    }

    pub fn zero(&mut self) -> NodeId {
        self.push(Op::Zero)
    }

    fn is_zero(&self, a: NodeId) -> bool {
        matches!(self.nodes[a], Op::Zero)
    }

    fn negated(&self, a: NodeId) -> Option<NodeId> {
        match self.nodes[a] {
            Op::Neg(x) => Some(x),
            _ => None,
        }
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        if !self.simplify {
            return self.push(Op::Neg(a));
        }
        match self.nodes[a] {
            Op::Zero => a,
            Op::Neg(x) => x,
            Op::Sub(x, y) => self.sub(y, x),
            _ => self.push(Op::Neg(a)),
        }
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if !self.simplify {
            return self.push(Op::Add(a, b));
        }
        if self.is_zero(a) {
            return b;
        }
        if self.is_zero(b) {
            return a;
        }
        match (self.negated(a), self.negated(b)) {
            (Some(x), Some(y)) => {
                let s = self.add(x, y);
                self.neg(s)
            }
            (Some(x), None) => self.sub(b, x),
            (None, Some(y)) => self.sub(a, y),
            (None, None) => self.push(Op::Add(a, b)),
        }
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if !self.simplify {
            return self.push(Op::Sub(a, b));
        }
        if self.is_zero(b) {
            return a;
        }
        if self.is_zero(a) {
            return self.neg(b);
        }
        if a == b {
            return self.zero();
        }
        match (self.negated(a), self.negated(b)) {
            (Some(x), Some(y)) => self.sub(y, x),
            (Some(x), None) => {
                let s = self.add(x, b);
                self.neg(s)
            }
            (None, Some(y)) => self.add(a, y),
            (None, None) => {
                // b - a already computed: reuse it negated
                if let Some(id) = self.lookup(Op::Sub(b, a)) {
                    return self.push(Op::Neg(id));
                }
                self.push(Op::Sub(a, b))
            }
        }
    }

    pub fn mul_const(&mut self, a: NodeId, c: f64) -> NodeId {
        if !self.simplify {
            return self.push(Op::MulConst(a, c));
        }
        if c == 0.0 || self.is_zero(a) {
            return self.zero();
        }
        if c == 1.0 {
            return a;
        }
        if c == -1.0 {
            return self.neg(a);
        }
        match self.nodes[a] {
            Op::Neg(x) => self.mul_const(x, -c),
            Op::MulConst(x, d) => self.mul_const(x, c * d),
            _ if c < 0.0 => {
                let m = self.mul_const(a, -c);
                self.neg(m)
            }
            _ => self.push(Op::MulConst(a, c)),
        }
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if !self.simplify {
            return self.push(Op::Mul(a, b));
        }
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        match (self.negated(a), self.negated(b)) {
            (Some(x), Some(y)) => self.mul(x, y),
            (Some(x), None) => {
                let m = self.mul(x, b);
                self.neg(m)
            }
            (None, Some(y)) => {
                let m = self.mul(a, y);
                self.neg(m)
            }
            (None, None) => self.push(Op::Mul(a, b)),
        }
    }

    pub fn store_re(&mut self, k: usize, a: NodeId) -> NodeId {
        self.nodes.push(Op::StoreRe(k, a));
        self.nodes.len() - 1
    }

    pub fn store_im(&mut self, k: usize, a: NodeId) -> NodeId {
        self.nodes.push(Op::StoreIm(k, a));
        self.nodes.len() - 1
    }

    /// Re-emits `op` (whose operands are already ids of this builder)
    /// through the smart constructors.
    pub fn emit(&mut self, op: Op) -> NodeId {
        match op {
            Op::LoadRe(i) => self.load_re(i),
            Op::LoadIm(i) => self.load_im(i),
            Op::Zero => self.zero(),
            Op::Add(a, b) => self.add(a, b),
            Op::Sub(a, b) => self.sub(a, b),
            Op::Neg(a) => self.neg(a),
            Op::MulConst(a, c) => self.mul_const(a, c),
            Op::Mul(a, b) => self.mul(a, b),
            Op::StoreRe(k, a) => self.store_re(k, a),
            Op::StoreIm(k, a) => self.store_im(k, a),
        }
    }
}

/// Real operation counts of a dag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OpCount {
    /// Additions, subtractions and negations.
    pub adds: usize,
    /// Multiplications by constants or by twiddle inputs.
    pub mults: usize,
}

impl OpCount {
    pub fn total(&self) -> usize {
        self.adds + self.mults
    }
}

/// Counts the arithmetic nodes that contribute to some store.
pub fn op_count(dag: &Dag) -> OpCount {
    let pruned = dag.prune();
    let mut count = OpCount::default();
    for op in &pruned.nodes {
        match op {
            Op::Add(..) | Op::Sub(..) | Op::Neg(_) => count.adds += 1,
            Op::MulConst(..) | Op::Mul(..) => count.mults += 1,
            _ => {}
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplifying_builder_folds_trivial_constants() {
        let mut b = Builder::simplifying(1, 0);
        let x = b.load_re(Input::Data(0));
        assert_eq!(b.mul_const(x, 1.0), x);
        let z = b.mul_const(x, 0.0);
        assert!(matches!(b.op(z), Op::Zero));
        assert_eq!(b.add(x, z), x);
        let m = b.mul_const(x, -1.0);
        assert!(matches!(b.op(m), Op::Neg(id) if id == x));
        assert_eq!(b.neg(m), x);
    }

    #[test]
    fn negative_constants_become_negations() {
        let mut b = Builder::simplifying(1, 0);
        let x = b.load_re(Input::Data(0));
        let m = b.mul_const(x, -0.5);
        match b.op(m) {
            Op::Neg(inner) => assert!(matches!(b.op(inner), Op::MulConst(_, c) if c == 0.5)),
            other => panic!("expected negation, got {other:?}"),
        }
    }

    #[test]
    fn negations_are_absorbed_by_additions() {
        let mut b = Builder::simplifying(2, 0);
        let x = b.load_re(Input::Data(0));
        let y = b.load_re(Input::Data(1));
        let ny = b.neg(y);
        let s = b.add(x, ny);
        assert!(matches!(b.op(s), Op::Sub(a, c) if a == x && c == y));
        let t = b.sub(x, ny);
        assert!(matches!(b.op(t), Op::Add(..)));
    }

    #[test]
    fn cse_merges_commuted_additions() {
        let mut b = Builder::simplifying(2, 0);
        let x = b.load_re(Input::Data(0));
        let y = b.load_re(Input::Data(1));
        assert_eq!(b.add(x, y), b.add(y, x));
        let m1 = b.mul_const(x, 0.25);
        let m2 = b.mul_const(x, 0.25);
        assert_eq!(m1, m2);
    }

    #[test]
    fn prune_drops_dead_nodes() {
        let mut b = Builder::raw(1, 0);
        let x = b.load_re(Input::Data(0));
        let y = b.load_im(Input::Data(0));
        let _dead = b.add(x, y);
        b.store_re(0, x);
        b.store_im(0, y);
        let dag = b.finish().prune();
        assert_eq!(dag.len(), 4);
        assert_eq!(op_count(&dag), OpCount::default());
    }
}
