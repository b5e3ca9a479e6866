//! Algebraic simplification and network transposition.

use crate::dag::{op_count, Builder, Dag, Input, NodeId, Op};
use crate::GenError;

/// Re-emits every node through the simplifying constructors.
fn rebuild(dag: &Dag) -> Dag {
    let mut b = Builder::simplifying(dag.n, dag.twiddles);
    let mut map: Vec<NodeId> = Vec::with_capacity(dag.nodes.len());
    for op in &dag.nodes {
        let op = match *op {
            Op::Add(a, c) => Op::Add(map[a], map[c]),
            Op::Sub(a, c) => Op::Sub(map[a], map[c]),
            Op::Mul(a, c) => Op::Mul(map[a], map[c]),
            Op::Neg(a) => Op::Neg(map[a]),
            Op::MulConst(a, c) => Op::MulConst(map[a], c),
            Op::StoreRe(k, a) => Op::StoreRe(k, map[a]),
            Op::StoreIm(k, a) => Op::StoreIm(k, map[a]),
            op => op,
        };
        map.push(b.emit(op));
    }
    b.finish()
}

fn fixpoint(dag: &Dag) -> Dag {
    let mut cur = rebuild(dag);
    for _ in 0..16 {
        let next = rebuild(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Simplifies `dag` without changing the linear map it computes.
///
/// Applies constant folding, removal of trivial multiplications and
/// additions of zero, common-subexpression elimination and sign
/// propagation until nothing changes, then repeats the process on the
/// transposed network and transposes back, keeping the result if it is no
/// larger. All surviving `MulConst` constants are positive.
pub fn simplify(dag: &Dag) -> Dag {
    let mut best = fixpoint(dag);
    if best.has_mul() {
        return best;
    }
    for _ in 0..4 {
        let Ok(t) = transpose_network(&best) else { break };
        let Ok(back) = transpose_network(&fixpoint(&t)) else { break };
        let back = fixpoint(&back);
        let (old, new) = (op_count(&best), op_count(&back));
        if new.total() > old.total() || back == best {
            break;
        }
        let improved = new.total() < old.total();
        best = back;
        if !improved {
            break;
        }
    }
    best
}

/// Reverses every edge of a linear network.
///
/// Loads become stores and vice versa; the result computes the transposed
/// real linear map. Fails on twiddle loads and variable products, which
/// make the network nonlinear in its data inputs.
pub fn transpose_network(dag: &Dag) -> Result<Dag, GenError> {
    let len = dag.nodes.len();
    let mut b = Builder::simplifying(dag.n, 0);
    let mut adj: Vec<Option<NodeId>> = vec![None; len];
    // adjoint accumulators for the original inputs: [re, im] per index
    let mut inputs: Vec<[Option<NodeId>; 2]> = vec![[None, None]; dag.n];

    fn accumulate(b: &mut Builder, slot: &mut Option<NodeId>, term: NodeId, negate: bool) {
        *slot = Some(match (*slot, negate) {
            (None, false) => term,
            (None, true) => b.neg(term),
            (Some(acc), false) => b.add(acc, term),
            (Some(acc), true) => b.sub(acc, term),
        });
    }

    for id in (0..len).rev() {
        match dag.nodes[id] {
            Op::StoreRe(k, a) => {
                let l = b.load_re(Input::Data(k));
                accumulate(&mut b, &mut adj[a], l, false);
            }
            Op::StoreIm(k, a) => {
                let l = b.load_im(Input::Data(k));
                accumulate(&mut b, &mut adj[a], l, false);
            }
            op => {
                let Some(g) = adj[id] else { continue };
                match op {
                    Op::Add(a, c) => {
                        accumulate(&mut b, &mut adj[a], g, false);
                        accumulate(&mut b, &mut adj[c], g, false);
                    }
                    Op::Sub(a, c) => {
                        accumulate(&mut b, &mut adj[a], g, false);
                        accumulate(&mut b, &mut adj[c], g, true);
                    }
                    Op::Neg(a) => accumulate(&mut b, &mut adj[a], g, true),
                    Op::MulConst(a, c) => {
                        let m = b.mul_const(g, c);
                        accumulate(&mut b, &mut adj[a], m, false);
                    }
                    Op::LoadRe(Input::Data(k)) => accumulate(&mut b, &mut inputs[k][0], g, false),
                    Op::LoadIm(Input::Data(k)) => accumulate(&mut b, &mut inputs[k][1], g, false),
                    Op::Zero => {}
                    Op::Mul(..) | Op::LoadRe(Input::Twiddle(_)) | Op::LoadIm(Input::Twiddle(_)) => {
                        return Err(GenError::NonLinear(id))
                    }
                    Op::StoreRe(..) | Op::StoreIm(..) => unreachable!(),
                }
            }
        }
    }
    for (k, [re, im]) in inputs.into_iter().enumerate() {
        let re = re.unwrap_or_else(|| b.zero());
        let im = im.unwrap_or_else(|| b.zero());
        b.store_re(k, re);
        b.store_im(k, im);
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{create_dag, Algorithm, CodeletSpec};

    #[test]
    fn simplified_dags_have_unique_nodes() {
        let dag = simplify(&create_dag(&CodeletSpec::notw(16, Algorithm::Ct)).unwrap());
        let mut seen = std::collections::HashSet::new();
        for op in dag.nodes() {
            if op.is_store() {
                continue;
            }
            let key = match *op {
                Op::Add(a, c) => format!("add {} {}", a.min(c), a.max(c)),
                Op::MulConst(a, c) => format!("mulc {a} {}", c.to_bits()),
                other => format!("{other:?}"),
            };
            assert!(seen.insert(key.clone()), "duplicate node {key}");
        }
    }

    #[test]
    fn transpose_rejects_twiddle_products() {
        let spec = CodeletSpec::notw(4, Algorithm::Ct).with_kind(crate::CodeletKind::Twiddle);
        let dag = create_dag(&spec).unwrap();
        assert!(matches!(transpose_network(&dag), Err(GenError::NonLinear(_))));
    }
}
