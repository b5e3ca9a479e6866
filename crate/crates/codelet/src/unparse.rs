//! Text output of scheduled dags.
//!
//! Two targets are supported. The neutral source is a C-like listing with
//! one single-assignment temporary per node:
//!
//! ```text
//! codelet n=2 twiddles=0 {
//!   R T0 = x[0].re;
//!   R T2 = T0 + T1;
//!   R T5 = 0.5 * T4;
//!   y[0].re = T2;
//! }
//! ```
//!
//! The dag-json target is a versioned node list that [`parse_dag_json`]
//! reads back. Node ids in both outputs are positions in the schedule.
//!
//! [`rust_function`] emits a Rust kernel for the build-time compiled
//! codelets.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::dag::{Dag, Input, Op};
use crate::schedule::Schedule;
use crate::GenError;

pub const DAG_JSON_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    NeutralSource,
    DagJson,
}

#[derive(Serialize, Deserialize)]
struct JsonDag {
    version: u32,
    n: usize,
    twiddles: usize,
    nodes: Vec<JsonNode>,
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    id: usize,
    kind: String,
    args: Vec<usize>,
    #[serde(rename = "const", skip_serializing_if = "Option::is_none", default)]
    constant: Option<f64>,
    /// Load source (`x` or `w`) and index, or store index.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    port: Option<(String, usize)>,
}

fn input_name(i: Input) -> (&'static str, usize) {
    match i {
        Input::Data(k) => ("x", k),
        Input::Twiddle(k) => ("w", k),
    }
}

fn expr(op: &Op) -> String {
    match *op {
        Op::LoadRe(i) => {
            let (s, k) = input_name(i);
            format!("{s}[{k}].re")
        }
        Op::LoadIm(i) => {
            let (s, k) = input_name(i);
            format!("{s}[{k}].im")
        }
        Op::Zero => "0".into(),
        Op::Add(a, b) => format!("T{a} + T{b}"),
        Op::Sub(a, b) => format!("T{a} - T{b}"),
        Op::Neg(a) => format!("-T{a}"),
        Op::MulConst(a, c) => format!("{c:?} * T{a}"),
        Op::Mul(a, b) => format!("T{a} * T{b}"),
        Op::StoreRe(..) | Op::StoreIm(..) => unreachable!("stores are statements"),
    }
}

/// Renders the dag in schedule order.
pub fn unparse(order: &Schedule, dag: &Dag, target: Target) -> Result<String, GenError> {
    order.validate(dag)?;
    let dag = dag.reordered(order.as_slice());
    Ok(match target {
        Target::NeutralSource => neutral(&dag),
        Target::DagJson => json(&dag),
    })
}

fn neutral(dag: &Dag) -> String {
    let mut s = format!("codelet n={} twiddles={} {{\n", dag.n, dag.twiddles);
    for (id, op) in dag.nodes.iter().enumerate() {
        match *op {
            Op::StoreRe(k, a) => writeln!(s, "  y[{k}].re = T{a};"),
            Op::StoreIm(k, a) => writeln!(s, "  y[{k}].im = T{a};"),
            _ => writeln!(s, "  R T{id} = {};", expr(op)),
        }
        .unwrap();
    }
    s.push_str("}\n");
    s
}

fn json(dag: &Dag) -> String {
    let nodes = dag
        .nodes
        .iter()
        .enumerate()
        .map(|(id, op)| {
            let port = match *op {
                Op::LoadRe(i) | Op::LoadIm(i) => {
                    let (s, k) = input_name(i);
                    Some((s.to_string(), k))
                }
                Op::StoreRe(k, _) | Op::StoreIm(k, _) => Some(("y".to_string(), k)),
                _ => None,
            };
            JsonNode {
                id,
                kind: op.kind_name().to_string(),
                args: op.operands().collect(),
                constant: match *op {
                    Op::MulConst(_, c) => Some(c),
                    _ => None,
                },
                port,
            }
        })
        .collect();
    let doc = JsonDag {
        version: DAG_JSON_VERSION,
        n: dag.n,
        twiddles: dag.twiddles,
        nodes,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

/// Reads the dag-json format back into a dag.
pub fn parse_dag_json(text: &str) -> Result<Dag, GenError> {
    let doc: JsonDag =
        serde_json::from_str(text).map_err(|e| GenError::Malformed(e.to_string()))?;
    if doc.version != DAG_JSON_VERSION {
        return Err(GenError::Malformed(format!("unsupported version {}", doc.version)));
    }
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (pos, node) in doc.nodes.iter().enumerate() {
        let bad = |what: &str| GenError::Malformed(format!("node {pos}: {what}"));
        if node.id != pos {
            return Err(bad("ids must be consecutive"));
        }
        let arg = |i: usize| node.args.get(i).copied().ok_or_else(|| bad("missing argument"));
        let port = || -> Result<(Input, usize), GenError> {
            match &node.port {
                Some((s, k)) if s == "x" => Ok((Input::Data(*k), *k)),
                Some((s, k)) if s == "w" => Ok((Input::Twiddle(*k), *k)),
                Some((s, k)) if s == "y" => Ok((Input::Data(*k), *k)),
                _ => Err(bad("missing port")),
            }
        };
        let op = match node.kind.as_str() {
            "LoadRe" => Op::LoadRe(port()?.0),
            "LoadIm" => Op::LoadIm(port()?.0),
            "Zero" => Op::Zero,
            "Add" => Op::Add(arg(0)?, arg(1)?),
            "Sub" => Op::Sub(arg(0)?, arg(1)?),
            "Neg" => Op::Neg(arg(0)?),
            "Mul" => Op::Mul(arg(0)?, arg(1)?),
            "MulConst" => Op::MulConst(arg(0)?, node.constant.ok_or_else(|| bad("missing const"))?),
            "StoreRe" => Op::StoreRe(port()?.1, arg(0)?),
            "StoreIm" => Op::StoreIm(port()?.1, arg(0)?),
            other => return Err(bad(&format!("unknown kind {other}"))),
        };
        nodes.push(op);
    }
    Dag::from_nodes(doc.n, doc.twiddles, nodes)
}

/// Emits `dag` as an unsafe Rust function over split real/imaginary
/// pointers.
///
/// The signature is `(ri, ii, is, ro, io, os)` for plain codelets, with a
/// trailing `w` for twiddle codelets; strides count `f64` values and `w`
/// points at interleaved twiddles. All loads are issued before the first
/// store, so input and output may address the same locations.
pub fn rust_function(dag: &Dag, name: &str) -> String {
    let mut s = String::new();
    let twiddle = if dag.twiddles > 0 { ", w: *const f64" } else { "" };
    writeln!(
        s,
        "#[allow(clippy::all, unused_variables)]\npub unsafe fn {name}(ri: *const f64, ii: *const f64, is: isize, ro: *mut f64, io: *mut f64, os: isize{twiddle}) {{"
    )
    .unwrap();
    let load = |i: Input, im: bool| match i {
        Input::Data(k) => format!("*{}.offset({k} * is)", if im { "ii" } else { "ri" }),
        Input::Twiddle(k) => format!("*w.add({})", 2 * k + im as usize),
    };
    for (id, op) in dag.nodes.iter().enumerate() {
        match *op {
            Op::LoadRe(i) => writeln!(s, "let t{id} = {};", load(i, false)).unwrap(),
            Op::LoadIm(i) => writeln!(s, "let t{id} = {};", load(i, true)).unwrap(),
            _ => {}
        }
    }
    for (id, op) in dag.nodes.iter().enumerate() {
        match *op {
            Op::LoadRe(_) | Op::LoadIm(_) => {}
            Op::Zero => writeln!(s, "let t{id} = 0.0f64;").unwrap(),
            Op::Add(a, b) => writeln!(s, "let t{id} = t{a} + t{b};").unwrap(),
            Op::Sub(a, b) => writeln!(s, "let t{id} = t{a} - t{b};").unwrap(),
            Op::Neg(a) => writeln!(s, "let t{id} = -t{a};").unwrap(),
            Op::MulConst(a, c) => writeln!(s, "let t{id} = {c:?}f64 * t{a};").unwrap(),
            Op::Mul(a, b) => writeln!(s, "let t{id} = t{a} * t{b};").unwrap(),
            Op::StoreRe(k, a) => writeln!(s, "*ro.offset({k} * os) = t{a};").unwrap(),
            Op::StoreIm(k, a) => writeln!(s, "*io.offset({k} * os) = t{a};").unwrap(),
        }
    }
    s.push_str("}\n");
    s
}
