//! Generator for straight-line DFT kernels ("codelets").
//!
//! A codelet is produced in four phases: a dag for the requested algorithm
//! is created by symbolic evaluation ([`create_dag`]), algebraically
//! simplified ([`simplify`]), topologically scheduled ([`schedule()`]) and
//! finally unparsed to text ([`unparse`]). The [`interp`] module evaluates a
//! dag directly and provides the matrix extraction used to check all of the
//! above.

pub mod create;
pub mod dag;
pub mod interp;
pub mod roots;
pub mod schedule;
pub mod simplify;
pub mod unparse;

pub use create::create_dag;
pub use dag::{op_count, Dag, Input, NodeId, Op, OpCount};
pub use interp::{execute, extract_matrix, extract_real_matrix};
pub use schedule::{schedule, Schedule};
pub use simplify::{simplify, transpose_network};
pub use unparse::{parse_dag_json, unparse, Target};

use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GenError {
    #[error("algorithm {alg} cannot generate size {n}")]
    Inapplicable { alg: Algorithm, n: usize },
    #[error("transposition needs a linear network; node {0} multiplies two variables")]
    NonLinear(NodeId),
    #[error("malformed dag: {0}")]
    Malformed(String),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("schedule is not a topological order: {0}")]
    BadSchedule(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeletKind {
    /// Plain DFT of the inputs.
    Notw,
    /// Inputs `1..n` are multiplied by twiddles `0..n-1` before the DFT.
    Twiddle,
    /// Outputs `1..n` are multiplied by twiddles `0..n-1` after the DFT.
    TwiddleDif,
}

impl CodeletKind {
    pub fn name(self) -> &'static str {
        match self {
            CodeletKind::Notw => "notw",
            CodeletKind::Twiddle => "twiddle",
            CodeletKind::TwiddleDif => "twiddle_dif",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Recursive Cooley-Tukey, smallest prime factor first.
    Ct,
    SplitRadix,
    /// Good-Thomas prime-factor algorithm.
    Pfa,
    Rader,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Ct,
        Algorithm::SplitRadix,
        Algorithm::Pfa,
        Algorithm::Rader,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ct => "ct",
            Algorithm::SplitRadix => "splitradix",
            Algorithm::Pfa => "pfa",
            Algorithm::Rader => "rader",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeletSpec {
    pub kind: CodeletKind,
    pub n: usize,
    pub algorithm: Algorithm,
    /// Exponent sign of the transform, −1 (forward) or +1.
    pub sign: i32,
}

impl CodeletSpec {
    pub fn notw(n: usize, algorithm: Algorithm) -> CodeletSpec {
        CodeletSpec {
            kind: CodeletKind::Notw,
            n,
            algorithm,
            sign: -1,
        }
    }

    pub fn with_kind(self, kind: CodeletKind) -> CodeletSpec {
        CodeletSpec { kind, ..self }
    }

    pub fn with_sign(self, sign: i32) -> CodeletSpec {
        CodeletSpec { sign, ..self }
    }
}

/// A simplified and scheduled codelet.
#[derive(Clone, Debug)]
pub struct Codelet {
    pub spec: CodeletSpec,
    /// Simplified dag with its nodes stored in schedule order.
    pub dag: Dag,
}

impl Codelet {
    pub fn ops(&self) -> OpCount {
        op_count(&self.dag)
    }
}

/// Runs all generator phases for `spec`.
pub fn generate(spec: &CodeletSpec) -> Result<Codelet, GenError> {
    let raw = create_dag(spec)?;
    let simple = simplify(&raw);
    let order = schedule(&simple)?;
    Ok(Codelet {
        spec: *spec,
        dag: simple.reordered(order.as_slice()),
    })
}

/// Generates `n` with every applicable algorithm and keeps the cheapest.
/// Ties go to the earlier algorithm in [`Algorithm::ALL`].
pub fn generate_best(n: usize, kind: CodeletKind, sign: i32) -> Result<Codelet, GenError> {
    let mut best: Option<Codelet> = None;
    for alg in Algorithm::ALL {
        let spec = CodeletSpec {
            kind,
            n,
            algorithm: alg,
            sign,
        };
        let Ok(c) = generate(&spec) else { continue };
        if best.as_ref().is_none_or(|b| c.ops().total() < b.ops().total()) {
            best = Some(c);
        }
    }
    best.ok_or(GenError::Inapplicable {
        alg: Algorithm::Ct,
        n,
    })
}

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub(crate) fn smallest_factor(n: usize) -> usize {
    (2..).take_while(|d| d * d <= n).find(|d| n % d == 0).unwrap_or(n)
}
