//! A self-optimizing FFT library.
//!
//! A [`DftProblem`] describes a transform over strided data. The
//! [`Planner`] searches the space of [`plan`]s for one that solves it,
//! either by timing candidates or by a cost estimate, and remembers the
//! answer per problem signature (its "wisdom"). Small transforms run
//! straight-line kernels produced at build time by `tunefft-codelet`.

pub mod cache;
pub mod codelets;
pub mod dd;
pub mod oracle;
pub mod plan;
pub mod planner;
pub mod problem;
pub mod selftest;
pub mod twiddle;

pub use num_complex::Complex64;
pub use plan::{Plan, Recipe};
pub use planner::{Mode, Planner, PlannerConfig};
pub use problem::{DftProblem, IoDim, IoTensor, Sign};
pub use twiddle::{TwiddleKind, TwiddleProvider};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("strides alias distinct elements: {0}")]
    Aliasing(String),
    #[error("plan does not apply: {0}")]
    Inapplicable(String),
    #[error("plan was built for `{expected}`, not `{got}`")]
    Mismatch { expected: String, got: String },
    #[error("buffer of length {len} too short, need {need}")]
    Bounds { len: usize, need: usize },
    #[error("malformed plan: {0}")]
    Parse(String),
    #[error("wisdom line {line}: {msg}")]
    Wisdom { line: usize, msg: String },
    #[error("no plan found for `{0}`")]
    NoPlan(String),
    #[error("{0}")]
    Invalid(String),
}
