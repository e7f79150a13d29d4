//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building or evaluating a series.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Polynomial arithmetic overflowed into NaN or infinity.
    #[error("{op} produced a non-finite coefficient")]
    NonFiniteCoefficient { op: &'static str },

    /// A scalar argument was NaN or infinite.
    #[error("{what} must be finite, got {value}")]
    NonFiniteValue { what: &'static str, value: f64 },

    /// `green_eval` was asked for a point outside `[0,1] x [0,1]`.
    #[error("point ({x}, {s}) lies outside the unit square")]
    OutsideUnitSquare { x: f64, s: f64 },

    /// Built-in problem id other than 1..=4.
    #[error("unknown built-in example {0}; valid ids are 1, 2, 3, 4")]
    UnknownExample(u32),

    /// A problem description violates one of its structural invariants.
    #[error("invalid problem: field `{field}`: {reason}")]
    InvalidProblem { field: &'static str, reason: String },

    /// The series produced a nonlocal scalar p for which p^gamma is not a
    /// positive real. Carries the offending value and, when raised from a
    /// recursion, the stage that produced it.
    #[error("nonlocal coefficient p = {p} is outside the domain of p^{gamma}{}", stage_suffix(.stage))]
    NonpositiveNonlocalCoefficient {
        p: f64,
        gamma: f64,
        stage: Option<usize>,
    },

    /// An initial-guess override does not match the boundary data.
    #[error(
        "initial guess evaluates to ({got_left}, {got_right}) at the boundary, expected ({want_left}, {want_right})"
    )]
    GuessBoundaryMismatch {
        got_left: f64,
        got_right: f64,
        want_left: f64,
        want_right: f64,
    },

    /// Stage index past the end of a series.
    #[error("stage {index} out of range; the series has stages 0..={max}")]
    StageOutOfRange { index: usize, max: usize },

    /// `chi` is defined for k >= 1 only.
    #[error("deformation stage index must be >= 1, got {0}")]
    StageIndexZero(usize),

    /// The convergence-control parameter may not vanish.
    #[error("convergence-control parameter c0 must be nonzero")]
    ZeroControlParameter,

    /// A `SolverConfig` field is outside its documented domain.
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    /// Every sample of the coarse c0 scan failed to evaluate.
    #[error("residual optimization infeasible: no c0 in [{lo}, {hi}] admits a valid series")]
    OptimizationInfeasible { lo: f64, hi: f64 },

    /// The residual minimum still sits on the boundary of the widened bracket.
    #[error("residual minimum lies at the edge of the widened bracket [{lo}, {hi}]")]
    MinimizerAtBracketEdge { lo: f64, hi: f64 },

    /// Problem-config file errors (missing fields, bad syntax, ...).
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl Error {
    /// Attach a stage index to a nonlocal-coefficient error raised while
    /// evaluating alpha outside a recursion.
    pub(crate) fn with_stage(self, k: usize) -> Self {
        match self {
            Error::NonpositiveNonlocalCoefficient { p, gamma, .. } => {
                Error::NonpositiveNonlocalCoefficient {
                    p,
                    gamma,
                    stage: Some(k),
                }
            }
            other => other,
        }
    }
}

fn stage_suffix(stage: &Option<usize>) -> String {
    match stage {
        Some(k) => format!(" (raised at stage {k})"),
        None => String::new(),
    }
}

/// Errors from the `key=value` problem-config grammar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`, got {text:?}")]
    Malformed { line: usize, text: String },

    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },

    #[error("line {line}: invalid value for `{key}`: {reason}")]
    InvalidValue {
        line: usize,
        key: &'static str,
        reason: String,
    },

    #[error("missing required field `{0}`")]
    MissingField(&'static str),

    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },

    #[error("sample file {path}, line {line}: {reason}")]
    SampleFile {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}
