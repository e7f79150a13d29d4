//! Series solutions of nonlocal elliptic two-point boundary value problems.
//!
//! `greenham` solves problems of the form
//!
//! ```text
//! α(p)·y''(x) = h(x) + λ·y^m(x),   x ∈ (0,1),
//! y(0) = a,  y(1) = b,             p = ∫₀¹ y(s) ds,
//! ```
//!
//! where the diffusion coefficient `α(p) = p^γ` depends on the integral of
//! the unknown over the whole domain — the problem is *nonlocal*. The solver
//!
//! 1. rewrites the problem as an integral equation through the Green's
//!    function of `y''` with zero Dirichlet data ([`kernel`]),
//! 2. expands the solution in a homotopy series whose stages are generated
//!    by an explicit recursion ([`homotopy`]), and
//! 3. tunes the free convergence-control parameter `c₀` by minimizing the
//!    discrete equation residual ([`residual`]).
//!
//! Setting `c₀ = -1` recovers the Adomian decomposition series; the
//! optimized `c₀` is what puts the "optimal" in optimal homotopy analysis.
//! Everything is exact-in-x polynomial arithmetic ([`poly`]): the only
//! sources of error are the series truncation and `f64` rounding, which is
//! why the linear benchmark solves to machine precision at order 2.
//!
//! # Quick start
//!
//! ```
//! use greenham::{builtin, homotopy, residual, SolverConfig};
//!
//! // the linear benchmark: p^{1/3} y'' = (6/∛4)x, y(0) = 0, y(1) = 1
//! let spec = builtin(1).unwrap();
//! let config = SolverConfig::default(); // order 2, frozen reading, M = 100
//!
//! // pick c0 by residual minimization, then build the series with it
//! let (c0, report) = residual::optimize_c0(&spec, &config).unwrap();
//! let series = homotopy::build_series(&spec, &config, c0).unwrap();
//! let phi = series.partial_sum(2).unwrap();
//!
//! // the optimized order-2 sum is the exact solution x^3
//! assert!(report.e_n < 1e-18);
//! assert!((phi.eval(0.5) - 0.125).abs() < 1e-10);
//! ```
//!
//! The four benchmark problems are built in ([`builtin`]); arbitrary
//! problems of the same class come from a small config format
//! ([`problem::parse_problem`]) or [`ProblemSpec::new`]. The `greenham`
//! binary exposes the same pipeline as `solve`, `sweep`, `residual` and
//! `diagnose` subcommands, and `greenham-report` regenerates the comparison
//! against the published benchmark tables ([`reference`]).
//!
//! The mdbook under `book/` walks through the method chapter by chapter;
//! its code snippets compile and run as doctests of this crate.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod homotopy;
pub mod kernel;
pub mod poly;
pub mod problem;
pub mod reference;
pub mod residual;

pub use analysis::{result_table, ConvergenceReport, Diagnostics, ResultTable};
pub use error::{ConfigError, Error, Result};
pub use homotopy::{build_series, HomotopySeries, PStrategy};
pub use poly::Polynomial;
pub use problem::{builtin, parse_problem, ExactSolution, ProblemSpec};
pub use residual::{optimize_c0, C0Mode, ResidualReport, SolverConfig};

// Keep the book's code snippets honest: every fenced Rust block in the
// chapters runs under `cargo test --doc`.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(problem_class, "../../../book/src/problem-class.md");
    chapter!(
        green_reformulation,
        "../../../book/src/green-reformulation.md"
    );
    chapter!(homotopy_series, "../../../book/src/homotopy-series.md");
    chapter!(
        convergence_control,
        "../../../book/src/convergence-control.md"
    );
    chapter!(diagnostics, "../../../book/src/diagnostics.md");
    chapter!(cli, "../../../book/src/cli.md");
    chapter!(
        reference_comparison,
        "../../../book/src/reference-comparison.md"
    );
}
