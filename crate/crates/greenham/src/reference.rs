//! Published reference results for the four benchmark problems, and the
//! machinery that compares this crate's output against them.
//!
//! The published recursion leaves the reading of the nonlocal scalar
//! ambiguous (see the [`homotopy`](crate::homotopy) module docs), and no
//! reading implemented here reproduces the published decomposition columns
//! exactly. Rather than tuning to the tables, the crate ships the published
//! values verbatim and generates a comparison report under all three
//! readings; `greenham-report` regenerates it.

// the tables reproduce published digits verbatim, including 0.707106781
#![allow(clippy::approx_constant)]

use std::fmt::Write as _;

use crate::analysis::measure_deltas;
use crate::error::Result;
use crate::homotopy::{build_series, PStrategy};
use crate::problem::builtin;
use crate::residual::{optimize_c0, SolverConfig};

/// One row of a published benchmark table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub x: f64,
    /// Exact solution.
    pub exact: f64,
    /// Published order-2 decomposition value (`c₀ = -1`).
    pub adm: f64,
    /// Published order-2 optimized value (at [`ReferenceTable::reported_c0`]).
    pub oham: f64,
}

/// A published benchmark table: reported optimal `c₀` plus the tabulated
/// columns on the grid `0.0, 0.1, ..., 1.0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceTable {
    pub example: u32,
    pub reported_c0: f64,
    pub rows: &'static [ReferenceRow],
}

macro_rules! rows {
    ($(($x:expr, $exact:expr, $adm:expr, $oham:expr)),+ $(,)?) => {
        &[$(ReferenceRow { x: $x, exact: $exact, adm: $adm, oham: $oham }),+]
    };
}

/// Published results for the linear benchmark (exact solution `x^3`).
pub const TABLE_1: ReferenceTable = ReferenceTable {
    example: 1,
    reported_c0: -0.505595,
    rows: rows![
        (0.0, 0.000, 0.0000000000, 0.000),
        (0.1, 0.001, -0.062559671, 0.001),
        (0.2, 0.008, -0.115267240, 0.008),
        (0.3, 0.027, -0.148270607, 0.027),
        (0.4, 0.064, -0.151717670, 0.064),
        (0.5, 0.125, -0.115756328, 0.125),
        (0.6, 0.216, -0.030534480, 0.216),
        (0.7, 0.343, 0.1137999760, 0.343),
        (0.8, 0.512, 0.3270991400, 0.512),
        (0.9, 0.729, 0.6192151140, 0.729),
        (1.0, 1.000, 1.0000000000, 1.000),
    ],
};

/// Published results for the quintic problem with `α(p) = 1/p`.
pub const TABLE_2: ReferenceTable = ReferenceTable {
    example: 2,
    reported_c0: -0.819014,
    rows: rows![
        (0.0, 1.000000000, 1.000000000, 1.000000000),
        (0.1, 0.953462589, 0.954516555, 0.953715758),
        (0.2, 0.912870929, 0.914909713, 0.913348055),
        (0.3, 0.877058019, 0.879819116, 0.877702187),
        (0.4, 0.845154255, 0.848286083, 0.845886767),
        (0.5, 0.816496581, 0.819638873, 0.817233417),
        (0.6, 0.790569415, 0.793406404, 0.791235825),
        (0.7, 0.766964989, 0.769254375, 0.767504100),
        (0.8, 0.745355992, 0.746938889, 0.745731089),
        (0.9, 0.725476250, 0.726273545, 0.725667948),
        (1.0, 0.707106781, 0.707106781, 0.707106781),
    ],
};

/// Published results for the quintic problem with `α(p) = p`.
pub const TABLE_3: ReferenceTable = ReferenceTable {
    example: 3,
    reported_c0: -0.933697,
    rows: rows![
        (0.0, 1.000000000, 1.000000000, 1.000000000),
        (0.1, 0.953462589, 0.954139200, 0.953840089),
        (0.2, 0.912870929, 0.914044009, 0.913485384),
        (0.3, 0.877058019, 0.878552757, 0.877813154),
        (0.4, 0.845154255, 0.846797874, 0.845969674),
        (0.5, 0.816496581, 0.818128147, 0.817301384),
        (0.6, 0.790569415, 0.792049712, 0.791302438),
        (0.7, 0.766964989, 0.768181846, 0.767575192),
        (0.8, 0.745355992, 0.746224331, 0.745800843),
        (0.9, 0.725476250, 0.725933776, 0.725717917),
        (1.0, 0.707106781, 0.707106781, 0.707106781),
    ],
};

/// Published results for the cubic problem with `α(p) = (1/p)^2`.
pub const TABLE_4: ReferenceTable = ReferenceTable {
    example: 4,
    reported_c0: -0.612671,
    rows: rows![
        (0.0, 1.000000000, 1.000000000, 1.000000000),
        (0.1, 0.909090909, 0.914550054, 0.908713383),
        (0.2, 0.833333333, 0.844849352, 0.832746652),
        (0.3, 0.769230769, 0.785573674, 0.768603045),
        (0.4, 0.714285714, 0.733317575, 0.713705107),
        (0.5, 0.666666667, 0.686029523, 0.666157571),
        (0.6, 0.625000000, 0.642573190, 0.624561470),
        (0.7, 0.588235294, 0.602393994, 0.587870965),
        (0.8, 0.555555556, 0.565272431, 0.555285414),
        (0.9, 0.526315789, 0.531148042, 0.526170109),
        (1.0, 0.500000000, 0.500000000, 0.500000000),
    ],
};

/// All four published tables, indexed by example id.
pub const REFERENCE_TABLES: [&ReferenceTable; 4] = [&TABLE_1, &TABLE_2, &TABLE_3, &TABLE_4];

/// Generates the reference-comparison report (markdown): for every benchmark
/// and every reading of the nonlocal scalar, the optimized `c₀`, the residual
/// and error it achieves, and the deviation of this crate's columns from the
/// published ones. Deterministic; `greenham-report` prints it.
pub fn comparison_report() -> Result<String> {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "# Reference comparison");
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "The four built-in problems come with published order-2 reference tables: an \
         optimized-series column, a decomposition column (`c0 = -1`), and a reported optimal \
         `c0` for each. The recursion that produced those tables does not pin down how the \
         nonlocal scalar `p` is read off the embedded series, so this crate implements the \
         three defensible readings (`frozen`, `partial-sum`, `expansion`) and compares all of \
         them here instead of tuning to the tables. Everything below is regenerated by \
         `greenham-report`; nothing in the test suite asserts agreement with the published \
         columns beyond what this page documents."
    );
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "Layout per problem and reading (order 2, M = 100, grid 0.0(0.1)1.0):"
    );
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "- `c0*`: the residual-minimizing parameter found by this crate,"
    );
    let _ = writeln!(w, "  next to the published `c0`.");
    let _ = writeln!(w, "- `E(c0*)`: the discrete residual at `c0*`.");
    let _ = writeln!(
        w,
        "- `max err`: max-grid error of our optimized series vs the exact solution,"
    );
    let _ = writeln!(
        w,
        "  next to the same figure recomputed from the published column."
    );
    let _ = writeln!(
        w,
        "- `adm dev`: largest gap between our `c0 = -1` column and the published one."
    );
    let _ = writeln!(
        w,
        "- `oham dev`: largest gap between our series *at the published `c0`* and the"
    );
    let _ = writeln!(w, "  published optimized column.");
    let _ = writeln!(w);

    for table in REFERENCE_TABLES {
        let published_max_err = table
            .rows
            .iter()
            .map(|r| (r.exact - r.oham).abs())
            .fold(0.0, f64::max);
        let published_adm_err = table
            .rows
            .iter()
            .map(|r| (r.exact - r.adm).abs())
            .fold(0.0, f64::max);
        let _ = writeln!(w, "## Example {}", table.example);
        let _ = writeln!(w);
        let _ = writeln!(
            w,
            "Published: `c0 = {}`, max published error {:.3e} (optimized) / {:.3e} (decomposition).",
            table.reported_c0, published_max_err, published_adm_err
        );
        let _ = writeln!(w);
        let _ = writeln!(
            w,
            "| reading | c0* | E(c0*) | max err | adm dev | oham dev |"
        );
        let _ = writeln!(
            w,
            "|---------|-----|--------|---------|---------|----------|"
        );
        for strategy in PStrategy::ALL {
            let config = SolverConfig {
                p_strategy: strategy,
                ..SolverConfig::default()
            };
            let row = match compare_one(table, &config) {
                Ok(c) => format!(
                    "| {} | {:.6} | {:.3e} | {:.3e} | {:.3e} | {:.3e} |",
                    strategy, c.c0_opt, c.e_opt, c.max_err, c.adm_dev, c.oham_dev
                ),
                Err(e) => format!("| {strategy} | (failed: {e}) | | | | |"),
            };
            let _ = writeln!(w, "{row}");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "## Observations");
    let _ = writeln!(w);
    summarize(w)?;
    Ok(out)
}

struct Comparison {
    c0_opt: f64,
    e_opt: f64,
    max_err: f64,
    adm_dev: f64,
    oham_dev: f64,
}

fn compare_one(table: &ReferenceTable, config: &SolverConfig) -> Result<Comparison> {
    let spec = builtin(table.example)?;
    let (c0_opt, report) = optimize_c0(&spec, config)?;
    let phi_opt = build_series(&spec, config, c0_opt)?.partial_sum(config.order)?;
    let phi_adm = build_series(&spec, config, -1.0)?.partial_sum(config.order)?;
    let phi_at_published =
        build_series(&spec, config, table.reported_c0)?.partial_sum(config.order)?;

    let mut max_err = 0.0f64;
    let mut adm_dev = 0.0f64;
    let mut oham_dev = 0.0f64;
    for r in table.rows {
        max_err = max_err.max((spec.exact_eval(r.x).unwrap() - phi_opt.eval(r.x)).abs());
        adm_dev = adm_dev.max((phi_adm.eval(r.x) - r.adm).abs());
        oham_dev = oham_dev.max((phi_at_published.eval(r.x) - r.oham).abs());
    }
    Ok(Comparison {
        c0_opt,
        e_opt: report.e_n,
        max_err,
        adm_dev,
        oham_dev,
    })
}

fn summarize(w: &mut String) -> Result<()> {
    // headline facts the tests also rely on, spelled out with live numbers
    let spec1 = builtin(1)?;
    let frozen = SolverConfig::default();
    let (c0, _) = optimize_c0(&spec1, &frozen)?;
    let psi_frozen = build_series(&spec1, &frozen, -1.0)?.partial_sum(2)?;
    let partial = SolverConfig {
        p_strategy: PStrategy::PartialSum,
        ..SolverConfig::default()
    };
    let psi_partial = build_series(&spec1, &partial, -1.0)?.partial_sum(2)?;

    let _ = writeln!(
        w,
        "- Example 1 is exactly solvable at order 2: under the `frozen` reading the \
         residual vanishes at the root of `c0^2 + 3 c0 + 2^(1/3) = 0`, i.e. \
         `c0* = {:.6}`, and the optimized series is `x^3` to machine precision. The \
         published `c0 = -0.505595` agrees to three decimals.",
        c0
    );
    let _ = writeln!(
        w,
        "- No reading reproduces the published decomposition column of example 1: at \
         `x = 0.1` the published value is {:.9}, while `frozen` gives {:.9} and \
         `partial-sum` gives {:.9}. The crate reports its own values and records the gap \
         here rather than fitting to the table.",
        TABLE_1.rows[1].adm,
        psi_frozen.eval(0.1),
        psi_partial.eval(0.1),
    );
    let _ = writeln!(
        w,
        "- For examples 2-4 every reading lands the optimized error within an order of \
         magnitude of the published one and beats its own decomposition column, which is \
         the substantive claim the tables support."
    );
    let _ = writeln!(
        w,
        "- The published order-2 coefficients of example 2 (`1 - 0.4973x + 0.3737x^2 - ...`) \
         are matched by the `frozen` reading to about 5e-3 per coefficient at the published \
         `c0`; the residual optimum itself sits elsewhere (see the table above), so \
         coefficient-level agreement is treated as soft evidence only."
    );
    let _ = writeln!(
        w,
        "- The readings pull in different directions: the reported `c0` of example 1 is the \
         `frozen` optimum to three decimals, while the published optimized *columns* of \
         examples 2 and 3 sit closest to the `expansion` series evaluated at the published \
         `c0` (deviations near 1e-4, an order below the other readings). No single reading \
         explains all four tables, which is why all three stay selectable."
    );

    // convergence-ratio side note: the decomposition point stalls on example 1
    let series = build_series(&spec1, &frozen, -1.0)?;
    let deltas = measure_deltas(&series, frozen.norm_grid);
    if deltas.k0.is_none() {
        let _ = writeln!(
            w,
            "- At `c0 = -1` the linear benchmark does not contract (consecutive stages repeat, \
             ratio 1), so the tail bound is unavailable there; the optimized runs do contract."
        );
    }
    Ok(())
}
