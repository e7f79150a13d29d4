//! Convergence diagnostics and exact-vs-computed error tables.
//!
//! The series converges whenever the stage norms eventually contract:
//! `‖y_{k+1}‖ ≤ δ‖y_k‖` with `δ < 1` from some onset `k₀`. The diagnostics
//! measure the observed ratios on a uniform grid, locate the onset, and —
//! when contraction is observed — evaluate the a-posteriori tail bound
//!
//! ```text
//! |y(x) - φ_m(x)| ≤ δ^{m-k₀+1}/(1-δ) · ‖y_{k₀}‖.
//! ```
//!
//! The ratios are *sampled*, not proven, so a run whose actual error exceeds
//! the bound is flagged rather than trusted; see
//! [`Diagnostics::bound_respected`].

use crate::error::{Error, Result};
use crate::homotopy::{build_series, HomotopySeries, PStrategy};
use crate::problem::ProblemSpec;
use crate::residual::{optimize_c0, SolverConfig};

/// Observed stage-norm ratios and the tail bound they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `deltas[k] = ‖y_{k+1}‖/‖y_k‖`; `None` where `‖y_k‖ = 0` (skipped).
    pub deltas: Vec<Option<f64>>,
    /// Smallest index from which every observed ratio stays below 1, when
    /// one exists.
    pub k0: Option<usize>,
    /// Largest observed ratio from `k0` on (over all stages when no valid
    /// `k0` exists); `None` when no ratio is defined at all.
    pub delta_max: Option<f64>,
    /// `δ_max^{m-k₀+1}/(1-δ_max)·‖y_{k₀}‖` for `m` = series order; present
    /// iff `k0` was found and the observed ratios contract.
    pub bound: Option<f64>,
}

/// Measures `‖y_{k+1}‖/‖y_k‖` with max-norms sampled on `norm_grid` points.
pub fn measure_deltas(series: &HomotopySeries, norm_grid: usize) -> ConvergenceReport {
    let norms: Vec<f64> = series
        .stages
        .iter()
        .map(|s| s.y.max_abs_on_grid(norm_grid))
        .collect();
    let deltas: Vec<Option<f64>> = norms
        .windows(2)
        .map(|w| (w[0] != 0.0).then(|| w[1] / w[0]))
        .collect();

    let last_bad = deltas
        .iter()
        .enumerate()
        .filter_map(|(k, d)| match d {
            Some(v) if *v >= 1.0 => Some(k),
            _ => None,
        })
        .next_back();
    let candidate_k0 = last_bad.map_or(0, |k| k + 1);
    let last_defined = deltas
        .iter()
        .enumerate()
        .filter_map(|(k, d)| d.map(|_| k))
        .next_back();

    // a k0 past every observed ratio has no evidence behind it
    let k0 = match (candidate_k0, last_defined) {
        (0, _) => Some(0),
        (k, Some(last)) if k <= last => Some(k),
        _ => None,
    };

    let max_from = |start: usize| {
        deltas
            .iter()
            .skip(start)
            .flatten()
            .copied()
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |m| d.max(m)))
            })
    };
    let delta_max = match k0 {
        Some(k) => max_from(k),
        None => max_from(0),
    };

    let bound = match (k0, delta_max) {
        (Some(k), Some(d)) if d < 1.0 => {
            let m = series.order();
            Some(d.powi((m - k + 1) as i32) / (1.0 - d) * norms[k])
        }
        _ => None,
    };

    ConvergenceReport {
        deltas,
        k0,
        delta_max,
        bound,
    }
}

/// The tail bound for a truncation at order `m`, given `‖y_{k₀}‖`.
/// Returns `None` when the report shows no contraction or `k0 > m`.
pub fn error_bound(report: &ConvergenceReport, m: usize, norm_yk0: f64) -> Option<f64> {
    let k0 = report.k0?;
    let delta = report.delta_max?;
    if delta >= 1.0 || k0 > m {
        return None;
    }
    Some(delta.powi((m - k0 + 1) as i32) / (1.0 - delta) * norm_yk0)
}

/// One row of an exact/ADM/OHAM comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub x: f64,
    pub exact: Option<f64>,
    pub adm: f64,
    pub oham: f64,
    pub err_adm: Option<f64>,
    pub err_oham: Option<f64>,
}

/// Provenance of a [`ResultTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    /// Problem source as shown to the user (`example N` or a config path).
    pub source: String,
    pub order: usize,
    pub c0_adm: f64,
    pub c0_oham: f64,
    pub strategy: PStrategy,
    pub m_points: usize,
}

/// Side-by-side evaluation of the decomposition series (`c₀ = -1`) and the
/// optimized series on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<TableRow>,
    pub meta: TableMeta,
}

/// Builds both series at the same order and reading — the plain
/// decomposition at `c₀ = -1` and the series at the configured `c₀`
/// (optimized or fixed) — and tabulates them against the exact solution.
pub fn result_table(
    spec: &ProblemSpec,
    config: &SolverConfig,
    grid: &[f64],
) -> Result<ResultTable> {
    config.validate()?;
    if let Some(&x) = grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidConfig(format!(
            "grid point {x} outside [0,1]"
        )));
    }
    let (c0_oham, _) = optimize_c0(spec, config)?;
    let oham_series = build_series(spec, config, c0_oham)?;
    let adm_series = build_series(spec, config, -1.0)?;
    let phi_oham = oham_series.partial_sum(config.order)?;
    let phi_adm = adm_series.partial_sum(config.order)?;

    let mut xs = grid.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rows = xs
        .into_iter()
        .map(|x| {
            let exact = spec.exact_eval(x);
            let adm = phi_adm.eval(x);
            let oham = phi_oham.eval(x);
            TableRow {
                x,
                exact,
                adm,
                oham,
                err_adm: exact.map(|y| (y - adm).abs()),
                err_oham: exact.map(|y| (y - oham).abs()),
            }
        })
        .collect();
    Ok(ResultTable {
        rows,
        meta: TableMeta {
            source: "custom".to_string(),
            order: config.order,
            c0_adm: -1.0,
            c0_oham,
            strategy: config.p_strategy,
            m_points: config.residual_points,
        },
    })
}

/// Everything `diagnose` reports for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// The control parameter actually used.
    pub c0: f64,
    pub convergence: ConvergenceReport,
    /// Max-grid error of the partial sum against the exact solution, when
    /// one is known.
    pub observed_max_err: Option<f64>,
    /// Whether the observed error respects the tail bound (within a 1e-6
    /// relative cushion). `None` without both a bound and an exact solution.
    /// `Some(false)` flags a run whose sampled ratios understated the tail.
    pub bound_respected: Option<bool>,
}

/// Resolves `c₀` per the configuration, builds the series, measures the
/// ratios and checks the bound against the observed error.
pub fn convergence_diagnostics(spec: &ProblemSpec, config: &SolverConfig) -> Result<Diagnostics> {
    config.validate()?;
    let (c0, _) = optimize_c0(spec, config)?;
    let series = build_series(spec, config, c0)?;
    let convergence = measure_deltas(&series, config.norm_grid);
    let phi = series.partial_sum(config.order)?;

    let observed_max_err = spec.exact.as_ref().map(|_| {
        let n = (config.norm_grid - 1) as f64;
        (0..config.norm_grid)
            .map(|i| {
                let x = i as f64 / n;
                (spec.exact_eval(x).unwrap() - phi.eval(x)).abs()
            })
            .fold(0.0, f64::max)
    });
    let bound_respected = match (convergence.bound, observed_max_err) {
        (Some(bound), Some(err)) => Some(err <= bound * (1.0 + 1e-6)),
        _ => None,
    };
    Ok(Diagnostics {
        c0,
        convergence,
        observed_max_err,
        bound_respected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::SeriesStage;
    use crate::poly::Polynomial;
    use crate::problem::builtin;
    use crate::residual::C0Mode;

    fn series_from_terms(terms: Vec<Polynomial>) -> HomotopySeries {
        HomotopySeries {
            problem: builtin(1).unwrap(),
            c0: -1.0,
            strategy: PStrategy::Frozen,
            stages: terms
                .into_iter()
                .enumerate()
                .map(|(k, y)| SeriesStage {
                    k,
                    y,
                    h_prev: None,
                    p_prev: None,
                    alpha_prev: None,
                })
                .collect(),
        }
    }

    #[test]
    fn decomposition_stalls_on_the_linear_problem() {
        // y2 = y1 exactly at c0 = -1, so the ratio is 1 and no onset exists
        let spec = builtin(1).unwrap();
        let series = build_series(&spec, &SolverConfig::default(), -1.0).unwrap();
        let report = measure_deltas(&series, 201);
        assert_eq!(report.deltas.len(), 2);
        assert_eq!(report.deltas[1], Some(1.0));
        assert_eq!(report.k0, None);
        assert_eq!(report.bound, None);
    }

    #[test]
    fn immediately_converged_series() {
        let x = Polynomial::linear(0.0, 1.0).unwrap();
        let series = series_from_terms(vec![x, Polynomial::zero(), Polynomial::zero()]);
        let report = measure_deltas(&series, 101);
        assert_eq!(report.deltas, vec![Some(0.0), None]);
        assert_eq!(report.k0, Some(0));
        assert_eq!(report.delta_max, Some(0.0));
        assert_eq!(report.bound, Some(0.0));
    }

    #[test]
    fn contracting_run_reports_all_ratios_below_one() {
        let spec = builtin(2).unwrap();
        let config = SolverConfig {
            order: 4,
            ..SolverConfig::default()
        };
        let diag = convergence_diagnostics(&spec, &config).unwrap();
        let report = &diag.convergence;
        assert_eq!(report.deltas.len(), 4);
        for d in report.deltas.iter().flatten() {
            assert!(*d < 1.0, "ratio {d} not below 1");
        }
        assert_eq!(report.k0, Some(0));
        assert!(report.bound.is_some());
    }

    #[test]
    fn error_bound_formula() {
        let report = ConvergenceReport {
            deltas: vec![Some(0.5)],
            k0: Some(0),
            delta_max: Some(0.5),
            bound: None,
        };
        let b = error_bound(&report, 2, 1.0).unwrap();
        assert!((b - 0.25).abs() < 1e-15);

        let diverging = ConvergenceReport {
            deltas: vec![Some(1.2)],
            k0: Some(0),
            delta_max: Some(1.2),
            bound: None,
        };
        assert_eq!(error_bound(&diverging, 2, 1.0), None);

        let late = ConvergenceReport {
            deltas: vec![Some(2.0), Some(0.1)],
            k0: Some(1),
            delta_max: Some(0.1),
            bound: None,
        };
        let b = error_bound(&late, 1, 0.3).unwrap();
        assert!((b - 0.1 / 0.9 * 0.3).abs() < 1e-15);
        // k0 beyond the truncation order gives nothing
        assert_eq!(error_bound(&late, 0, 0.3), None);
    }

    #[test]
    fn table_reproduces_the_machine_precision_example() {
        let spec = builtin(1).unwrap();
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let table = result_table(&spec, &SolverConfig::default(), &grid).unwrap();
        let max_err = table
            .rows
            .iter()
            .filter_map(|r| r.err_oham)
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-10, "max OHAM error {max_err}");
        assert_eq!(table.meta.c0_adm, -1.0);
        assert!((table.meta.c0_oham + 0.504973).abs() < 1e-4);
    }

    #[test]
    fn boundary_rows_are_exact() {
        let spec = builtin(2).unwrap();
        let grid = [1.0, 0.0, 0.5];
        let table = result_table(&spec, &SolverConfig::default(), &grid).unwrap();
        // rows come back sorted
        assert_eq!(table.rows[0].x, 0.0);
        assert_eq!(table.rows[2].x, 1.0);
        assert_eq!(table.rows[0].err_adm, Some(0.0));
        assert_eq!(table.rows[0].err_oham, Some(0.0));
    }

    #[test]
    fn fixed_negative_one_makes_both_columns_identical() {
        let spec = builtin(4).unwrap();
        let config = SolverConfig {
            c0_mode: C0Mode::Fixed(-1.0),
            ..SolverConfig::default()
        };
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let table = result_table(&spec, &config, &grid).unwrap();
        for row in &table.rows {
            assert_eq!(row.adm, row.oham);
            assert_eq!(row.err_adm, row.err_oham);
        }
    }

    #[test]
    fn err_columns_recompute_from_value_columns() {
        let spec = builtin(3).unwrap();
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let table = result_table(&spec, &SolverConfig::default(), &grid).unwrap();
        for row in &table.rows {
            let y = row.exact.unwrap();
            assert_eq!(row.err_adm, Some((y - row.adm).abs()));
            assert_eq!(row.err_oham, Some((y - row.oham).abs()));
        }
    }

    #[test]
    fn rejects_grid_outside_unit_interval() {
        let spec = builtin(1).unwrap();
        let err = result_table(&spec, &SolverConfig::default(), &[0.0, 1.5]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn sampled_bound_can_understate_the_tail() {
        // a single observed ratio says nothing about later stages: at order 1
        // the bound trusts delta_0 alone and the actual error exceeds it
        let spec = builtin(1).unwrap();
        let root = (-3.0 + (9.0 - 4.0 * 2f64.cbrt()).sqrt()) / 2.0;
        let config = SolverConfig {
            order: 1,
            c0_mode: C0Mode::Fixed(root),
            ..SolverConfig::default()
        };
        let diag = convergence_diagnostics(&spec, &config).unwrap();
        assert_eq!(diag.bound_respected, Some(false));
    }

    #[test]
    fn honest_bound_on_a_contracting_run() {
        let spec = builtin(2).unwrap();
        let config = SolverConfig {
            c0_mode: C0Mode::Fixed(-1.0),
            order: 4,
            ..SolverConfig::default()
        };
        let diag = convergence_diagnostics(&spec, &config).unwrap();
        assert_eq!(diag.bound_respected, Some(true));
    }
}
