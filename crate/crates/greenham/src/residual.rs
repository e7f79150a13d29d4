//! Equation residual and convergence-control parameter selection.
//!
//! For a candidate solution `φ` the residual operator measures how far `φ`
//! is from satisfying the integral reformulation:
//!
//! ```text
//! N[φ](x) = φ(x) - [a + (b-a)x] - α(p[φ])⁻¹ · ∫₀¹ G(x,s)·(h + λ φ^m)(s) ds
//! ```
//!
//! with the *full* nonlocal scalar `p[φ] = ∫₀¹ φ`, independent of whatever
//! reading the recursion used internally — the optimizer must target the true
//! equation. Averaging `N²` over the grid `x_k = k/M` gives the discrete
//! residual `E_n(c₀)`, and [`optimize_c0`] minimizes it over `c₀ < 0` by a
//! coarse scan plus golden-section refinement of every bracketed minimum.
//!
//! ```
//! use greenham::{builtin, residual, SolverConfig};
//!
//! let spec = builtin(1).unwrap();
//! let config = SolverConfig::default();
//! let (c0, report) = residual::optimize_c0(&spec, &config).unwrap();
//! // the optimum annihilates the order-2 residual for this problem
//! assert!((c0 + 0.504973).abs() < 1e-4);
//! assert!(report.e_n < 1e-18);
//! ```

use crate::error::{Error, Result};
use crate::homotopy::{build_series, PStrategy};
use crate::kernel::apply_green;
use crate::poly::Polynomial;
use crate::problem::ProblemSpec;

/// Default scan bracket for the control parameter.
pub const DEFAULT_BRACKET: (f64, f64) = (-1.95, -0.05);
/// Fallback bracket when the minimum sits on the edge of the first scan.
pub const WIDE_BRACKET: (f64, f64) = (-4.0, -0.01);
/// Number of equispaced coarse-scan samples.
pub const SCAN_SAMPLES: usize = 39;

/// How the control parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C0Mode {
    /// Use this value as-is.
    Fixed(f64),
    /// Minimize the discrete residual over the configured bracket.
    Optimize,
}

/// Solver settings shared by the recursion, the optimizer and the
/// diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Series order `n` (number of correction stages); >= 1.
    pub order: usize,
    pub c0_mode: C0Mode,
    pub p_strategy: PStrategy,
    /// Number of residual grid points `M` (grid `x_k = k/M`); >= 2.
    pub residual_points: usize,
    /// Scan interval for the optimizer; negative and nondegenerate.
    pub bracket: (f64, f64),
    /// Golden-section termination: refine until the bracket is this small.
    pub opt_tol: f64,
    /// Grid size for max-norm estimates in the diagnostics; >= 2.
    pub norm_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            order: 2,
            c0_mode: C0Mode::Optimize,
            p_strategy: PStrategy::Frozen,
            residual_points: 100,
            bracket: DEFAULT_BRACKET,
            opt_tol: 1e-11,
            norm_grid: 201,
        }
    }
}

impl SolverConfig {
    /// Checks every field against its documented domain.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.order == 0 {
            return fail("order must be >= 1".into());
        }
        if self.residual_points < 2 {
            return fail(format!(
                "residual grid needs M >= 2, got {} (at M = 1 only the boundary point x = 1 \
                 remains and its residual is identically zero)",
                self.residual_points
            ));
        }
        let (lo, hi) = self.bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi && hi < 0.0) {
            return fail(format!(
                "bracket must satisfy lo < hi < 0, got [{lo}, {hi}]"
            ));
        }
        if !(self.opt_tol.is_finite() && self.opt_tol > 0.0) {
            return fail(format!("opt_tol must be positive, got {}", self.opt_tol));
        }
        if self.norm_grid < 2 {
            return fail(format!(
                "norm grid needs >= 2 points, got {}",
                self.norm_grid
            ));
        }
        if let C0Mode::Fixed(v) = self.c0_mode {
            if !v.is_finite() {
                return fail(format!("fixed c0 must be finite, got {v}"));
            }
            if v == 0.0 {
                return Err(Error::ZeroControlParameter);
            }
        }
        Ok(())
    }
}

/// The discrete residual of one approximate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// The control parameter the series was built with.
    pub c0: f64,
    /// Mean of the squared pointwise residuals.
    pub e_n: f64,
    /// `(x_k, N[φ](x_k))` for `x_k = k/M`, `k = 1..=M`.
    pub pointwise: Vec<(f64, f64)>,
    /// The full nonlocal scalar `∫₀¹ φ` used inside the operator.
    pub p_of_phi: f64,
}

/// Forms `N[φ]` symbolically; returns the residual polynomial and `p[φ]`.
pub fn residual_polynomial(spec: &ProblemSpec, phi: &Polynomial) -> Result<(Polynomial, f64)> {
    let p_phi = phi.integrate01();
    let alpha = spec.alpha(p_phi)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::NonpositiveNonlocalCoefficient {
            p: p_phi,
            gamma: spec.gamma,
            stage: None,
        });
    }
    let integral = apply_green(&spec.rhs_composed(phi)?)?.scale(1.0 / alpha)?;
    let n_poly = phi.sub(&spec.boundary_line())?.sub(&integral)?;
    Ok((n_poly, p_phi))
}

/// Evaluates `N[φ](x)`.
pub fn residual_operator(spec: &ProblemSpec, phi: &Polynomial, x: f64) -> Result<f64> {
    let (n_poly, _) = residual_polynomial(spec, phi)?;
    Ok(n_poly.eval(x))
}

/// Samples `N[φ]` on `x_k = k/M` and averages the squares.
///
/// `c0` is recorded in the report as the parameter `φ` was built with.
/// `m_points = 1` is accepted (the degenerate grid holds only `x = 1`, where
/// the residual vanishes); configurations require `M >= 2` for that reason.
pub fn discrete_residual(
    spec: &ProblemSpec,
    phi: &Polynomial,
    m_points: usize,
    c0: f64,
) -> Result<ResidualReport> {
    assert!(m_points >= 1, "residual grid needs at least one point");
    let (n_poly, p_of_phi) = residual_polynomial(spec, phi)?;
    let m = m_points as f64;
    let pointwise: Vec<(f64, f64)> = (1..=m_points)
        .map(|k| {
            let x = k as f64 / m;
            (x, n_poly.eval(x))
        })
        .collect();
    let e_n = pointwise.iter().map(|(_, r)| r * r).sum::<f64>() / m;
    Ok(ResidualReport {
        c0,
        e_n,
        pointwise,
        p_of_phi,
    })
}

/// Builds the series at `c0` and reports its discrete residual.
pub fn residual_report_at(
    spec: &ProblemSpec,
    config: &SolverConfig,
    c0: f64,
) -> Result<ResidualReport> {
    let series = build_series(spec, config, c0)?;
    let phi = series.partial_sum(config.order)?;
    discrete_residual(spec, &phi, config.residual_points, c0)
}

/// Chooses the control parameter.
///
/// `C0Mode::Fixed` bypasses the search. Otherwise the bracket is scanned at
/// [`SCAN_SAMPLES`] equispaced points (with `-1` snapped into the scan so the
/// plain-decomposition point is always compared), every locally minimal
/// sample is refined by golden section down to `opt_tol`, and the best
/// refined value wins; exact ties go to the smaller `|c₀|`. A minimum on the
/// scan edge widens the bracket once to [`WIDE_BRACKET`] and errors if it
/// stays on the edge. If no sample admits a valid series the optimization is
/// infeasible.
pub fn optimize_c0(spec: &ProblemSpec, config: &SolverConfig) -> Result<(f64, ResidualReport)> {
    config.validate()?;
    if let C0Mode::Fixed(value) = config.c0_mode {
        let report = residual_report_at(spec, config, value)?;
        return Ok((value, report));
    }
    let objective = |c0: f64| residual_report_at(spec, config, c0).ok().map(|r| r.e_n);

    let best = match minimize_on_bracket(&objective, config.bracket, config.opt_tol)? {
        Minimum::Interior(c) => c,
        Minimum::AtEdge => match minimize_on_bracket(&objective, WIDE_BRACKET, config.opt_tol)? {
            Minimum::Interior(c) => c,
            Minimum::AtEdge => {
                return Err(Error::MinimizerAtBracketEdge {
                    lo: WIDE_BRACKET.0,
                    hi: WIDE_BRACKET.1,
                })
            }
        },
    };
    let report = residual_report_at(spec, config, best)?;
    Ok((best, report))
}

enum Minimum {
    Interior(f64),
    AtEdge,
}

/// Candidate ordering: smaller residual first, then smaller |c0|.
fn better(e: f64, c: f64, best_e: f64, best_c: f64) -> bool {
    e < best_e || (e == best_e && c.abs() < best_c.abs())
}

fn minimize_on_bracket(
    objective: &dyn Fn(f64) -> Option<f64>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<Minimum> {
    let (lo, hi) = bracket;
    let n = SCAN_SAMPLES;
    let step = (hi - lo) / (n - 1) as f64;
    let mut samples: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    // keep the decomposition point c0 = -1 in the comparison set exactly
    if lo < -1.0 && -1.0 < hi {
        match samples.iter().position(|c| (c + 1.0).abs() < step * 1e-6) {
            Some(i) => samples[i] = -1.0,
            None => {
                samples.push(-1.0);
                samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
        }
    }

    let values: Vec<Option<f64>> = samples.iter().map(|&c| objective(c)).collect();
    let mut best: Option<(f64, f64)> = None; // (E, c0)
    let mut best_index = 0;
    for (i, (&c, &v)) in samples.iter().zip(&values).enumerate() {
        if let Some(e) = v {
            if best.is_none() || better(e, c, best.unwrap().0, best.unwrap().1) {
                best = Some((e, c));
                best_index = i;
            }
        }
    }
    let Some((mut best_e, mut best_c)) = best else {
        return Err(Error::OptimizationInfeasible { lo, hi });
    };
    if best_index == 0 || best_index == samples.len() - 1 {
        return Ok(Minimum::AtEdge);
    }

    // refine every bracketed local minimum; failed samples count as +inf
    let value_or_inf = |i: usize| values[i].unwrap_or(f64::INFINITY);
    for i in 1..samples.len() - 1 {
        let Some(e) = values[i] else { continue };
        if e <= value_or_inf(i - 1) && e <= value_or_inf(i + 1) {
            let (e_ref, c_ref) = golden_section(objective, samples[i - 1], samples[i + 1], tol);
            if better(e_ref, c_ref, best_e, best_c) {
                best_e = e_ref;
                best_c = c_ref;
            }
        }
    }
    let _ = best_e;
    Ok(Minimum::Interior(best_c))
}

/// Golden-section minimization on `[a, b]`, tracking the best point ever
/// evaluated. Evaluation failures act as +inf.
fn golden_section(
    objective: &dyn Fn(f64) -> Option<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let eval = |c: f64| objective(c).unwrap_or(f64::INFINITY);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let (mut best_e, mut best_c) = if better(f2, x2, f1, x1) {
        (f2, x2)
    } else {
        (f1, x1)
    };
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2);
        }
        for (e, c) in [(f1, x1), (f2, x2)] {
            if better(e, c, best_e, best_c) {
                best_e = e;
                best_c = c;
            }
        }
    }
    (best_e, best_c)
}
