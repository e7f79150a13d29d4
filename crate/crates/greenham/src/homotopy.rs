//! The homotopy deformation recursion.
//!
//! Starting from the boundary line `y₀ = a + (b-a)x`, each stage applies
//!
//! ```text
//! y_k = χ_k·y_{k-1} + c₀·[ y_{k-1} - (1-χ_k)(a+(b-a)x)
//!                          - α(p_{k-1})⁻¹ · ∫₀¹ G(x,s) H_{k-1}(s) ds ]
//! ```
//!
//! with `χ₁ = 0` and `χ_k = 1` afterwards. `H_k` collects the k-th order
//! contribution of the right-hand side along the series and `p_k` is the
//! nonlocal scalar feeding `α`. The sum of the first `n+1` stages is the
//! order-`n` approximate solution.
//!
//! Setting `c₀ = -1` collapses the bracket and the scheme becomes the plain
//! decomposition recursion `y_k = α(p_{k-1})⁻¹·∫ G·H_{k-1}`; any other
//! `c₀ < 0` keeps a correction proportional to how far the previous stage was
//! from satisfying the equation, which is what the residual optimizer tunes.
//!
//! # Readings of the nonlocal scalar
//!
//! The update needs a scalar `p_{k-1}` for `α(p_{k-1})`, but "the integral of
//! the solution" is genuinely ambiguous while the solution is still a formal
//! series in the embedding parameter. [`PStrategy`] selects among the three
//! defensible readings:
//!
//! * [`PStrategy::Frozen`] (default) — evaluate the series at the expansion
//!   point: `p_k = ∫ y₀` for every stage. This reading reproduces the
//!   benchmark behavior of the first built-in problem.
//! * [`PStrategy::PartialSum`] — evaluate at the far end:
//!   `p_k = ∫ Σ_{j≤k} y_j`.
//! * [`PStrategy::Expansion`] — treat `α(p)⁻¹` itself as a series in the
//!   embedding parameter and convolve its Taylor coefficients against the
//!   per-stage integrals (the strictest formal reading; the forcing then
//!   appears only at stage zero).
//!
//! ```
//! use greenham::{builtin, homotopy, SolverConfig};
//!
//! let spec = builtin(1).unwrap();
//! let config = SolverConfig::default();
//! let series = homotopy::build_series(&spec, &config, -1.0).unwrap();
//! assert_eq!(series.stages.len(), config.order + 1);
//! let phi = series.partial_sum(config.order).unwrap();
//! // partial sums always match the boundary data
//! assert!((phi.eval(0.0) - spec.a).abs() < 1e-10);
//! assert!((phi.eval(1.0) - spec.b).abs() < 1e-10);
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::apply_green;
use crate::poly::Polynomial;
use crate::problem::ProblemSpec;
use crate::residual::SolverConfig;

/// How the nonlocal scalar is read off the embedded series. See the module
/// docs for the three readings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PStrategy {
    /// `p_k = ∫ y₀` for every k.
    #[default]
    Frozen,
    /// `p_k = ∫ (y₀ + ... + y_k)`.
    PartialSum,
    /// Taylor-expand `α(p)⁻¹` in the embedding parameter.
    Expansion,
}

impl PStrategy {
    pub const ALL: [PStrategy; 3] = [
        PStrategy::Frozen,
        PStrategy::PartialSum,
        PStrategy::Expansion,
    ];
}

impl fmt::Display for PStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PStrategy::Frozen => "frozen",
            PStrategy::PartialSum => "partial-sum",
            PStrategy::Expansion => "expansion",
        })
    }
}

impl FromStr for PStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "frozen" => Ok(PStrategy::Frozen),
            "partial-sum" => Ok(PStrategy::PartialSum),
            "expansion" => Ok(PStrategy::Expansion),
            other => Err(format!(
                "unknown p-strategy {other:?}; expected frozen, partial-sum or expansion"
            )),
        }
    }
}

/// One stage of the recursion: the new term together with the ingredients
/// that produced it (stage 0 holds the initial guess and no ingredients).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStage {
    /// Stage index.
    pub k: usize,
    /// The series term `y_k`.
    pub y: Polynomial,
    /// The `H_{k-1}` pushed through the Green operator (the strict Taylor
    /// coefficient under [`PStrategy::Expansion`]).
    pub h_prev: Option<Polynomial>,
    /// The nonlocal scalar `p_{k-1}` used (the base point under expansion).
    pub p_prev: Option<f64>,
    /// `α(p_{k-1})`; always positive.
    pub alpha_prev: Option<f64>,
}

/// The computed series `{y_0, ..., y_n}` for one problem and one `c₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopySeries {
    pub problem: ProblemSpec,
    /// Convergence-control parameter; nonzero.
    pub c0: f64,
    pub strategy: PStrategy,
    /// `stages[k].y` is the k-th series term; `stages.len() = order + 1`.
    pub stages: Vec<SeriesStage>,
}

impl HomotopySeries {
    /// The order of the series (number of correction stages).
    pub fn order(&self) -> usize {
        self.stages.len().saturating_sub(1)
    }

    /// The series terms as a slice-friendly vector.
    pub fn terms(&self) -> Vec<Polynomial> {
        self.stages.iter().map(|s| s.y.clone()).collect()
    }

    /// `φ_upto = Σ_{k ≤ upto} y_k`, the order-`upto` approximate solution.
    pub fn partial_sum(&self, upto: usize) -> Result<Polynomial> {
        if upto >= self.stages.len() {
            return Err(Error::StageOutOfRange {
                index: upto,
                max: self.order(),
            });
        }
        let mut sum = Polynomial::zero();
        for stage in &self.stages[..=upto] {
            sum = sum.add(&stage.y)?;
        }
        Ok(sum)
    }
}

/// `χ_k`: 0 for the first stage, 1 afterwards.
pub fn chi(k: usize) -> Result<f64> {
    match k {
        0 => Err(Error::StageIndexZero(0)),
        1 => Ok(0.0),
        _ => Ok(1.0),
    }
}

/// The initial guess: the boundary line `a + (b-a)x`, or a caller-supplied
/// override that must reproduce the boundary values to `1e-10`.
pub fn initial_guess(spec: &ProblemSpec, guess: Option<&Polynomial>) -> Result<Polynomial> {
    match guess {
        None => Ok(spec.boundary_line()),
        Some(g) => {
            let left = g.eval(0.0);
            let right = g.eval(1.0);
            if (left - spec.a).abs() > 1e-10 || (right - spec.b).abs() > 1e-10 {
                return Err(Error::GuessBoundaryMismatch {
                    got_left: left,
                    got_right: right,
                    want_left: spec.a,
                    want_right: spec.b,
                });
            }
            Ok(g.clone())
        }
    }
}

/// Coefficient of `q^k` in `(Σ_j terms[j]·q^j)^m`, computed by iterated
/// truncated convolution. Entries past the end of `terms` count as zero;
/// `m = 0` yields 1 at `k = 0` and 0 otherwise.
pub fn series_power_coefficient(terms: &[Polynomial], m: u32, k: usize) -> Result<Polynomial> {
    let mut current = vec![Polynomial::zero(); k + 1];
    current[0] = Polynomial::constant(1.0)?;
    for _ in 0..m {
        let mut next = vec![Polynomial::zero(); k + 1];
        for (i, ci) in current.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, t) in terms.iter().enumerate().take(k + 1 - i) {
                if t.is_zero() {
                    continue;
                }
                next[i + j] = next[i + j].add(&ci.mul(t)?)?;
            }
        }
        current = next;
    }
    Ok(current.swap_remove(k))
}

/// `H_k = h(x) + λ·[q^k] (Σ y_j q^j)^m`.
///
/// The forcing term is carried at *every* stage, matching how the recursion
/// treats a purely linear problem (each stage re-applies the full forcing
/// integral). See [`homotopy_coefficient_strict`] for the alternative.
pub fn homotopy_coefficient(
    spec: &ProblemSpec,
    terms: &[Polynomial],
    k: usize,
) -> Result<Polynomial> {
    if spec.lambda == 0.0 {
        return Ok(spec.forcing.clone());
    }
    spec.forcing
        .add(&series_power_coefficient(terms, spec.power, k)?.scale(spec.lambda)?)
}

/// Strict Taylor reading of `H_k`: the forcing belongs to the zeroth
/// coefficient only. Used by [`PStrategy::Expansion`], where the whole
/// right-hand side is expanded consistently in the embedding parameter.
pub fn homotopy_coefficient_strict(
    spec: &ProblemSpec,
    terms: &[Polynomial],
    k: usize,
) -> Result<Polynomial> {
    let base = if k == 0 {
        spec.forcing.clone()
    } else {
        Polynomial::zero()
    };
    if spec.lambda == 0.0 {
        return Ok(base);
    }
    base.add(&series_power_coefficient(terms, spec.power, k)?.scale(spec.lambda)?)
}

/// The nonlocal scalar `p_k` under the given reading. For
/// [`PStrategy::Expansion`] this returns the expansion base point `∫ y₀`;
/// the higher-order coefficients enter through [`deformation_step`].
pub fn compute_p(strategy: PStrategy, terms: &[Polynomial], k: usize) -> f64 {
    assert!(
        !terms.is_empty(),
        "compute_p needs at least the initial term"
    );
    match strategy {
        PStrategy::Frozen | PStrategy::Expansion => terms[0].integrate01(),
        PStrategy::PartialSum => {
            let mut sum = Polynomial::zero();
            for t in terms.iter().take(k + 1) {
                sum = sum.add(t).expect("partial sums of finite terms are finite");
            }
            sum.integrate01()
        }
    }
}

/// Taylor coefficients of `(Σ a_i q^i)^r` up to `q^upto` by the standard
/// power-of-a-series recurrence. Requires `a[0] > 0`; entries past the end
/// of `a` count as zero.
pub fn scalar_series_power(a: &[f64], r: f64, upto: usize) -> Result<Vec<f64>> {
    assert!(
        !a.is_empty() && a[0] > 0.0,
        "series power needs a positive leading coefficient"
    );
    let coeff = |i: usize| a.get(i).copied().unwrap_or(0.0);
    let mut b = Vec::with_capacity(upto + 1);
    b.push(a[0].powf(r));
    for n in 1..=upto {
        let mut acc = 0.0;
        for i in 1..=n {
            acc += (i as f64 * (r + 1.0) - n as f64) * coeff(i) * b[n - i];
        }
        b.push(acc / (n as f64 * a[0]));
    }
    if b.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteCoefficient {
            op: "scalar series power",
        });
    }
    Ok(b)
}

/// Computes stage `k >= 1` from stages `0..k` of `series`.
pub fn deformation_step(series: &HomotopySeries, k: usize) -> Result<SeriesStage> {
    if k == 0 {
        return Err(Error::StageIndexZero(0));
    }
    if k > series.stages.len() {
        return Err(Error::StageOutOfRange {
            index: k,
            max: series.stages.len(),
        });
    }
    let spec = &series.problem;
    let terms: Vec<Polynomial> = series.stages[..k].iter().map(|s| s.y.clone()).collect();
    let prev = &terms[k - 1];
    let chi_k = chi(k)?;

    let (integral, h_prev, p_prev, alpha_prev) = match series.strategy {
        PStrategy::Frozen | PStrategy::PartialSum => {
            let p = compute_p(series.strategy, &terms, k - 1);
            let alpha = spec.alpha(p).map_err(|e| e.with_stage(k))?;
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::NonpositiveNonlocalCoefficient {
                    p,
                    gamma: spec.gamma,
                    stage: Some(k),
                });
            }
            let h = homotopy_coefficient(spec, &terms, k - 1)?;
            let integral = apply_green(&h)?.scale(1.0 / alpha)?;
            (integral, h, p, alpha)
        }
        PStrategy::Expansion => {
            let p_hats: Vec<f64> = terms.iter().map(Polynomial::integrate01).collect();
            let p0 = p_hats[0];
            if !(p0.is_finite() && p0 > 0.0) {
                return Err(Error::NonpositiveNonlocalCoefficient {
                    p: p0,
                    gamma: spec.gamma,
                    stage: Some(k),
                });
            }
            let betas = scalar_series_power(&p_hats, -spec.gamma, k - 1)?;
            let mut integral = Polynomial::zero();
            let mut h_last = Polynomial::zero();
            for (j, beta) in betas.iter().enumerate() {
                let l = k - 1 - j;
                let h_l = homotopy_coefficient_strict(spec, &terms, l)?;
                if l == k - 1 {
                    h_last = h_l.clone();
                }
                integral = integral.add(&apply_green(&h_l)?.scale(*beta)?)?;
            }
            let alpha0 = spec.alpha(p0).map_err(|e| e.with_stage(k))?;
            (integral, h_last, p0, alpha0)
        }
    };

    let line = spec.boundary_line();
    let bracket = prev.sub(&line.scale(1.0 - chi_k)?)?.sub(&integral)?;
    let y = prev.scale(chi_k)?.add(&bracket.scale(series.c0)?)?;
    Ok(SeriesStage {
        k,
        y,
        h_prev: Some(h_prev),
        p_prev: Some(p_prev),
        alpha_prev: Some(alpha_prev),
    })
}

/// Runs the recursion for `k = 1..=config.order` starting from the standard
/// initial guess. Deterministic: identical inputs give bit-identical output.
pub fn build_series(spec: &ProblemSpec, config: &SolverConfig, c0: f64) -> Result<HomotopySeries> {
    build_series_with_guess(spec, config, c0, None)
}

/// As [`build_series`] with an explicit initial guess (which must match the
/// boundary values; see [`initial_guess`]).
pub fn build_series_with_guess(
    spec: &ProblemSpec,
    config: &SolverConfig,
    c0: f64,
    guess: Option<&Polynomial>,
) -> Result<HomotopySeries> {
    if !c0.is_finite() {
        return Err(Error::NonFiniteValue {
            what: "c0",
            value: c0,
        });
    }
    if c0 == 0.0 {
        return Err(Error::ZeroControlParameter);
    }
    if config.order == 0 {
        return Err(Error::InvalidConfig("order must be >= 1".to_string()));
    }
    let y0 = initial_guess(spec, guess)?;
    let mut series = HomotopySeries {
        problem: spec.clone(),
        c0,
        strategy: config.p_strategy,
        stages: vec![SeriesStage {
            k: 0,
            y: y0,
            h_prev: None,
            p_prev: None,
            alpha_prev: None,
        }],
    };
    for k in 1..=config.order {
        let stage = deformation_step(&series, k)?;
        series.stages.push(stage);
    }
    Ok(series)
}
