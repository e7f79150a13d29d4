//! Problem class `α(p)·y'' = h(x) + λ·y^m` on `(0,1)` with Dirichlet data
//! `y(0) = a`, `y(1) = b` and nonlocal scalar `p = ∫₀¹ y(s) ds`.
//!
//! The diffusion coefficient is restricted to the power family
//! `α(p) = p^γ`, which covers all four built-in benchmark problems
//! (`γ = 1/3, -1, 1, -2`). Problems can be constructed programmatically,
//! taken from [`builtin`], or parsed from a small `key=value` config format
//! (see [`parse_problem`]).

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{ConfigError, Error, Result};
use crate::poly::Polynomial;

/// Closed-form (or tabulated) exact solution attached to a problem.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactSolution {
    /// `y(x) = x^3`
    Cubic,
    /// `y(x) = 1/sqrt(1+x)`
    InvSqrt,
    /// `y(x) = 1/(1+x)`
    InvLinear,
    /// Piecewise-linear interpolation of `(x, y)` samples with strictly
    /// increasing abscissae in `[0,1]`.
    Samples(Vec<(f64, f64)>),
}

impl ExactSolution {
    fn eval(&self, x: f64) -> f64 {
        match self {
            ExactSolution::Cubic => x * x * x,
            ExactSolution::InvSqrt => 1.0 / (1.0 + x).sqrt(),
            ExactSolution::InvLinear => 1.0 / (1.0 + x),
            ExactSolution::Samples(samples) => interpolate(samples, x),
        }
    }
}

fn interpolate(samples: &[(f64, f64)], x: f64) -> f64 {
    match samples.iter().position(|&(xs, _)| xs >= x) {
        Some(0) => samples[0].1,
        Some(i) => {
            let (x0, y0) = samples[i - 1];
            let (x1, y1) = samples[i];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
        None => samples.last().map(|&(_, y)| y).unwrap_or(0.0),
    }
}

/// A validated nonlocal boundary value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// Left boundary value `y(0)`; nonnegative.
    pub a: f64,
    /// Right boundary value `y(1)`; nonnegative.
    pub b: f64,
    /// Exponent of the nonlocal coefficient `α(p) = p^γ`.
    pub gamma: f64,
    /// Explicit x-dependent part of the right-hand side.
    pub forcing: Polynomial,
    /// Coefficient of the power nonlinearity (zero for linear problems).
    pub lambda: f64,
    /// Exponent of the nonlinearity; odd and >= 1 whenever `lambda != 0`.
    pub power: u32,
    /// Exact solution, when one is known.
    pub exact: Option<ExactSolution>,
}

impl ProblemSpec {
    /// Builds a problem and checks its structural invariants.
    pub fn new(
        a: f64,
        b: f64,
        gamma: f64,
        forcing: Polynomial,
        lambda: f64,
        power: u32,
        exact: Option<ExactSolution>,
    ) -> Result<Self> {
        let spec = Self {
            a,
            b,
            gamma,
            forcing,
            lambda,
            power,
            exact,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |field: &'static str, reason: String| Error::InvalidProblem { field, reason };
        for (field, v) in [
            ("a", self.a),
            ("b", self.b),
            ("gamma", self.gamma),
            ("lambda", self.lambda),
        ] {
            if !v.is_finite() {
                return Err(invalid(field, format!("must be finite, got {v}")));
            }
        }
        if self.a < 0.0 {
            return Err(invalid("a", format!("must be nonnegative, got {}", self.a)));
        }
        if self.b < 0.0 {
            return Err(invalid("b", format!("must be nonnegative, got {}", self.b)));
        }
        if self.lambda != 0.0 && (self.power.is_multiple_of(2) || self.power == 0) {
            return Err(invalid(
                "power",
                format!(
                    "must be an odd exponent >= 1 when lambda != 0, got {}",
                    self.power
                ),
            ));
        }
        if self.lambda == 0.0 && self.forcing.is_zero() {
            return Err(invalid(
                "forcing",
                "forcing and lambda cannot both vanish (the problem degenerates to a straight line)"
                    .to_string(),
            ));
        }
        if let Some(ExactSolution::Samples(samples)) = &self.exact {
            validate_samples(samples).map_err(|reason| invalid("exact", reason))?;
        }
        Ok(())
    }

    /// The affine function matching the boundary data, `a + (b-a)x`.
    pub fn boundary_line(&self) -> Polynomial {
        Polynomial::linear(self.a, self.b - self.a).expect("boundary values are finite")
    }

    /// Evaluates `α(p) = p^γ`.
    ///
    /// When `γ` is a nonnegative integer any finite `p` is admissible;
    /// otherwise `p` must be strictly positive, and a nonpositive `p` raises
    /// [`Error::NonpositiveNonlocalCoefficient`] so callers can report which
    /// series stage produced the invalid scalar.
    pub fn alpha(&self, p: f64) -> Result<f64> {
        let g = self.gamma;
        if g >= 0.0 && g.fract() == 0.0 {
            return Ok(p.powi(g as i32));
        }
        if p <= 0.0 {
            return Err(Error::NonpositiveNonlocalCoefficient {
                p,
                gamma: g,
                stage: None,
            });
        }
        Ok(p.powf(g))
    }

    /// Exact solution at `x`, when the problem carries one.
    pub fn exact_eval(&self, x: f64) -> Option<f64> {
        self.exact.as_ref().map(|e| e.eval(x))
    }

    /// The right-hand side composed with a polynomial approximant:
    /// `h(x) + λ·φ(x)^m`, again a polynomial.
    pub fn rhs_composed(&self, phi: &Polynomial) -> Result<Polynomial> {
        if self.lambda == 0.0 {
            return Ok(self.forcing.clone());
        }
        self.forcing.add(&phi.powi(self.power)?.scale(self.lambda)?)
    }

    /// Renders the problem in the config-file grammar accepted by
    /// [`parse_problem`]. Sample-table exact solutions cannot be inlined and
    /// serialize as `exact=none`.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "a={:?}", self.a);
        let _ = writeln!(out, "b={:?}", self.b);
        let _ = writeln!(out, "gamma={:?}", self.gamma);
        let forcing = if self.forcing.is_zero() {
            "0".to_string()
        } else {
            self.forcing
                .coeffs()
                .iter()
                .map(|c| format!("{c:?}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(out, "forcing={forcing}");
        let _ = writeln!(out, "lambda={:?}", self.lambda);
        let _ = writeln!(out, "power={}", self.power);
        let exact = match &self.exact {
            Some(ExactSolution::Cubic) => "cubic",
            Some(ExactSolution::InvSqrt) => "inv_sqrt",
            Some(ExactSolution::InvLinear) => "inv_linear",
            Some(ExactSolution::Samples(_)) => "none # sample table omitted",
            None => "none",
        };
        let _ = writeln!(out, "exact={exact}");
        out
    }
}

/// The four benchmark problems.
///
/// | id | equation | exact |
/// |----|----------|-------|
/// | 1 | `p^{1/3} y'' = (6/∛4) x` | `x^3` |
/// | 2 | `(1/p) y'' = 3/(4(2√2-2)) y^5` | `1/√(1+x)` |
/// | 3 | `p y'' = 3(2√2-2)/4 y^5` | `1/√(1+x)` |
/// | 4 | `(1/p)^2 y'' = 2/(ln 2)^2 y^3` | `1/(1+x)` |
pub fn builtin(example_id: u32) -> Result<ProblemSpec> {
    let sqrt2 = 2f64.sqrt();
    match example_id {
        1 => ProblemSpec::new(
            0.0,
            1.0,
            1.0 / 3.0,
            Polynomial::linear(0.0, 6.0 / 4f64.cbrt())?,
            0.0,
            1,
            Some(ExactSolution::Cubic),
        ),
        2 => ProblemSpec::new(
            1.0,
            sqrt2 / 2.0,
            -1.0,
            Polynomial::zero(),
            3.0 / (4.0 * (2.0 * sqrt2 - 2.0)),
            5,
            Some(ExactSolution::InvSqrt),
        ),
        3 => ProblemSpec::new(
            1.0,
            sqrt2 / 2.0,
            1.0,
            Polynomial::zero(),
            3.0 * (2.0 * sqrt2 - 2.0) / 4.0,
            5,
            Some(ExactSolution::InvSqrt),
        ),
        4 => ProblemSpec::new(
            1.0,
            0.5,
            -2.0,
            Polynomial::zero(),
            2.0 / (LN_2 * LN_2),
            3,
            Some(ExactSolution::InvLinear),
        ),
        other => Err(Error::UnknownExample(other)),
    }
}

fn validate_samples(samples: &[(f64, f64)]) -> std::result::Result<(), String> {
    if samples.is_empty() {
        return Err("sample table is empty".to_string());
    }
    let mut prev = f64::NEG_INFINITY;
    for &(x, y) in samples {
        if !x.is_finite() || !y.is_finite() {
            return Err(format!("non-finite sample ({x}, {y})"));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(format!("sample abscissa {x} outside [0,1]"));
        }
        if x <= prev {
            return Err(format!(
                "sample abscissae must be strictly increasing ({prev} then {x})"
            ));
        }
        prev = x;
    }
    Ok(())
}

/// Parses the `key=value` problem-config grammar.
///
/// One `key=value` pair per line; `#` starts a comment; blank lines are
/// ignored. Keys: `a`, `b`, `gamma` (required), `forcing` (comma-separated
/// ascending coefficients), `lambda`, `power`, `exact`
/// (`cubic|inv_sqrt|inv_linear|none|file:<path>`). Unknown and duplicate keys
/// are errors. `file:` paths resolve against the current directory; use
/// [`parse_problem_with_base`] or [`load_problem`] to anchor them elsewhere.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    parse_problem_with_base(text, Path::new("."))
}

/// As [`parse_problem`], resolving `exact=file:` paths against `base`.
pub fn parse_problem_with_base(text: &str, base: &Path) -> Result<ProblemSpec> {
    let mut a = None;
    let mut b = None;
    let mut gamma = None;
    let mut forcing = None;
    let mut lambda = None;
    let mut power = None;
    let mut exact = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: line_no,
            text: raw.trim().to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let duplicate = |key: &str| ConfigError::DuplicateKey {
            line: line_no,
            key: key.to_string(),
        };
        match key {
            "a" => set_scalar(&mut a, "a", value, line_no).map_err(Error::Config)?,
            "b" => set_scalar(&mut b, "b", value, line_no).map_err(Error::Config)?,
            "gamma" => set_scalar(&mut gamma, "gamma", value, line_no).map_err(Error::Config)?,
            "lambda" => set_scalar(&mut lambda, "lambda", value, line_no).map_err(Error::Config)?,
            "forcing" => {
                if forcing.is_some() {
                    return Err(duplicate("forcing").into());
                }
                forcing = Some(parse_forcing(value, line_no)?);
            }
            "power" => {
                if power.is_some() {
                    return Err(duplicate("power").into());
                }
                power = Some(
                    value
                        .parse::<u32>()
                        .map_err(|e| ConfigError::InvalidValue {
                            line: line_no,
                            key: "power",
                            reason: e.to_string(),
                        })?,
                );
            }
            "exact" => {
                if exact.is_some() {
                    return Err(duplicate("exact").into());
                }
                exact = Some(parse_exact(value, line_no, base)?);
            }
            other => {
                return Err(ConfigError::UnknownKey {
                    line: line_no,
                    key: other.to_string(),
                }
                .into())
            }
        }
    }

    let a = a.ok_or(ConfigError::MissingField("a"))?;
    let b = b.ok_or(ConfigError::MissingField("b"))?;
    let gamma = gamma.ok_or(ConfigError::MissingField("gamma"))?;
    ProblemSpec::new(
        a,
        b,
        gamma,
        forcing.unwrap_or_else(Polynomial::zero),
        lambda.unwrap_or(0.0),
        power.unwrap_or(1),
        exact.unwrap_or(None),
    )
}

/// Reads a config file and parses it, resolving `exact=file:` paths relative
/// to the config's own directory.
pub fn load_problem(path: &Path) -> Result<ProblemSpec> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_problem_with_base(&text, base)
}

fn set_scalar(
    slot: &mut Option<f64>,
    key: &'static str,
    value: &str,
    line: usize,
) -> std::result::Result<(), ConfigError> {
    if slot.is_some() {
        return Err(ConfigError::DuplicateKey {
            line,
            key: key.to_string(),
        });
    }
    let parsed = value
        .parse::<f64>()
        .map_err(|e| ConfigError::InvalidValue {
            line,
            key,
            reason: e.to_string(),
        })?;
    *slot = Some(parsed);
    Ok(())
}

fn parse_forcing(value: &str, line: usize) -> Result<Polynomial> {
    let mut coeffs = Vec::new();
    if !value.is_empty() {
        for piece in value.split(',') {
            let c = piece
                .trim()
                .parse::<f64>()
                .map_err(|e| ConfigError::InvalidValue {
                    line,
                    key: "forcing",
                    reason: format!("{:?}: {e}", piece.trim()),
                })?;
            coeffs.push(c);
        }
    }
    Polynomial::new(coeffs)
}

fn parse_exact(value: &str, line: usize, base: &Path) -> Result<Option<ExactSolution>> {
    match value {
        "cubic" => Ok(Some(ExactSolution::Cubic)),
        "inv_sqrt" => Ok(Some(ExactSolution::InvSqrt)),
        "inv_linear" => Ok(Some(ExactSolution::InvLinear)),
        "none" => Ok(None),
        other => {
            if let Some(rel) = other.strip_prefix("file:") {
                let path = base.join(rel.trim());
                Ok(Some(ExactSolution::Samples(load_samples(&path)?)))
            } else {
                Err(ConfigError::InvalidValue {
                    line,
                    key: "exact",
                    reason: format!(
                        "{other:?} is not one of cubic|inv_sqrt|inv_linear|none|file:<path>"
                    ),
                }
                .into())
            }
        }
    }
}

/// Loads a sample table: CSV with header `x,y` and one `x,y` pair per row.
fn load_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let sample_err = |line: usize, reason: String| ConfigError::SampleFile {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "x,y" => {}
        _ => return Err(sample_err(1, "expected header `x,y`".to_string()).into()),
    }
    let mut samples = Vec::new();
    for (idx, row) in lines {
        let row = row.trim();
        if row.is_empty() {
            continue;
        }
        let (xs, ys) = row
            .split_once(',')
            .ok_or_else(|| sample_err(idx + 1, format!("expected `x,y`, got {row:?}")))?;
        let x = xs
            .trim()
            .parse::<f64>()
            .map_err(|e| sample_err(idx + 1, e.to_string()))?;
        let y = ys
            .trim()
            .parse::<f64>()
            .map_err(|e| sample_err(idx + 1, e.to_string()))?;
        samples.push((x, y));
    }
    validate_samples(&samples).map_err(|reason| sample_err(0, reason))?;
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_field_values() {
        let p1 = builtin(1).unwrap();
        assert_eq!(p1.gamma, 1.0 / 3.0);
        assert_eq!(p1.forcing.coeffs(), &[0.0, 6.0 / 4f64.cbrt()]);
        assert_eq!(p1.lambda, 0.0);
        assert_eq!(p1.exact, Some(ExactSolution::Cubic));

        let p2 = builtin(2).unwrap();
        assert!((p2.b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert_eq!(p2.gamma, -1.0);
        assert_eq!(p2.power, 5);
        // lambda = 3/(4(2*sqrt(2)-2)) = 3(sqrt(2)+1)/8
        assert!((p2.lambda - 3.0 * (2f64.sqrt() + 1.0) / 8.0).abs() < 1e-15);

        let p4 = builtin(4).unwrap();
        let ln2 = 2f64.ln();
        assert!((p4.lambda - 2.0 / (ln2 * ln2)).abs() < 1e-12);
        assert_eq!(p4.gamma, -2.0);

        assert!(matches!(builtin(5), Err(Error::UnknownExample(5))));
        assert!(builtin(0).is_err());
    }

    #[test]
    fn alpha_examples() {
        let p1 = builtin(1).unwrap();
        assert!((p1.alpha(0.5).unwrap() - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!((p1.alpha(0.5).unwrap() - 0.793701).abs() < 1e-6);

        let p3 = builtin(3).unwrap();
        assert_eq!(p3.alpha(0.3).unwrap(), 0.3);

        let p4 = builtin(4).unwrap();
        assert_eq!(p4.alpha(0.5).unwrap(), 4.0);
    }

    #[test]
    fn alpha_domain_errors() {
        let p1 = builtin(1).unwrap();
        match p1.alpha(-0.25) {
            Err(Error::NonpositiveNonlocalCoefficient { p, stage: None, .. }) => {
                assert_eq!(p, -0.25)
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(p1.alpha(0.0).is_err());
        let p2 = builtin(2).unwrap();
        assert!(p2.alpha(0.0).is_err());
        // nonnegative-integer exponents accept any finite p
        let p3 = builtin(3).unwrap();
        assert_eq!(p3.alpha(-0.5).unwrap(), -0.5);
    }

    #[test]
    fn exact_eval_examples() {
        let p2 = builtin(2).unwrap();
        assert!((p2.exact_eval(0.5).unwrap() - 0.816496581).abs() < 1e-9);
        let p1 = builtin(1).unwrap();
        assert_eq!(p1.exact_eval(0.0).unwrap(), 0.0);
        let p4 = builtin(4).unwrap();
        assert_eq!(p4.exact_eval(1.0).unwrap(), 0.5);
    }

    #[test]
    fn exact_eval_boundary_consistency() {
        for id in 1..=4 {
            let p = builtin(id).unwrap();
            assert!(
                (p.exact_eval(0.0).unwrap() - p.a).abs() <= 1e-12,
                "example {id}"
            );
            assert!(
                (p.exact_eval(1.0).unwrap() - p.b).abs() <= 1e-12,
                "example {id}"
            );
        }
    }

    #[test]
    fn builtin_exact_solutions_satisfy_their_equations() {
        // alpha(p*) y'' - (h + lambda y^m) = 0 with closed-form second
        // derivatives and closed-form nonlocal scalars:
        //   p* = 1/4 (ex 1), 2*sqrt(2)-2 (ex 2, 3), ln 2 (ex 4)
        let second_derivative = |id: u32, x: f64| -> f64 {
            match id {
                1 => 6.0 * x,
                2 | 3 => 0.75 * (1.0 + x).powf(-2.5),
                4 => 2.0 * (1.0 + x).powi(-3),
                _ => unreachable!(),
            }
        };
        let p_star = |id: u32| -> f64 {
            match id {
                1 => 0.25,
                2 | 3 => 2.0 * 2f64.sqrt() - 2.0,
                4 => 2f64.ln(),
                _ => unreachable!(),
            }
        };
        for id in 1..=4 {
            let spec = builtin(id).unwrap();
            let alpha = spec.alpha(p_star(id)).unwrap();
            for i in 0..11 {
                let x = i as f64 / 10.0;
                let y = spec.exact_eval(x).unwrap();
                let rhs = spec.forcing.eval(x) + spec.lambda * y.powi(spec.power as i32);
                let residual = alpha * second_derivative(id, x) - rhs;
                assert!(
                    residual.abs() <= 1e-9,
                    "example {id}: ODE residual {residual} at x = {x}"
                );
            }
        }
    }

    #[test]
    fn sample_table_interpolation() {
        let exact = ExactSolution::Samples(vec![(0.0, 1.0), (0.5, 2.0), (1.0, 0.0)]);
        assert_eq!(exact.eval(0.25), 1.5);
        assert_eq!(exact.eval(0.5), 2.0);
        assert_eq!(exact.eval(1.0), 0.0);
    }

    #[test]
    fn parse_round_trips_builtin_one() {
        let text = "a=0\nb=1\ngamma=0.3333333333333333\nforcing=0,3.7797631496846193\nlambda=0\npower=1\nexact=cubic";
        let parsed = parse_problem(text).unwrap();
        let reference = builtin(1).unwrap();
        assert!((parsed.a - reference.a).abs() <= 1e-12);
        assert!((parsed.b - reference.b).abs() <= 1e-12);
        assert!((parsed.gamma - reference.gamma).abs() <= 1e-12);
        assert!((parsed.forcing.coeff(1) - reference.forcing.coeff(1)).abs() <= 1e-12);
        assert_eq!(parsed.exact, reference.exact);
    }

    #[test]
    fn serialize_round_trips_all_builtins() {
        for id in 1..=4 {
            let spec = builtin(id).unwrap();
            let round = parse_problem(&spec.to_config_string()).unwrap();
            assert!((round.a - spec.a).abs() <= 1e-15, "example {id}");
            assert!((round.b - spec.b).abs() <= 1e-15, "example {id}");
            assert!((round.gamma - spec.gamma).abs() <= 1e-15, "example {id}");
            assert!((round.lambda - spec.lambda).abs() <= 1e-15, "example {id}");
            assert_eq!(round.power, spec.power, "example {id}");
            assert_eq!(round.forcing, spec.forcing, "example {id}");
            assert_eq!(round.exact, spec.exact, "example {id}");
        }
    }

    #[test]
    fn parse_reports_missing_field() {
        let err = parse_problem("a=0\ngamma=1\nforcing=0,1").unwrap_err();
        assert_eq!(err, Error::Config(ConfigError::MissingField("b")));
    }

    #[test]
    fn parse_rejects_even_power_with_nonlinearity() {
        let err = parse_problem("a=0\nb=1\ngamma=1\nlambda=2\npower=4").unwrap_err();
        match err {
            Error::InvalidProblem { field: "power", .. } => {}
            other => panic!("expected power invariant error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_unknown_and_duplicate_keys() {
        assert!(matches!(
            parse_problem("a=0\nb=1\ngamma=1\nzeta=3"),
            Err(Error::Config(ConfigError::UnknownKey { line: 4, .. }))
        ));
        assert!(matches!(
            parse_problem("a=0\na=1\nb=1\ngamma=1"),
            Err(Error::Config(ConfigError::DuplicateKey { line: 2, .. }))
        ));
    }

    #[test]
    fn parse_handles_comments_and_blank_lines() {
        let text = "# a benchmark\n\na=0  # left boundary\nb=1\ngamma=0.25\nforcing=0,1\n";
        let spec = parse_problem(text).unwrap();
        assert_eq!(spec.gamma, 0.25);
        assert_eq!(spec.power, 1);
        assert_eq!(spec.exact, None);
    }

    #[test]
    fn degenerate_problem_is_rejected() {
        let err = parse_problem("a=0\nb=1\ngamma=1\nlambda=0").unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidProblem {
                field: "forcing",
                ..
            }
        ));
    }
}
