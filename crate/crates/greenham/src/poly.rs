//! Dense univariate polynomial arithmetic over `f64`.
//!
//! Every function flowing through the solver pipeline — initial guesses,
//! series stages, homotopy-derivative coefficients, partial sums, residual
//! polynomials — is a [`Polynomial`]. Coefficients are stored in ascending
//! degree and kept normalized: trailing zero coefficients are trimmed and the
//! zero polynomial is the empty coefficient list.
//!
//! All operations are pure; values are immutable after construction and safe
//! to share across threads.
//!
//! ```
//! use greenham::Polynomial;
//!
//! let p = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]).unwrap(); // x^3 - x
//! assert_eq!(p.degree(), 3);
//! assert_eq!(p.eval(0.5), 0.125 - 0.5);
//! assert_eq!(p.integrate01(), 0.25 - 0.5);
//! ```

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Degree above which polynomial products log a warning. The recursion's
/// degree growth is geometric in the nonlinearity power, so a runaway order
/// request shows up here long before memory becomes a problem.
pub const DEFAULT_DEGREE_WARN_THRESHOLD: usize = 200;

static DEGREE_WARN_THRESHOLD: AtomicUsize = AtomicUsize::new(DEFAULT_DEGREE_WARN_THRESHOLD);

/// Change the soft degree cap. Crossing it warns via `log`; it never errors.
pub fn set_degree_warn_threshold(threshold: usize) {
    DEGREE_WARN_THRESHOLD.store(threshold, Ordering::Relaxed);
}

/// A dense real-coefficient polynomial, ascending degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, trimming trailing
    /// zeros. Fails if any coefficient is NaN or infinite.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        Self::from_vec(coeffs, "constructor")
    }

    fn from_vec(mut coeffs: Vec<f64>, op: &'static str) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient { op });
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let threshold = DEGREE_WARN_THRESHOLD.load(Ordering::Relaxed);
        if coeffs.len() > threshold + 1 {
            log::warn!(
                "polynomial degree {} exceeds the soft cap {threshold}",
                coeffs.len() - 1
            );
        }
        Ok(Self { coeffs })
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// The constant polynomial `c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![c])
    }

    /// The affine polynomial `c0 + c1 x`.
    pub fn linear(c0: f64, c1: f64) -> Result<Self> {
        Self::new(vec![c0, c1])
    }

    /// Ascending coefficients; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Degree of the polynomial; by convention the zero polynomial has
    /// degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient-wise sum.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.coeff(i) + rhs.coeff(i);
        }
        Self::from_vec(out, "add")
    }

    /// Coefficient-wise difference.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.coeff(i) - rhs.coeff(i);
        }
        Self::from_vec(out, "sub")
    }

    /// Product by coefficient convolution.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_vec(out, "mul")
    }

    /// Every coefficient multiplied by `c`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFiniteValue {
                what: "scale factor",
                value: c,
            });
        }
        Self::from_vec(self.coeffs.iter().map(|a| a * c).collect(), "scale")
    }

    /// `m`-th power by repeated multiplication.
    pub fn powi(&self, m: u32) -> Result<Self> {
        let mut out = Self::constant(1.0)?;
        for _ in 0..m {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Exact integral over `[0,1]`: the sum of `c_i / (i+1)`.
    pub fn integrate01(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c / (i as f64 + 1.0))
            .sum()
    }

    /// Formal derivative.
    pub fn differentiate(&self) -> Self {
        let mut coeffs: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Formal antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i as f64 + 1.0)),
        );
        Self { coeffs }
    }

    /// Max of `|p(x)|` over the uniform grid `x_i = i/(n-1)`, `i = 0..n`.
    /// Approximates the sup norm on `[0,1]`; requires `n >= 2`.
    pub fn max_abs_on_grid(&self, grid_size: usize) -> f64 {
        assert!(grid_size >= 2, "norm grid needs at least two points");
        let n = (grid_size - 1) as f64;
        (0..grid_size)
            .map(|i| self.eval(i as f64 / n).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c < 0.0 {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{i}")?,
            }
        }
        Ok(())
    }
}
