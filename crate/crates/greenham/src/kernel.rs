//! The Green's function of the Dirichlet problem on `(0,1)` and its exact
//! integral operator on polynomials.
//!
//! `G(x,s)` is the kernel that inverts the second derivative under zero
//! boundary data: `u(x) = ∫₀¹ G(x,s) f(s) ds` is the unique function with
//! `u'' = f` and `u(0) = u(1) = 0`. For polynomial `f` the integral has a
//! closed form, so [`apply_green`] maps polynomials to polynomials with no
//! discretization error at all — the recursion built on top of it carries
//! only rounding error.
//!
//! ```
//! use greenham::{kernel, Polynomial};
//!
//! // u'' = 6x with u(0) = u(1) = 0 has the unique solution x^3 - x.
//! let f = Polynomial::new(vec![0.0, 6.0]).unwrap();
//! let u = kernel::apply_green(&f).unwrap();
//! assert_eq!(u.coeffs(), &[0.0, -1.0, 0.0, 1.0]);
//! ```

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Evaluates `G(x,s)`: `x(s-1)` for `x <= s`, `s(x-1)` for `s <= x`.
///
/// Both branches agree on the diagonal. `G` vanishes on the boundary of the
/// unit square and is nonpositive inside it. Points outside the square are a
/// domain error.
pub fn green_eval(x: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&s) {
        return Err(Error::OutsideUnitSquare { x, s });
    }
    Ok(if x <= s { x * (s - 1.0) } else { s * (x - 1.0) })
}

/// Applies the integral operator `f ↦ ∫₀¹ G(x,s) f(s) ds` symbolically.
///
/// Splitting the integral at `s = x` and integrating each piece exactly gives
///
/// ```text
/// u(x) = x·F(x) - A(x) + (A(1) - F(1))·x,
/// ```
///
/// where `F` and `A` are the antiderivatives of `f(s)` and `s·f(s)` vanishing
/// at 0. The result has degree `deg f + 2`, vanishes at both endpoints, and
/// satisfies `u'' = f` coefficient-wise up to rounding.
pub fn apply_green(f: &Polynomial) -> Result<Polynomial> {
    if f.is_zero() {
        return Ok(Polynomial::zero());
    }
    let x = Polynomial::linear(0.0, 1.0)?;
    let f_anti = f.antiderivative();
    let sf_anti = x.mul(f)?.antiderivative();
    let slope = sf_anti.eval(1.0) - f_anti.eval(1.0);
    x.mul(&f_anti)?.sub(&sf_anti)?.add(&x.scale(slope)?)
}
