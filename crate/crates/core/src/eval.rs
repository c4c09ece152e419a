//! Evaluation contracts for functions that the q-derivative, the transforms
//! and the residual checks sample at arbitrary points.
//!
//! q-derivatives need values at `t/q` or `qt`, which are never grid points,
//! so everything downstream works with callables rather than sampled arrays.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;

/// A function of one real variable with complex values.
///
/// Evaluation must be deterministic and thread-safe; grid loops call it from
/// several threads at once.
pub trait Evaluable: Send + Sync {
    fn eval(&self, t: f64) -> Complex64;

    /// Taylor coefficients `a_0, a_1, ...` of the function at `t = 0`, if
    /// known. `a_0` is the value `h(0)`; q-derivatives at `t = 0` use the
    /// higher coefficients to return the limit of the difference quotient.
    fn taylor_at_zero(&self) -> Option<&[Complex64]> {
        None
    }
}

impl<F> Evaluable for F
where
    F: Fn(f64) -> Complex64 + Send + Sync,
{
    fn eval(&self, t: f64) -> Complex64 {
        self(t)
    }
}

/// Attaches Taylor coefficients at zero to any [`Evaluable`].
#[derive(Debug, Clone)]
pub struct WithTaylor<F> {
    inner: F,
    coeffs: Vec<Complex64>,
}

impl<F: Evaluable> WithTaylor<F> {
    pub fn new(inner: F, coeffs: Vec<Complex64>) -> Self {
        Self { inner, coeffs }
    }
}

impl<F: Evaluable> Evaluable for WithTaylor<F> {
    fn eval(&self, t: f64) -> Complex64 {
        self.inner.eval(t)
    }

    fn taylor_at_zero(&self) -> Option<&[Complex64]> {
        Some(&self.coeffs)
    }
}

/// A function of a complex variable, used for transforms in `s` such as a
/// Laplace image `h̄(s)` or a Mellin image `h*(s)`.
pub trait ComplexEvaluable: Send + Sync {
    fn eval(&self, s: Complex64) -> Complex64;
}

impl<F> ComplexEvaluable for F
where
    F: Fn(Complex64) -> Complex64 + Send + Sync,
{
    fn eval(&self, s: Complex64) -> Complex64 {
        self(s)
    }
}

/// A complex field `y(x, t)` evaluable at arbitrary points.
pub trait SpaceTimeField: Send + Sync {
    fn eval(&self, x: f64, t: f64) -> Result<Complex64>;

    /// Values along a line of `x` at fixed `t`. Implementations with per-time
    /// setup cost should override this.
    fn eval_line(&self, xs: &[f64], t: f64) -> Result<Vec<Complex64>> {
        xs.par_iter().map(|&x| self.eval(x, t)).collect()
    }

    /// Largest time at which the field may be evaluated.
    fn t_max(&self) -> f64 {
        f64::INFINITY
    }
}

impl<F> SpaceTimeField for F
where
    F: Fn(f64, f64) -> Complex64 + Send + Sync,
{
    fn eval(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self(x, t))
    }
}
