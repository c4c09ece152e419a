//! The base `q` and the truncation policy shared by every series and product.

use crate::error::{QError, Result};

/// A validated base `q` in the open interval (0, 1) with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParameter {
    q: f64,
    one_minus_q: f64,
    ln_inv_q: f64,
}

impl QParameter {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidParameter {
                name: "q",
                value: q,
                reason: "the base must lie strictly between 0 and 1",
            });
        }
        Ok(Self {
            q,
            one_minus_q: 1.0 - q,
            ln_inv_q: -q.ln(),
        })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `1 - q`
    #[inline]
    pub fn one_minus_q(&self) -> f64 {
        self.one_minus_q
    }

    /// `ln(1/q)`, strictly positive.
    #[inline]
    pub fn ln_inv_q(&self) -> f64 {
        self.ln_inv_q
    }

    /// `ln q`, strictly negative.
    #[inline]
    pub fn ln_q(&self) -> f64 {
        -self.ln_inv_q
    }

    /// The factor `q(1-q)` that scales every E_q mode argument.
    #[inline]
    pub fn mode_scale(&self) -> f64 {
        self.q * self.one_minus_q
    }

    /// `(1-q)/ln(1/q)`, the normalization of the residue sum.
    #[inline]
    pub fn residue_norm(&self) -> f64 {
        self.one_minus_q / self.ln_inv_q
    }
}

/// Truncation policy for infinite series and products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(QError::InvalidParameter {
                name: "rel_tol",
                value: rel_tol,
                reason: "must be strictly positive",
            });
        }
        if max_terms == 0 {
            return Err(QError::InvalidParameter {
                name: "max_terms",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self { rel_tol, max_terms })
    }
}
