//! Uniform 1-D grids and complex samples on them.

use num_complex::Complex64;

use crate::error::{QError, Result};

/// Tag of the Fourier convention used throughout: forward kernel
/// `e^{+iξx}/√(2π)`, inverse kernel `e^{-iξx}/√(2π)`.
pub const FOURIER_CONVENTION: &str = "symmetric-1/sqrt(2pi)";

/// A uniform grid `lo, lo + h, ..., hi` with `n_points` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    lo: f64,
    hi: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n_points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(QError::Grid(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        if n_points < 2 {
            return Err(QError::Grid(format!("need at least 2 points, got {n_points}")));
        }
        Ok(Self { lo, hi, n_points })
    }

    /// The default window for x and ξ: [-12, 12] with 2049 points.
    pub fn default_window() -> Self {
        Self {
            lo: -12.0,
            hi: 12.0,
            n_points: 2049,
        }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n_points - 1) as f64
    }

    /// The i-th point; the last point is exactly `hi`.
    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Composite trapezoid weights (spacing included).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points)
            .map(|i| if i == 0 || i + 1 == self.n_points { 0.5 * h } else { h })
            .collect()
    }
}

/// Complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `max_i |values_i|`
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Iterator over `(x_i, value_i)`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.grid.point(i), v))
    }
}

fn check_values(grid: &GridSpec, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.n_points() {
        return Err(QError::Grid(format!(
            "{} values for a grid of {} points",
            values.len(),
            grid.n_points()
        )));
    }
    if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(QError::Grid(format!("non-finite value at index {i} (x = {})", grid.point(i))));
    }
    Ok(())
}

/// Fourier data `F(ξ)` on a ξ grid in the symmetric convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    values: Vec<Complex64>,
    error_estimate: f64,
    warnings: Vec<String>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self {
            grid,
            values,
            error_estimate: 0.0,
            warnings: Vec::new(),
        })
    }

    pub(crate) fn with_diagnostics(mut self, error_estimate: f64, warnings: Vec<String>) -> Self {
        self.error_estimate = error_estimate;
        self.warnings = warnings;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn convention(&self) -> &'static str {
        FOURIER_CONVENTION
    }

    /// Estimated quadrature error of the forward transform (max over ξ).
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 1.0, 10).is_err());
        assert!(GridSpec::new(2.0, 1.0, 10).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1).is_err());
        assert!(GridSpec::new(0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn grid_points() {
        let g = GridSpec::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let w: f64 = g.trapezoid_weights().iter().sum();
        assert_eq!(w, 2.0);
        let d = GridSpec::default_window();
        assert_eq!(d.point(1024), 0.0);
        assert_eq!(d.point(2048), 12.0);
    }

    #[test]
    fn grid_function_invariants() {
        let g = GridSpec::new(0.0, 1.0, 3).unwrap();
        assert!(GridFunction::new(g, vec![Complex64::new(0.0, 0.0); 2]).is_err());
        assert!(GridFunction::new(g, vec![Complex64::new(f64::NAN, 0.0); 3]).is_err());
        let f = GridFunction::new(g, vec![1.0.into(), (-3.0).into(), 2.0.into()]).unwrap();
        assert_eq!(f.max_abs(), 3.0);
        let s = SpectralField::new(g, f.values().to_vec()).unwrap();
        assert_eq!(s.convention(), FOURIER_CONVENTION);
    }
}
