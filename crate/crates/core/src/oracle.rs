//! Independent reference computations used to verify the library.
//!
//! Each oracle takes a separate code path from what it checks: the classical
//! Γ comes from double-exponential quadrature and never touches Γ_q; the
//! residue oracle integrates Γ_q around a circle instead of using the closed
//! form; the PDE residual uses finite differences in `x` rather than the
//! Fourier pipeline, and only evaluates the field at points.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QError, Result};
use crate::eval::{Evaluable, SpaceTimeField};
use crate::grid::GridSpec;
use crate::param::{QParameter, SeriesControl};
use crate::qderiv::{stencil, QDerivative};
use crate::special::q_gamma;

/// Largest PDE residual found on an interior grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `max |temporal - spatial|` over interior points and all times.
    pub max_abs: f64,
    /// `(x, t)` where the maximum was attained; `None` if nothing was checked.
    pub location: Option<(f64, f64)>,
    /// `max |y|` over the same points, used for relative reporting.
    pub normalizer: f64,
}

impl ResidualReport {
    /// An empty report (no positive times to check).
    pub fn empty() -> Self {
        Self {
            max_abs: 0.0,
            location: None,
            normalizer: 0.0,
        }
    }

    /// `max_abs / normalizer`, or `max_abs` when the field is identically zero.
    pub fn relative(&self) -> f64 {
        if self.normalizer > 0.0 {
            self.max_abs / self.normalizer
        } else {
            self.max_abs
        }
    }
}

/// Residual of `(D^q_t)ⁿ y - ∂²ₓ y` on the interior of `x_grid`.
///
/// The time part is the exact forward q-stencil over `t, t/q, ..., t/qⁿ`.
/// The space part is the 5-point central difference `D(h)` with `h` the grid
/// spacing, Richardson-extrapolated as `(16 D(h/2) - D(h)) / 15`; a point is
/// interior when `x ± 2h` is still on the grid.
///
/// Every `t` must be positive with `t/qⁿ` inside the field's valid range.
pub fn pde_residual_order<Y: SpaceTimeField + ?Sized>(y: &Y, q: &QParameter, order: usize, x_grid: &GridSpec, t_points: &[f64]) -> Result<ResidualReport> {
    if order == 0 {
        return Err(QError::InvalidParameter {
            name: "order",
            value: 0.0,
            reason: "the time order must be at least 1",
        });
    }
    let n = x_grid.n_points();
    if n < 5 {
        return Err(QError::Grid(format!("residual check needs at least 5 points, got {n}")));
    }
    let st = stencil(q, QDerivative::Forward, order);
    let latest = q.q().powi(-(order as i32));
    for &t in t_points {
        if !(t > 0.0 && t.is_finite()) {
            return Err(QError::Precondition(format!("residual times must be positive, got t = {t}")));
        }
        if t * latest > y.t_max() {
            return Err(QError::Precondition(format!(
                "t = {t} needs the field at t/q^{order} = {}, beyond its valid range {}",
                t * latest,
                y.t_max()
            )));
        }
    }

    let h = x_grid.spacing();
    let half: Vec<f64> = (0..2 * n - 1).map(|k| x_grid.lo() + 0.5 * h * k as f64).collect();
    let full = x_grid.points();
    let interior = 2..n - 2;

    let mut report = ResidualReport::empty();
    for &t in t_points {
        let line = y.eval_line(&half, t)?;
        let mut shifted = Vec::with_capacity(order);
        for &p in &st.points[1..] {
            shifted.push(y.eval_line(&full, p * t)?);
        }
        let scale = t.powi(-(order as i32));
        let per_point: Vec<(f64, f64, usize)> = interior
            .clone()
            .into_par_iter()
            .map(|i| {
                let k = 2 * i;
                let mut temporal = st.coeffs[0] * line[k];
                for (c, vals) in st.coeffs[1..].iter().zip(&shifted) {
                    temporal += c * vals[i];
                }
                temporal *= scale;
                let d_h = (-line[k + 4] + 16.0 * line[k + 2] - 30.0 * line[k] + 16.0 * line[k - 2] - line[k - 4]) / (12.0 * h * h);
                let d_h2 = (-line[k + 2] + 16.0 * line[k + 1] - 30.0 * line[k] + 16.0 * line[k - 1] - line[k - 2]) / (3.0 * h * h);
                let spatial = (16.0 * d_h2 - d_h) / 15.0;
                ((temporal - spatial).norm(), line[k].norm(), i)
            })
            .collect();
        for (r, mag, i) in per_point {
            report.normalizer = report.normalizer.max(mag);
            if r > report.max_abs || report.location.is_none() {
                report.max_abs = r.max(report.max_abs);
                report.location = Some((full[i], t));
            }
        }
    }
    Ok(report)
}

/// Residual of the q-diffusion equation `D^q_t y = ∂²ₓ y`.
pub fn pde_residual_diffusion<Y: SpaceTimeField + ?Sized>(y: &Y, q: &QParameter, x_grid: &GridSpec, t_points: &[f64]) -> Result<ResidualReport> {
    pde_residual_order(y, q, 1, x_grid, t_points)
}

/// Residual of the q-wave equation `(D^q_t)² y = ∂²ₓ y`; needs the field up
/// to `t/q²` for every checked `t`.
pub fn pde_residual_wave<Y: SpaceTimeField + ?Sized>(y: &Y, q: &QParameter, x_grid: &GridSpec, t_points: &[f64]) -> Result<ResidualReport> {
    pde_residual_order(y, q, 2, x_grid, t_points)
}

/// The classical heat solution for Gaussian data of width `b`:
/// `exp(-x²/(4(t+b))) / √(2(t+b))`.
pub fn classical_heat_solution(b: f64, x: f64, t: f64) -> f64 {
    let w = t + b;
    (-x * x / (4.0 * w)).exp() / (2.0 * w).sqrt()
}

/// Tanh-sinh quadrature of a real function on `[a, b]`, halving the step
/// until successive estimates agree to `rel_tol`.
pub fn tanh_sinh<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let hpi = std::f64::consts::FRAC_PI_2;
    let u_max = 3.5;
    // Contribution of the abscissa pair at ±u.
    let pair = |u: f64| -> f64 {
        let v = hpi * u.sinh();
        let weight = hpi * u.cosh() / v.cosh().powi(2);
        if u == 0.0 {
            return weight * f(mid);
        }
        // distance from the nearer endpoint, computed without cancellation
        let gap = 2.0 / ((2.0 * v.abs()).exp() + 1.0);
        let left = a + half * gap;
        let right = b - half * gap;
        weight * (f(left) + f(right))
    };
    let mut step = 0.5;
    let mut sum = pair(0.0);
    let mut k = 1;
    while k as f64 * step <= u_max {
        sum += pair(k as f64 * step);
        k += 1;
    }
    let mut estimate = half * step * sum;
    for _ in 0..12 {
        step *= 0.5;
        let mut k = 1;
        while k as f64 * step <= u_max {
            sum += pair(k as f64 * step);
            k += 2;
        }
        let next = half * step * sum;
        if !next.is_finite() {
            return Err(QError::Quadrature {
                what: "tanh-sinh",
                delta: f64::NAN,
            });
        }
        let delta = (next - estimate).abs();
        estimate = next;
        if delta <= rel_tol * next.abs() || delta < f64::MIN_POSITIVE {
            return Ok(estimate);
        }
    }
    Err(QError::Quadrature {
        what: "tanh-sinh",
        delta: f64::NAN,
    })
}

/// d'Alembert's solution of the classical wave equation,
/// `½(f(x+t) + f(x-t)) + ½ ∫_{x-t}^{x+t} g`, using real parts of `f` and `g`.
pub fn classical_wave_dalembert<F: Evaluable + ?Sized, G: Evaluable + ?Sized>(f: &F, g: &G, x: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(QError::InvalidParameter {
            name: "t",
            value: t,
            reason: "time must be finite and nonnegative",
        });
    }
    let average = 0.5 * (f.eval(x + t).re + f.eval(x - t).re);
    let integral = tanh_sinh(&|s: f64| g.eval(s).re, x - t, x + t, 1e-14)?;
    Ok(average + 0.5 * integral)
}

/// Γ(s) from `∫_0^∞ t^{s-1} e^{-t} dt` by exp-sinh quadrature.
///
/// With `ln t = (π/2) sinh u` the integrand becomes
/// `exp(s ln t - t) (π/2) cosh u`, which decays double-exponentially at both
/// ends once `Re s >= 1`; smaller arguments are shifted up with
/// `Γ(s) = Γ(s+1)/s`.
pub fn classical_gamma(s: Complex64, ctrl: &SeriesControl) -> Result<Complex64> {
    let nearest = s.re.round();
    if nearest <= 0.0 && (s - nearest).norm() < 1e-14 {
        return Err(QError::Pole {
            what: "gamma",
            s,
            pole: nearest as i64,
            tol: 1e-14,
        });
    }
    let mut shift = Complex64::new(1.0, 0.0);
    let mut z = s;
    while z.re < 1.0 {
        shift *= z;
        z += 1.0;
    }

    let hpi = std::f64::consts::FRAC_PI_2;
    let u_max = 6.0;
    let point = |u: f64| {
        let ln_t = hpi * u.sinh();
        let t = ln_t.exp();
        (z * ln_t - t).exp() * (hpi * u.cosh())
    };
    let mut step = 0.5;
    let n0 = (u_max / step) as i64;
    let mut sum: Complex64 = (-n0..=n0).map(|k| point(k as f64 * step)).sum();
    let mut estimate = sum * step;
    let tol = ctrl.rel_tol.max(4.0 * f64::EPSILON);
    for _ in 0..10 {
        step *= 0.5;
        let n = (u_max / step) as i64;
        sum += (-n..=n).filter(|k| k % 2 != 0).map(|k| point(k as f64 * step)).sum::<Complex64>();
        let next = sum * step;
        let delta = (next - estimate).norm();
        estimate = next;
        if delta <= tol * next.norm() {
            return Ok(estimate / shift);
        }
    }
    Err(QError::Quadrature {
        what: "classical gamma",
        delta: f64::NAN,
    })
}

/// `(1/2πi) ∮ Γ_q(s) ds` on the circle of the given radius around `s = -n`,
/// by the trapezoid rule with `points` nodes.
pub fn contour_residue_qgamma_with(q: &QParameter, n: usize, radius: f64, points: usize, ctrl: &SeriesControl) -> Result<Complex64> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(QError::InvalidParameter {
            name: "radius",
            value: radius,
            reason: "the circle must isolate one pole: 0 < radius < 1",
        });
    }
    if points < 4 {
        return Err(QError::InvalidParameter {
            name: "points",
            value: points as f64,
            reason: "need at least 4 nodes",
        });
    }
    let center = Complex64::new(-(n as f64), 0.0);
    let sum = (0..points)
        .into_par_iter()
        .map(|k| {
            let offset = Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / points as f64);
            q_gamma(q, center + offset, ctrl).map(|g| g * offset)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<Complex64>();
    Ok(sum / points as f64)
}

/// [`contour_residue_qgamma_with`] with 256 nodes and default series control.
pub fn contour_residue_qgamma(q: &QParameter, n: usize, radius: f64) -> Result<Complex64> {
    contour_residue_qgamma_with(q, n, radius, 256, &SeriesControl::default())
}
