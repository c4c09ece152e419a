//! Fourier spectral solvers for the q-diffusion equation `D^q_t y = ∂²ₓ y`,
//! the q-wave equation `(D^q_t)² y = ∂²ₓ y`, and the n-th order equation
//! `(D^q_t)ⁿ y = ∂²ₓ y`, all on the whole line with decaying data.
//!
//! Each Fourier mode `e^{-iξx}` evolves by an E_q-type kernel:
//!
//! * diffusion: `F(ξ) E_q(-q(1-q) ξ² t)`;
//! * wave: `F(ξ) Cos_q(q(1-q) ξ t) + (G(ξ)/ξ) Sin_q(q(1-q) ξ t)`, with the
//!   `ξ = 0` mode `F(0) + G(0) q t`;
//! * order n: `Σ_m A_m(ξ) E_q(q(1-q) ν_m t)` with `ν_m = ω_m |ξ|^{2/n}` and
//!   `ω_m = e^{(2m+1)πi/n}`, so that `ν_mⁿ = -ξ²`. The `A_m` solve the
//!   Vandermonde system `Σ_m A_m ν_m^k = G_k(ξ)` (`G_0 = F`) that matches
//!   `y` and its first `n-1` q-derivatives at `t = 0`. The `ξ = 0` mode is
//!   the polynomial `Σ_k G_k(0) q^{k(k+1)/2} t^k / [k]_q!`.
//!
//! The solution is synthesized with the trapezoid rule on the ξ grid and can
//! be evaluated at any `(x, t)` through [`SpectralSolution`], which is what the
//! residual check samples.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QError, Result};
use crate::eval::{Evaluable, SpaceTimeField};
use crate::grid::{GridFunction, GridSpec, SpectralField};
use crate::oracle::{pde_residual_order, ResidualReport};
use crate::param::{QParameter, SeriesControl};
use crate::special::{q_exp_with, q_number, q_sin_cos_real_diag, ExpMethod};
use crate::transforms::{fourier_forward, synthesize, DecayCheck};

/// Mode systems with a larger condition number are refused.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative tolerance of the evenness check on data for orders `n >= 3`.
pub const EVENNESS_TOL: f64 = 1e-12;

/// Orders accepted by [`solve_q_nth`].
pub const NTH_ORDERS: std::ops::RangeInclusive<usize> = 2..=4;

/// The q-diffusion initial value problem `D^q_t y = ∂²ₓ y`, `y(x,0) = f(x)`.
#[derive(Clone)]
pub struct DiffusionProblem {
    pub q: QParameter,
    pub f: Arc<dyn Evaluable>,
    /// Output grid, also the quadrature window of the forward transform.
    pub x_grid: GridSpec,
    pub xi_grid: GridSpec,
    pub times: Vec<f64>,
    pub ctrl: SeriesControl,
    pub decay: DecayCheck,
}

impl DiffusionProblem {
    /// A problem on the default grids with `times = [0]`.
    pub fn new(q: QParameter, f: impl Evaluable + 'static) -> Self {
        Self {
            q,
            f: Arc::new(f),
            x_grid: GridSpec::default_window(),
            xi_grid: GridSpec::default_window(),
            times: vec![0.0],
            ctrl: SeriesControl::default(),
            decay: DecayCheck::Warn,
        }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.times = times;
        self
    }

    pub fn with_grids(mut self, x_grid: GridSpec, xi_grid: GridSpec) -> Self {
        self.x_grid = x_grid;
        self.xi_grid = xi_grid;
        self
    }
}

/// The q-wave initial value problem `(D^q_t)² y = ∂²ₓ y`, `y(x,0) = f(x)`,
/// `D^q_t y(x,0) = g(x)`.
#[derive(Clone)]
pub struct WaveProblem {
    pub q: QParameter,
    pub f: Arc<dyn Evaluable>,
    pub g: Arc<dyn Evaluable>,
    pub x_grid: GridSpec,
    pub xi_grid: GridSpec,
    pub times: Vec<f64>,
    pub ctrl: SeriesControl,
    pub decay: DecayCheck,
}

impl WaveProblem {
    pub fn new(q: QParameter, f: impl Evaluable + 'static, g: impl Evaluable + 'static) -> Self {
        Self {
            q,
            f: Arc::new(f),
            g: Arc::new(g),
            x_grid: GridSpec::default_window(),
            xi_grid: GridSpec::default_window(),
            times: vec![0.0],
            ctrl: SeriesControl::default(),
            decay: DecayCheck::Warn,
        }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.times = times;
        self
    }

    pub fn with_grids(mut self, x_grid: GridSpec, xi_grid: GridSpec) -> Self {
        self.x_grid = x_grid;
        self.xi_grid = xi_grid;
        self
    }
}

/// The order-n problem `(D^q_t)ⁿ y = ∂²ₓ y` with `y(x,0) = f(x)` and
/// `(D^q_t)^k y(x,0) = g_k(x)` for `k = 1..n-1`.
///
/// For `n >= 3` the data must be even in `x`.
#[derive(Clone)]
pub struct NthOrderProblem {
    pub n: usize,
    pub q: QParameter,
    pub f: Arc<dyn Evaluable>,
    /// `g_1, ..., g_{n-1}`
    pub g: Vec<Arc<dyn Evaluable>>,
    pub x_grid: GridSpec,
    pub xi_grid: GridSpec,
    pub times: Vec<f64>,
    pub ctrl: SeriesControl,
    pub decay: DecayCheck,
}

impl NthOrderProblem {
    /// A problem with all `g_k ≡ 0`.
    pub fn new(n: usize, q: QParameter, f: impl Evaluable + 'static) -> Self {
        let zero: Arc<dyn Evaluable> = Arc::new(|_: f64| Complex64::new(0.0, 0.0));
        Self {
            n,
            q,
            f: Arc::new(f),
            g: vec![zero; n.saturating_sub(1)],
            x_grid: GridSpec::default_window(),
            xi_grid: GridSpec::default_window(),
            times: vec![0.0],
            ctrl: SeriesControl::default(),
            decay: DecayCheck::Warn,
        }
    }

    pub fn with_g(mut self, g: Vec<Arc<dyn Evaluable>>) -> Self {
        self.g = g;
        self
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.times = times;
        self
    }

    pub fn with_grids(mut self, x_grid: GridSpec, xi_grid: GridSpec) -> Self {
        self.x_grid = x_grid;
        self.xi_grid = xi_grid;
        self
    }
}

/// Truncation and conditioning information gathered while solving.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Largest estimated quadrature error among the forward transforms.
    pub fourier_error_estimate: f64,
    /// Most series/product terms used by any E_q evaluation.
    pub max_series_terms: usize,
    /// Largest condition number of the per-mode coefficient systems (order n only).
    pub max_condition: Option<f64>,
    pub warnings: Vec<String>,
}

/// Output of a solver: the solution on the x grid at each requested time, the
/// oracle residual, and the field itself for evaluation elsewhere.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub times: Vec<f64>,
    pub solutions: Vec<GridFunction>,
    /// PDE residual on the interior of the x grid at every positive time.
    pub residual: ResidualReport,
    /// `residual.relative()`
    pub residual_max: f64,
    pub diagnostics: Diagnostics,
    pub field: SpectralSolution,
}

#[derive(Debug, Clone)]
enum Modes {
    Diffusion {
        f: Vec<Complex64>,
    },
    Wave {
        f: Vec<Complex64>,
        g: Vec<Complex64>,
    },
    Nth {
        /// `ν_m` per ξ (empty at ξ = 0)
        nu: Vec<Vec<Complex64>>,
        /// `A_m` per ξ
        coeffs: Vec<Vec<Complex64>>,
        /// `G_k(ξ)`, `k = 0..n-1`, used for the ξ = 0 mode
        data: Vec<Vec<Complex64>>,
    },
}

/// A solution `y(x, t)` represented by its Fourier modes.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    q: QParameter,
    ctrl: SeriesControl,
    order: usize,
    xi: Vec<f64>,
    weights: Vec<f64>,
    modes: Modes,
}

impl SpectralSolution {
    /// Time order of the equation the field solves.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Weighted mode amplitudes `w_j S_j(t)` and the most E_q terms used.
    fn amplitudes(&self, t: f64) -> Result<(Vec<Complex64>, usize)> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(QError::Domain {
                what: "spectral solution",
                t,
                reason: "time must be finite and nonnegative",
            });
        }
        let q = &self.q;
        let ctrl = &self.ctrl;
        let a = q.mode_scale();
        let per_mode: Vec<(Complex64, usize)> = (0..self.xi.len())
            .into_par_iter()
            .map(|j| -> Result<(Complex64, usize)> {
                let xi = self.xi[j];
                let (amp, terms) = match &self.modes {
                    Modes::Diffusion { f } => {
                        let e = q_exp_with(q, Complex64::new(-a * xi * xi * t, 0.0), ExpMethod::Auto, ctrl)?;
                        (f[j] * e.value, e.terms)
                    }
                    Modes::Wave { f, g } => {
                        if xi == 0.0 {
                            (f[j] + g[j] * q.q() * t, 0)
                        } else {
                            let (s, c, terms) = q_sin_cos_real_diag(q, a * xi * t, ctrl)?;
                            (f[j] * c + g[j] / xi * s, terms)
                        }
                    }
                    Modes::Nth { nu, coeffs, data } => {
                        if nu[j].is_empty() {
                            let mut sum = Complex64::new(0.0, 0.0);
                            let mut fact = 1.0;
                            for (k, gk) in data.iter().enumerate() {
                                if k > 0 {
                                    fact *= q_number(q, k as f64);
                                }
                                let kf = k as f64;
                                sum += gk[j] * q.q().powf(kf * (kf + 1.0) / 2.0) * t.powi(k as i32) / fact;
                            }
                            (sum, 0)
                        } else {
                            let mut sum = Complex64::new(0.0, 0.0);
                            let mut terms = 0;
                            for (am, nm) in coeffs[j].iter().zip(&nu[j]) {
                                let e = q_exp_with(q, a * nm * t, ExpMethod::Auto, ctrl)?;
                                sum += am * e.value;
                                terms = terms.max(e.terms);
                            }
                            (sum, terms)
                        }
                    }
                };
                Ok((amp * self.weights[j], terms))
            })
            .collect::<Result<_>>()?;
        let terms = per_mode.iter().map(|p| p.1).max().unwrap_or(0);
        Ok((per_mode.into_iter().map(|p| p.0).collect(), terms))
    }

    /// Values at `xs` and time `t`, with the most E_q terms used.
    pub fn eval_line_with_terms(&self, xs: &[f64], t: f64) -> Result<(Vec<Complex64>, usize)> {
        let (amps, terms) = self.amplitudes(t)?;
        Ok((synthesize(&self.xi, &amps, xs), terms))
    }
}

impl SpaceTimeField for SpectralSolution {
    fn eval(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.eval_line(&[x], t)?[0])
    }

    fn eval_line(&self, xs: &[f64], t: f64) -> Result<Vec<Complex64>> {
        self.eval_line_with_terms(xs, t).map(|(v, _)| v)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(QError::InvalidParameter {
            name: "times",
            value: t,
            reason: "times must be finite and nonnegative",
        });
    }
    Ok(())
}

fn transform(f: &dyn Evaluable, xi: &GridSpec, x: &GridSpec, decay: DecayCheck, label: &str, diag: &mut Diagnostics) -> Result<SpectralField> {
    let spec = fourier_forward(f, xi, x, decay)?;
    diag.fourier_error_estimate = diag.fourier_error_estimate.max(spec.error_estimate());
    diag.warnings.extend(spec.warnings().iter().map(|w| format!("{label}: {w}")));
    Ok(spec)
}

fn finish(field: SpectralSolution, x_grid: &GridSpec, times: &[f64], mut diagnostics: Diagnostics) -> Result<SolveReport> {
    let xs = x_grid.points();
    let mut solutions = Vec::with_capacity(times.len());
    for &t in times {
        let (vals, terms) = field.eval_line_with_terms(&xs, t)?;
        diagnostics.max_series_terms = diagnostics.max_series_terms.max(terms);
        solutions.push(GridFunction::new(*x_grid, vals)?);
    }
    let positive: Vec<f64> = times.iter().copied().filter(|&t| t > 0.0).collect();
    let residual = if positive.is_empty() {
        ResidualReport::empty()
    } else {
        pde_residual_order(&field, &field.q, field.order, x_grid, &positive)?
    };
    Ok(SolveReport {
        times: times.to_vec(),
        solutions,
        residual_max: residual.relative(),
        residual,
        diagnostics,
        field,
    })
}

fn base_solution(q: QParameter, ctrl: SeriesControl, order: usize, xi_grid: &GridSpec, modes: Modes) -> SpectralSolution {
    SpectralSolution {
        q,
        ctrl,
        order,
        xi: xi_grid.points(),
        weights: xi_grid.trapezoid_weights(),
        modes,
    }
}

/// Solves the q-diffusion problem:
/// `y(x,t) = (1/√(2π)) ∫ F(ξ) E_q(-q(1-q) ξ² t) e^{-iξx} dξ`.
pub fn solve_q_diffusion(p: &DiffusionProblem) -> Result<SolveReport> {
    check_times(&p.times)?;
    let mut diag = Diagnostics::default();
    let f = transform(&*p.f, &p.xi_grid, &p.x_grid, p.decay, "f", &mut diag)?;
    let modes = Modes::Diffusion { f: f.values().to_vec() };
    let field = base_solution(p.q, p.ctrl, 1, &p.xi_grid, modes);
    finish(field, &p.x_grid, &p.times, diag)
}

/// Solves the q-wave problem:
/// `y(x,t) = (1/√(2π)) ∫ {F Cos_q(q(1-q)ξt) + (G/ξ) Sin_q(q(1-q)ξt)} e^{-iξx} dξ`.
pub fn solve_q_wave(p: &WaveProblem) -> Result<SolveReport> {
    check_times(&p.times)?;
    let mut diag = Diagnostics::default();
    let f = transform(&*p.f, &p.xi_grid, &p.x_grid, p.decay, "f", &mut diag)?;
    let g = transform(&*p.g, &p.xi_grid, &p.x_grid, p.decay, "g", &mut diag)?;
    let modes = Modes::Wave {
        f: f.values().to_vec(),
        g: g.values().to_vec(),
    };
    let field = base_solution(p.q, p.ctrl, 2, &p.xi_grid, modes);
    finish(field, &p.x_grid, &p.times, diag)
}

fn check_even(name: &str, h: &dyn Evaluable, grid: &GridSpec) -> Result<()> {
    let xs = grid.points();
    let mut max = 0.0f64;
    let mut odd = 0.0f64;
    for &x in &xs {
        let (a, b) = (h.eval(x), h.eval(-x));
        max = max.max(a.norm());
        odd = odd.max((a - b).norm());
    }
    if odd > EVENNESS_TOL * max {
        return Err(QError::Precondition(format!(
            "orders n >= 3 need even data; {name}(x) - {name}(-x) reaches {odd:e} (max |{name}| = {max:e})"
        )));
    }
    Ok(())
}

/// Condition number from the singular values of a square matrix.
fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves the order-n problem for `n ∈ {2, 3, 4}`.
///
/// The mode coefficients come from an LU solve of the `n × n` Vandermonde
/// system in the `ν_m`; its condition number is recorded and systems above
/// [`CONDITION_LIMIT`] are refused. For `n = 2` this reproduces the wave
/// solver for arbitrary data.
pub fn solve_q_nth(p: &NthOrderProblem) -> Result<SolveReport> {
    check_times(&p.times)?;
    let n = p.n;
    if !NTH_ORDERS.contains(&n) {
        return Err(QError::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "supported orders are 2, 3 and 4",
        });
    }
    if p.g.len() != n - 1 {
        return Err(QError::InvalidParameter {
            name: "g",
            value: p.g.len() as f64,
            reason: "need exactly n-1 initial q-derivatives",
        });
    }
    if n >= 3 {
        check_even("f", &*p.f, &p.x_grid)?;
        for (k, g) in p.g.iter().enumerate() {
            check_even(&format!("g{}", k + 1), &**g, &p.x_grid)?;
        }
    }

    let mut diag = Diagnostics::default();
    let mut data = vec![transform(&*p.f, &p.xi_grid, &p.x_grid, p.decay, "f", &mut diag)?.values().to_vec()];
    for (k, g) in p.g.iter().enumerate() {
        let label = format!("g{}", k + 1);
        data.push(transform(&**g, &p.xi_grid, &p.x_grid, p.decay, &label, &mut diag)?.values().to_vec());
    }

    let phases: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, (2 * m + 1) as f64 * std::f64::consts::PI / n as f64))
        .collect();
    let xi = p.xi_grid.points();
    let solved: Vec<(Vec<Complex64>, Vec<Complex64>, f64)> = xi
        .par_iter()
        .enumerate()
        .map(|(j, &x)| -> Result<_> {
            if x == 0.0 {
                return Ok((Vec::new(), Vec::new(), 1.0));
            }
            let r = x.abs().powf(2.0 / n as f64);
            let nu: Vec<Complex64> = phases.iter().map(|w| w * r).collect();
            let m = DMatrix::from_fn(n, n, |k, col| nu[col].powu(k as u32));
            let cond = condition_number(&m);
            if cond.is_nan() || cond > CONDITION_LIMIT {
                return Err(QError::Conditioning { xi: x, condition: cond });
            }
            let rhs = nalgebra::DVector::from_iterator(n, data.iter().map(|gk| gk[j]));
            let sol = m.lu().solve(&rhs).ok_or(QError::Conditioning {
                xi: x,
                condition: f64::INFINITY,
            })?;
            Ok((nu, sol.iter().copied().collect(), cond))
        })
        .collect::<Result<_>>()?;

    let max_cond = solved.iter().map(|s| s.2).fold(0.0, f64::max);
    diag.max_condition = Some(max_cond);
    let (nu, coeffs): (Vec<_>, Vec<_>) = solved.into_iter().map(|(a, b, _)| (a, b)).unzip();
    let field = base_solution(p.q, p.ctrl, n, &p.xi_grid, Modes::Nth { nu, coeffs, data });
    finish(field, &p.x_grid, &p.times, diag)
}
