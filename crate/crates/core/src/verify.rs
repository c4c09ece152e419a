//! The verification suite: ten numbered criteria, each a group of measured
//! errors compared against fixed tolerances.
//!
//! Every measurement pairs a quantity computed by the library with an
//! independent reference (closed forms, the classical-Γ quadrature, contour
//! integrals, finite-difference residuals, d'Alembert's formula).

use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::error::Result;
use crate::eval::{ComplexEvaluable, Evaluable, SpaceTimeField};
use crate::grid::GridSpec;
use crate::oracle::{classical_gamma, classical_heat_solution, classical_wave_dalembert, contour_residue_qgamma, pde_residual_wave};
use crate::param::{QParameter, SeriesControl};
use crate::profiles::Profile;
use crate::qderiv::{dq, dq_forward, QDerivative};
use crate::solvers::{solve_q_diffusion, solve_q_nth, solve_q_wave, DiffusionProblem, NthOrderProblem, WaveProblem};
use crate::special::{q_exp, q_gamma_real, q_gamma_residue, q_number, q_pochhammer_inf, q_sin_cos_real};
use crate::transforms::{laplace_numeric, laplace_of_dq_rhs, mellin_numeric, mellin_of_dq_power_rhs};

/// Nominal tolerances of the criteria.
pub mod tolerances {
    pub const EIGEN_IDENTITY: f64 = 1e-12;
    pub const SERIES_PRODUCT: f64 = 1e-10;
    pub const GAMMA_RECURRENCE: f64 = 1e-10;
    pub const GAMMA_LIMIT: f64 = 1e-2;
    pub const RESIDUE: f64 = 1e-8;
    pub const RESIDUE_RADIUS: f64 = 1e-9;
    pub const MELLIN: f64 = 1e-6;
    pub const MELLIN_LIMIT: f64 = 1e-2;
    pub const LAPLACE: f64 = 1e-6;
    pub const LAPLACE_LIMIT: f64 = 1e-2;
    pub const INITIAL_DATA: f64 = 1e-8;
    pub const DIFFUSION_RESIDUAL: f64 = 1e-4;
    pub const DIFFUSION_LIMIT: f64 = 5e-2;
    pub const SINGLE_MODE_RESIDUAL: f64 = 1e-10;
    pub const WAVE_RESIDUAL: f64 = 1e-4;
    pub const WAVE_LIMIT: f64 = 5e-2;
    pub const NTH_REDUCTION: f64 = 1e-8;
    pub const NTH_RESIDUAL: f64 = 1e-3;
}

/// One measured error against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    /// Strict comparison; a NaN measurement (failed computation) never passes.
    pub fn passed(&self) -> bool {
        self.measured < self.tolerance
    }
}

/// The outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed) && self.within_budget()
    }

    /// One line: id, name, PASS/FAIL, worst check and timing.
    pub fn summary_line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let worst = self
            .checks
            .iter()
            .max_by(|a, b| {
                let ra = a.measured / a.tolerance;
                let rb = b.measured / b.tolerance;
                ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Greater)
            })
            .map(|c| format!("worst: {} = {:.3e} (tol {:.0e})", c.label, c.measured, c.tolerance))
            .unwrap_or_default();
        format!(
            "criterion {:>2} {:<34} {}  {}  [{:.2}s / {:.0}s]",
            self.id,
            self.name,
            status,
            worst,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64()
        )
    }
}

/// How much of the suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Identity checks only (criteria 1-6 and 10), a few seconds.
    Quick,
    /// Everything, including the solvers (criteria 1-10).
    Full,
}

type Runner = fn(f64) -> Vec<Check>;

/// A numbered criterion.
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget_secs: f64,
    pub quick: bool,
    run: Runner,
}

/// All criteria in order.
pub fn criteria() -> &'static [Criterion] {
    &CRITERIA
}

static CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "E_q eigen-identity", budget_secs: 1.0, quick: true, run: eigen_identity },
    Criterion { id: 2, name: "series/product duality", budget_secs: 1.0, quick: true, run: series_product_duality },
    Criterion { id: 3, name: "q-gamma recurrence and limit", budget_secs: 5.0, quick: true, run: gamma_recurrence_and_limit },
    Criterion { id: 4, name: "q-gamma residues", budget_secs: 5.0, quick: true, run: residues },
    Criterion { id: 5, name: "Mellin identity (forward)", budget_secs: 10.0, quick: true, run: mellin_forward },
    Criterion { id: 6, name: "Laplace identity (forward)", budget_secs: 10.0, quick: true, run: laplace_forward },
    Criterion { id: 7, name: "diffusion solver", budget_secs: 30.0, quick: false, run: diffusion_solver },
    Criterion { id: 8, name: "wave solver", budget_secs: 30.0, quick: false, run: wave_solver },
    Criterion { id: 9, name: "n-th order solver", budget_secs: 60.0, quick: false, run: nth_order_solver },
    Criterion { id: 10, name: "standard q-derivative variant", budget_secs: 20.0, quick: true, run: standard_variant },
];

/// Runs one criterion with every tolerance multiplied by `tol_scale`.
pub fn run_criterion(c: &Criterion, tol_scale: f64) -> CriterionResult {
    let start = Instant::now();
    let checks = (c.run)(tol_scale);
    CriterionResult {
        id: c.id,
        name: c.name,
        checks,
        elapsed: start.elapsed(),
        budget: Duration::from_secs_f64(c.budget_secs),
    }
}

/// Runs the criteria selected by `level`.
pub fn run_level(level: Level, tol_scale: f64) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| level == Level::Full || c.quick)
        .map(|c| run_criterion(c, tol_scale))
        .collect()
}

/// Wraps a fallible measurement; errors become NaN with the message in the label.
fn measure(label: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    match f() {
        Ok(measured) => Check {
            label: label.to_string(),
            measured,
            tolerance,
        },
        Err(e) => Check {
            label: format!("{label} (error: {e})"),
            measured: f64::NAN,
            tolerance,
        },
    }
}

fn qp(q: f64) -> QParameter {
    QParameter::new(q).expect("valid base")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// max over a set of fallible measurements
fn worst(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = 0.0f64;
    for v in values {
        let v = v?;
        m = if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) };
    }
    Ok(m)
}

fn eigen_identity(scale: f64) -> Vec<Check> {
    let p = qp(0.5);
    let ctrl = SeriesControl::default();
    let lambdas = [c(-0.3), Complex64::new(0.0, 0.2)];
    let value = worst(lambdas.iter().flat_map(|&lambda| {
        [0.1, 1.0, 5.0].map(move |t| {
            let e = move |t: f64| q_exp(&p, lambda * t, &ctrl).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let lhs = p.mode_scale() * dq_forward(&p, &e, t)?;
            let rhs = lambda * q_exp(&p, lambda * t, &ctrl)?;
            Ok((lhs - rhs).norm() / rhs.norm())
        })
    }));
    vec![measure("q(1-q) D E_q(λt) vs λ E_q(λt)", tolerances::EIGEN_IDENTITY * scale, || value)]
}

fn series_product_duality(scale: f64) -> Vec<Check> {
    let ctrl = SeriesControl::default();
    let zs = [c(0.5), c(-0.5), c(2.0), c(-2.0), Complex64::new(0.3, 0.4)];
    let value = worst([0.1, 0.5, 0.9].iter().flat_map(|&q| {
        zs.map(move |z| {
            let p = qp(q);
            let series = q_exp(&p, z, &ctrl)?;
            let product = q_pochhammer_inf(&p, -z, &ctrl)?;
            if product == c(0.0) {
                // Exact zero of E_q: judge the series against its own scale.
                let scale = q_exp(&p, c(z.norm()), &ctrl)?.norm();
                Ok(series.norm() / scale)
            } else {
                Ok((series - product).norm() / series.norm())
            }
        })
    }));
    vec![measure("E_q(z) vs (-z;q)_inf", tolerances::SERIES_PRODUCT * scale, || value)]
}

fn gamma_recurrence_and_limit(scale: f64) -> Vec<Check> {
    let ctrl = SeriesControl::default();
    let rec = worst([0.3, 0.7].iter().flat_map(|&q| {
        [0.5, 1.5, 2.5, 4.0].map(move |s| {
            let p = qp(q);
            let lhs = q_gamma_real(&p, s + 1.0, &ctrl)?;
            let rhs = q_number(&p, s) * q_gamma_real(&p, s, &ctrl)?;
            Ok((lhs - rhs).abs() / lhs.abs())
        })
    }));
    let lim = worst([1.5, 2.5, 4.0].map(|s| {
        let gq = q_gamma_real(&qp(0.9999), s, &ctrl)?;
        let g = classical_gamma(c(s), &ctrl)?.re;
        Ok((gq - g).abs() / g)
    }));
    vec![
        measure("Γ_q(s+1) vs [s]_q Γ_q(s)", tolerances::GAMMA_RECURRENCE * scale, || rec),
        measure("Γ_0.9999(s) vs Γ(s)", tolerances::GAMMA_LIMIT * scale, || lim),
    ]
}

fn residues(scale: f64) -> Vec<Check> {
    let p = qp(0.5);
    let closed = worst((0..3).map(|n| {
        let exact = q_gamma_residue(&p, n);
        let contour = contour_residue_qgamma(&p, n, 0.25)?;
        Ok((contour - c(exact)).norm() / exact.abs())
    }));
    let radius = worst((0..3).flat_map(|n| {
        [0.1, 0.4].map(move |r| {
            let base = contour_residue_qgamma(&p, n, 0.25)?;
            let other = contour_residue_qgamma(&p, n, r)?;
            Ok((other - base).norm() / base.norm())
        })
    }));
    vec![
        measure("closed form vs contour integral", tolerances::RESIDUE * scale, || closed),
        measure("contour radius independence", tolerances::RESIDUE_RADIUS * scale, || radius),
    ]
}

fn exp_decay() -> impl Evaluable + Copy {
    |t: f64| c((-t).exp())
}

fn mellin_checks(kind: QDerivative, scale: f64) -> Vec<Check> {
    let ctrl = SeriesControl::default();
    let gamma = move |s: Complex64| classical_gamma(s, &ctrl).unwrap_or(c(f64::NAN));
    // e^{-t²} has Mellin image Γ(s/2)/2.
    let half_gamma = move |s: Complex64| 0.5 * gamma(0.5 * s);
    let h = exp_decay();
    let g = |t: f64| c((-t * t).exp());
    let closure = |p: QParameter, s: f64, h: &dyn Evaluable, hstar: &dyn ComplexEvaluable| -> Result<f64> {
        let dh = |t: f64| dq(&p, kind, h, t).unwrap_or(c(f64::NAN));
        let lhs = mellin_numeric(&dh, c(s), &ctrl)?.value;
        let rhs = mellin_of_dq_power_rhs(&p, kind, hstar, c(s), 1);
        // Normalise by the smaller of |rhs| and |h*(s)|: the stricter choice.
        let norm = rhs.norm().min(hstar.eval(c(s)).norm());
        Ok((lhs - rhs).norm() / norm)
    };
    let identity = worst([0.3, 0.7].iter().flat_map(|&q| {
        [1.5, 2.5].into_iter().flat_map(move |s| {
            [closure(qp(q), s, &h, &gamma), closure(qp(q), s, &g, &half_gamma)]
        })
    }));
    let limit = worst([1.5, 2.5].map(|s| {
        let p = qp(0.999);
        let dh = move |t: f64| dq(&p, kind, &h, t).unwrap_or(c(f64::NAN));
        let lhs = mellin_numeric(&dh, c(s), &ctrl)?.value;
        let classical = -(s - 1.0) * gamma(c(s - 1.0));
        Ok((lhs - classical).norm() / classical.norm())
    }));
    vec![
        measure("quadrature vs closed-form Mellin image", tolerances::MELLIN * scale, || identity),
        measure("q=0.999 vs -(s-1)Γ(s-1)", tolerances::MELLIN_LIMIT * scale, || limit),
    ]
}

fn laplace_checks(kind: QDerivative, scale: f64) -> Vec<Check> {
    let ctrl = SeriesControl::default();
    let h = exp_decay();
    let hbar = |s: Complex64| 1.0 / (s + 1.0);
    let s = c(2.0);
    let elementary = match kind {
        QDerivative::Forward => 2.0 * (0.75f64).ln(),
        QDerivative::Standard => 2.0 * (5.0f64 / 6.0).ln(),
    };
    let lhs_at = |q: f64| -> Result<Complex64> {
        let p = qp(q);
        let dh = move |t: f64| dq(&p, kind, &h, t).unwrap_or(c(f64::NAN));
        Ok(laplace_numeric(&dh, s, &ctrl)?.value)
    };
    let identity = (|| {
        let lhs = lhs_at(0.5)?;
        let rhs = laplace_of_dq_rhs(&qp(0.5), kind, &hbar, c(1.0), s)?;
        Ok((lhs - rhs).norm() / rhs.norm())
    })();
    let closed = (|| {
        let lhs = lhs_at(0.5)?;
        Ok((lhs - c(elementary)).norm() / elementary.abs())
    })();
    let limit = (|| {
        let lhs = lhs_at(0.999)?;
        Ok((lhs - c(-1.0 / 3.0)).norm() * 3.0)
    })();
    vec![
        measure("quadrature vs segment-integral right side", tolerances::LAPLACE * scale, || identity),
        measure("quadrature vs elementary closed form", tolerances::LAPLACE * scale, || closed),
        measure("q=0.999 vs s h̄(s) - h(0) = -1/3", tolerances::LAPLACE_LIMIT * scale, || limit),
    ]
}

fn mellin_forward(scale: f64) -> Vec<Check> {
    mellin_checks(QDerivative::Forward, scale)
}

fn laplace_forward(scale: f64) -> Vec<Check> {
    laplace_checks(QDerivative::Forward, scale)
}

fn standard_variant(scale: f64) -> Vec<Check> {
    let mut checks = mellin_checks(QDerivative::Standard, scale);
    checks.extend(laplace_checks(QDerivative::Standard, scale));
    for ch in &mut checks {
        ch.label = format!("standard: {}", ch.label);
    }
    checks
}

fn gaussian() -> Profile {
    Profile::Gaussian { b: 1.0 }
}

/// `max |y(·,0) - f| / max |f|` on the report's grid.
fn initial_error(report: &crate::solvers::SolveReport, f: &dyn Evaluable) -> f64 {
    let y0 = &report.solutions[0];
    let fmax = y0.iter().map(|(x, _)| f.eval(x).norm()).fold(0.0, f64::max);
    y0.iter().map(|(x, v)| (v - f.eval(x)).norm()).fold(0.0, f64::max) / fmax
}

fn diffusion_solver(scale: f64) -> Vec<Check> {
    let f = gaussian();
    let run = solve_q_diffusion(&DiffusionProblem::new(qp(0.5), f).with_times(vec![0.0, 0.1, 0.3]));
    let (init, resid) = match &run {
        Ok(r) => (Ok(initial_error(r, &f)), Ok(r.residual_max)),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    let limit = (|| {
        let r = solve_q_diffusion(&DiffusionProblem::new(qp(0.999), f))?;
        let y = r.field.eval(0.5, 0.2)?;
        let exact = classical_heat_solution(1.0, 0.5, 0.2);
        Ok((y - c(exact)).norm() / exact)
    })();
    vec![
        measure("t=0 reproduction", tolerances::INITIAL_DATA * scale, || init),
        measure("PDE residual at t=0.1,0.3", tolerances::DIFFUSION_RESIDUAL * scale, || resid),
        measure("q=0.999 vs classical heat solution", tolerances::DIFFUSION_LIMIT * scale, || limit),
    ]
}

/// `Cos_q(q(1-q) ξ₀ t) e^{-iξ₀x}`, an exact solution of the q-wave equation.
struct CosMode {
    q: QParameter,
    xi: f64,
}

impl SpaceTimeField for CosMode {
    fn eval(&self, x: f64, t: f64) -> Result<Complex64> {
        let (_, cos) = q_sin_cos_real(&self.q, self.q.mode_scale() * self.xi * t, &SeriesControl::default())?;
        Ok(cos * Complex64::from_polar(1.0, -self.xi * x))
    }
}

fn wave_solver(scale: f64) -> Vec<Check> {
    let f = gaussian();
    let zero = Profile::Zero;
    let run = solve_q_wave(&WaveProblem::new(qp(0.5), f, zero).with_times(vec![0.0, 0.5]));
    let (init, resid) = match &run {
        Ok(r) => (Ok(initial_error(r, &f)), Ok(r.residual_max)),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    let mode = (|| {
        let grid = GridSpec::new(-2.0, 2.0, 401)?;
        let field = CosMode { q: qp(0.5), xi: 2.0 };
        Ok(pde_residual_wave(&field, &qp(0.5), &grid, &[0.1, 0.5, 1.0])?.relative())
    })();
    let limit = (|| {
        let r = solve_q_wave(&WaveProblem::new(qp(0.999), f, zero))?;
        let xs: Vec<f64> = (-8..=8).map(|k| 0.5 * k as f64).collect();
        let y = r.field.eval_line(&xs, 0.5)?;
        let mut max_err = 0.0f64;
        let mut max_ref = 0.0f64;
        for (x, v) in xs.iter().zip(y) {
            let d = classical_wave_dalembert(&f, &zero, *x, 0.5)?;
            max_err = max_err.max((v - c(d)).norm());
            max_ref = max_ref.max(d.abs());
        }
        Ok(max_err / max_ref)
    })();
    vec![
        measure("t=0 reproduction", tolerances::INITIAL_DATA * scale, || init),
        measure("single-mode residual", tolerances::SINGLE_MODE_RESIDUAL * scale, || mode),
        measure("solver PDE residual at t=0.5", tolerances::WAVE_RESIDUAL * scale, || resid),
        measure("q=0.999 vs d'Alembert at t=0.5", tolerances::WAVE_LIMIT * scale, || limit),
    ]
}

fn nth_order_solver(scale: f64) -> Vec<Check> {
    let f = gaussian();
    let times = vec![0.0, 0.5];
    let reduction = (|| {
        let w = solve_q_wave(&WaveProblem::new(qp(0.5), f, Profile::Zero).with_times(times.clone()))?;
        let n2 = solve_q_nth(&NthOrderProblem::new(2, qp(0.5), f).with_times(times.clone()))?;
        let mut diff = 0.0f64;
        let mut norm = 0.0f64;
        for (a, b) in w.solutions.iter().zip(&n2.solutions) {
            norm = norm.max(a.max_abs());
            for (u, v) in a.values().iter().zip(b.values()) {
                diff = diff.max((u - v).norm());
            }
        }
        Ok(diff / norm)
    })();
    let third = (|| {
        let r = solve_q_nth(&NthOrderProblem::new(3, qp(0.5), f).with_times(vec![0.05]))?;
        Ok(r.residual_max)
    })();
    vec![
        measure("n=2 vs wave solver", tolerances::NTH_REDUCTION * scale, || reduction),
        measure("n=3 PDE residual at t=0.05", tolerances::NTH_RESIDUAL * scale, || third),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_are_numbered_in_order() {
        let ids: Vec<u8> = criteria().iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=10).collect::<Vec<_>>());
        let quick: Vec<u8> = criteria().iter().filter(|c| c.quick).map(|c| c.id).collect();
        assert_eq!(quick, vec![1, 2, 3, 4, 5, 6, 10]);
    }

    #[test]
    fn nan_and_zero_tolerance_fail() {
        let ch = Check {
            label: "x".into(),
            measured: f64::NAN,
            tolerance: 1.0,
        };
        assert!(!ch.passed());
        let ch = Check {
            label: "x".into(),
            measured: 0.0,
            tolerance: 0.0,
        };
        assert!(!ch.passed());
    }

    #[test]
    fn quick_identity_criteria_pass() {
        for c in criteria().iter().filter(|c| c.id <= 2) {
            let r = run_criterion(c, 1.0);
            assert!(r.checks.iter().all(Check::passed), "{}", r.summary_line());
        }
    }
}
