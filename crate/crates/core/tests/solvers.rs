//! Spectral solvers checked against the finite-difference residual oracle,
//! classical closed forms and each other.

use std::sync::Arc;

use num_complex::Complex64;
use qmellin::oracle::{classical_heat_solution, pde_residual_diffusion, pde_residual_order, pde_residual_wave};
use qmellin::{
    dq_forward, q_exp, solve_q_diffusion, solve_q_nth, solve_q_wave, DiffusionProblem, Evaluable, GridSpec,
    NthOrderProblem, Profile, QError, QParameter, Result, SeriesControl, SpaceTimeField, WaveProblem,
};

fn qp(q: f64) -> QParameter {
    QParameter::new(q).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const GAUSSIAN: Profile = Profile::Gaussian { b: 1.0 };

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

/// `E_q(-q(1-q) ξ₀² t) e^{-iξ₀x}`
struct DiffusionMode {
    q: QParameter,
    xi: f64,
}

impl SpaceTimeField for DiffusionMode {
    fn eval(&self, x: f64, t: f64) -> Result<Complex64> {
        let e = q_exp(&self.q, c(-self.q.mode_scale() * self.xi * self.xi * t), &SeriesControl::default())?;
        Ok(e * Complex64::from_polar(1.0, -self.xi * x))
    }
}

#[test]
fn diffusion_single_mode_is_exact() {
    let q = qp(0.5);
    let grid = GridSpec::new(-2.0, 2.0, 401).unwrap();
    let r = pde_residual_diffusion(&DiffusionMode { q, xi: 2.0 }, &q, &grid, &[0.1, 0.5, 1.0]).unwrap();
    assert!(r.relative() < 1e-10, "{}", r.relative());
    assert!(r.location.is_some());
}

#[test]
fn finite_difference_converges_at_high_order() {
    let q = qp(0.5);
    let mode = DiffusionMode { q, xi: 2.0 };
    let errs: Vec<f64> = [41, 81, 161]
        .iter()
        .map(|&n| {
            let grid = GridSpec::new(-2.0, 2.0, n).unwrap();
            pde_residual_diffusion(&mode, &q, &grid, &[0.3]).unwrap().relative()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 3.5, "observed order {order} from {errs:?}");
    }
}

#[test]
fn residual_of_linear_static_field_vanishes() {
    let y = |x: f64, _t: f64| Complex64::new(3.0 * x - 1.0, 0.5);
    let grid = GridSpec::new(-1.0, 1.0, 21).unwrap();
    let q = qp(0.5);
    assert!(pde_residual_diffusion(&y, &q, &grid, &[0.2, 1.0]).unwrap().max_abs < 1e-12);
    assert!(pde_residual_wave(&y, &q, &grid, &[0.2, 1.0]).unwrap().max_abs < 1e-12);
}

#[test]
fn residual_requires_positive_times() {
    let y = |x: f64, _t: f64| c(x);
    let grid = GridSpec::new(-1.0, 1.0, 21).unwrap();
    assert!(pde_residual_order(&y, &qp(0.5), 2, &grid, &[0.0]).is_err());
}

#[test]
fn diffusion_reproduces_initial_data_and_solves_the_equation() {
    let r = solve_q_diffusion(&DiffusionProblem::new(qp(0.5), GAUSSIAN).with_times(vec![0.0, 0.3])).unwrap();
    assert_eq!(r.solutions.len(), 2);
    let f: Vec<Complex64> = r.solutions[0].grid().points().iter().map(|&x| GAUSSIAN.eval(x)).collect();
    assert!(max_diff(r.solutions[0].values(), &f) < 1e-8);
    assert!(r.residual_max < 1e-4);
    assert!(r.diagnostics.fourier_error_estimate < 1e-10);
    assert!(r.diagnostics.warnings.is_empty());
}

#[test]
fn diffusion_classical_limit_drift_is_monotone() {
    let t = 0.2;
    let xs: Vec<f64> = (-20..=20).map(|k| 0.25 * k as f64).collect();
    let exact: Vec<Complex64> = xs.iter().map(|&x| c(classical_heat_solution(1.0, x, t))).collect();
    let drift: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|&q| {
            let r = solve_q_diffusion(&DiffusionProblem::new(qp(q), GAUSSIAN)).unwrap();
            max_diff(&r.field.eval_line(&xs, t).unwrap(), &exact)
        })
        .collect();
    assert!(drift[0] > drift[1] && drift[1] > drift[2], "{drift:?}");
    let y = solve_q_diffusion(&DiffusionProblem::new(qp(0.999), GAUSSIAN)).unwrap();
    let v = y.field.eval(0.5, 0.2).unwrap();
    let expected = (-0.25f64 / 4.8).exp() / 2.4f64.sqrt();
    assert!((v.re - expected).abs() / expected < 5e-2);
}

#[test]
fn diffusion_is_linear() {
    let f1 = GAUSSIAN;
    let f2 = Profile::Sech { width: 1.0 };
    let (a, b) = (0.7, -1.9);
    let times = vec![0.0, 0.25];
    let combo = move |x: f64| a * f1.eval(x) + b * f2.eval(x);
    let s1 = solve_q_diffusion(&DiffusionProblem::new(qp(0.5), f1).with_times(times.clone())).unwrap();
    let s2 = solve_q_diffusion(&DiffusionProblem::new(qp(0.5), f2).with_times(times.clone())).unwrap();
    let sc = solve_q_diffusion(&DiffusionProblem::new(qp(0.5), combo).with_times(times)).unwrap();
    for k in 0..2 {
        let lin: Vec<Complex64> =
            s1.solutions[k].values().iter().zip(s2.solutions[k].values()).map(|(u, v)| a * u + b * v).collect();
        assert!(max_diff(sc.solutions[k].values(), &lin) <= 1e-10 * sc.solutions[k].max_abs());
    }
}

#[test]
fn wave_initial_velocity_is_recovered() {
    let g = Profile::Sech { width: 1.0 };
    let p = WaveProblem::new(qp(0.5), GAUSSIAN, g);
    let r = solve_q_wave(&p.with_times(vec![0.0, 0.4])).unwrap();
    assert!(r.residual_max < 1e-4, "{}", r.residual_max);

    let xs: Vec<f64> = (-16..=16).map(|k| 0.5 * k as f64).collect();
    let t = 1e-8;
    let field = &r.field;
    for &x in &xs {
        let line = |s: f64| field.eval(x, s).unwrap();
        let d = dq_forward(&qp(0.5), &line, t).unwrap();
        assert!((d - g.eval(x)).norm() < 1e-6, "x={x}: {d} vs {}", g.value(x));
    }
}

#[test]
fn nth_order_two_matches_wave_for_general_data() {
    let f = |x: f64| c((-(x - 0.7) * (x - 0.7)).exp());
    let g = |x: f64| Complex64::new(0.0, x * (-x * x).exp());
    let times = vec![0.0, 0.3, 0.6];
    let w = solve_q_wave(&WaveProblem::new(qp(0.5), f, g).with_times(times.clone())).unwrap();
    let n2 = solve_q_nth(&NthOrderProblem::new(2, qp(0.5), f).with_g(vec![Arc::new(g)]).with_times(times)).unwrap();
    for (a, b) in w.solutions.iter().zip(&n2.solutions) {
        assert!(max_diff(a.values(), b.values()) < 1e-8 * a.max_abs());
    }
}

#[test]
fn nth_order_reproduces_initial_data() {
    for n in [3, 4] {
        let r = solve_q_nth(&NthOrderProblem::new(n, qp(0.5), GAUSSIAN)).unwrap();
        let f: Vec<Complex64> = r.solutions[0].grid().points().iter().map(|&x| GAUSSIAN.eval(x)).collect();
        assert!(max_diff(r.solutions[0].values(), &f) < 1e-8, "n={n}");
        assert!(r.diagnostics.max_condition.unwrap() < 1e12);
    }
}

#[test]
fn nth_order_three_satisfies_the_equation() {
    let r = solve_q_nth(&NthOrderProblem::new(3, qp(0.5), GAUSSIAN).with_times(vec![0.05])).unwrap();
    assert!(r.residual_max < 1e-3, "{}", r.residual_max);
}

#[test]
fn nth_order_rejects_odd_data_and_bad_orders() {
    let odd = |x: f64| c(x * (-x * x).exp());
    assert!(solve_q_nth(&NthOrderProblem::new(3, qp(0.5), odd)).is_err());
    for n in [0, 1, 5] {
        assert!(matches!(
            solve_q_nth(&NthOrderProblem::new(n, qp(0.5), GAUSSIAN)),
            Err(QError::InvalidParameter { .. })
        ));
    }
}

#[test]
fn negative_times_are_rejected() {
    let p = DiffusionProblem::new(qp(0.5), GAUSSIAN).with_times(vec![0.1, -0.2]);
    assert!(solve_q_diffusion(&p).is_err());
}
