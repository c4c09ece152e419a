//! The two q-derivative operators and their iterates.
//!
//! Forward: `D h(t) = (h(t/q) - h(t)) / ((1-q) t)`.
//! Standard: `𝒟 h(t) = (h(t) - h(qt)) / ((1-q) t)`.
//!
//! The n-fold iterate is a fixed linear stencil,
//! `Dⁿ h(t) = t⁻ⁿ Σ_j c_j h(p_j t)` with `p_j = q^{-j}` (forward) or `q^j`
//! (standard), whose coefficients are accumulated once by recursion.
//!
//! At `t = 0` the quotient is 0/0. If the function carries Taylor coefficients
//! `a_k` at zero (see [`Evaluable::taylor_at_zero`]) the limit is returned:
//! `Dⁿ h(0) = a_n q^{-n(n+1)/2} [n]_q!` for the forward operator and
//! `a_n [n]_q!` for the standard one. In particular the forward limit for
//! `n = 1` is `h'(0)/q`, not `h'(0)`.

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::eval::Evaluable;
use crate::param::QParameter;
use crate::special::q_number;

/// Which q-derivative definition to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QDerivative {
    /// `(h(t/q) - h(t)) / ((1-q) t)`
    #[default]
    Forward,
    /// `(h(t) - h(qt)) / ((1-q) t)`
    Standard,
}

/// Coefficients of the n-fold stencil: `Dⁿ h(t) = t⁻ⁿ Σ_j coeff_j h(point_j t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub points: Vec<f64>,
    pub coeffs: Vec<f64>,
}

/// Builds the n-fold stencil for the given definition.
///
/// Forward: `c'_j = (q^k c_{j-1} - c_j) / (1-q)` when going from order `k`
/// to `k+1`. Standard: `c'_j = (c_j - q^{-k} c_{j-1}) / (1-q)`.
pub fn stencil(q: &QParameter, kind: QDerivative, n: usize) -> Stencil {
    let mut c = vec![1.0];
    for k in 0..n {
        let mut next = vec![0.0; c.len() + 1];
        let shift = match kind {
            QDerivative::Forward => q.q().powi(k as i32),
            QDerivative::Standard => q.q().powi(-(k as i32)),
        };
        for j in 0..next.len() {
            let prev = if j > 0 { c[j - 1] } else { 0.0 };
            let cur = c.get(j).copied().unwrap_or(0.0);
            next[j] = match kind {
                QDerivative::Forward => (shift * prev - cur) / q.one_minus_q(),
                QDerivative::Standard => (cur - shift * prev) / q.one_minus_q(),
            };
        }
        c = next;
    }
    let points = (0..=n)
        .map(|j| match kind {
            QDerivative::Forward => q.q().powi(-(j as i32)),
            QDerivative::Standard => q.q().powi(j as i32),
        })
        .collect();
    Stencil { points, coeffs: c }
}

/// `[n]_q!`
fn q_factorial(q: &QParameter, n: usize) -> f64 {
    (1..=n).map(|k| q_number(q, k as f64)).product()
}

fn limit_at_zero<H: Evaluable + ?Sized>(q: &QParameter, kind: QDerivative, h: &H, n: usize) -> Result<Complex64> {
    let a_n = h
        .taylor_at_zero()
        .and_then(|a| a.get(n).copied())
        .ok_or(QError::Domain {
            what: "q-derivative",
            t: 0.0,
            reason: "the difference quotient is 0/0; supply Taylor coefficients at zero",
        })?;
    let scale = match kind {
        QDerivative::Forward => q.q().powf(-((n * (n + 1)) as f64) / 2.0),
        QDerivative::Standard => 1.0,
    };
    Ok(a_n * scale * q_factorial(q, n))
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(QError::Domain {
            what: "q-derivative",
            t,
            reason: "t must be finite",
        });
    }
    Ok(())
}

/// One application of the chosen q-derivative.
pub fn dq<H: Evaluable + ?Sized>(q: &QParameter, kind: QDerivative, h: &H, t: f64) -> Result<Complex64> {
    check_t(t)?;
    if t == 0.0 {
        return limit_at_zero(q, kind, h, 1);
    }
    let denom = q.one_minus_q() * t;
    Ok(match kind {
        QDerivative::Forward => (h.eval(t / q.q()) - h.eval(t)) / denom,
        QDerivative::Standard => (h.eval(t) - h.eval(q.q() * t)) / denom,
    })
}

/// `D^q_t h(t) = (h(t/q) - h(t)) / ((1-q) t)`
pub fn dq_forward<H: Evaluable + ?Sized>(q: &QParameter, h: &H, t: f64) -> Result<Complex64> {
    dq(q, QDerivative::Forward, h, t)
}

/// `𝒟^q_t h(t) = (h(t) - h(qt)) / ((1-q) t)`
pub fn dq_standard<H: Evaluable + ?Sized>(q: &QParameter, h: &H, t: f64) -> Result<Complex64> {
    dq(q, QDerivative::Standard, h, t)
}

/// The n-fold iterate of the chosen q-derivative, evaluated with the exact
/// stencil over the `n + 1` points `p_j t`.
pub fn dq_power<H: Evaluable + ?Sized>(q: &QParameter, kind: QDerivative, h: &H, t: f64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(QError::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "the order of a q-derivative power must be at least 1",
        });
    }
    check_t(t)?;
    if t == 0.0 {
        return limit_at_zero(q, kind, h, n);
    }
    let st = stencil(q, kind, n);
    let sum: Complex64 = st
        .points
        .iter()
        .zip(&st.coeffs)
        .map(|(&p, &c)| c * h.eval(p * t))
        .sum();
    Ok(sum / t.powi(n as i32))
}

/// `(D^q_t)ⁿ h(t)`
pub fn dq_forward_power<H: Evaluable + ?Sized>(q: &QParameter, h: &H, t: f64, n: usize) -> Result<Complex64> {
    dq_power(q, QDerivative::Forward, h, t, n)
}

/// `(𝒟^q_t)ⁿ h(t)`
pub fn dq_standard_power<H: Evaluable + ?Sized>(q: &QParameter, h: &H, t: f64, n: usize) -> Result<Complex64> {
    dq_power(q, QDerivative::Standard, h, t, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::WithTaylor;
    use crate::param::SeriesControl;
    use crate::special::{q_exp, q_sin_cos};

    fn qp(q: f64) -> QParameter {
        QParameter::new(q).unwrap()
    }

    fn re(f: impl Fn(f64) -> f64 + Send + Sync) -> impl Evaluable {
        move |t: f64| Complex64::new(f(t), 0.0)
    }

    #[test]
    fn constant_and_linear() {
        let p = qp(0.37);
        let c = re(|_| 4.2);
        for t in [0.1, 1.0, -2.0] {
            assert_eq!(dq_forward(&p, &c, t).unwrap(), Complex64::new(0.0, 0.0));
            assert_eq!(dq_standard(&p, &c, t).unwrap(), Complex64::new(0.0, 0.0));
        }
        let lin = re(|t| t);
        assert!((dq_forward(&qp(0.5), &lin, 2.0).unwrap().re - 2.0).abs() < 1e-15);
        for q in [0.2, 0.9] {
            assert!((dq_standard(&qp(q), &lin, 3.0).unwrap().re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn standard_on_square_is_q_number() {
        let p = qp(0.5);
        let v = dq_standard(&p, &re(|t| t * t), 1.0).unwrap();
        assert!((v.re - q_number(&p, 2.0)).abs() < 1e-15);
        assert_eq!(v.re, 1.5);
    }

    #[test]
    fn zero_requires_a_hint() {
        let p = qp(0.5);
        let h = re(|t| t.sin());
        assert!(matches!(dq_forward(&p, &h, 0.0), Err(QError::Domain { .. })));
        let hinted = WithTaylor::new(h, vec![0.0.into(), 1.0.into()]);
        // forward limit h'(0)/q, standard limit h'(0)
        assert!((dq_forward(&p, &hinted, 0.0).unwrap().re - 2.0).abs() < 1e-15);
        assert!((dq_standard(&p, &hinted, 0.0).unwrap().re - 1.0).abs() < 1e-15);
        // and the quotient approaches those limits
        assert!((dq_forward(&p, &hinted, 1e-7).unwrap().re - 2.0).abs() < 1e-6);
        assert!((dq_standard(&p, &hinted, 1e-7).unwrap().re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn power_at_zero_uses_taylor_coefficient() {
        let p = qp(0.5);
        let cube = WithTaylor::new(re(|t| t * t * t), vec![0.0.into(), 0.0.into(), 0.0.into(), 1.0.into()]);
        let at0 = dq_forward_power(&p, &cube, 0.0, 3).unwrap().re;
        // (D^q)^3 t^3 is the constant q^{-6}[3]_q!
        let away = dq_forward_power(&p, &cube, 0.7, 3).unwrap().re;
        assert!((at0 - away).abs() < 1e-12 * away.abs());
        let st0 = dq_standard_power(&p, &cube, 0.0, 3).unwrap().re;
        let st = dq_standard_power(&p, &cube, 0.7, 3).unwrap().re;
        assert!((st0 - st).abs() < 1e-12 * st.abs());
    }

    #[test]
    fn power_one_is_single_application() {
        let p = qp(0.3);
        let h = re(|t| (-t).exp() * t.cos());
        for kind in [QDerivative::Forward, QDerivative::Standard] {
            for t in [0.2, 1.3] {
                let a = dq(&p, kind, &h, t).unwrap();
                let b = dq_power(&p, kind, &h, t, 1).unwrap();
                assert!((a - b).norm() < 1e-15 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn stencil_matches_literal_iteration() {
        let p = qp(0.5);
        let h = re(|t| t * t);
        let once = |t: f64| dq_forward(&p, &h, t).unwrap();
        let twice = dq_forward(&p, &once, 1.0).unwrap();
        let st = dq_forward_power(&p, &h, 1.0, 2).unwrap();
        assert!((twice - st).norm() < 1e-14);
        // (D^q)^2 t^2 = q^{-3} [2]_q [1]_q
        assert!((st.re - 1.5 / 0.125).abs() < 1e-12);

        let g = re(|t| (0.4 * t).exp() + t.powi(5));
        for kind in [QDerivative::Forward, QDerivative::Standard] {
            let d1 = |t: f64| dq(&p, kind, &g, t).unwrap();
            let d2 = |t: f64| dq(&p, kind, &d1, t).unwrap();
            let lit = dq(&p, kind, &d2, 0.8).unwrap();
            let st = dq_power(&p, kind, &g, 0.8, 3).unwrap();
            assert!((lit - st).norm() < 1e-11 * lit.norm(), "{kind:?}");
        }
    }

    #[test]
    fn power_zero_is_rejected() {
        assert!(dq_power(&qp(0.5), QDerivative::Forward, &re(|t| t), 1.0, 0).is_err());
    }

    #[test]
    fn eigen_identity() {
        let p = qp(0.5);
        let ctrl = SeriesControl::default();
        for lambda in [Complex64::new(-0.3, 0.0), Complex64::new(0.0, 0.2)] {
            let e = move |t: f64| q_exp(&p, lambda * t, &ctrl).unwrap();
            for t in [0.1, 1.0, 5.0] {
                let lhs = p.mode_scale() * dq_forward(&p, &e, t).unwrap();
                let rhs = lambda * e(t);
                assert!((lhs - rhs).norm() < 1e-12 * e(t).norm(), "λ={lambda} t={t}");
            }
            let e2 = dq_forward_power(&p, &e, 1.0, 2).unwrap();
            let expect = (lambda / p.mode_scale()).powi(2) * e(1.0);
            assert!((e2 - expect).norm() < 1e-11 * expect.norm());
        }
        let e = move |t: f64| q_exp(&p, Complex64::new(-0.3 * t, 0.0), &ctrl).unwrap();
        let v = dq_forward(&p, &e, 1.0).unwrap();
        let expect = -1.2 * q_exp(&p, Complex64::new(-0.3, 0.0), &ctrl).unwrap();
        assert!((v - expect).norm() < 1e-13);
    }

    #[test]
    fn q_trig_derivative_relations() {
        let p = qp(0.5);
        let ctrl = SeriesControl::default();
        let lambda = 0.7;
        let k = lambda / p.mode_scale();
        let sin = move |t: f64| q_sin_cos(&p, (lambda * t).into(), &ctrl).unwrap().0;
        let cos = move |t: f64| q_sin_cos(&p, (lambda * t).into(), &ctrl).unwrap().1;
        for t in [0.3, 1.0, 2.5] {
            let ds = dq_forward(&p, &sin, t).unwrap();
            let dc = dq_forward(&p, &cos, t).unwrap();
            assert!((ds - k * cos(t)).norm() < 1e-10 * (k * cos(t)).norm());
            assert!((dc + k * sin(t)).norm() < 1e-10 * (k * sin(t)).norm());
        }
    }

    #[test]
    fn classical_limit_on_cube() {
        let h = re(|t| t * t * t);
        let errs: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&q| (dq_forward(&qp(q), &h, 1.0).unwrap().re - 3.0).abs())
            .collect();
        // First-order convergence: the error shrinks about tenfold per step,
        // exactly so once 1-q is small.
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        let ratio = errs[1] / errs[2];
        assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn linearity() {
        let p = qp(0.4);
        let f = re(|t| t.sin());
        let g = re(|t| (t * t).exp());
        let (a, b) = (Complex64::new(2.0, -1.0), Complex64::new(-0.5, 3.0));
        let comb = |t: f64| a * f.eval(t) + b * g.eval(t);
        for t in [0.3, 1.1] {
            let lhs = dq_forward(&p, &comb, t).unwrap();
            let rhs = a * dq_forward(&p, &f, t).unwrap() + b * dq_forward(&p, &g, t).unwrap();
            assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
        }
    }
}
