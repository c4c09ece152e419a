//! Numerical Fourier, Laplace and Mellin transforms, the closed-form right-hand
//! sides of the q-derivative transform identities, and the inverse Mellin
//! kernel obtained by summing the residues of Γ_q.
//!
//! Fourier transforms use the symmetric convention
//! `F(ξ) = (1/√(2π)) ∫ f(x) e^{iξx} dx`, `f(x) = (1/√(2π)) ∫ F(ξ) e^{-iξx} dξ`,
//! both by the composite trapezoid rule on uniform grids (spectrally accurate
//! for smooth, decaying data).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dd::{CDd, Dd};
use crate::error::{QError, Result};
use crate::eval::{ComplexEvaluable, Evaluable};
use crate::grid::{GridFunction, GridSpec, SpectralField};
use crate::param::{QParameter, SeriesControl};
use crate::qderiv::QDerivative;
use crate::quad::{integrate, integrate_with_floor};
use crate::special::{q_exp_auto, q_number_complex, Truncated};

/// Boundary values above this fraction of `max|f|` mean the input has not
/// decayed inside the window.
pub const DECAY_RATIO: f64 = 1e-10;

/// Number of geometric panels tried on each side of a semi-infinite integral.
const MAX_PANELS: usize = 64;

/// Largest |u| used in the logarithmic Mellin variable `t = e^u`.
const MELLIN_U_MAX: f64 = 512.0;

pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// What to do when the input of [`fourier_forward`] has not decayed at the
/// window boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayCheck {
    /// Attach a warning to the result.
    #[default]
    Warn,
    /// Fail with [`QError::NonDecaying`].
    Strict,
}

/// A transform value from semi-infinite quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    /// End of the last panel integrated (in `t` for Laplace, in `u = ln t`
    /// for the upper Mellin tail).
    pub cutoff: f64,
    pub panels: usize,
}

/// `Σ_k w_k v_k e^{i sign ξ x_k}` for every ξ.
fn trapezoid_sum(nodes: &[f64], weighted: &[Complex64], xi: f64, sign: f64) -> Complex64 {
    nodes
        .iter()
        .zip(weighted)
        .map(|(&x, &v)| v * Complex64::from_polar(1.0, sign * xi * x))
        .sum()
}

/// `(1/√(2π)) Σ_j c_j e^{-iξ_j x}` at every `x`, with `c_j` already carrying
/// the quadrature weights.
pub(crate) fn synthesize(xi: &[f64], weighted: &[Complex64], xs: &[f64]) -> Vec<Complex64> {
    xs.par_iter()
        .map(|&x| INV_SQRT_2PI * trapezoid_sum(xi, weighted, x, -1.0))
        .collect()
}

/// `F(ξ) = (1/√(2π)) ∫ f(x) e^{iξx} dx` on `xi_grid`, by the trapezoid rule
/// over `x_window`.
///
/// When `x_window` has an odd number of points the result carries an error
/// estimate, the largest difference to the same sum on every other point.
pub fn fourier_forward<F: Evaluable + ?Sized>(f: &F, xi_grid: &GridSpec, x_window: &GridSpec, check: DecayCheck) -> Result<SpectralField> {
    let xs = x_window.points();
    let fx: Vec<Complex64> = xs.par_iter().map(|&x| f.eval(x)).collect();
    let fx = GridFunction::new(*x_window, fx)?;
    let max = fx.max_abs();
    let vals = fx.values();
    let edge = vals[0].norm().max(vals[vals.len() - 1].norm());

    let mut warnings = Vec::new();
    if max > 0.0 && edge > DECAY_RATIO * max {
        let ratio = edge / max;
        match check {
            DecayCheck::Strict => return Err(QError::NonDecaying { ratio }),
            DecayCheck::Warn => warnings.push(format!(
                "input does not decay at the window boundary: |f(edge)|/max|f| = {ratio:e}"
            )),
        }
    }

    let w = x_window.trapezoid_weights();
    let fine: Vec<Complex64> = vals.iter().zip(&w).map(|(v, w)| v * w).collect();
    let n = xs.len();
    let coarse: Option<(Vec<f64>, Vec<Complex64>)> = (n % 2 == 1 && n >= 5).then(|| {
        let h2 = 2.0 * x_window.spacing();
        let idx: Vec<usize> = (0..n).step_by(2).collect();
        let nodes = idx.iter().map(|&i| xs[i]).collect();
        let weighted = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let wk = if k == 0 || k + 1 == idx.len() { 0.5 * h2 } else { h2 };
                vals[i] * wk
            })
            .collect();
        (nodes, weighted)
    });

    let xi = xi_grid.points();
    let (values, errs): (Vec<Complex64>, Vec<f64>) = xi
        .par_iter()
        .map(|&k| {
            let v = INV_SQRT_2PI * trapezoid_sum(&xs, &fine, k, 1.0);
            let err = coarse
                .as_ref()
                .map(|(nodes, weighted)| (v - INV_SQRT_2PI * trapezoid_sum(nodes, weighted, k, 1.0)).norm())
                .unwrap_or(f64::NAN);
            (v, err)
        })
        .unzip();
    let error_estimate = errs.into_iter().fold(0.0, f64::max);
    Ok(SpectralField::new(*xi_grid, values)?.with_diagnostics(error_estimate, warnings))
}

/// `f(x) = (1/√(2π)) ∫ F(ξ) e^{-iξx} dξ` on `x_grid`, by the trapezoid rule
/// over the ξ grid of `spectrum`.
pub fn fourier_inverse(spectrum: &SpectralField, x_grid: &GridSpec) -> Result<GridFunction> {
    let xi = spectrum.grid().points();
    let weighted: Vec<Complex64> = spectrum
        .values()
        .iter()
        .zip(spectrum.grid().trapezoid_weights())
        .map(|(v, w)| v * w)
        .collect();
    GridFunction::new(*x_grid, synthesize(&xi, &weighted, &x_grid.points()))
}

/// Sums consecutive panel integrals until two in a row are negligible
/// relative to the running total.
struct TailMonitor {
    total: Complex64,
    quiet: usize,
    panels: usize,
}

impl TailMonitor {
    fn new() -> Self {
        Self {
            total: Complex64::new(0.0, 0.0),
            quiet: 0,
            panels: 0,
        }
    }

    /// Adds a panel; returns true once the tail is converged.
    fn push(&mut self, value: Complex64, l1: f64, rel_tol: f64) -> bool {
        self.total += value;
        self.panels += 1;
        if l1 <= rel_tol * self.total.norm() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= 2
    }
}

/// `∫_0^∞ h(t) e^{-st} dt` over the panels `[0,1], [1,2], [2,4], ...`, stopping
/// when two consecutive panels contribute less than `rel_tol` of the total.
pub fn laplace_numeric<H: Evaluable + ?Sized>(h: &H, s: Complex64, ctrl: &SeriesControl) -> Result<TransformValue> {
    if !(s.re > 0.0 && s.im.is_finite()) {
        return Err(QError::InvalidParameter {
            name: "s",
            value: s.re,
            reason: "the Laplace transform needs Re s > 0",
        });
    }
    let integrand = |t: f64| h.eval(t) * (-s * t).exp();
    let mut mon = TailMonitor::new();
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..MAX_PANELS {
        let floor = 0.01 * ctrl.rel_tol * mon.total.norm();
        let p = integrate_with_floor(&integrand, a, b, ctrl.rel_tol, floor, "Laplace transform")?;
        if mon.push(p.value, p.l1, ctrl.rel_tol) {
            return Ok(TransformValue {
                value: mon.total,
                cutoff: b,
                panels: mon.panels,
            });
        }
        a = b;
        b *= 2.0;
    }
    Err(QError::Quadrature {
        what: "Laplace transform tail",
        delta: f64::NAN,
    })
}

/// Checks that the straight segment between `a` and `b` stays in Re s > 0.
fn check_right_half_plane(a: Complex64, b: Complex64) -> Result<()> {
    if a.re > 0.0 && b.re > 0.0 {
        Ok(())
    } else {
        Err(QError::InvalidParameter {
            name: "s",
            value: a.re.min(b.re),
            reason: "the integration segment must lie in Re s > 0",
        })
    }
}

/// Right-hand side of the Laplace transform of a q-derivative:
///
/// forward: `(1/(1-q)) ∫_{qs}^{s} h̄ ds' - (ln q⁻¹/(1-q)) h(0)`,
/// standard: `(1/(1-q)) ∫_{s}^{s/q} h̄ ds' - (ln q⁻¹/(1-q)) h(0)`,
///
/// with the segment integral taken along the straight line.
pub fn laplace_of_dq_rhs<B: ComplexEvaluable + ?Sized>(q: &QParameter, kind: QDerivative, hbar: &B, h0: Complex64, s: Complex64) -> Result<Complex64> {
    let (start, end) = match kind {
        QDerivative::Forward => (q.q() * s, s),
        QDerivative::Standard => (s, s / q.q()),
    };
    check_right_half_plane(start, end)?;
    let span = end - start;
    let integrand = |u: f64| hbar.eval(start + u * span);
    let seg = integrate(&integrand, 0.0, 1.0, SeriesControl::default().rel_tol, "Laplace segment integral")?;
    Ok(seg.value * span / q.one_minus_q() - q.ln_inv_q() / q.one_minus_q() * h0)
}

/// [`laplace_of_dq_rhs`] for the forward q-derivative.
pub fn laplace_of_dq_forward_rhs<B: ComplexEvaluable + ?Sized>(q: &QParameter, hbar: &B, h0: Complex64, s: Complex64) -> Result<Complex64> {
    laplace_of_dq_rhs(q, QDerivative::Forward, hbar, h0, s)
}

/// [`laplace_of_dq_rhs`] for the standard q-derivative.
pub fn laplace_of_dq_standard_rhs<B: ComplexEvaluable + ?Sized>(q: &QParameter, hbar: &B, h0: Complex64, s: Complex64) -> Result<Complex64> {
    laplace_of_dq_rhs(q, QDerivative::Standard, hbar, h0, s)
}

/// Integrates one side of the Mellin integral in `u = ln t` over panels of
/// doubling width, starting at `u = 0` and moving in direction `dir`.
fn mellin_side<F: Fn(f64) -> Complex64>(integrand: &F, dir: f64, s: Complex64, ctrl: &SeriesControl, total_so_far: Complex64) -> Result<(Complex64, f64, usize)> {
    let mut mon = TailMonitor::new();
    mon.total = total_so_far;
    let mut sum = Complex64::new(0.0, 0.0);
    let (mut a, mut b) = (0.0, 1.0);
    let mut last_density = f64::INFINITY;
    let mut rising = 0;
    while b <= MELLIN_U_MAX {
        let (lo, hi) = if dir > 0.0 { (a, b) } else { (-b, -a) };
        let floor = 0.01 * ctrl.rel_tol * mon.total.norm();
        let p = integrate_with_floor(integrand, lo, hi, ctrl.rel_tol, floor, "Mellin transform")
            .map_err(|_| QError::Strip {
                s,
                reason: "the integrand is not finite or not resolvable along the tail",
            })?;
        sum += p.value;
        if mon.push(p.value, p.l1, ctrl.rel_tol) {
            return Ok((sum, dir * b, mon.panels));
        }
        let density = p.l1 / (b - a);
        if a >= 2.0 && density > last_density {
            rising += 1;
            if rising >= 2 {
                return Err(QError::Strip {
                    s,
                    reason: "panel contributions grow along the tail",
                });
            }
        } else {
            rising = 0;
        }
        last_density = density;
        a = b;
        b *= 2.0;
    }
    Err(QError::Strip {
        s,
        reason: "the tail did not decay within the integration range",
    })
}

/// `h*(s) = ∫_0^∞ h(t) t^{s-1} dt`, computed as `∫ h(e^u) e^{su} du` over the
/// whole real line, split at `t = 1`, with geometric panels on both sides.
///
/// Divergence (outside the convergence strip) shows up as growing panel
/// contributions and is reported as [`QError::Strip`].
pub fn mellin_numeric<H: Evaluable + ?Sized>(h: &H, s: Complex64, ctrl: &SeriesControl) -> Result<TransformValue> {
    let integrand = |u: f64| {
        let v = h.eval(u.exp());
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v * (s * u).exp()
        }
    };
    let (upper, cutoff, n_up) = mellin_side(&integrand, 1.0, s, ctrl, Complex64::new(0.0, 0.0))?;
    let (lower, _, n_low) = mellin_side(&integrand, -1.0, s, ctrl, upper)?;
    let value = upper + lower;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(QError::Strip {
            s,
            reason: "the integral is not finite",
        });
    }
    Ok(TransformValue {
        value,
        cutoff,
        panels: n_up + n_low,
    })
}

/// Right-hand side of the Mellin transform of the n-fold q-derivative:
///
/// forward: `(-1)ⁿ [s-1]_q [s-2]_q ... [s-n]_q h*(s-n)`,
/// standard: `[1-s]_q [2-s]_q ... [n-s]_q h*(s-n)`.
///
/// When the q-number prefactor vanishes the result is zero and `h*` is not
/// evaluated (it may be singular there).
pub fn mellin_of_dq_power_rhs<M: ComplexEvaluable + ?Sized>(q: &QParameter, kind: QDerivative, hstar: &M, s: Complex64, n: usize) -> Complex64 {
    let mut factor = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        let kf = k as f64;
        factor *= match kind {
            QDerivative::Forward => -q_number_complex(q, s - kf),
            QDerivative::Standard => q_number_complex(q, kf - s),
        };
    }
    if factor == Complex64::new(0.0, 0.0) {
        return factor;
    }
    factor * hstar.eval(s - n as f64)
}

/// `M{D^q h}(s) = -[s-1]_q h*(s-1)`
pub fn mellin_of_dq_forward_rhs<M: ComplexEvaluable + ?Sized>(q: &QParameter, hstar: &M, s: Complex64) -> Complex64 {
    mellin_of_dq_power_rhs(q, QDerivative::Forward, hstar, s, 1)
}

/// `M{(D^q)ⁿ h}(s) = (-1)ⁿ [s-1]_q ... [s-n]_q h*(s-n)`
pub fn mellin_of_dq_forward_power_rhs<M: ComplexEvaluable + ?Sized>(q: &QParameter, hstar: &M, s: Complex64, n: usize) -> Complex64 {
    mellin_of_dq_power_rhs(q, QDerivative::Forward, hstar, s, n)
}

/// `M{𝒟^q h}(s) = [1-s]_q h*(s-1)`, which equals `-q^{1-s} [s-1]_q h*(s-1)`.
pub fn mellin_of_dq_standard_rhs<M: ComplexEvaluable + ?Sized>(q: &QParameter, hstar: &M, s: Complex64) -> Complex64 {
    mellin_of_dq_power_rhs(q, QDerivative::Standard, hstar, s, 1)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(QError::InvalidParameter {
            name: "t",
            value: t,
            reason: "time must be finite and nonnegative",
        });
    }
    Ok(())
}

/// The inverse Mellin kernel `((1-q)/ln q⁻¹) E_q(-q(1-q) ξ² t)`, the closed
/// form of the residue sum of Γ_q.
pub fn inverse_mellin_qgamma_kernel(q: &QParameter, xi: f64, t: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    check_time(t)?;
    let z = Complex64::new(-q.mode_scale() * xi * xi * t, 0.0);
    Ok(q.residue_norm() * q_exp_auto(q, z, ctrl)?)
}

/// The same kernel as a literal sum over the residues of Γ_q at `s = -n`:
/// `((1-q)/ln q⁻¹) Σ_n [(1-q) ξ² t]ⁿ / (q⁻ⁿ;q)_n`.
///
/// `(q⁻ⁿ;q)_n = Π_{m=1}^{n} (1 - q^{-m})` is built factor by factor in
/// double-double arithmetic, so this path shares nothing with the E_q
/// evaluation behind [`inverse_mellin_qgamma_kernel`].
pub fn inverse_mellin_residue_sum(q: &QParameter, xi: f64, t: f64, ctrl: &SeriesControl) -> Result<Truncated> {
    check_time(t)?;
    let w = q.one_minus_q() * xi * xi * t;
    let wd = Dd::from_f64(w);
    let q_inv = Dd::ONE / Dd::from_f64(q.q());
    let mut q_inv_n = Dd::ONE;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    if w == 0.0 {
        return Ok(Truncated {
            value: Complex64::new(q.residue_norm(), 0.0),
            terms: 1,
        });
    }
    for n in 1..=ctrl.max_terms {
        q_inv_n = q_inv_n * q_inv;
        let denom = Dd::ONE - q_inv_n;
        term = term * wd / denom;
        sum = sum + term;
        if !sum.is_finite() {
            return Err(QError::Overflow {
                what: "residue sum",
                arg: Complex64::new(w, 0.0),
            });
        }
        let decreasing = w < denom.abs();
        if term.abs() == 0.0 || (decreasing && term.abs() <= ctrl.rel_tol * sum.abs()) {
            let value = CDd { re: sum, im: Dd::ZERO }.to_c64();
            return Ok(Truncated {
                value: q.residue_norm() * value,
                terms: n + 1,
            });
        }
    }
    Err(QError::NotConverged {
        what: "residue sum",
        max_terms: ctrl.max_terms,
    })
}

/// Both routes to the inverse Mellin kernel and their relative difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheck {
    pub closed_form: Complex64,
    pub residue_sum: Complex64,
    pub rel_diff: f64,
}

/// Diagnostic mode of [`inverse_mellin_qgamma_kernel`]: evaluates the closed
/// form and the residue sum and reports how far apart they are.
pub fn inverse_mellin_qgamma_kernel_checked(q: &QParameter, xi: f64, t: f64, ctrl: &SeriesControl) -> Result<KernelCheck> {
    let closed_form = inverse_mellin_qgamma_kernel(q, xi, t, ctrl)?;
    let residue_sum = inverse_mellin_residue_sum(q, xi, t, ctrl)?.value;
    let rel_diff = (closed_form - residue_sum).norm() / closed_form.norm();
    Ok(KernelCheck {
        closed_form,
        residue_sum,
        rel_diff,
    })
}
