//! Composite Gauss–Legendre quadrature for complex integrands on real
//! intervals, with panel doubling until successive estimates agree.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{QError, Result};

/// Nodes per Gauss–Legendre panel.
pub const GL_ORDER: usize = 20;

/// Maximum number of sub-panels a single interval is split into.
const MAX_SUBPANELS: usize = 1 << 14;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of P_n, found by Newton iteration from the
    /// Chebyshev-like initial guesses `cos(π (i + 3/4) / (n + 1/2))`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Three-term recurrence for P_n(x) and P_{n-1}(x).
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pnm1 = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// The shared rule of order [`GL_ORDER`].
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(GL_ORDER))
    }

    /// Integral over `[a, b]` split into `m` equal sub-panels, together with
    /// the integral of the modulus.
    pub fn composite<F: Fn(f64) -> Complex64 + ?Sized>(&self, f: &F, a: f64, b: f64, m: usize) -> (Complex64, f64) {
        let width = (b - a) / m as f64;
        let half = 0.5 * width;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut l1 = 0.0;
        for p in 0..m {
            let mid = a + (p as f64 + 0.5) * width;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let v = f(mid + half * x);
                sum += w * v;
                l1 += w * v.norm();
            }
        }
        (sum * half, l1 * half.abs())
    }
}

/// Value of an adaptive integral over one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelIntegral {
    pub value: Complex64,
    /// Integral of `|f|`, the scale against which accuracy is judged.
    pub l1: f64,
    pub subpanels: usize,
}

/// Integrates `f` over `[a, b]`, doubling the number of Gauss–Legendre
/// sub-panels until two successive estimates differ by at most
/// `max(rel_tol, 64 ε)` times the integral of `|f|`.
pub fn integrate<F: Fn(f64) -> Complex64 + ?Sized>(f: &F, a: f64, b: f64, rel_tol: f64, what: &'static str) -> Result<PanelIntegral> {
    integrate_with_floor(f, a, b, rel_tol, 0.0, what)
}

/// As [`integrate`], but also accepts an absolute change of at most
/// `abs_floor`, and accepts a round-off plateau.
///
/// The floor lets a tail panel that is negligible against an integral
/// accumulated elsewhere stop early.  A plateau is declared when refinement no
/// longer halves the change and the change is already below `√rel_tol` of the
/// panel's `∫|f|`: the integrand is then resolved to its own evaluation noise
/// (typical for difference quotients with `q` close to 1).
pub fn integrate_with_floor<F: Fn(f64) -> Complex64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    what: &'static str,
) -> Result<PanelIntegral> {
    let rule = GaussLegendre::standard();
    let tol = rel_tol.max(64.0 * f64::EPSILON);
    let plateau = tol.sqrt();
    let (mut prev, _) = rule.composite(f, a, b, 1);
    let mut prev_delta = f64::INFINITY;
    let mut m = 2;
    loop {
        let (cur, l1) = rule.composite(f, a, b, m);
        if !(cur.re.is_finite() && cur.im.is_finite()) {
            return Err(QError::Quadrature { what, delta: f64::NAN });
        }
        let delta = (cur - prev).norm();
        let stalled = m >= 16 && delta > 0.5 * prev_delta && delta <= plateau * l1;
        if delta <= (tol * l1).max(abs_floor) || stalled {
            return Ok(PanelIntegral {
                value: cur,
                l1,
                subpanels: m,
            });
        }
        if m >= MAX_SUBPANELS {
            return Err(QError::Quadrature { what, delta });
        }
        prev = cur;
        prev_delta = delta;
        m *= 2;
    }
}
