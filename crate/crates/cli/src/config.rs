//! Run configuration for `solve`: a TOML file with `[problem]`, `[grid]`,
//! `[tolerance]` and `[output]` sections.
//!
//! ```toml
//! [problem]
//! kind = "diffusion"        # diffusion | wave | nth
//! q = 0.5
//! f = "gaussian(1)"
//! times = [0.0, 0.3]
//!
//! [grid]
//! x = [-12.0, 12.0, 2049]   # lo, hi, points
//! xi = [-12.0, 12.0, 2049]
//!
//! [tolerance]
//! residual = 1e-4
//!
//! [output]
//! dir = "out"
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use qmellin::transforms::DecayCheck;
use qmellin::{DiffusionProblem, Evaluable, GridSpec, NthOrderProblem, Profile, QParameter, SeriesControl, WaveProblem};
use serde::Deserialize;

/// A configuration problem, naming the offending field.
#[derive(Debug, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl ToString) -> Self {
        Self {
            field: field.to_string(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Diffusion,
    Wave,
    Nth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decay {
    #[default]
    Warn,
    Strict,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: RawProblem,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    tolerance: RawTolerance,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: Kind,
    q: f64,
    n: Option<usize>,
    f: String,
    /// Initial q-velocity (wave) or the list `g_1..g_{n-1}` (nth).
    g: Option<GSpec>,
    #[serde(default = "default_times")]
    times: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GSpec {
    One(String),
    Many(Vec<String>),
}

fn default_times() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x: Option<(f64, f64, usize)>,
    xi: Option<(f64, f64, usize)>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerance {
    rel_tol: Option<f64>,
    max_terms: Option<usize>,
    residual: Option<f64>,
    #[serde(default)]
    decay: Decay,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

/// A validated run: the problem plus output settings.
pub struct RunConfig {
    pub problem: Problem,
    pub residual_threshold: f64,
    pub out_dir: PathBuf,
}

pub enum Problem {
    Diffusion(DiffusionProblem),
    Wave(WaveProblem),
    Nth(NthOrderProblem),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Diffusion(_) => "diffusion",
            Problem::Wave(_) => "wave",
            Problem::Nth(_) => "nth",
        }
    }
}

pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-4;

fn profile(field: &str, s: &str) -> Result<Profile, ConfigError> {
    s.parse().map_err(|e| ConfigError::new(field, e))
}

fn grid(field: &str, spec: Option<(f64, f64, usize)>) -> Result<GridSpec, ConfigError> {
    match spec {
        None => Ok(GridSpec::default_window()),
        Some((lo, hi, n)) => GridSpec::new(lo, hi, n).map_err(|e| ConfigError::new(field, e)),
    }
}

impl RunConfig {
    /// Parses and validates a configuration document.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let field = e.message().to_string();
            ConfigError::new("config", format!("{field}{}", span_hint(text, e.span())))
        })?;
        let p = raw.problem;
        let q = QParameter::new(p.q).map_err(|e| ConfigError::new("problem.q", e))?;
        if let Some(t) = p.times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(ConfigError::new("problem.times", format!("times must be finite and nonnegative, got {t}")));
        }
        if p.times.is_empty() {
            return Err(ConfigError::new("problem.times", "at least one time is required"));
        }
        let f = profile("problem.f", &p.f)?;
        let x_grid = grid("grid.x", raw.grid.x)?;
        let xi_grid = grid("grid.xi", raw.grid.xi)?;
        let defaults = SeriesControl::default();
        let ctrl = SeriesControl::new(
            raw.tolerance.rel_tol.unwrap_or(defaults.rel_tol),
            raw.tolerance.max_terms.unwrap_or(defaults.max_terms),
        )
        .map_err(|e| ConfigError::new("tolerance", e))?;
        let residual_threshold = raw.tolerance.residual.unwrap_or(DEFAULT_RESIDUAL_THRESHOLD);
        if !(residual_threshold > 0.0 && residual_threshold.is_finite()) {
            return Err(ConfigError::new("tolerance.residual", "must be positive"));
        }
        let decay = match raw.tolerance.decay {
            Decay::Warn => DecayCheck::Warn,
            Decay::Strict => DecayCheck::Strict,
        };
        if p.n.is_some() && p.kind != Kind::Nth {
            return Err(ConfigError::new("problem.n", "only used with kind = \"nth\""));
        }
        let g_list: Vec<String> = match p.g {
            None => Vec::new(),
            Some(GSpec::One(s)) => vec![s],
            Some(GSpec::Many(v)) => v,
        };
        let problem = match p.kind {
            Kind::Diffusion => {
                if !g_list.is_empty() {
                    return Err(ConfigError::new("problem.g", "the diffusion problem takes no initial velocity"));
                }
                let mut d = DiffusionProblem::new(q, f).with_times(p.times).with_grids(x_grid, xi_grid);
                d.ctrl = ctrl;
                d.decay = decay;
                Problem::Diffusion(d)
            }
            Kind::Wave => {
                let g = match g_list.as_slice() {
                    [] => Profile::Zero,
                    [one] => profile("problem.g", one)?,
                    _ => return Err(ConfigError::new("problem.g", "the wave problem takes one initial velocity")),
                };
                let mut w = WaveProblem::new(q, f, g).with_times(p.times).with_grids(x_grid, xi_grid);
                w.ctrl = ctrl;
                w.decay = decay;
                Problem::Wave(w)
            }
            Kind::Nth => {
                let n = p.n.ok_or_else(|| ConfigError::new("problem.n", "required for kind = \"nth\""))?;
                if !qmellin::solvers::NTH_ORDERS.contains(&n) {
                    return Err(ConfigError::new("problem.n", format!("must be 2, 3 or 4, got {n}")));
                }
                let mut g: Vec<Arc<dyn Evaluable>> = Vec::with_capacity(n - 1);
                if !g_list.is_empty() && g_list.len() != n - 1 {
                    return Err(ConfigError::new(
                        "problem.g",
                        format!("expected {} profiles (g_1..g_{}), got {}", n - 1, n - 1, g_list.len()),
                    ));
                }
                for k in 0..n - 1 {
                    let prof = match g_list.get(k) {
                        Some(s) => profile("problem.g", s)?,
                        None => Profile::Zero,
                    };
                    g.push(Arc::new(prof));
                }
                let mut nth = NthOrderProblem::new(n, q, f).with_g(g).with_times(p.times).with_grids(x_grid, xi_grid);
                nth.ctrl = ctrl;
                nth.decay = decay;
                Problem::Nth(nth)
            }
        };
        Ok(RunConfig {
            problem,
            residual_threshold,
            out_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

/// ` (line L, column C)` for a parse error span.
fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let before = &text[..r.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            format!(" (line {line}, column {col})")
        }
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[problem]
kind = "diffusion"
q = 0.5
f = "gaussian(1)"
times = [0.0, 0.3]
"#;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let c = RunConfig::parse(BASIC).unwrap();
        assert_eq!(c.problem.kind(), "diffusion");
        assert_eq!(c.residual_threshold, DEFAULT_RESIDUAL_THRESHOLD);
        assert_eq!(c.out_dir, PathBuf::from("out"));
        match c.problem {
            Problem::Diffusion(d) => {
                assert_eq!(d.times, vec![0.0, 0.3]);
                assert_eq!(d.x_grid, GridSpec::default_window());
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn invalid_q_names_the_field() {
        let e = RunConfig::parse(&BASIC.replace("q = 0.5", "q = 1.2")).err().unwrap();
        assert_eq!(e.field, "problem.q");
        assert!(e.to_string().contains("q"));
    }

    #[test]
    fn unknown_and_missing_fields() {
        let e = RunConfig::parse(&BASIC.replace("q = 0.5", "qq = 0.5")).err().unwrap();
        assert!(e.to_string().contains("qq"), "{e}");
        let e = RunConfig::parse(&BASIC.replace("f = \"gaussian(1)\"", "")).err().unwrap();
        assert!(e.to_string().contains("`f`"), "{e}");
    }

    #[test]
    fn nth_order_needs_n_and_matching_g() {
        let nth = BASIC.replace("diffusion", "nth");
        assert_eq!(RunConfig::parse(&nth).err().unwrap().field, "problem.n");
        let with_n = nth.replace("q = 0.5", "q = 0.5\nn = 3");
        assert!(RunConfig::parse(&with_n).is_ok());
        let bad_g = with_n.replace("q = 0.5", "q = 0.5\ng = [\"zero\"]");
        assert_eq!(RunConfig::parse(&bad_g).err().unwrap().field, "problem.g");
        assert_eq!(RunConfig::parse(&nth.replace("q = 0.5", "q = 0.5\nn = 7")).err().unwrap().field, "problem.n");
    }

    #[test]
    fn wave_and_grid_options() {
        let text = r#"
[problem]
kind = "wave"
q = 0.7
f = "sech(1)"
g = "gaussian(0.5)"
times = [0.5]

[grid]
x = [-5.0, 5.0, 101]

[tolerance]
residual = 1e-3
decay = "strict"

[output]
dir = "results"
"#;
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.residual_threshold, 1e-3);
        assert_eq!(c.out_dir, PathBuf::from("results"));
        match c.problem {
            Problem::Wave(w) => {
                assert_eq!(w.x_grid, GridSpec::new(-5.0, 5.0, 101).unwrap());
                assert_eq!(w.decay, DecayCheck::Strict);
            }
            _ => panic!("wrong kind"),
        }
        let bad = text.replace("[-5.0, 5.0, 101]", "[5.0, -5.0, 101]");
        assert_eq!(RunConfig::parse(&bad).err().unwrap().field, "grid.x");
        let bad = text.replace("sech(1)", "sech(-1)");
        assert_eq!(RunConfig::parse(&bad).err().unwrap().field, "problem.f");
        let bad = text.replace("times = [0.5]", "times = [-0.5]");
        assert_eq!(RunConfig::parse(&bad).err().unwrap().field, "problem.times");
    }
}
