//! `qmellin`: solve q-diffusion, q-wave and n-th order problems from a config
//! file, run the verification suite, and tabulate q-special functions.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numeric
//! failure (solver error, residual above threshold, failed verification).

mod config;
mod format;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qmellin::verify::{run_level, Level};
use qmellin::{
    q_cos_real, q_exp, q_gamma_real, q_number, q_sin_real, solve_q_diffusion, solve_q_nth, solve_q_wave, QParameter,
    SeriesControl, SolveReport,
};

use crate::config::{Problem, RunConfig};
use crate::format::{g17, write_csv};

#[derive(Parser)]
#[command(name = "qmellin", version, about = "q-calculus transforms and spectral solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a TOML config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite and print a pass/fail table.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: VerifyLevel,
        /// Multiplies every tolerance (1 = nominal).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        tol_scale: f64,
    },
    /// Tabulate a q-special function on a uniform range as CSV.
    Tabulate {
        #[arg(long = "fn", value_enum)]
        function: Function,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    Qgamma,
    Qexp,
    Qsin,
    Qcos,
    Qnumber,
}

/// A failed run: exit code plus message.
enum Failure {
    Config(String),
    Numeric(String),
    Io(anyhow::Error),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("configuration error: {m}");
                ExitCode::from(2)
            }
            Failure::Numeric(m) => {
                eprintln!("numeric failure: {m}");
                ExitCode::from(3)
            }
            Failure::Io(e) => {
                eprintln!("i/o error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { config, out } => cmd_solve(&config, out),
        Command::Verify { level, tol_scale } => cmd_verify(level, tol_scale),
        Command::Tabulate {
            function,
            q,
            from,
            to,
            step,
            out,
        } => cmd_tabulate(function, q, from, to, step, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn cmd_solve(path: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = RunConfig::parse(&text).map_err(|e| Failure::Config(e.to_string()))?;
    let out_dir = out.unwrap_or(cfg.out_dir.clone());

    let start = Instant::now();
    let (report, q) = match &cfg.problem {
        Problem::Diffusion(p) => (solve_q_diffusion(p), p.q),
        Problem::Wave(p) => (solve_q_wave(p), p.q),
        Problem::Nth(p) => (solve_q_nth(p), p.q),
    };
    let report = report.map_err(|e| Failure::Numeric(e.to_string()))?;
    let wall = start.elapsed().as_secs_f64();

    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for (k, sol) in report.solutions.iter().enumerate() {
        let file = out_dir.join(format!("y_t{k:03}.csv"));
        let w = BufWriter::new(fs::File::create(&file).with_context(|| format!("creating {}", file.display()))?);
        write_csv(w, sol.iter()).with_context(|| format!("writing {}", file.display()))?;
    }
    let summary = out_dir.join("summary.txt");
    fs::write(&summary, summary_text(&cfg, q, &report, wall)).with_context(|| format!("writing {}", summary.display()))?;

    println!(
        "{} problem, q = {}: {} time(s) written to {}; residual_max = {:.3e} (threshold {:.0e}); {:.2} s",
        cfg.problem.kind(),
        q.q(),
        report.solutions.len(),
        out_dir.display(),
        report.residual_max,
        cfg.residual_threshold,
        wall
    );
    if report.residual_max < cfg.residual_threshold {
        Ok(())
    } else {
        Err(Failure::Numeric(format!(
            "residual_max {:e} is not below the threshold {:e}",
            report.residual_max, cfg.residual_threshold
        )))
    }
}

fn summary_text(cfg: &RunConfig, q: QParameter, r: &SolveReport, wall: f64) -> String {
    let times: Vec<String> = r.times.iter().map(|t| g17(*t)).collect();
    let mut s = String::new();
    s += &format!("kind = {}\n", cfg.problem.kind());
    s += &format!("q = {}\n", g17(q.q()));
    s += &format!("times = {}\n", times.join(", "));
    s += &format!("residual_max = {}\n", g17(r.residual_max));
    s += &format!("residual_threshold = {}\n", g17(cfg.residual_threshold));
    if let Some((x, t)) = r.residual.location {
        s += &format!("residual_location = {}, {}\n", g17(x), g17(t));
    }
    s += &format!("fourier_error_estimate = {}\n", g17(r.diagnostics.fourier_error_estimate));
    s += &format!("max_series_terms = {}\n", r.diagnostics.max_series_terms);
    if let Some(c) = r.diagnostics.max_condition {
        s += &format!("max_condition = {}\n", g17(c));
    }
    for w in &r.diagnostics.warnings {
        s += &format!("warning = {w}\n");
    }
    s += &format!("wall_time_s = {wall:.3}\n");
    s
}

fn cmd_verify(level: VerifyLevel, tol_scale: f64) -> Result<(), Failure> {
    if !(tol_scale >= 0.0 && tol_scale.is_finite()) {
        return Err(Failure::Config(format!("tol-scale: must be finite and nonnegative, got {tol_scale}")));
    }
    let level = match level {
        VerifyLevel::Quick => Level::Quick,
        VerifyLevel::Full => Level::Full,
    };
    let results = run_level(level, tol_scale);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut failed = 0;
    for r in &results {
        writeln!(out, "{}", r.summary_line()).context("writing report")?;
        for ch in &r.checks {
            writeln!(
                out,
                "    {:<4} {:<52} {:.3e} < {:.1e}",
                if ch.passed() { "ok" } else { "FAIL" },
                ch.label,
                ch.measured,
                ch.tolerance
            )
            .context("writing report")?;
        }
        if !r.passed() {
            failed += 1;
        }
    }
    if failed == 0 {
        writeln!(out, "all {} criteria pass", results.len()).context("writing report")?;
        Ok(())
    } else {
        Err(Failure::Numeric(format!("{failed} of {} criteria failed", results.len())))
    }
}

fn cmd_tabulate(function: Function, q: f64, from: f64, to: f64, step: f64, out: Option<&Path>) -> Result<(), Failure> {
    let q = QParameter::new(q).map_err(|e| Failure::Config(format!("q: {e}")))?;
    if !(from.is_finite() && to.is_finite() && from <= to) {
        return Err(Failure::Config(format!("from/to: need finite from <= to, got {from} and {to}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Failure::Config(format!("step: must be positive, got {step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    let ctrl = SeriesControl::default();
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let x = from + k as f64 * step;
        let value = match function {
            Function::Qgamma => q_gamma_real(&q, x, &ctrl).map(|v| Complex64::new(v, 0.0)),
            Function::Qexp => q_exp(&q, Complex64::new(x, 0.0), &ctrl),
            Function::Qsin => q_sin_real(&q, x, &ctrl).map(|v| Complex64::new(v, 0.0)),
            Function::Qcos => q_cos_real(&q, x, &ctrl).map(|v| Complex64::new(v, 0.0)),
            Function::Qnumber => Ok(Complex64::new(q_number(&q, x), 0.0)),
        }
        .map_err(|e| Failure::Numeric(format!("at x = {x}: {e}")))?;
        rows.push((x, value));
    }
    match out {
        Some(path) => {
            let w = BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
            write_csv(w, rows).with_context(|| format!("writing {}", path.display()))?;
        }
        None => write_csv(io::stdout().lock(), rows).context("writing to standard output")?,
    }
    Ok(())
}
