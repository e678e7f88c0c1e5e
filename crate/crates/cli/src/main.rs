//! `bhk`: evaluate ball heat kernels, run sweeps and bound suites, calibrate
//! regime thresholds.
//!
//! Exit codes: 0 success, 1 a bound failed, 2 usage or input error,
//! 3 accuracy error (an oracle or quadrature could not reach its tolerance).

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bhk_core::experiments::calibrate::{calibrate_regimes_on, CalibrationGrid};
use bhk_core::experiments::{
    emit_report, run_bound_suite, run_rate_sweep, Format, RegimeBounds, Suite, SweepSpec, Table,
};
use bhk_core::geometry::tangent_halfspace;
use bhk_core::kernels::{
    gauss_kernel, halfspace_kernel, kernel_eval, thm1_approx, thm2_approx, vdb_lower_bound, Thm2Variant,
};
use bhk_core::oracles::{estints_shape, inverse_gamma_conv_integral, mc_kernel, series_kernel};
use bhk_core::{Error, Point, Result};

use config::CliConfig;

/// Sweeps whose envelope constant exceeds this count as failed.
const ENVELOPE_MAX: f64 = 10.0;

#[derive(Parser)]
#[command(name = "bhk", version, about = "Dirichlet heat kernel of the unit ball")]
struct Cli {
    /// JSON configuration file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Output {
    /// Report file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one kernel value; prints a JSON line.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        /// Monte Carlo paths.
        #[arg(long)]
        paths: Option<usize>,
        /// Monte Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Convergence-rate sweep of an approximant against an oracle.
    Sweep {
        #[arg(long, value_enum, required_unless_present = "spec")]
        family: Option<Family>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2), required_unless_present = "spec")]
        theorem: Option<u8>,
        #[arg(long, value_enum, default_value = "exponential")]
        variant: Variant,
        /// Multiply the grid by 10^shift (the declared regime is dropped).
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<f64>,
        /// Full sweep specification as JSON, instead of a preset.
        #[arg(long, conflicts_with_all = ["family", "theorem"])]
        spec: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Run bound suites on low-discrepancy cases.
    Check {
        /// Comma-separated suite names, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Derive regime thresholds from measured errors.
    Calibrate {
        #[arg(long, default_value_t = 0.2)]
        target: f64,
        /// Calibration grid as JSON (default grid otherwise).
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Inverse-gamma convolution integral and its two-sided shape.
    Integral {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    Auto,
    Thm1,
    Thm2,
    Vdb,
    Halfspace,
    Gauss,
    Series,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Diagonal,
    Chord,
    MidpointScaling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Exponential,
    Linear,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Accuracy(_) | Error::Numeric(_) | Error::Calibration(_) => 3,
        _ => 2,
    }
}

fn parse_point(s: &str) -> Result<Point> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad coordinate `{c}` in `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    Point::in_ball(coords)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Usage(format!("bad JSON in {}: {e}", path.display())))
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("BHK_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("BHK_THREADS must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

/// Writes the report when an output path is configured.
fn write_report(cfg: &CliConfig, out: &Output, table: &Table, echo: Value) -> Result<Option<PathBuf>> {
    let path = out.out.clone().or_else(|| cfg.out.clone());
    let format = out.format.unwrap_or(cfg.format);
    let Some(path) = path else { return Ok(None) };
    let bytes = emit_report(table, &echo, format)?;
    std::fs::write(&path, bytes).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(Some(path))
}

fn echo_config(cfg: &CliConfig, command: Value) -> Value {
    json!({ "command": command, "regime": cfg.regime, "series": cfg.series, "mc": cfg.mc })
}

fn eval(cfg: &CliConfig, t: f64, x: &str, y: &str, method: Method, paths: Option<usize>, seed: Option<u64>) -> Result<u8> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Usage(format!("--t must be positive, got {t}")));
    }
    let (x, y) = (parse_point(x)?, parse_point(y)?);
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    let mut mc = cfg.mc;
    mc.n_paths = paths.unwrap_or(mc.n_paths);
    mc.seed = seed.unwrap_or(mc.seed);
    let (value, regime, indicator, err) = match method {
        Method::Auto => {
            let e = kernel_eval(t, &x, &y, &cfg.regime)?;
            (e.value, e.regime.label(), Some(e.error_indicator), None)
        }
        Method::Thm1 => {
            let e = thm1_approx(t, &x, &y)?;
            (e.value, e.regime.label(), Some(e.error_indicator), None)
        }
        Method::Thm2 => {
            let e = thm2_approx(t, &x, &y, Thm2Variant::Exponential)?;
            (e.value, e.regime.label(), Some(e.error_indicator), None)
        }
        Method::Vdb => (vdb_lower_bound(t, &x, &y)?, "vdb-lower-bound", None, None),
        Method::Halfspace => (halfspace_kernel(t, &x, &y, &tangent_halfspace(&x)?)?, "tangent-half-space", None, None),
        Method::Gauss => (gauss_kernel(t, &x, &y)?, "free", None, None),
        Method::Series => {
            let r = series_kernel(t, &x, &y, &cfg.series.for_dim(x.dim())?)?;
            (r.value, "series", None, Some(r.err))
        }
        Method::Mc => {
            let r = mc_kernel(t, &x, &y, &mc)?;
            (r.value, "monte-carlo", None, Some(r.err))
        }
    };
    let line = json!({
        "method": method,
        "t": t,
        "x": x.coords(),
        "y": y.coords(),
        "value": value,
        "regime": regime,
        "error_indicator": indicator,
        "err": err,
    });
    println!("{line}");
    Ok(0)
}

fn sweep_spec(family: Option<Family>, theorem: Option<u8>, variant: Variant, spec: Option<&PathBuf>) -> Result<SweepSpec> {
    if let Some(path) = spec {
        return read_json(path);
    }
    let variant = match variant {
        Variant::Exponential => Thm2Variant::Exponential,
        Variant::Linear => Thm2Variant::Linear,
    };
    match (family, theorem) {
        (Some(Family::Diagonal), Some(1)) => SweepSpec::thm1_diagonal(),
        (Some(Family::Chord), Some(1)) => SweepSpec::thm1_chord(),
        (Some(Family::MidpointScaling), Some(2)) => SweepSpec::thm2_scaling(variant),
        _ => Err(Error::Usage(
            "presets: --family diagonal|chord --theorem 1, --family midpoint-scaling --theorem 2; use --spec for others".into(),
        )),
    }
}

fn sweep(cfg: &CliConfig, mut spec: SweepSpec, shift: Option<f64>, output: &Output) -> Result<u8> {
    if let Some(s) = shift {
        spec = spec.shifted(s);
        spec.regime = RegimeBounds::default();
    }
    let fit = run_rate_sweep(&spec)?;
    let echo = echo_config(cfg, json!({ "sweep": spec }));
    let path = write_report(cfg, output, &Table::from(&fit), echo)?;
    let pass = fit.envelope_c.is_finite() && fit.envelope_c <= ENVELOPE_MAX;
    let line = json!({
        "envelope_c": fit.envelope_c,
        "envelope_c_upper": fit.envelope_c_upper,
        "slope": fit.slope,
        "predicted_exponent": fit.predicted_exponent,
        "monotone_violations": fit.monotone_violations,
        "flagged": fit.n_flagged,
        "points": fit.records.len(),
        "pass": pass,
        "report": path,
    });
    println!("{line}");
    Ok(if pass { 0 } else { 1 })
}

fn check(cfg: &CliConfig, suite: &str, cases: usize, seed: u64, output: &Output) -> Result<u8> {
    let suites = if suite == "all" {
        Vec::new()
    } else {
        suite.split(',').map(|s| Suite::parse(s.trim())).collect::<Result<Vec<_>>>()?
    };
    let rep = run_bound_suite(seed, cases, &suites)?;
    let echo = echo_config(cfg, json!({ "check": { "suite": suite, "cases": cases, "seed": seed } }));
    let path = write_report(cfg, output, &Table::from(&rep), echo)?;
    let failed: Vec<&str> = rep.entries.iter().filter(|e| !e.pass).map(|e| e.name.as_str()).collect();
    let fitted: serde_json::Map<String, Value> =
        rep.entries.iter().map(|e| (e.name.clone(), json!(e.fitted))).collect();
    let line = json!({
        "passed": rep.entries.len() - failed.len(),
        "failed": failed,
        "fitted": fitted,
        "report": path,
    });
    println!("{line}");
    Ok(if rep.all_pass() { 0 } else { 1 })
}

fn calibrate(cfg: &CliConfig, target: f64, grid: Option<&PathBuf>, output: &Output) -> Result<u8> {
    let grid: CalibrationGrid = match grid {
        Some(p) => read_json(p)?,
        None => CalibrationGrid { base: cfg.regime, ..CalibrationGrid::default() },
    };
    let c = calibrate_regimes_on(target, &grid)?;
    let echo = echo_config(cfg, json!({ "calibrate": { "target": target, "grid_hash": c.grid_hash, "grid": c.grid } }));
    let path = write_report(cfg, output, &Table::from(&c), echo)?;
    let unresolved = c.points.iter().filter(|p| p.rel_err.is_none()).count();
    let line = json!({
        "target_rel_err": target,
        "config": c.config,
        "grid_hash": c.grid_hash,
        "unresolved_points": unresolved,
        "report": path,
    });
    println!("{line}");
    Ok(0)
}

fn integral(t: f64, a: f64, b: f64, alpha: f64, beta: f64, tol: f64) -> Result<u8> {
    let value = inverse_gamma_conv_integral(t, a, b, alpha, beta, tol)?;
    let shape = estints_shape(t, a, b, alpha, beta)?;
    println!("{}", json!({ "value": value, "shape": shape, "ratio": value / shape }));
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    let cfg = CliConfig::load(cli.config.as_deref())?;
    match cli.cmd {
        Cmd::Eval { t, x, y, method, paths, seed } => eval(&cfg, t, &x, &y, method, paths, seed),
        Cmd::Sweep { family, theorem, variant, shift, spec, output } => {
            let s = sweep_spec(family, theorem, variant, spec.as_ref())?;
            sweep(&cfg, s, shift, &output)
        }
        Cmd::Check { suite, cases, seed, output } => check(&cfg, &suite, cases, seed, &output),
        Cmd::Calibrate { target, grid, output } => calibrate(&cfg, target, grid.as_ref(), &output),
        Cmd::Integral { t, a, b, alpha, beta, tol } => integral(t, a, b, alpha, beta, tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("bhk: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
