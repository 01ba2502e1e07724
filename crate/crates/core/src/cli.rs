//! Command-line front end of the `volratio` binary.
//!
//! Exit codes: 0 on success, 1 on usage or runtime errors, 2 when an
//! experiment detects a violation of a statement that must hold exactly.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bodies::{Body, SymmetricGaugeSpec};
use crate::constructions::gluskin_polytope;
use crate::error::{Error, Result};
use crate::experiments::{
    bobkov_experiment, chevet_tail_experiment, det_bound_experiment, dr_parallelepiped_experiment,
    lvr_gluskin_experiment, sandwich_experiment, santalo_experiment, schatten_lvr_experiment,
    vr_experiment, BobkovConfig, BodyFamily, ChevetConfig, DetBoundConfig, DrConfig,
    GluskinLowerConfig, SandwichConfig, SantaloConfig, SchattenConfig, VrConfig,
};
use crate::report::{emit_report, ExperimentReport, ReportFormat};
use crate::rng::RngStream;
use crate::solver::SolverOptions;

pub const THREADS_ENV: &str = "VOLRATIO_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

const BODY_HELP: &str = "body preset (b1:n, b2:n, binf:n, bp:p:n, schatten:p:d, kyfan:k:d, \
gluskin:n:m:seed), inline JSON, or a path to a JSON file";

#[derive(Debug, Parser)]
#[command(name = "volratio", version, about = "Volume ratio experiments for symmetric convex bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// vr(K, L) against Gluskin polytopes with ⌈δn⌉ random points.
    GluskinLower,
    /// Random parallelepipeds containing L built from its isotropic polar.
    DrParallelepiped,
    /// Inclusions c₁·B∞ ⊆ K ⊆ c₂·n·B₁ for an isotropic unconditional body.
    BobkovCheck,
    /// Lower and upper estimates of the largest volume ratio of a unitary invariant ball.
    SchattenLvr,
    /// Tail of the Gaussian operator norm ‖A: X_L → X_K‖.
    ChevetTail,
    /// |det A|^{1/n}/√n for Gaussian matrices.
    DetBound,
    /// Volume product n·(|K|·|K°|)^{1/n}.
    Santalo,
    /// Estimate vr(K, L).
    Vr,
    /// Sandwich of a unitary invariant ball between scaled Schatten balls.
    SandwichCheck,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated dimensions (matrix sizes d for schatten-lvr).
    #[arg(long, global = true, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Sample budget; its meaning depends on the subcommand.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Oversampling factor: Gluskin polytopes use ⌈δn⌉ random points.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, help = BODY_HELP)]
    pub body: Option<String>,
    /// Target body K (repeatable for gluskin-lower).
    #[arg(long = "body-k", global = true)]
    pub body_k: Vec<String>,
    /// Source body L.
    #[arg(long = "body-l", global = true)]
    pub body_l: Option<String>,
    /// Solver restarts.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Output path (standard output if absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    pub format: ReportFormat,
    /// Worker threads (default: VOLRATIO_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Parses `p` as a number or `inf`.
fn parse_exponent(s: &str) -> Result<f64> {
    let p = match s {
        "inf" | "infinity" | "Inf" => f64::INFINITY,
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad exponent {s:?}")))?,
    };
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("exponent must be in [1, inf], got {s}")));
    }
    Ok(p)
}

fn parse_count(s: &str, what: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::InvalidArgument(format!("bad {what} {s:?}: expected a positive integer"))),
    }
}

fn read_json_body(s: &str) -> Result<Body> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| {
            Error::InvalidArgument(format!(
                "unknown body preset {s:?} and not a readable JSON file ({e}); {BODY_HELP}"
            ))
        })?
    };
    Body::from_json(&text).map_err(|e| Error::InvalidBody(format!("malformed JSON body: {e}")))
}

/// A body from a preset string, inline JSON, or a JSON file.
pub fn parse_body(s: &str) -> Result<Body> {
    let parts: Vec<&str> = s.split(':').collect();
    let body = match parts.as_slice() {
        ["b1", n] => Body::l1(parse_count(n, "dimension")?),
        ["b2", n] => Body::l2(parse_count(n, "dimension")?),
        ["binf", n] => Body::linf(parse_count(n, "dimension")?),
        ["bp", p, n] => Body::lp(parse_exponent(p)?, parse_count(n, "dimension")?),
        ["schatten", p, d] => Body::schatten(parse_exponent(p)?, parse_count(d, "matrix size")?),
        ["kyfan", k, d] => Body::sym_gauge(
            SymmetricGaugeSpec::KyFan {
                k: parse_count(k, "Ky Fan index")?,
            },
            parse_count(d, "matrix size")?,
        ),
        ["gluskin", n, m, seed] => {
            let seed = seed
                .parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("bad seed {seed:?}")))?;
            gluskin_polytope(
                parse_count(n, "dimension")?,
                parse_count(m, "point count")?,
                &mut RngStream::new(seed, 0),
            )?
        }
        [name, ..] if ["b1", "b2", "binf", "bp", "schatten", "kyfan", "gluskin"].contains(name) => {
            return Err(Error::InvalidArgument(format!(
                "wrong number of fields in preset {s:?}; {BODY_HELP}"
            )))
        }
        _ => read_json_body(s)?,
    };
    body.validate()?;
    Ok(body)
}

/// A body family: `b1`, `b2`, `binf`, `bp:p` without a dimension, or any
/// fixed body accepted by [`parse_body`].
pub fn parse_family(s: &str) -> Result<BodyFamily> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["b1"] => Ok(BodyFamily::Lp(1.0)),
        ["b2"] => Ok(BodyFamily::Lp(2.0)),
        ["binf"] => Ok(BodyFamily::Lp(f64::INFINITY)),
        ["bp", p] => Ok(BodyFamily::Lp(parse_exponent(p)?)),
        _ => Ok(BodyFamily::Fixed(parse_body(s)?)),
    }
}

/// `(τ, d)` of a unitary invariant ball.
fn tau_of(b: &Body) -> Result<(SymmetricGaugeSpec, usize)> {
    match b {
        Body::SchattenBall { p, d } => Ok((SymmetricGaugeSpec::Lp { p: *p }, *d)),
        Body::SymmetricGaugeBall { tau, d } => Ok((tau.clone(), *d)),
        _ => Err(Error::InvalidArgument(
            "expected a unitary invariant ball (schatten:p:d, kyfan:k:d or a sym_gauge JSON body)".into(),
        )),
    }
}

fn default_dims(c: &CommonArgs, dims: &[usize]) -> Vec<usize> {
    c.dims.clone().unwrap_or_else(|| dims.to_vec())
}

fn solver(c: &CommonArgs) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if let Some(r) = c.restarts {
        opts.restarts = r;
    }
    if let Some(s) = c.samples {
        opts.volume_samples = s;
    }
    opts
}

fn one_k(c: &CommonArgs, default: &str) -> Result<String> {
    match c.body_k.as_slice() {
        [] => Ok(default.to_string()),
        [k] => Ok(k.clone()),
        _ => Err(Error::InvalidArgument("--body-k given more than once".into())),
    }
}

fn require(v: Option<&String>, flag: &str) -> Result<String> {
    v.cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("missing required flag {flag}")))
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument("--dims must list positive dimensions".into()));
    }
    Ok(())
}

/// Runs one subcommand on the current rayon pool.
pub fn run_command(cmd: Command, c: &CommonArgs) -> Result<ExperimentReport> {
    let seed = c.seed;
    match cmd {
        Command::GluskinLower => {
            let ks = if c.body_k.is_empty() {
                vec![BodyFamily::Lp(2.0)]
            } else {
                c.body_k.iter().map(|s| parse_family(s)).collect::<Result<_>>()?
            };
            let dims = default_dims(c, &[3, 4, 5, 6, 7]);
            check_dims(&dims)?;
            lvr_gluskin_experiment(&GluskinLowerConfig {
                ks,
                delta: c.delta.unwrap_or(2.0),
                dims,
                trials: c.trials.unwrap_or(10),
                seed,
                solver: solver(c),
            })
        }
        Command::DrParallelepiped => {
            let l = parse_family(c.body.as_deref().unwrap_or("b2"))?;
            let dims = default_dims(c, &[4, 5, 6, 7, 8]);
            check_dims(&dims)?;
            let mut cfg = DrConfig::new(l, dims, c.trials.unwrap_or(20), seed);
            cfg.samples = c.samples.unwrap_or(0);
            dr_parallelepiped_experiment(&cfg)
        }
        Command::BobkovCheck => bobkov_experiment(&BobkovConfig {
            body: parse_body(c.body.as_deref().unwrap_or("b1:4"))?,
            samples: c.samples.unwrap_or(10_000),
            seed,
            iso_samples: 0,
        }),
        Command::SchattenLvr => {
            let (tau, d) = tau_of(&parse_body(c.body.as_deref().unwrap_or("schatten:inf:2"))?)?;
            let ds = default_dims(c, &[d]);
            check_dims(&ds)?;
            let mut opts = solver(c);
            opts.volume_samples = c.samples.unwrap_or(opts.volume_samples);
            schatten_lvr_experiment(&SchattenConfig {
                tau,
                ds,
                trials: c.trials.unwrap_or(5),
                seed,
                delta: c.delta.unwrap_or(2.0),
                samples: 0,
                solver: opts,
            })
        }
        Command::ChevetTail => {
            let dims = default_dims(c, &[5, 10]);
            check_dims(&dims)?;
            chevet_tail_experiment(&ChevetConfig {
                l: parse_family(c.body_l.as_deref().unwrap_or("b1"))?,
                k: parse_family(&one_k(c, "binf")?)?,
                dims,
                trials: c.trials.unwrap_or(2000),
                seed,
                u_grid: vec![0.0, 1.0, 2.0],
                ell_samples: c.samples.unwrap_or(20_000),
            })
        }
        Command::DetBound => {
            let dims = default_dims(c, &[5]);
            check_dims(&dims)?;
            det_bound_experiment(&DetBoundConfig {
                dims,
                trials: c.trials.unwrap_or(1000),
                seed,
                threshold: 0.1,
            })
        }
        Command::Santalo => santalo_experiment(&SantaloConfig {
            body: parse_body(c.body.as_deref().unwrap_or("b2:3"))?,
            trials: c.trials.unwrap_or(5),
            seed,
            samples: c.samples.unwrap_or(1000),
        }),
        Command::Vr => {
            if c.body_k.len() > 1 {
                return Err(Error::InvalidArgument("--body-k given more than once".into()));
            }
            let k = parse_body(&require(c.body_k.first(), "--body-k")?)?;
            let l = parse_body(&require(c.body_l.as_ref(), "--body-l")?)?;
            vr_experiment(&VrConfig {
                k,
                l,
                trials: c.trials.unwrap_or(1),
                seed,
                solver: solver(c),
            })
        }
        Command::SandwichCheck => {
            let (tau, d) = tau_of(&parse_body(c.body.as_deref().unwrap_or("kyfan:2:3"))?)?;
            sandwich_experiment(&SandwichConfig {
                tau,
                d,
                samples: c.samples.unwrap_or(10_000),
                seed,
            })
        }
    }
}

fn thread_count(c: &CommonArgs) -> Result<Option<usize>> {
    if let Some(t) = c.threads {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        _ => Ok(None),
    }
}

/// Runs the parsed command on a pool capped at the requested thread count.
pub fn execute(cli: &Cli) -> Result<ExperimentReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_count(&cli.common)? {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker threads: {e}")))?;
    pool.install(|| run_command(cli.command, &cli.common))
}

fn summarize(report: &ExperimentReport) {
    eprintln!(
        "{}: {} rows, {} violations",
        report.experiment,
        report.rows.len(),
        report.violations
    );
    for (k, v) in &report.aggregates {
        eprintln!("  {k} = {v}");
    }
}

/// Parses the arguments, runs the experiment, writes the report and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit_report(&report, cli.common.format, cli.common.out.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    summarize(&report);
    if report.violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}
