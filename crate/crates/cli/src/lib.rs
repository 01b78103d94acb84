//! Command-line front end: argument and config resolution, dispatch, and
//! report emission. Exit codes are 0 (all checks pass), 1 (a check failed)
//! and 2 (usage or I/O error).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub mod ale_report;
pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use config::{pick, require, ConfigFile};
use report::{envelope, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "s3forms", version, about = "Spectral and self-dual form checks on S³, ℝ⁴ and a two-ended ALE model")]
pub struct Cli {
    /// Directory for the JSON report and CSV artifacts.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON config file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and multiplicities of *d on divergence-free 1-forms.
    Spectrum {
        /// Maximal polynomial degree of the coefficients in the left coframe.
        #[arg(long)]
        degree: Option<u32>,
        /// Exact rational multiplicities instead of a float eigensolve.
        #[arg(long)]
        exact: bool,
        /// Also write the div, curl and *d matrices.
        #[arg(long)]
        dump_operators: bool,
    },
    /// Evolve initial data under t ∂_t η = curl η, spectrally and by RK4.
    Evolve {
        /// Initial data JSON (divergence-free coframe field).
        #[arg(long)]
        init: Option<PathBuf>,
        /// Initial time [default: 1].
        #[arg(long)]
        t0: Option<f64>,
        /// Final time.
        #[arg(long)]
        t1: Option<f64>,
        /// RK4 steps; the order check also runs twice as many [default: 100].
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Pointwise and integral property sweeps.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        /// Sample points per form.
        #[arg(long)]
        samples: Option<usize>,
        /// Finite-difference step.
        #[arg(long)]
        h: Option<f64>,
        /// Spectral degree of the tested modes.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Curvature, asymptotics, energy and decay of the ALE model.
    AleReport {
        /// Neck scale ε > 0.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Coefficient of the Kähler part [default: 1].
        #[arg(long)]
        alpha: Option<f64>,
        /// Coefficient of the t⁻⁴-weighted part [default: 0].
        #[arg(long)]
        beta: Option<f64>,
        /// |ρ| at which the end asymptotics are checked, at least 100 [default: 1000].
        #[arg(long)]
        rho_max: Option<f64>,
    },
    /// Sweep of the Moser product against e^c.
    Moser {
        /// Smallest c [default: 1e-6].
        #[arg(long)]
        c_min: Option<f64>,
        /// Largest c [default: 10].
        #[arg(long)]
        c_max: Option<f64>,
        /// Sweep points, log-spaced when c_min > 0 [default: 41].
        #[arg(long)]
        points: Option<usize>,
    },
    /// Decay exponent and classification on one end.
    Decay {
        /// Neck scale ε > 0.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Coefficient of the Kähler part [default: 1].
        #[arg(long)]
        alpha: Option<f64>,
        /// Coefficient of the t⁻⁴-weighted part [default: 0].
        #[arg(long)]
        beta: Option<f64>,
        /// Which end to profile.
        #[arg(long, value_enum)]
        end: Option<EndArg>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Frames,
    Hodge,
    Kato,
    Orthogonality,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EndArg {
    Plus,
    Minus,
}

impl EndArg {
    fn parse(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| format!("end must be plus or minus, got {s:?}"))
    }
}

impl From<EndArg> for s3forms::ale::End {
    fn from(e: EndArg) -> Self {
        match e {
            EndArg::Plus => Self::Plus,
            EndArg::Minus => Self::Minus,
        }
    }
}

/// A finished run, ready to print.
#[derive(Debug)]
pub struct Run {
    pub command: &'static str,
    pub seed: u64,
    pub outcome: Outcome,
    pub output: Option<PathBuf>,
}

impl Run {
    pub fn report(&self) -> serde_json::Value {
        envelope(self.command, self.seed, &self.outcome)
    }

    pub fn exit_code(&self) -> i32 {
        if self.outcome.failures.is_empty() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("--{name} must be positive, got {v}"))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("--{name} must be finite, got {v}"))
    }
}

/// Resolves options and runs the command. `Err` is a usage error.
pub fn execute(cli: Cli) -> Result<Run, String> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = pick(cli.seed, cfg.seed, s3forms::sampling::DEFAULT_SEED);
    let output = cli.output.clone().or(cfg.output.clone());
    let (command, outcome) = match cli.command {
        Command::Spectrum {
            degree,
            exact,
            dump_operators,
        } => {
            let degree = require(degree, cfg.degree, "degree")?;
            let exact = exact || cfg.exact.unwrap_or(false);
            ("spectrum", commands::spectrum(degree, exact, dump_operators))
        }
        Command::Evolve { init, t0, t1, steps } => {
            let init = require(init, cfg.init.clone(), "init")?;
            let t0 = positive("t0", pick(t0, cfg.t0, 1.0))?;
            let t1 = positive("t1", require(t1, cfg.t1, "t1")?)?;
            let steps = pick(steps, cfg.steps, 100);
            if steps == 0 {
                return Err("--steps must be at least 1".into());
            }
            let data = commands::load_initial_data(&init)?;
            ("evolve", commands::evolve(&data, t0, t1, steps))
        }
        Command::Verify {
            target,
            samples,
            h,
            degree,
        } => {
            let h = h.or(cfg.h).map(|v| positive("h", v)).transpose()?;
            let samples = samples.or(cfg.samples);
            if samples == Some(0) {
                return Err("--samples must be at least 1".into());
            }
            let degree = degree.or(cfg.degree);
            let outcome = match target {
                VerifyTarget::Frames => verify::frames(samples.unwrap_or(1000), seed),
                VerifyTarget::Hodge => verify::hodge(degree.unwrap_or(4), samples.unwrap_or(1000), seed),
                VerifyTarget::Kato => verify::kato(samples.unwrap_or(500), h.unwrap_or(1e-3), seed),
                VerifyTarget::Orthogonality => verify::orthogonality(degree.unwrap_or(3)),
                VerifyTarget::Elliptic => verify::elliptic(samples.unwrap_or(200), h.unwrap_or(1e-2), seed),
            };
            ("verify", outcome)
        }
        Command::AleReport {
            epsilon,
            alpha,
            beta,
            rho_max,
        } => {
            let epsilon = positive("epsilon", require(epsilon, cfg.epsilon, "epsilon")?)?;
            let alpha = finite("alpha", pick(alpha, cfg.alpha, 1.0))?;
            let beta = finite("beta", pick(beta, cfg.beta, 0.0))?;
            let rho_max = positive("rho-max", pick(rho_max, cfg.rho_max, 1000.0))?;
            if rho_max < 100.0 {
                return Err("--rho-max must be at least 100 so each end spans a decade".into());
            }
            let params = s3forms::ale::AKFormParams { alpha, beta, epsilon };
            ("ale-report", ale_report::run(params, rho_max, seed))
        }
        Command::Moser { c_min, c_max, points } => {
            let c_min = finite("c-min", pick(c_min, cfg.c_min, 1e-6))?;
            let c_max = finite("c-max", pick(c_max, cfg.c_max, 10.0))?;
            let points = pick(points, cfg.points, 41);
            if c_min < 0.0 || c_max < c_min || points == 0 {
                return Err("need 0 ≤ c-min ≤ c-max and points ≥ 1".into());
            }
            ("moser", commands::moser(c_min, c_max, points))
        }
        Command::Decay {
            epsilon,
            alpha,
            beta,
            end,
        } => {
            let epsilon = positive("epsilon", require(epsilon, cfg.epsilon, "epsilon")?)?;
            let alpha = finite("alpha", pick(alpha, cfg.alpha, 1.0))?;
            let beta = finite("beta", pick(beta, cfg.beta, 0.0))?;
            let end = match end {
                Some(e) => e,
                None => EndArg::parse(&require(None, cfg.end.clone(), "end")?)?,
            };
            let params = s3forms::ale::AKFormParams { alpha, beta, epsilon };
            ("decay", commands::decay(params, end.into()))
        }
    };
    Ok(Run {
        command,
        seed,
        outcome,
        output,
    })
}

fn write_artifacts(dir: &Path, run: &Run, report: &str) -> Result<(), String> {
    let fail = |e: std::io::Error| format!("cannot write to {}: {e}", dir.display());
    std::fs::create_dir_all(dir).map_err(fail)?;
    std::fs::write(dir.join(format!("{}.json", run.command)), report).map_err(fail)?;
    for (name, contents) in &run.outcome.artifacts {
        std::fs::write(dir.join(name), contents).map_err(fail)?;
    }
    Ok(())
}

/// Parses `args`, runs, prints the report to stdout and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let run = match execute(cli) {
        Ok(run) => run,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let report = serde_json::to_string_pretty(&run.report()).expect("report serializes");
    if let Some(dir) = &run.output {
        if let Err(msg) = write_artifacts(dir, &run, &report) {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    }
    println!("{report}");
    for f in &run.outcome.failures {
        eprintln!("FAIL {}::{} observed {} tolerance {}", f.module, f.operation, f.observed, f.tolerance);
    }
    run.exit_code()
}
