//! Command-line front end: argument parsing, config loading and dispatch.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 I/O error.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{parse_config, Config, ConfigError};
use output::Row;

use crate::engine::{consistency_curve, sweep_worst_case, Experiment, MCReport, MonteCarlo, DEFAULT_SWEEP_GRID};
use crate::theory::bound_reports;
use crate::verify::{self, VerifyOptions, DEFAULT_SEED};
use crate::{Family, Instance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const SEED_ENV: &str = "NEYMAN_BAI_SEED";

#[derive(Parser, Debug)]
#[command(name = "neyman-bai", version, about = "Fixed-budget two-armed best-arm identification experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON experiment configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides the config file and NEYMAN_BAI_SEED)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replication count override
    #[arg(long, global = true)]
    pub reps: Option<u64>,
    /// Output file (default stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for Monte Carlo (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Monte Carlo estimate for the configured instance
    Run,
    /// Worst-case gap sweep at gaps x·(σ1+σ2)/√T
    Sweep,
    /// Misidentification probability across the configured budgets
    Consistency,
    /// Closed-form bounds for the configured instance
    Bounds,
    /// Built-in acceptance checks
    Verify {
        /// Comma-separated check ids
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
        #[arg(long, hide = true)]
        corrupt_bound: bool,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub command: Command,
    pub config: Option<Config>,
    pub seed: u64,
    pub reps: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunSpec {
    /// Seed precedence: `--seed`, then the config file, then the environment, then 42.
    pub fn resolve(cli: Cli, env_seed: Option<String>) -> Result<Self, CliError> {
        let config = match &cli.common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
                Some(parse_config(&text)?)
            }
            None => None,
        };
        let env_seed = match env_seed {
            Some(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got {s:?}")))?,
            ),
            None => None,
        };
        let seed = cli
            .common
            .seed
            .or(config.as_ref().and_then(|c| c.seed))
            .or(env_seed)
            .unwrap_or(DEFAULT_SEED);
        if cli.common.reps == Some(0) {
            return Err(CliError::Config("--reps must be >= 1".into()));
        }
        if cli.common.threads == Some(0) {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        Ok(RunSpec {
            command: cli.command,
            config,
            seed,
            reps: cli.common.reps,
            out: cli.common.out,
            format: cli.common.format,
            threads: cli.common.threads,
        })
    }

    fn require_config(&self) -> Result<&Config, CliError> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs --config <file>".into()))
    }

    fn monte_carlo(&self, cfg: &Config) -> MonteCarlo {
        let mc = MonteCarlo::new(self.reps.unwrap_or(cfg.replications), self.seed);
        match self.threads {
            Some(n) => mc.threads(n),
            None => mc,
        }
    }
}

fn mc_row(kind: &str, exp: &Experiment<f64>, rep: &MCReport<f64>, seed: u64) -> Row {
    let sd = exp.instance.std_devs();
    let mu = exp.instance.means();
    Row::new(kind)
        .set("T", exp.budget)
        .set("R", rep.replications)
        .set("policy", exp.policy.name())
        .set("estimator", exp.estimator.name())
        .set("sigma1", sd[0])
        .set("sigma2", sd[1])
        .set("mu1", mu[0])
        .set("mu2", mu[1])
        .set("gap", rep.gap)
        .set("misid_prob", rep.misid_prob)
        .set("misid_se", rep.misid_se)
        .set("mean_regret", rep.mean_regret)
        .set("regret_se", rep.regret_se)
        .set("scaled_regret", rep.scaled_regret)
        .set("n1_frac", rep.mean_alloc_frac[0])
        .set("seed", seed)
        .set("scaled_regret_se", rep.scaled_regret_se)
}

fn log(msg: &str) {
    eprintln!("neyman-bai: {msg}");
}

/// Produces the rows for a data command; `None` for `verify`.
pub fn rows_for(spec: &RunSpec) -> Result<Vec<Row>, CliError> {
    match &spec.command {
        Command::Run => {
            let cfg = spec.require_config()?;
            let exp = Experiment::new(cfg.instance, cfg.budget, cfg.policy, cfg.estimator)?;
            let mc = spec.monte_carlo(cfg);
            log(&format!("run: T={} R={} seed={}", cfg.budget, mc.replications, spec.seed));
            let rep = mc.run(&exp)?;
            Ok(vec![mc_row("mc", &exp, &rep, spec.seed)])
        }
        Command::Sweep => {
            let cfg = spec.require_config()?;
            if cfg.family() != Family::Gaussian {
                return Err(CliError::Config("config error at `instance.family`: sweep needs gaussian arms".into()));
            }
            let grid = cfg.grid.clone().unwrap_or_else(|| DEFAULT_SWEEP_GRID.to_vec());
            let mc = spec.monte_carlo(cfg);
            log(&format!("sweep: {} points, T={} R={} seed={}", grid.len(), cfg.budget, mc.replications, spec.seed));
            let table = sweep_worst_case(cfg.instance.std_devs(), cfg.budget, cfg.policy, cfg.estimator, &grid, &mc)?;
            let mut rows = Vec::with_capacity(table.rows.len());
            for r in &table.rows {
                let inst = Instance::gaussian([r.gap, 0.0], [table.sigma[0].powi(2), table.sigma[1].powi(2)])?;
                let exp = Experiment::new(inst, cfg.budget, cfg.policy, cfg.estimator)?;
                rows.push(mc_row("sweep", &exp, &r.report, spec.seed).set("x", r.multiplier));
            }
            Ok(rows)
        }
        Command::Consistency => {
            let cfg = spec.require_config()?;
            let budgets = cfg
                .budgets
                .as_ref()
                .ok_or_else(|| CliError::Config("config error at `budgets`: required for consistency".into()))?;
            let mc = spec.monte_carlo(cfg);
            log(&format!("consistency: budgets {budgets:?} R={} seed={}", mc.replications, spec.seed));
            let curve = consistency_curve(&cfg.instance, budgets, cfg.policy, cfg.estimator, &mc)?;
            curve
                .iter()
                .map(|c| {
                    let exp = Experiment::new(cfg.instance, c.budget, cfg.policy, cfg.estimator)?;
                    Ok(mc_row("consistency", &exp, &c.report, spec.seed))
                })
                .collect()
        }
        Command::Bounds => {
            let cfg = spec.require_config()?;
            let sd = cfg.instance.std_devs();
            let mu = cfg.instance.means();
            let gap = cfg.instance.gap();
            Ok(bound_reports(sd[0], sd[1], gap, cfg.budget)?
                .into_iter()
                .map(|b| {
                    Row::new("bound")
                        .set("T", cfg.budget)
                        .set("sigma1", sd[0])
                        .set("sigma2", sd[1])
                        .set("mu1", mu[0])
                        .set("mu2", mu[1])
                        .set("gap", gap)
                        .set("name", b.name)
                        .set("value", b.value)
                })
                .collect())
        }
        Command::Verify { .. } => Ok(Vec::new()),
    }
}

fn open_out(spec: &RunSpec) -> Result<Box<dyn Write>, CliError> {
    Ok(match &spec.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("creating {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs a resolved invocation and returns its exit code.
pub fn execute(spec: &RunSpec) -> Result<i32, CliError> {
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    if let Command::Verify { only, corrupt_bound } = &spec.command {
        let opts = VerifyOptions {
            seed: spec.seed,
            threads: spec.threads,
            only: only.clone(),
            reps_override: spec.reps,
            corrupt_bound: *corrupt_bound,
        };
        log(&format!("verify: seed={}", spec.seed));
        let outcomes = verify::run(&opts)?;
        let mut out = open_out(spec)?;
        for o in &outcomes {
            writeln!(out, "{o}").map_err(io_err)?;
        }
        let ok = verify::all_passed(&outcomes);
        writeln!(
            out,
            "{} of {} checks passed",
            outcomes.iter().filter(|o| o.passed).count(),
            outcomes.len()
        )
        .map_err(io_err)?;
        out.flush().map_err(io_err)?;
        return Ok(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED });
    }

    let rows = rows_for(spec)?;
    let mut out = open_out(spec)?;
    match spec.format {
        Format::Csv => output::write_csv(&mut out, &rows),
        Format::Json => output::write_json(&mut out, &rows),
    }
    .and_then(|_| out.flush())
    .map_err(io_err)?;
    Ok(EXIT_OK)
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = RunSpec::resolve(cli, std::env::var(SEED_ENV).ok()).and_then(|spec| execute(&spec));
    match result {
        Ok(code) => code,
        Err(e) => {
            log(&e.to_string());
            e.exit_code()
        }
    }
}
