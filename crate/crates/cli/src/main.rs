//! Command-line front end for the ND-NOMA simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndnoma::harness::{
    parse_count, parse_k_db, resolve_workers, run_sweep, run_validation, selftest_determinism, to_csv_string, write_csv,
    Scheme, SweepConfig, XKind,
};
use ndnoma::{Error, ThresholdRule};

#[derive(Parser, Debug)]
#[command(name = "ndnoma", version, about = "Noise-domain NOMA simulator and BEP theory engine")]
struct Cli {
    /// Master seed; overrides the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (falls back to NDNOMA_WORKERS, then the config, then all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a grid sweep described by a configuration file.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Record per-point wall-clock seconds.
        #[arg(long)]
        timing: bool,
    },
    /// Run one operating point and print its rows as CSV.
    Point(PointArgs),
    /// Run the estimator validity suite.
    Validate,
    /// Check that sweeps are byte-identical across runs and worker counts.
    SelftestDeterminism,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    scheme: Scheme,
    /// Rician factor in dB, or `rayleigh`.
    #[arg(long, value_parser = parse_k_db, allow_hyphen_values = true)]
    k_db: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    delta_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_bar_db: Option<f64>,
    /// Bits per user (`1e5` notation accepted).
    #[arg(long, value_parser = parse_count)]
    bits: Option<u64>,
    /// Channel draws for the theoretical BEP.
    #[arg(long, value_parser = parse_count)]
    j_points: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p_dbm: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    rho_far: Option<f64>,
    /// `optimal` or `chi`.
    #[arg(long, value_parser = parse_rule)]
    u2_threshold: Option<ThresholdRule>,
    #[arg(long)]
    timing: bool,
}

fn parse_rule(s: &str) -> Result<ThresholdRule, String> {
    ThresholdRule::parse(s).ok_or_else(|| format!("expected 'optimal' or 'chi', got '{s}'"))
}

impl PointArgs {
    fn into_config(self) -> ndnoma::Result<SweepConfig> {
        let mut c = SweepConfig::defaults(self.scheme);
        let kind = self.scheme.x_kind();
        let x = match (kind, self.delta_db, self.gamma_bar_db) {
            (XKind::DeltaDb, Some(x), None) | (XKind::GammaBarDb, None, Some(x)) => x,
            _ => {
                return Err(Error::Config(format!(
                    "scheme {} needs exactly --{}",
                    self.scheme,
                    kind.name().replace('_', "-")
                )))
            }
        };
        c.x_db = vec![x];
        c.k_db = vec![self.k_db.unwrap_or(c.k_db[0])];
        c.n = vec![self.n.unwrap_or(c.n[0])];
        if let Some(v) = self.bits {
            c.bits_per_point = v;
        }
        if let Some(v) = self.j_points {
            c.j_points = v;
        }
        c.alpha = self.alpha.unwrap_or(c.alpha);
        c.p_dbm = self.p_dbm.unwrap_or(c.p_dbm);
        c.beta = self.beta.unwrap_or(c.beta);
        c.psi = self.psi.unwrap_or(c.psi);
        c.rho_far = self.rho_far.unwrap_or(c.rho_far);
        c.u2_threshold = self.u2_threshold.unwrap_or(c.u2_threshold);
        c.timing = self.timing;
        c.validate()?;
        Ok(c)
    }
}

fn workers(flag: Option<usize>, config: Option<usize>) -> ndnoma::Result<usize> {
    let env = std::env::var("NDNOMA_WORKERS").ok();
    resolve_workers(flag, env.as_deref(), config)
}

fn run(cli: Cli) -> ndnoma::Result<bool> {
    match cli.command {
        Command::Sweep { config, out, timing } => {
            let mut cfg = SweepConfig::from_file(&config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            cfg.timing |= timing;
            let rows = run_sweep(&cfg, workers(cli.workers, cfg.workers)?)?;
            write_csv(&rows, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Point(args) => {
            let mut cfg = args.into_config()?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let rows = run_sweep(&cfg, workers(cli.workers, None)?)?;
            print!("{}", to_csv_string(&rows));
        }
        Command::Validate => {
            let checks = run_validation(cli.seed.unwrap_or(1), workers(cli.workers, None)?)?;
            let mut all = true;
            for c in &checks {
                all &= c.passed;
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(all);
        }
        Command::SelftestDeterminism => {
            // The self-test pins its own worker counts; `--workers` is
            // accepted for uniformity but does not change the result.
            let _ = workers(cli.workers, None)?;
            println!("{}", selftest_determinism(cli.seed.unwrap_or(1))?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parameter(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
