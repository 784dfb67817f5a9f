use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tvlab::experiments::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentResult};
use tvlab::Error;

const AFTER_HELP: &str = "\
Environment:
  TVLAB_SEED  master seed used when neither --seed nor the config file sets one

Exit status:
  0  every check passed
  1  a check failed or the run could not complete
  2  usage or config error";

#[derive(Parser)]
#[command(name = "tvlab", version, about = "Monte Carlo and exact checks for learning under known distribution families", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form distances against full enumeration
    VerifyDistances(RunArgs),
    /// Majority-label learner on noisy cube dictators
    MajorityLearner(RunArgs),
    /// Flip events and the noisy-majority confident learner
    ConfidentFail(RunArgs),
    /// PAC learning from an exact STV oracle over the cube family
    StvToPac(RunArgs),
    /// Zero-error WTV learner on the categorical family
    WtvExact(RunArgs),
    /// Weighted categorical adversary: consistency sets, posterior, ERM error
    WtvAdversary(RunArgs),
    /// Canonical and greedy cover sizes on the categorical family
    CoverProfile(RunArgs),
    /// Uniform estimation to ETV and back on the cube family
    UeEtvRoundtrip(RunArgs),
    /// Failure of uniform convergence on the finite Benedek-Itai analogue
    UcFails(RunArgs),
    /// WTV estimates built from a PAC learner
    PacToWtv(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        use Command::*;
        match self {
            VerifyDistances(a) => (ExperimentKind::VerifyDistances, a),
            MajorityLearner(a) => (ExperimentKind::MajorityLearner, a),
            ConfidentFail(a) => (ExperimentKind::ConfidentFail, a),
            StvToPac(a) => (ExperimentKind::StvToPac, a),
            WtvExact(a) => (ExperimentKind::WtvExact, a),
            WtvAdversary(a) => (ExperimentKind::WtvAdversary, a),
            CoverProfile(a) => (ExperimentKind::CoverProfile, a),
            UeEtvRoundtrip(a) => (ExperimentKind::UeEtvRoundtrip, a),
            UcFails(a) => (ExperimentKind::UcFails, a),
            PacToWtv(a) => (ExperimentKind::PacToWtv, a),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write JSON lines here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write a CSV table (to `<out>.csv`, or to stdout without --out)
    #[arg(long)]
    csv: bool,
    /// Overwrite existing output files
    #[arg(long)]
    force: bool,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

/// Config keys settable from the command line; values are parsed by the
/// config layer so files and flags accept the same syntax.
#[derive(Args)]
struct Overrides {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long = "rho_grid", alias = "rho-grid", value_name = "LIST")]
    rho_grid: Option<String>,
    #[arg(long)]
    truncation: Option<String>,
    #[arg(long)]
    special: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long = "eps_grid", alias = "eps-grid", value_name = "LIST")]
    eps_grid: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long = "sample_size", alias = "sample-size")]
    sample_size: Option<String>,
    #[arg(long = "sample_sizes", alias = "sample-sizes", value_name = "LIST")]
    sample_sizes: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    pairs: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Master seed (overrides the config file and TVLAB_SEED)
    #[arg(long)]
    seed: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("n", &self.n),
            ("rho", &self.rho),
            ("rho_grid", &self.rho_grid),
            ("truncation", &self.truncation),
            ("special", &self.special),
            ("eps", &self.eps),
            ("delta", &self.delta),
            ("eps_grid", &self.eps_grid),
            ("t", &self.t),
            ("sample_size", &self.sample_size),
            ("sample_sizes", &self.sample_sizes),
            ("k", &self.k),
            ("pairs", &self.pairs),
            ("trials", &self.trials),
            ("seed", &self.seed),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Precondition(_) => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn resolve(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::defaults(kind, ExperimentConfig::env_seed()?);
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for (key, value) in args.overrides.pairs() {
        cfg.apply(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn csv_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".csv");
    PathBuf::from(s)
}

fn write_new(path: &Path, body: &str, force: bool) -> Result<(), Failure> {
    if path.exists() && !force {
        return Err(Failure::Usage(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    fs::write(path, body).map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))
}

fn emit(result: &ExperimentResult, args: &RunArgs) -> Result<(), Failure> {
    match &args.out {
        Some(out) => {
            let csv = if args.csv { Some(csv_path(out)) } else { None };
            if !args.force {
                for p in std::iter::once(out).chain(csv.as_ref()) {
                    if p.exists() {
                        return Err(Failure::Usage(format!(
                            "{} exists; pass --force to overwrite",
                            p.display()
                        )));
                    }
                }
            }
            write_new(out, &result.to_jsonl(), args.force)?;
            if let Some(p) = csv {
                write_new(&p, &result.to_csv()?, args.force)?;
            }
        }
        None => {
            let body = if args.csv {
                result.to_csv()?
            } else {
                result.to_jsonl()
            };
            io::stdout()
                .lock()
                .write_all(body.as_bytes())
                .map_err(|e| Failure::Run(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<bool, Failure> {
    if args.workers == Some(0) {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    let cfg = resolve(kind, &args)?;
    if let Some(out) = &args.out {
        if out.exists() && !args.force {
            return Err(Failure::Usage(format!(
                "{} exists; pass --force to overwrite",
                out.display()
            )));
        }
    }
    let result = run_experiment(&cfg, args.workers)?;
    emit(&result, &args)?;
    let mut err = io::stderr().lock();
    for (check, passed, observed) in result.verdicts() {
        let _ = writeln!(err, "{} {check} (observed {observed})", if passed { "PASS" } else { "FAIL" });
    }
    Ok(result.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match run(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
