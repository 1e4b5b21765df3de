//! `predba`: single runs, sweeps, theoretical curves and verification suites.
//!
//! Exit status: 0 on success, 1 when a suite assertion fails or the run hits
//! an internal error, 2 on usage errors and invalid scenarios.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use predba_core::adversary::scenarios::Theorem;
use predba_core::curves::{curve_table, write_curve_csv};
use predba_core::harness::suites::{
    consistency_suite, default_family_points, impossibility_suite, local_suite, protocols_suite, replay_suite,
    robustness_suite, smoothness_suite, Suite, SuiteReport,
};
use predba_core::harness::sweep::{sweep, write_sweep_csv, SweepParams};
use predba_core::harness::{run_scenario, SCHEMA_VERSION};
use predba_core::{library, AdversarySpec, Error, Mode, Scenario, TrustParam};
use serde_json::json;

#[derive(Parser)]
#[command(name = "predba", version, about = "Byzantine agreement with predictions: simulator and harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Simulate(SimulateArgs),
    /// Empirical resilience over a range of prediction errors, as CSV.
    Sweep(SweepArgs),
    /// Theoretical resilience and impossibility curves, as CSV.
    Curves(CurvesArgs),
    /// Run a verification suite; exits 1 if any assertion fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the seed stored in the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Outcome JSON; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write every node's transcript here.
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Point {
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    alpha: Option<TrustParam>,
    #[arg(long)]
    n: Option<usize>,
}

impl Point {
    fn require(&self) -> Result<(Mode, TrustParam, usize), Failure> {
        match (self.mode, self.alpha, self.n) {
            (Some(m), Some(a), Some(n)) => {
                a.check(m).map_err(usage)?;
                Ok((m, a, n))
            }
            _ => Err(Failure::Usage("--mode, --alpha and --n are required".into())),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    point: Point,
    /// Inclusive range `a:b`; defaults to `0:n`.
    #[arg(long)]
    eta_range: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated strategy names; defaults to the whole library.
    #[arg(long)]
    adversaries: Option<String>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    point: Point,
    #[arg(long)]
    eta_range: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: Suite,
    #[command(flatten)]
    point: Point,
    /// Seeds per cell; each suite has its own default.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    adversaries: Option<String>,
    #[arg(long)]
    seed: u64,
    /// Impossibility family; all default families when absent.
    #[arg(long)]
    theorem: Option<Theorem>,
    /// Error parameter of the impossibility family.
    #[arg(long)]
    eta: Option<usize>,
    /// Smoothness only: also sweep the empirical curve with this many trials.
    #[arg(long)]
    sweep_trials: Option<usize>,
    /// JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Failed(String),
    Internal(anyhow::Error),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidScenario(_)
            | Error::InvalidConfig(_)
            | Error::InfeasiblePrediction(_)
            | Error::Infeasible(_)
            | Error::AlphaOutOfRange { .. }
            | Error::BadAlpha(_)
            | Error::NodeOutOfRange(..)
            | Error::StrategyRejected(_) => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Curves(a) => curves(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.scenario).map_err(|e| usage(format!("{}: {e}", a.scenario.display())))?;
    let mut scenario = Scenario::from_json(&text)?;
    if let Some(seed) = a.seed {
        scenario.seed = seed;
    }
    let report = run_scenario(&scenario, a.transcripts.is_some())?;
    let outcome = json!({
        "schema_version": SCHEMA_VERSION,
        "protocol": scenario.protocol.name(),
        "seed": scenario.seed,
        "outcome": report.outcome,
    });
    let mut body = serde_json::to_vec_pretty(&outcome).map_err(anyhow::Error::from)?;
    body.push(b'\n');
    if let Some(path) = &a.transcripts {
        let dump = json!({
            "schema_version": SCHEMA_VERSION,
            "transcripts": report.transcripts.unwrap_or_default(),
        });
        write_atomic(path, &serde_json::to_vec(&dump).map_err(anyhow::Error::from)?)?;
    }
    emit(a.out.as_deref(), &body)?;
    Ok(())
}

fn eta_range(spec: Option<&str>, n: usize) -> Result<Vec<usize>, Failure> {
    let Some(spec) = spec else { return Ok((0..=n).collect()) };
    let bad = || Failure::Usage(format!("--eta-range expects a:b within 0:{n}, got {spec:?}"));
    let (lo, hi) = spec.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (usize, usize) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo > hi || hi > n {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn adversaries(spec: Option<&str>) -> Result<Vec<AdversarySpec>, Failure> {
    let Some(spec) = spec else { return Ok(library()) };
    spec.split(',')
        .map(|name| {
            AdversarySpec::by_name(name.trim())
                .ok_or_else(|| Failure::Usage(format!("unknown adversary {name:?}")))
        })
        .collect()
}

fn run_sweep(a: SweepArgs) -> Result<(), Failure> {
    let (mode, alpha, n) = a.point.require()?;
    let etas = eta_range(a.eta_range.as_deref(), n)?;
    let params = SweepParams { mode, alpha, n, adversaries: adversaries(a.adversaries.as_deref())?, trials: a.trials, seed: a.seed };
    let result = sweep(&params, &etas)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &result.rows).map_err(anyhow::Error::from)?;
    emit(a.out.as_deref(), &buf)?;
    Ok(())
}

fn curves(a: CurvesArgs) -> Result<(), Failure> {
    let (mode, alpha, n) = a.point.require()?;
    let etas = eta_range(a.eta_range.as_deref(), n)?;
    let rows: Vec<_> = curve_table(mode, alpha, n)?.into_iter().filter(|r| etas.contains(&r.eta)).collect();
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, &rows).map_err(anyhow::Error::from)?;
    emit(a.out.as_deref(), &buf)?;
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let sweep_params = |default_trials: usize| -> Result<SweepParams, Failure> {
        let (mode, alpha, n) = a.point.require()?;
        Ok(SweepParams {
            mode,
            alpha,
            n,
            adversaries: adversaries(a.adversaries.as_deref())?,
            trials: a.trials.unwrap_or(default_trials),
            seed: a.seed,
        })
    };
    let report = match a.suite {
        Suite::Consistency => consistency_suite(&sweep_params(100)?)?,
        Suite::Robustness => robustness_suite(&sweep_params(100)?)?,
        Suite::Smoothness => smoothness_suite(&sweep_params(50)?, a.sweep_trials)?,
        Suite::Impossibility => match a.theorem {
            Some(t) => {
                let (alpha, n) = match (a.point.alpha, a.point.n) {
                    (Some(alpha), Some(n)) => (alpha, n),
                    _ => return Err(Failure::Usage("--alpha and --n are required with --theorem".into())),
                };
                impossibility_suite(t, alpha, n, a.eta)?
            }
            None => {
                let mut all = SuiteReport::new("impossibility");
                for p in default_family_points() {
                    all.merge(impossibility_suite(p.theorem, p.alpha(), p.n, p.eta)?);
                }
                all
            }
        },
        Suite::Local => local_suite(a.point.n.unwrap_or(8))?,
        Suite::Protocols => protocols_suite(a.trials.unwrap_or(50), a.seed)?,
        Suite::Replay => {
            let alpha = match a.point.alpha {
                Some(alpha) => alpha,
                None => TrustParam::from_fraction(4, 5)?,
            };
            replay_suite(alpha, a.point.n.unwrap_or(20), 8, a.seed)?
        }
    };
    for x in &report.assertions {
        println!("{} {}: {}", if x.passed { "PASS" } else { "FAIL" }, x.name, x.detail);
    }
    println!("{}: {} assertions, {} failed, {} runs", report.suite, report.assertions.len(), report.failures().count(), report.runs);
    if let Some(path) = &a.out {
        let mut body = serde_json::to_vec_pretty(&report).map_err(anyhow::Error::from)?;
        body.push(b'\n');
        write_atomic(path, &body)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Failed(format!("{} suite failed", report.suite)))
    }
}
