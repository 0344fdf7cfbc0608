use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use igsub_cli::config::{ExperimentConfig, Overrides};
use igsub_cli::report::{version, Refusal};
use igsub_cli::suites::{is_refusal, run_suite, Suite};
use igsub_cli::{eval, simulate, CliError};

/// Simulate, verify and evaluate incomplete-gamma subordinators.
#[derive(Debug, Parser)]
#[command(name = "igsub", version)]
struct Cli {
    /// TOML experiment configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for reports, paths and manifests.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo sample count, overriding every suite default.
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Multiplier applied to every tolerance.
    #[arg(long = "tolerance-scale", global = true)]
    tolerance_scale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write sample paths as CSV plus a manifest.
    Simulate,
    /// Run a verification suite and write its JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Evaluate an analytic function, e.g. `eval lower_inc_gamma 0.5 1.0`.
    Eval {
        function: String,
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
    },
}

const EXIT_FAILED_CHECKS: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let base = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    base.apply(&Overrides {
        seed: cli.seed,
        threads: cli.threads,
        out: cli.out.clone(),
        paths: cli.paths,
        tolerance_scale: cli.tolerance_scale,
    })
}

fn write_json(cfg: &ExperimentConfig, name: &str, json: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", cfg.out.display())))?;
    let path = cfg.out.join(name);
    std::fs::write(&path, json).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn verify(cfg: &ExperimentConfig, suite: Suite) -> Result<u8, CliError> {
    match run_suite(suite, cfg) {
        Ok(report) => {
            for c in &report.checks {
                println!("{}", c.summary());
            }
            let path = write_json(cfg, &format!("{suite}.json"), &report.to_json())?;
            let passed = report.checks.iter().filter(|c| c.pass).count();
            println!("{suite}: {passed}/{} checks passed; report {}", report.checks.len(), path.display());
            Ok(if report.pass { 0 } else { EXIT_FAILED_CHECKS })
        }
        Err(e) if is_refusal(&e) => {
            let refusal = Refusal {
                suite: suite.name().to_string(),
                version: version(),
                master_seed: cfg.seed,
                config: cfg.clone(),
                refusal: e.to_string(),
            };
            let mut json = serde_json::to_string_pretty(&refusal).expect("refusals serialize");
            json.push('\n');
            write_json(cfg, &format!("{suite}.json"), &json)?;
            eprintln!("{suite}: refused: {e}");
            Ok(EXIT_ERROR)
        }
        Err(e) => Err(e.into()),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Command::Eval { function, args } = &cli.command {
        print!("{}", eval::eval(function, args)?);
        return Ok(0);
    }
    let cfg = resolve(cli)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    match &cli.command {
        Command::Simulate => {
            let m = simulate::simulate(&cfg)?;
            println!("wrote {} paths and manifest.json to {}", m.files.len(), cfg.out.display());
            Ok(0)
        }
        Command::Verify { suite } => verify(&cfg, *suite),
        Command::Eval { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
