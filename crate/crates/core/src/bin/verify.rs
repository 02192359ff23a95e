//! Command-line verifier: runs the identity suites described by a config
//! file and writes a machine-readable report.
//!
//! Exit codes: 0 all suites pass, 1 suite failures, 2 configuration or usage
//! error, 3 internal assertion failure.

use clap::Parser;
use dualpair::error::Error;
use dualpair::suites::{replay, run_suite, Env, ReplayFile, RunConfig, RunDocument};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    about = "Verify metaplectic cocycle identities for unitary similitude dual pairs"
)]
struct Args {
    /// Path to a key = value config file.
    #[arg(long, required_unless_present = "replay")]
    config: Option<PathBuf>,

    /// Run only the named suites (repeatable); defaults to the config's list.
    #[arg(long = "suite")]
    suites: Vec<String>,

    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the config trial count.
    #[arg(long)]
    trials: Option<usize>,

    /// Re-run a single instance from a counterexample dump.
    #[arg(long)]
    replay: Option<PathBuf>,

    /// Write the JSON report to this path (defaults to stdout only).
    #[arg(long)]
    report: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::UnknownSuite(_) | Error::ChiUnavailable => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(args: &Args) -> Result<bool, Error> {
    if let Some(path) = &args.replay {
        return run_replay(path);
    }
    let path = args.config.as_ref().expect("clap enforces --config without --replay");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if !args.suites.is_empty() {
        cfg.suites = args.suites.clone();
    }
    cfg.validate()?;

    let env = Env::build(&cfg)?;
    let mut reports = Vec::new();
    for name in &cfg.suites {
        let rep = run_suite(&env, name)?;
        println!(
            "{:18} {:>5} trials  {:>3} failures  {:>6} ms",
            rep.suite, rep.trials, rep.failures, rep.elapsed_ms
        );
        for cex in &rep.counterexamples {
            println!("  counterexample (trial {}): {}", cex.trial, cex.check);
        }
        reports.push(rep);
    }
    let doc = RunDocument { config: cfg.to_map(), reports };
    let json = serde_json::to_string_pretty(&doc).expect("report serializes");
    if let Some(path) = &args.report {
        std::fs::write(path, &json)
            .map_err(|e| Error::InvalidConfig(format!("cannot write report: {e}")))?;
        // dump replayable counterexample files next to the report
        for rep in &doc.reports {
            for cex in &rep.counterexamples {
                let file = ReplayFile {
                    config: doc.config.clone(),
                    suite: rep.suite.clone(),
                    trial: cex.trial,
                    counterexample: cex.clone(),
                };
                let mut p = path.clone();
                p.set_extension(format!("cex.{}.{}.json", rep.suite, cex.trial));
                std::fs::write(&p, serde_json::to_string_pretty(&file).unwrap())
                    .map_err(|e| Error::InvalidConfig(format!("cannot write dump: {e}")))?;
            }
        }
        println!("report written to {}", path.display());
    }
    Ok(doc.passed())
}

fn run_replay(path: &PathBuf) -> Result<bool, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    let file: ReplayFile = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("bad replay file: {e}")))?;
    println!("replaying suite {} trial {}", file.suite, file.trial);
    match replay(&file)? {
        None => {
            println!("trial passes");
            Ok(true)
        }
        Some(cex) => {
            println!("trial fails check: {}", cex.check);
            println!("  expected: {}", cex.expected);
            println!("  actual:   {}", cex.actual);
            for (k, v) in &cex.inputs {
                println!("  {k} = {v}");
            }
            Ok(false)
        }
    }
}
