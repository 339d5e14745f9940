use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;

use critvol_cli::commands::{run, RunOptions};
use critvol_cli::config::ScenarioConfig;
use critvol_cli::report::Sidecar;

/// Run one verification scenario and write a JSON report.
#[derive(Parser, Debug)]
#[command(name = "critvol", version)]
struct Args {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides `output` in the config. Without either the
    /// report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for every random draw; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Radial and angular quadrature order.
    #[arg(long)]
    quad_order: Option<usize>,
}

fn execute(args: &Args, cfg: &ScenarioConfig) -> anyhow::Result<bool> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    let start = Instant::now();
    let report = run(cfg, RunOptions { seed: args.seed, quad_order: args.quad_order })?;
    let json = report.to_json();
    let elapsed = start.elapsed().as_secs_f64();
    match args.out.as_ref().or(cfg.output.as_ref()) {
        Some(path) => {
            std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
            let sidecar = Sidecar::new(&json, elapsed, rayon::current_num_threads());
            let meta = path.with_extension("meta.json");
            std::fs::write(&meta, serde_json::to_string_pretty(&sidecar)? + "\n")
                .with_context(|| format!("writing {}", meta.display()))?;
        }
        None => print!("{json}"),
    }
    for e in report.failures() {
        eprintln!("FAIL {}: value {} tolerance {:?} ({})", e.name, e.value, e.tolerance, e.anchor);
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match ScenarioConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&args, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
