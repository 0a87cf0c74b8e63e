use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qlinear::experiment::{run_experiment, ExperimentSpec, Settings};
use qlinear::Error;

/// Simulate the random greedy linear q-uniform hypergraph process.
#[derive(Parser)]
#[command(name = "qlinear", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the process with trace and summary output
    Run(Common),
    /// Run to maximality
    Maximal(Common),
    /// Seeded runs over every (n, q) plus an aggregate
    Sweep(Common),
    /// Run verification suites (all when none are named)
    Verify {
        #[command(flatten)]
        common: Common,
        suites: Vec<String>,
    },
    /// Check the edge-count bounds on maximal runs
    Bounds(Common),
    /// Tabulate the deterministic trajectories
    Curves(Common),
}

#[derive(Args)]
struct Common {
    /// Vertex counts; repeat or separate with commas
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Edge sizes; repeat or separate with commas
    #[arg(long, value_delimiter = ',')]
    q: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Runs per (n, q), seeded seed, seed + 1, ...
    #[arg(long)]
    runs: Option<u64>,
    /// m0, maximal, or steps:K
    #[arg(long)]
    stop: Option<String>,
    /// Steps between trace rows
    #[arg(long)]
    stride: Option<u64>,
    /// Monte Carlo samples per estimate
    #[arg(long)]
    samples: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value settings file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

fn settings(mode: &str, c: &Common, suites: &[String]) -> qlinear::Result<Settings> {
    let mut base = match &c.config {
        Some(path) => Settings::parse(&std::fs::read_to_string(path)?)?,
        None => Settings::default(),
    };
    let mut flags = Settings::default();
    flags.push("mode", mode)?;
    let join = |xs: &[usize]| {
        xs.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    if !c.n.is_empty() {
        flags.push("n", &join(&c.n))?;
    }
    if !c.q.is_empty() {
        flags.push("q", &join(&c.q))?;
    }
    let singles: [(&str, Option<String>); 7] = [
        ("seed", c.seed.map(|v| v.to_string())),
        ("runs", c.runs.map(|v| v.to_string())),
        ("stop", c.stop.clone()),
        ("stride", c.stride.map(|v| v.to_string())),
        ("samples", c.samples.map(|v| v.to_string())),
        ("jobs", c.jobs.map(|v| v.to_string())),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in singles {
        if let Some(v) = value {
            flags.push(key, &v)?;
        }
    }
    if !suites.is_empty() {
        flags.push("suite", &suites.join(","))?;
    }
    base.overlay(&flags);
    Ok(base)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, common, suites) = match &cli.command {
        Command::Run(c) => ("run", c, &[][..]),
        Command::Maximal(c) => ("maximal", c, &[][..]),
        Command::Sweep(c) => ("sweep", c, &[][..]),
        Command::Verify { common, suites } => ("verify", common, suites.as_slice()),
        Command::Bounds(c) => ("bounds", c, &[][..]),
        Command::Curves(c) => ("curves", c, &[][..]),
    };
    let outcome = settings(mode, common, suites)
        .and_then(|s| ExperimentSpec::from_settings(&s))
        .and_then(|spec| run_experiment(&spec));
    match outcome {
        Ok(o) => {
            for f in &o.failures {
                eprintln!(
                    "run n={} q={} seed={} failed: {}",
                    f.n, f.q, f.seed, f.error
                );
            }
            for c in &o.failed_checks {
                eprintln!("check failed: {c}");
            }
            println!("wrote {} files", o.written.len());
            if o.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e @ Error::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
