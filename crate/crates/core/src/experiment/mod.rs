//! Seeded batch runs, sweeps, curve tables and verification suites, all
//! written under one output directory.

mod output;
mod spec;
pub mod verify;

pub use output::{
    aggregate, covered_fraction, curves_csv, fmt_float, trace_csv, Aggregate, GroupStats,
    RunFailure, RunSummary,
};
pub use spec::{ExperimentSpec, Mode, Settings};

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{proposition_bounds, PropositionReport};
use crate::process::{run, run_to_maximal, ProcessConfig};
use crate::trajectory::TrajectoryParams;
use verify::{run_suite, SuiteReport, VerifyOptions, SUITES};

/// What a call to [`run_experiment`] produced.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub failures: Vec<RunFailure>,
    /// Verify suites or bound checks that did not hold.
    pub failed_checks: Vec<String>,
}

impl Outcome {
    pub fn success(&self) -> bool {
        self.failures.is_empty() && self.failed_checks.is_empty()
    }
}

fn write(path: PathBuf, contents: &[u8], written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents)?;
    written.push(path);
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value)?;
    s.push(b'\n');
    Ok(s)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    fs::create_dir_all(&spec.out)?;
    let pool = pool(spec.jobs)?;
    pool.install(|| match spec.mode {
        Mode::Run | Mode::Maximal | Mode::Sweep => runs(spec),
        Mode::Bounds => bounds(spec),
        Mode::Curves => curves(spec),
        Mode::Verify => verify_mode(spec),
    })
}

fn stem(n: usize, q: usize, seed: u64) -> String {
    format!("n{n}_q{q}_s{seed}")
}

fn one_run(
    spec: &ExperimentSpec,
    n: usize,
    q: usize,
    seed: u64,
    out: &Path,
) -> Result<(RunSummary, Vec<PathBuf>)> {
    let started = Instant::now();
    let config = ProcessConfig {
        rejection_cap: spec.rejection_cap,
        checkpoint_stride: spec.stride,
        tracking: spec.tracking.clone(),
        budgets: spec.budgets,
        ..ProcessConfig::new(n, q, seed, spec.stop)
    };
    let (_, trace) = run(&config)?;
    let summary = RunSummary::from_trace(
        &trace,
        spec.stop.to_string(),
        started.elapsed().as_secs_f64(),
    );
    let mut written = Vec::new();
    write(
        out.join(format!("trace_{}.csv", stem(n, q, seed))),
        trace_csv(&trace).as_bytes(),
        &mut written,
    )?;
    write(
        out.join(format!("summary_{}.json", stem(n, q, seed))),
        &to_json(&summary)?,
        &mut written,
    )?;
    Ok((summary, written))
}

type RunResult = (usize, usize, u64, Result<(RunSummary, Vec<PathBuf>)>);

fn runs(spec: &ExperimentSpec) -> Result<Outcome> {
    let results: Vec<RunResult> = spec
        .jobs_list()
        .into_par_iter()
        .map(|(n, q, seed)| (n, q, seed, one_run(spec, n, q, seed, &spec.out)))
        .collect();
    let mut outcome = Outcome::default();
    let mut summaries = Vec::new();
    for (n, q, seed, r) in results {
        match r {
            Ok((s, w)) => {
                summaries.push(s);
                outcome.written.extend(w);
            }
            Err(e) => {
                let failure = RunFailure {
                    n,
                    q,
                    seed,
                    error: e.to_string(),
                };
                let path = spec.out.join(format!("failure_{}.json", stem(n, q, seed)));
                write(path, &to_json(&failure)?, &mut outcome.written)?;
                outcome.failures.push(failure);
            }
        }
    }
    if spec.mode == Mode::Sweep && !summaries.is_empty() {
        #[derive(Serialize)]
        struct AggregateFile<'a> {
            groups: &'a [GroupStats],
            failures: &'a [RunFailure],
        }
        let agg = aggregate(&summaries, &outcome.failures)?;
        let file = AggregateFile {
            groups: &agg.groups,
            failures: &outcome.failures,
        };
        write(
            spec.out.join("aggregate.json"),
            &to_json(&file)?,
            &mut outcome.written,
        )?;
    }
    Ok(outcome)
}

fn bounds(spec: &ExperimentSpec) -> Result<Outcome> {
    let reports: Vec<(usize, usize, u64, Result<PropositionReport>)> = spec
        .jobs_list()
        .into_par_iter()
        .map(|(n, q, seed)| {
            let r = run_to_maximal(n, q, seed)
                .and_then(|h| proposition_bounds(n as u64, q as u64, h.edge_count() as u64, true));
            (n, q, seed, r)
        })
        .collect();
    #[derive(Serialize)]
    struct Entry {
        seed: u64,
        #[serde(flatten)]
        report: PropositionReport,
        all_hold: bool,
    }
    let mut outcome = Outcome::default();
    let mut entries = Vec::new();
    for (n, q, seed, r) in reports {
        match r {
            Ok(report) => {
                let all_hold = report.all_hold();
                if !all_hold {
                    outcome
                        .failed_checks
                        .push(format!("bounds n={n} q={q} seed={seed}"));
                }
                entries.push(Entry {
                    seed,
                    report,
                    all_hold,
                });
            }
            Err(e) => outcome.failures.push(RunFailure {
                n,
                q,
                seed,
                error: e.to_string(),
            }),
        }
    }
    #[derive(Serialize)]
    struct BoundsFile<'a> {
        runs: &'a [Entry],
        failures: &'a [RunFailure],
    }
    let file = BoundsFile {
        runs: &entries,
        failures: &outcome.failures,
    };
    let bytes = to_json(&file)?;
    write(spec.out.join("bounds.json"), &bytes, &mut outcome.written)?;
    Ok(outcome)
}

fn curves(spec: &ExperimentSpec) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    for (n, q) in spec.pairs() {
        let params = TrajectoryParams::new(n as u64, q as u64)?;
        let csv = curves_csv(&params, spec.stride.unwrap_or(1));
        write(
            spec.out.join(format!("curves_n{n}_q{q}.csv")),
            csv.as_bytes(),
            &mut outcome.written,
        )?;
    }
    Ok(outcome)
}

fn verify_mode(spec: &ExperimentSpec) -> Result<Outcome> {
    let names: Vec<String> = if spec.suites.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        spec.suites.clone()
    };
    if let Some(bad) = names.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(Error::Usage(format!(
            "unknown suite {bad:?}; known: {}",
            SUITES.join(", ")
        )));
    }
    let opts = VerifyOptions {
        seed: spec.seed,
        scratch: spec.out.join("scratch"),
    };
    let mut outcome = Outcome::default();
    let mut reports: Vec<SuiteReport> = Vec::new();
    for name in &names {
        let r = run_suite(name, &opts).unwrap_or_else(|e| SuiteReport {
            suite: name.clone(),
            passed: false,
            summary: format!("error: {e}"),
            details: serde_json::Value::Null,
        });
        if !r.passed {
            outcome.failed_checks.push(name.clone());
        }
        reports.push(r);
    }
    write(
        spec.out.join("verify.json"),
        &to_json(&reports)?,
        &mut outcome.written,
    )?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str, out: &Path) -> ExperimentSpec {
        let mut s = Settings::parse(text).unwrap();
        s.push("out", out.to_str().unwrap()).unwrap();
        ExperimentSpec::from_settings(&s).unwrap()
    }

    #[test]
    fn pairs_fill_every_pair() {
        let dir = tempfile::tempdir().unwrap();
        let o = run_experiment(&spec("mode=run\nn=30\nq=2\nstop=maximal", dir.path())).unwrap();
        assert!(o.success());
        let s: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("summary_n30_q2_s0.json")).unwrap())
                .unwrap();
        assert_eq!(s["edges"], 435);
        assert_eq!(s["covered_fraction"], 1.0);
    }

    #[test]
    fn maximal_small_case() {
        let dir = tempfile::tempdir().unwrap();
        let o = run_experiment(&spec("mode=maximal\nn=8\nq=4\nruns=100", dir.path())).unwrap();
        assert!(o.success());
        for seed in 0..100 {
            let s: serde_json::Value = serde_json::from_slice(
                &fs::read(dir.path().join(format!("summary_n8_q4_s{seed}.json"))).unwrap(),
            )
            .unwrap();
            let e = s["edges"].as_u64().unwrap();
            assert!(e == 2 || e == 3, "seed {seed}: {e}");
        }
    }

    #[test]
    fn trace_rows_follow_stride() {
        let dir = tempfile::tempdir().unwrap();
        run_experiment(&spec(
            "mode=run\nn=20\nq=3\nstop=steps:23\nstride=5",
            dir.path(),
        ))
        .unwrap();
        let csv = fs::read_to_string(dir.path().join("trace_n20_q3_s0.csv")).unwrap();
        // header, then ceil(23 / 5) + 1 rows
        assert_eq!(csv.lines().count(), 1 + 5 + 1);
        let last = csv.lines().last().unwrap();
        assert!(last.starts_with("23,"));
    }

    #[test]
    fn curves_table() {
        let dir = tempfile::tempdir().unwrap();
        run_experiment(&spec("mode=curves\nn=100\nq=3", dir.path())).unwrap();
        let csv = fs::read_to_string(dir.path().join("curves_n100_q3.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,p,h,eps_H,y0,y1,y2,eps0,eps1,eps2");
        // steps 0..=m0 with m0 = 134
        assert_eq!(lines.len() - 1, 135);
    }

    #[test]
    fn sweep_aggregate_and_failures() {
        let dir = tempfile::tempdir().unwrap();
        let o = run_experiment(&spec(
            "mode=sweep\nn=10\nn=12\nq=3\nruns=3\nstop=maximal\ntracked=2",
            dir.path(),
        ))
        .unwrap();
        assert!(o.success());
        let a: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("aggregate.json")).unwrap()).unwrap();
        assert_eq!(a["groups"].as_array().unwrap().len(), 2);
        assert_eq!(a["groups"][0]["n"], 10);
        assert_eq!(a["groups"][0]["runs"], 3);

        // m0 is undefined below n = 16, so these runs fail and are recorded
        let dir = tempfile::tempdir().unwrap();
        let o = run_experiment(&spec("mode=sweep\nn=10\nn=20\nq=3\nruns=2", dir.path())).unwrap();
        assert_eq!(o.failures.len(), 2);
        assert!(dir.path().join("failure_n10_q3_s1.json").exists());
        assert!(dir.path().join("aggregate.json").exists());
    }

    #[test]
    fn bounds_mode_reports() {
        let dir = tempfile::tempdir().unwrap();
        let o = run_experiment(&spec("mode=bounds\nn=9\nq=3,4\nruns=5", dir.path())).unwrap();
        assert!(o.success());
        assert!(dir.path().join("bounds.json").exists());
    }
}
