//! Verification suites. Each returns a report rather than panicking, so the
//! CLI can run any subset and exit nonzero on failure.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::output::covered_fraction;
use super::spec::{ExperimentSpec, Mode};
use crate::codegree::TrackingPolicy;
use crate::error::{Error, Result};
use crate::hypergraph::{LinearHypergraph, Vertex};
use crate::oracle::{
    build_packing_instance, delta_report, identities, packing_equivalence, proposition_bounds,
    IdentityKind,
};
use crate::process::{
    run, run_to_maximal, Budgets, Draw, ProcessConfig, ProcessState, RejectionCap, StopRule,
};
use crate::rng;
use crate::trajectory::TrajectoryParams;

pub const SUITES: &[&str] = &[
    "delta",
    "identities",
    "lemma6",
    "asymptotics",
    "uniformity",
    "prop2",
    "prop1",
    "band",
    "trend",
    "packing",
    "determinism",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub summary: String,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Where the determinism suite writes its scratch runs.
    pub scratch: PathBuf,
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let seed = opts.seed;
    match name {
        "delta" => delta_suite(seed, 500),
        "identities" => identities_suite(),
        "lemma6" => lemma6_suite(),
        "asymptotics" => asymptotics_suite(),
        "uniformity" => uniformity_suite(seed, 100, 100_000),
        "prop2" => prop2_suite(seed, 200),
        "prop1" => prop1_suite(seed, 50),
        "band" => band_suite(seed, 20),
        "trend" => trend_suite(seed, 20),
        "packing" => packing_suite(seed, 50),
        "determinism" => determinism_suite(seed, &opts.scratch),
        _ => Err(Error::Usage(format!(
            "unknown suite {name:?}; known: {}",
            SUITES.join(", ")
        ))),
    }
}

fn report(suite: &str, passed: bool, summary: String, details: serde_json::Value) -> SuiteReport {
    SuiteReport {
        suite: suite.into(),
        passed,
        summary,
        details,
    }
}

fn prefix(h: &LinearHypergraph, k: usize) -> Result<LinearHypergraph> {
    let edges: Vec<Vec<Vertex>> = h.edges().take(k).map(<[Vertex]>::to_vec).collect();
    LinearHypergraph::from_edges(h.n(), h.q(), &edges)
}

/// Formula against brute force on `states` random non-maximal states of
/// the process, `n` in 5..=8 and `q` in {3, 4}, every tracked `J`.
pub fn delta_suite(seed: u64, states: u64) -> Result<SuiteReport> {
    let results: Vec<Result<(u64, Vec<String>)>> = (0..states)
        .into_par_iter()
        .map(|i| {
            let (n, q, s) = (5 + (i % 4) as usize, 3 + ((i / 4) % 2) as usize, seed + i);
            let full = run_to_maximal(n, q, s)?;
            let mut pick = rng::stream(s, rng::DIAGNOSTIC_STREAM);
            let k = rng::below(&mut pick, full.edge_count() as u64) as usize;
            let h = prefix(&full, k)?;
            let mut checked = 0;
            let mut bad = Vec::new();
            for set in TrackingPolicy::default().family(n, q, s)? {
                let r = delta_report(&h, &set)?;
                checked += 1;
                if !r.matches {
                    bad.push(format!(
                        "n={n} q={q} seed={s} step={k} J={set:?}: {} vs {}",
                        r.formula, r.bruteforce
                    ));
                }
            }
            Ok((checked, bad))
        })
        .collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in results {
        let (c, b) = r?;
        checked += c;
        bad.extend(b);
    }
    Ok(report(
        "delta",
        bad.is_empty(),
        format!(
            "{checked} (state, J) pairs over {states} states, {} mismatches",
            bad.len()
        ),
        json!({ "states": states, "checked": checked, "mismatches": bad.iter().take(20).collect::<Vec<_>>() }),
    ))
}

pub fn identities_suite() -> Result<SuiteReport> {
    let one = num_bigint::BigInt::from(1);
    let zero = num_bigint::BigInt::from(0);
    let mut bad = Vec::new();
    let mut checked = 0;
    for l in 2..=64u64 {
        for k in 2..=64u64 {
            for (kind, want) in [
                (IdentityKind::A, &one),
                (IdentityKind::B, &one),
                (IdentityKind::C, &zero),
            ] {
                checked += 1;
                let got = identities(kind, k, l)?;
                if &got != want {
                    bad.push(format!("{kind:?} k={k} l={l}: {got}"));
                }
            }
        }
    }
    Ok(report(
        "identities",
        bad.is_empty(),
        format!("{checked} evaluations, {} wrong", bad.len()),
        json!({ "checked": checked, "wrong": bad }),
    ))
}

fn grid_times(params: &TrajectoryParams, points: u32) -> Vec<f64> {
    let t_max = params.t_max();
    (0..points)
        .map(|k| (t_max * f64::from(k) / f64::from(points - 1)).min(t_max))
        .collect()
}

/// Relation (a) to `1e-9` relative and relation (b) at most `1/2`.
pub fn lemma6_suite() -> Result<SuiteReport> {
    let mut worst_residual = 0.0f64;
    let mut worst_quadratic = 0.0f64;
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in [100u64, 1_000, 10_000] {
        for q in 3..=5u64 {
            let params = TrajectoryParams::new(n, q)?;
            for j in 0..q {
                for t in grid_times(&params, 20) {
                    let r = params.lemma6_report(t, j)?;
                    checked += 1;
                    worst_residual = worst_residual.max(r.linear_residual);
                    worst_quadratic = worst_quadratic.max(r.quadratic_ratio);
                    if r.linear_residual > 1e-9 || !r.quadratic_bound_holds() {
                        bad.push(format!(
                            "n={n} q={q} j={j} t={t:e}: residual {:e}, ratio {}",
                            r.linear_residual, r.quadratic_ratio
                        ));
                    }
                }
            }
        }
    }
    Ok(report(
        "lemma6",
        bad.is_empty(),
        format!(
            "{checked} points, worst residual {worst_residual:e}, worst ratio {worst_quadratic:.6}"
        ),
        json!({ "checked": checked, "worst_residual": worst_residual, "worst_ratio": worst_quadratic, "failures": bad }),
    ))
}

/// Relations (c), (d), (e): every ratio strictly decreasing as `n` goes
/// through `1e3, 1e4, 1e5` at fixed `q`, `j` and `t / t_max`.
pub fn asymptotics_suite() -> Result<SuiteReport> {
    let ns = [1_000u64, 10_000, 100_000];
    let mut bad = Vec::new();
    let mut checked = 0;
    for q in 3..=5u64 {
        let params: Vec<TrajectoryParams> = ns
            .iter()
            .map(|&n| TrajectoryParams::new(n, q))
            .collect::<Result<_>>()?;
        for j in 0..q {
            for rel in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let reports = params
                    .iter()
                    .map(|p| p.lemma6_report((p.t_max() * rel).min(p.t_max()), j))
                    .collect::<Result<Vec<_>>>()?;
                let mut series: Vec<(String, Vec<f64>)> = vec![
                    (
                        "y''".into(),
                        reports
                            .iter()
                            .map(|r| r.y_second_derivative_ratio)
                            .collect(),
                    ),
                    (
                        "eps''".into(),
                        reports
                            .iter()
                            .map(|r| r.eps_second_derivative_ratio)
                            .collect(),
                    ),
                ];
                for (idx, m) in (3..q).enumerate() {
                    series.push((
                        format!("y m={m}"),
                        reports
                            .iter()
                            .map(|r| r.higher_order[idx].y_ratio)
                            .collect(),
                    ));
                    series.push((
                        format!("eps m={m}"),
                        reports
                            .iter()
                            .map(|r| r.higher_order[idx].eps_ratio)
                            .collect(),
                    ));
                }
                for (label, xs) in series {
                    checked += 1;
                    if !xs.windows(2).all(|w| w[1] < w[0]) {
                        bad.push(format!("q={q} j={j} t/t_max={rel} {label}: {xs:?}"));
                    }
                }
            }
        }
    }
    Ok(report(
        "asymptotics",
        bad.is_empty(),
        format!(
            "{checked} ratio series, {} not strictly decreasing",
            bad.len()
        ),
        json!({ "checked": checked, "failures": bad }),
    ))
}

/// Draws from the state `n = 6`, `q = 3`, `e_1 = {1,2,3}`, where exactly 10
/// triples are available, and counts chi-square passes at the 99.9% level.
pub fn uniformity_suite(seed: u64, repetitions: u64, draws: u64) -> Result<SuiteReport> {
    let h = LinearHypergraph::from_edges(6, 3, &[vec![0, 1, 2]])?;
    let triples: Vec<Vec<Vertex>> = crate::oracle::bruteforce_available(&h);
    let cells = triples.len();
    let critical = ChiSquared::new((cells - 1) as f64)
        .map_err(|e| Error::Domain(e.to_string()))?
        .inverse_cdf(0.999);
    let stats: Vec<Result<f64>> = (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let mut state =
                ProcessState::from_hypergraph(h.clone(), seed + r, RejectionCap::Adaptive)?;
            let mut counts = vec![0u64; cells];
            for _ in 0..draws {
                match state.sample_available() {
                    Draw::Edge(e) => {
                        let idx = triples.iter().position(|t| *t == e).ok_or_else(|| {
                            Error::Contract(format!("sampler returned unavailable {e:?}"))
                        })?;
                        counts[idx] += 1;
                    }
                    Draw::Exhausted => return Err(Error::Contract("sampler exhausted".into())),
                }
            }
            let expected = draws as f64 / cells as f64;
            Ok(counts
                .iter()
                .map(|&c| (c as f64 - expected).powi(2) / expected)
                .sum())
        })
        .collect();
    let stats = stats.into_iter().collect::<Result<Vec<f64>>>()?;
    let passes = stats.iter().filter(|&&x| x < critical).count() as u64;
    let need = (repetitions * 95).div_ceil(100);
    Ok(report(
        "uniformity",
        cells == 10 && passes >= need,
        format!("{passes}/{repetitions} repetitions below {critical:.3} over {cells} cells"),
        json!({ "cells": cells, "critical": critical, "passes": passes, "statistics": stats }),
    ))
}

fn maximal_edges(n: usize, q: usize, seeds: std::ops::Range<u64>) -> Result<Vec<usize>> {
    seeds
        .into_par_iter()
        .map(|s| run_to_maximal(n, q, s).map(|h| h.edge_count()))
        .collect()
}

/// `n = 8, q = 4` gives 2 or 3 edges; every `n <= 12` with `q >= ceil(sqrt(2n))`
/// gives `(n-q)/q < edges < q` and `edges <= 2n/q`.
pub fn prop2_suite(seed: u64, runs: u64) -> Result<SuiteReport> {
    let mut bad = Vec::new();
    let eight = maximal_edges(8, 4, seed..seed + runs)?;
    if let Some(e) = eight.iter().find(|&&e| !(2..=3).contains(&e)) {
        bad.push(format!("n=8 q=4 gave {e} edges"));
    }
    let mut pairs = 0;
    for n in 2..=12usize {
        let q_min = (1..=n).find(|q| q * q >= 2 * n).unwrap_or(n);
        for q in q_min.max(2)..=n {
            pairs += 1;
            for e in maximal_edges(n, q, seed..seed + runs)? {
                let strict = (n - q) < e * q && e < q && e * q <= 2 * n;
                let report = proposition_bounds(n as u64, q as u64, e as u64, true)?;
                if !strict || !report.all_hold() {
                    bad.push(format!("n={n} q={q} gave {e} edges"));
                }
            }
        }
    }
    bad.dedup();
    Ok(report(
        "prop2",
        bad.is_empty(),
        format!(
            "{pairs} (n, q) pairs plus n=8 q=4, {runs} runs each, {} violations",
            bad.len()
        ),
        json!({ "pairs": pairs, "runs": runs, "violations": bad }),
    ))
}

/// Every maximal run over `n <= 40`, `q` in {3, 4, 5} meets the Turán bound.
pub fn prop1_suite(seed: u64, runs: u64) -> Result<SuiteReport> {
    let mut bad = Vec::new();
    let mut total = 0;
    for q in 3..=5usize {
        for n in q..=40usize {
            for e in maximal_edges(n, q, seed..seed + runs)? {
                total += 1;
                let r = proposition_bounds(n as u64, q as u64, e as u64, true)?;
                if r.turan_holds != Some(true) {
                    bad.push(format!("n={n} q={q}: {e} < {:?}", r.turan_lower));
                }
            }
        }
    }
    Ok(report(
        "prop1",
        bad.is_empty(),
        format!("{total} maximal runs, {} below the bound", bad.len()),
        json!({ "runs": total, "violations": bad }),
    ))
}

/// `runs` runs at `n = 500, q = 3` to `m0`, `|H|` exact at every checkpoint
/// and inside `h +- eps_H`.
pub fn band_suite(seed: u64, runs: u64) -> Result<SuiteReport> {
    let (n, q) = (500usize, 3usize);
    let params = TrajectoryParams::new(n as u64, q as u64)?;
    let out: Vec<Result<(bool, bool, f64, usize)>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut config = ProcessConfig::new(n, q, seed + r, StopRule::M0);
            config.tracking = TrackingPolicy::EmptyOnly;
            let (_, trace) = run(&config)?;
            let all_exact = trace.checkpoints.iter().all(|c| c.available.exact);
            // worst |H - h| / eps_H over the run
            let worst = trace
                .checkpoints
                .iter()
                .map(|c| {
                    let pt = params.eval_at_step_unbounded(c.step);
                    (c.available.value - pt.h()).abs() / pt.eps_h()
                })
                .fold(0.0, f64::max);
            Ok((
                trace.band_good == Some(true),
                all_exact,
                worst,
                trace.checkpoints.len(),
            ))
        })
        .collect();
    let out = out.into_iter().collect::<Result<Vec<_>>>()?;
    let good = out.iter().filter(|r| r.0 && r.1 && r.2 <= 1.0).count();
    let worst = out.iter().map(|r| r.2).fold(0.0, f64::max);
    let rows: usize = out.iter().map(|r| r.3).sum();
    Ok(report(
        "band",
        good as u64 == runs,
        format!(
            "{good}/{runs} runs inside the band to m0 = {}, worst |H - h| / eps_H = {worst:.4}",
            params.m0
        ),
        json!({ "m0": params.m0, "good_runs": good, "checkpoints": rows, "worst_ratio": worst }),
    ))
}

/// Mean covered fraction at maximality nondecreasing over `n = 100, 200, 400`, `q = 3`.
pub fn trend_suite(seed: u64, runs: u64) -> Result<SuiteReport> {
    let mut means = Vec::new();
    for n in [100usize, 200, 400] {
        let edges = maximal_edges(n, 3, seed..seed + runs)?;
        let mean = edges
            .iter()
            .map(|&e| covered_fraction(n as u64, 3, e as u64))
            .sum::<f64>()
            / runs as f64;
        means.push((n, mean));
    }
    let ok = means.windows(2).all(|w| w[1].1 >= w[0].1);
    Ok(report(
        "trend",
        ok,
        format!(
            "mean covered fraction {}",
            means
                .iter()
                .map(|(n, m)| format!("n={n}: {m:.5}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        json!({ "means": means }),
    ))
}

/// Full-run availability agreement with the greedy packing on `runs` runs, `n <= 8`, `q = 3`.
pub fn packing_suite(seed: u64, runs: u64) -> Result<SuiteReport> {
    let results: Vec<Result<(usize, bool)>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let n = 4 + (r % 5) as usize;
            let instance = build_packing_instance(n, 3)?;
            let h = run_to_maximal(n, 3, seed + r)?;
            let seq: Vec<Vec<Vertex>> = h.edges().map(<[Vertex]>::to_vec).collect();
            Ok((n, packing_equivalence(&instance, &seq)?.holds))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let failed: Vec<u64> = (0..runs)
        .filter(|&r| !results[r as usize].1)
        .map(|r| seed + r)
        .collect();
    Ok(report(
        "packing",
        failed.is_empty(),
        format!(
            "{} of {runs} runs agree at every step",
            runs as usize - failed.len()
        ),
        json!({ "runs": runs, "failed_seeds": failed }),
    ))
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        if name.starts_with("trace_") {
            files.push((name, std::fs::read(&path)?));
        }
    }
    files.sort();
    Ok(files)
}

/// The same sweep three times (one worker, then twice with four) must give
/// byte-identical traces.
pub fn determinism_suite(seed: u64, scratch: &Path) -> Result<SuiteReport> {
    let mut listings = Vec::new();
    for (label, jobs) in [("serial", 1usize), ("parallel_a", 4), ("parallel_b", 4)] {
        let dir = scratch.join(label);
        if dir.exists() {
            std::fs::remove_dir_all(&dir)?;
        }
        let spec = ExperimentSpec {
            mode: Mode::Sweep,
            n: vec![30, 40],
            q: vec![3, 4],
            seed,
            runs: 3,
            stop: StopRule::Maximal,
            stride: Some(5),
            tracking: TrackingPolicy::default(),
            out: dir.clone(),
            budgets: Budgets::default(),
            rejection_cap: RejectionCap::Adaptive,
            jobs: Some(jobs),
            suites: Vec::new(),
        };
        super::run_experiment(&spec)?;
        listings.push(read_dir_sorted(&dir)?);
    }
    let files = listings[0].len();
    let same = files > 0 && listings.windows(2).all(|w| w[0] == w[1]);
    Ok(report(
        "determinism",
        same,
        format!("{files} trace files per sweep, identical across 3 sweeps: {same}"),
        json!({ "files": files, "identical": same }),
    ))
}
