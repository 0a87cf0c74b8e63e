//! Trace CSV, run summaries and sweep aggregates.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::to_labels;
use crate::process::ProcessTrace;
use crate::trajectory::{step_time, survival_at_step, TrajectoryParams};

/// Floats go out with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn trace_csv(trace: &ProcessTrace) -> String {
    let (n, q) = (trace.n as u64, trace.q as u64);
    let params = TrajectoryParams::new(n, q).ok();
    let mut out = String::from("step,t,p,H_exact_or_est,H_is_exact,h_pred,eps_H");
    for k in 0..trace.tracked.len() {
        let _ = write!(out, ",Y{k},Y{k}_estimated,Y{k}_frozen,Y{k}_band_good");
    }
    out.push('\n');
    for c in &trace.checkpoints {
        let (p, _) = survival_at_step(n, q, c.step);
        let _ = write!(
            out,
            "{},{},{},{},{}",
            c.step,
            fmt_float(step_time(n, c.step)),
            fmt_float(p),
            fmt_float(c.available.value),
            flag(c.available.exact)
        );
        match params.as_ref().filter(|pr| c.step <= pr.m0) {
            Some(pr) => {
                let pt = pr.eval_at_step_unbounded(c.step);
                let _ = write!(out, ",{},{}", fmt_float(pt.h()), fmt_float(pt.eps_h()));
            }
            None => out.push_str(",,"),
        }
        for r in &c.readings {
            let good = r.residual.map_or("", |res| flag(res.good));
            let _ = write!(
                out,
                ",{},{},{},{}",
                fmt_float(r.value),
                flag(r.estimated),
                flag(r.frozen),
                good
            );
        }
        out.push('\n');
    }
    out
}

/// `t, p, h, eps_H, y_0.., eps_0..` at steps `0, stride, 2 stride, ..` and `m0`.
pub fn curves_csv(params: &TrajectoryParams, stride: u64) -> String {
    let q = params.q() as usize;
    let mut out = String::from("t,p,h,eps_H");
    for j in 0..q {
        let _ = write!(out, ",y{j}");
    }
    for j in 0..q {
        let _ = write!(out, ",eps{j}");
    }
    out.push('\n');
    let mut steps: Vec<u64> = (0..=params.m0).step_by(stride.max(1) as usize).collect();
    if steps.last() != Some(&params.m0) {
        steps.push(params.m0);
    }
    for i in steps {
        let pt = params.eval_at_step_unbounded(i);
        let _ = write!(
            out,
            "{},{},{},{}",
            fmt_float(pt.t),
            fmt_float(pt.p),
            fmt_float(pt.h()),
            fmt_float(pt.eps_h())
        );
        for j in 0..q {
            let _ = write!(out, ",{}", fmt_float(pt.y(j)));
        }
        for j in 0..q {
            let _ = write!(out, ",{}", fmt_float(pt.eps(j)));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub stop: String,
    pub edges: usize,
    /// `edges * q(q-1) / (n(n-1))`.
    pub covered_fraction: f64,
    pub steps: u64,
    pub reached_maximal: bool,
    pub m0: Option<u64>,
    /// All band residuals good through `m0`.
    pub band_good: Option<bool>,
    /// Largest `| |H| - h | / h` over checkpoints up to `m0`.
    pub max_relative_deviation: Option<f64>,
    /// Tracked sets as 1-based labels, in trace column order.
    pub tracked: Vec<Vec<u32>>,
    pub wall_time_s: f64,
}

impl RunSummary {
    pub fn from_trace(trace: &ProcessTrace, stop: String, wall_time_s: f64) -> Self {
        let (n, q) = (trace.n as u64, trace.q as u64);
        let edges = trace.edges.edges.len();
        let params = TrajectoryParams::new(n, q).ok();
        let max_relative_deviation = params.as_ref().map(|pr| {
            trace
                .checkpoints
                .iter()
                .filter(|c| c.step <= pr.m0)
                .map(|c| {
                    let h = pr.eval_at_step_unbounded(c.step).h();
                    (c.available.value - h).abs() / h
                })
                .fold(0.0, f64::max)
        });
        Self {
            n: trace.n,
            q: trace.q,
            seed: trace.seed,
            stop,
            edges,
            covered_fraction: covered_fraction(n, q, edges as u64),
            steps: edges as u64,
            reached_maximal: trace.reached_maximal,
            m0: trace.m0,
            band_good: trace.band_good,
            max_relative_deviation,
            tracked: trace.tracked.iter().map(|s| to_labels(s)).collect(),
            wall_time_s,
        }
    }
}

pub fn covered_fraction(n: u64, q: u64, edges: u64) -> f64 {
    (edges * q * (q - 1)) as f64 / (n * (n - 1)) as f64
}

/// A run that errored; sweeps record it and move on.
#[derive(Clone, Debug, Serialize)]
pub struct RunFailure {
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupStats {
    pub n: usize,
    pub q: usize,
    pub runs: usize,
    pub failures: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    /// Share of runs with a good band through `m0`, over runs where it is defined.
    pub band_good_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub groups: Vec<GroupStats>,
}

/// Per-`(n, q)` statistics of the covered fraction, sorted by `(n, q)`.
pub fn aggregate(summaries: &[RunSummary], failures: &[RunFailure]) -> Result<Aggregate> {
    if summaries.is_empty() {
        return Err(Error::Input("nothing to aggregate".into()));
    }
    let mut groups: BTreeMap<(usize, usize), Vec<&RunSummary>> = BTreeMap::new();
    for s in summaries {
        groups.entry((s.n, s.q)).or_default().push(s);
    }
    let mut out = Vec::new();
    for ((n, q), runs) in groups {
        // sort so the statistics do not depend on completion order
        let mut xs: Vec<f64> = runs.iter().map(|s| s.covered_fraction).collect();
        xs.sort_by(f64::total_cmp);
        let k = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / k;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        let defined: Vec<bool> = runs.iter().filter_map(|s| s.band_good).collect();
        let band_good_rate = (!defined.is_empty())
            .then(|| defined.iter().filter(|&&g| g).count() as f64 / defined.len() as f64);
        out.push(GroupStats {
            n,
            q,
            runs: xs.len(),
            failures: failures.iter().filter(|f| (f.n, f.q) == (n, q)).count(),
            mean,
            sd,
            min: xs[0],
            max: xs[xs.len() - 1],
            band_good_rate,
        });
    }
    Ok(Aggregate { groups: out })
}
