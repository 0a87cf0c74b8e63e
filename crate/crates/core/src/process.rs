//! The q-linear process: start from the empty hypergraph and keep adding a
//! uniformly random available q-set.
//!
//! Draws are rejection samples: a uniform q-subset of `[n]` (Floyd) is
//! proposed until one is available, which conditioned on acceptance is
//! uniform on `H(i)`. After too many consecutive rejections the available
//! sets are enumerated exactly, drawn from directly, and the enumerated pool
//! is then filtered after every added edge for the rest of the run.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::binom::binomial_f64;
use crate::codegree::{CodegreeReading, CodegreeTracker, TrackingPolicy};
use crate::error::{Error, Result};
use crate::hypergraph::{EdgeList, LinearHypergraph, SearchBudget, Vertex};
use crate::rng::{self, RunRng};
use crate::trajectory::TrajectoryParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopRule {
    /// Stop after this many edges, or earlier at maximality.
    Steps(u64),
    /// Stop at `m0` (needs trajectory parameters, so `q >= 3`, `n >= 16`).
    M0,
    Maximal,
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "m0" => Ok(Self::M0),
            "maximal" => Ok(Self::Maximal),
            other => other
                .strip_prefix("steps:")
                .and_then(|k| k.trim().parse().ok())
                .map(Self::Steps)
                .ok_or_else(|| {
                    Error::Usage(format!(
                        "stop must be m0, maximal or steps:K, got {other:?}"
                    ))
                }),
        }
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Steps(k) => write!(f, "steps:{k}"),
            Self::M0 => f.write_str("m0"),
            Self::Maximal => f.write_str("maximal"),
        }
    }
}

/// How many consecutive rejections to allow before enumerating `H(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectionCap {
    /// `max(1000, 64 * ceil(C(n,q) / max(1, last known |H|)))`.
    Adaptive,
    Fixed(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Node limit for exact clique enumerations at checkpoints.
    pub enumeration_nodes: u64,
    /// Samples per Monte Carlo estimate when enumeration is over budget.
    pub samples: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            enumeration_nodes: 5_000_000,
            samples: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub stop: StopRule,
    pub rejection_cap: RejectionCap,
    /// Steps between trace rows; `None` picks `max(1, floor(m0 / 200))`.
    pub checkpoint_stride: Option<u64>,
    pub tracking: TrackingPolicy,
    pub budgets: Budgets,
}

impl ProcessConfig {
    pub fn new(n: usize, q: usize, seed: u64, stop: StopRule) -> Self {
        Self {
            n,
            q,
            seed,
            stop,
            rejection_cap: RejectionCap::Adaptive,
            checkpoint_stride: None,
            tracking: TrackingPolicy::default(),
            budgets: Budgets::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 || self.q > self.n {
            return Err(Error::Input(format!(
                "need 2 <= q <= n, got n = {}, q = {}",
                self.n, self.q
            )));
        }
        if self.rejection_cap == RejectionCap::Fixed(0) {
            return Err(Error::Input("rejection cap must be at least 1".into()));
        }
        if self.checkpoint_stride == Some(0) {
            return Err(Error::Input("checkpoint stride must be at least 1".into()));
        }
        if self.budgets.samples == 0 {
            return Err(Error::Input("sample count must be at least 1".into()));
        }
        Ok(())
    }

    /// Checkpoint stride actually used.
    pub fn stride(&self) -> u64 {
        self.checkpoint_stride
            .unwrap_or_else(|| default_stride(self.n as u64, self.q as u64))
    }
}

/// `max(1, floor(m0 / 200))`, with `floor(n(n-1) / (q(q-1)))` standing in
/// for `m0` where the trajectory parameters are undefined.
pub fn default_stride(n: u64, q: u64) -> u64 {
    let horizon = match TrajectoryParams::new(n, q) {
        Ok(p) => p.m0,
        Err(_) => n * n.saturating_sub(1) / (q * (q - 1)).max(1),
    };
    (horizon / 200).max(1)
}

/// A Monte Carlo estimate and its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `total * hits / samples` with standard error `total * sqrt(f(1-f)/samples)`.
    pub fn from_hits(total: f64, hits: u64, samples: u64) -> Self {
        let frac = hits as f64 / samples as f64;
        Self {
            value: total * frac,
            std_error: total * (frac * (1.0 - frac) / samples as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Draw {
    Edge(Vec<Vertex>),
    /// `H(i)` is empty: the hypergraph is maximal.
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct ProcessState {
    hypergraph: LinearHypergraph,
    rng: RunRng,
    cap: RejectionCap,
    total_sets: f64,
    last_known_available: f64,
    /// Whether `last_known_available` came from an actual count or estimate.
    informed: bool,
    /// Exact list of available q-sets, once the run has switched to it.
    pool: Option<Vec<Vertex>>,
    scratch: Vec<Vertex>,
    proposals: u64,
}

impl ProcessState {
    pub fn new(n: usize, q: usize, seed: u64, cap: RejectionCap) -> Result<Self> {
        Self::from_hypergraph(LinearHypergraph::new(n, q)?, seed, cap)
    }

    /// Continues the process from an arbitrary linear hypergraph.
    pub fn from_hypergraph(
        hypergraph: LinearHypergraph,
        seed: u64,
        cap: RejectionCap,
    ) -> Result<Self> {
        if cap == RejectionCap::Fixed(0) {
            return Err(Error::Input("rejection cap must be at least 1".into()));
        }
        let total_sets = binomial_f64(hypergraph.n() as u64, hypergraph.q() as u64);
        let informed = hypergraph.edge_count() == 0;
        let last_known_available = if informed { total_sets } else { 1.0 };
        Ok(Self {
            hypergraph,
            rng: rng::stream(seed, rng::PROCESS_STREAM),
            cap,
            total_sets,
            last_known_available,
            informed,
            pool: None,
            scratch: Vec::new(),
            proposals: 0,
        })
    }

    pub fn hypergraph(&self) -> &LinearHypergraph {
        &self.hypergraph
    }

    pub fn into_hypergraph(self) -> LinearHypergraph {
        self.hypergraph
    }

    /// `i`, the number of edges added so far.
    pub fn step(&self) -> u64 {
        self.hypergraph.edge_count() as u64
    }

    /// `t_i = i / (n(n-1))`.
    pub fn time(&self) -> f64 {
        crate::trajectory::step_time(self.hypergraph.n() as u64, self.step())
    }

    /// Total q-subsets proposed by rejection sampling so far.
    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    /// Whether draws now come from the enumerated pool.
    pub fn uses_exact_pool(&self) -> bool {
        self.pool.is_some()
    }

    /// Exact `|H(i)|` if the pool is active.
    pub fn pool_size(&self) -> Option<usize> {
        self.pool.as_ref().map(|p| p.len() / self.hypergraph.q())
    }

    /// Tells the sampler the current size of `H(i)`. An exact zero ends the run.
    pub fn note_available(&mut self, count: f64, exact: bool) {
        self.last_known_available = count;
        self.informed = true;
        if exact && count == 0.0 && self.pool.is_none() {
            self.pool = Some(Vec::new());
        }
    }

    pub fn rejection_cap(&self) -> u64 {
        match self.cap {
            RejectionCap::Fixed(c) => c,
            RejectionCap::Adaptive => {
                let ratio = (self.total_sets / self.last_known_available.max(1.0)).ceil();
                (64.0 * ratio).clamp(1000.0, u64::MAX as f64) as u64
            }
        }
    }

    /// One uniform draw from `H(i)`. Does not add it.
    pub fn sample_available(&mut self) -> Draw {
        let q = self.hypergraph.q();
        // past ~sqrt(C(n,q)) proposals per hit, filtering an exact pool is cheaper
        let sparse = self.informed
            && self.total_sets > self.last_known_available * self.total_sets.sqrt().max(64.0);
        if self.pool.is_none() && !sparse {
            let n = self.hypergraph.n() as u32;
            for _ in 0..self.rejection_cap() {
                self.proposals += 1;
                rng::sample_subset(&mut self.rng, n, q, &mut self.scratch);
                if self.hypergraph.is_available_unchecked(&self.scratch) {
                    return Draw::Edge(self.scratch.clone());
                }
            }
        }
        if self.pool.is_none() {
            let pool = self
                .hypergraph
                .available_sets(&mut SearchBudget::unlimited())
                .expect("unlimited budget");
            self.last_known_available = (pool.len() / q) as f64;
            self.pool = Some(pool);
        }
        let pool = self.pool.as_ref().expect("pool set above");
        let count = pool.len() / q;
        if count == 0 {
            return Draw::Exhausted;
        }
        let k = rng::below(&mut self.rng, count as u64) as usize;
        Draw::Edge(pool[k * q..(k + 1) * q].to_vec())
    }

    /// Adds `e` (which must be available) and keeps the exact pool current.
    pub fn apply(&mut self, e: &[Vertex]) -> Result<()> {
        self.hypergraph.add_edge(e)?;
        if let Some(pool) = self.pool.take() {
            let q = self.hypergraph.q();
            let kept: Vec<Vertex> = pool
                .chunks_exact(q)
                .filter(|s| self.hypergraph.is_available_unchecked(s))
                .flatten()
                .copied()
                .collect();
            self.last_known_available = (kept.len() / q) as f64;
            self.pool = Some(kept);
        }
        Ok(())
    }

    /// Draws and adds one edge; `None` once the hypergraph is maximal.
    pub fn advance(&mut self) -> Option<Vec<Vertex>> {
        match self.sample_available() {
            Draw::Edge(e) => {
                self.apply(&e).expect("sampled edges are available");
                Some(e)
            }
            Draw::Exhausted => None,
        }
    }

    /// Monte Carlo estimate of `|H(i)|` from `samples` uniform q-subsets.
    pub fn estimate_available<R: RngCore + ?Sized>(
        &self,
        samples: u64,
        rng: &mut R,
    ) -> Result<Estimate> {
        if samples == 0 {
            return Err(Error::Input("need at least one sample".into()));
        }
        let (n, q) = (self.hypergraph.n() as u32, self.hypergraph.q());
        let mut buf = Vec::with_capacity(q);
        let mut hits = 0u64;
        for _ in 0..samples {
            rng::sample_subset(rng, n, q, &mut buf);
            hits += u64::from(self.hypergraph.is_available_unchecked(&buf));
        }
        Ok(Estimate::from_hits(self.total_sets, hits, samples))
    }
}

/// `|H(i)|` as recorded in a trace row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AvailableCount {
    pub value: f64,
    pub std_error: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Checkpoint {
    pub step: u64,
    pub covered_pairs: usize,
    pub available: AvailableCount,
    /// One reading per tracked set, in the order of [`ProcessTrace::tracked`].
    pub readings: Vec<CodegreeReading>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProcessTrace {
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub stride: u64,
    pub m0: Option<u64>,
    /// Tracked sets `J`, 0-based; the first is always the empty set.
    pub tracked: Vec<Vec<Vertex>>,
    pub checkpoints: Vec<Checkpoint>,
    /// Whether every band residual held at every checkpoint up to `m0`;
    /// `None` when the trajectory is undefined for `(n, q)`.
    pub band_good: Option<bool>,
    /// True when the run ended because no edge was available.
    pub reached_maximal: bool,
    /// `e_1, e_2, ...` in order.
    pub edges: EdgeList,
}

/// `|H(i)|` for a checkpoint: exact when the pool is active, `q <= 3`, or the
/// clique count fits in the budget; estimated otherwise.
pub fn checkpoint_available<R: RngCore + ?Sized>(
    state: &ProcessState,
    budgets: &Budgets,
    rng: &mut R,
) -> Result<AvailableCount> {
    if let Some(k) = state.pool_size() {
        return Ok(AvailableCount {
            value: k as f64,
            std_error: 0.0,
            exact: true,
        });
    }
    match state
        .hypergraph()
        .count_available(&mut SearchBudget::new(budgets.enumeration_nodes))
    {
        Ok(k) => Ok(AvailableCount {
            value: k as f64,
            std_error: 0.0,
            exact: true,
        }),
        Err(Error::Budget { .. }) => {
            let est = state.estimate_available(budgets.samples, rng)?;
            Ok(AvailableCount {
                value: est.value,
                std_error: est.std_error,
                exact: false,
            })
        }
        Err(e) => Err(e),
    }
}

/// Runs the process to its stop rule, recording a checkpoint every
/// `stride` steps plus one at step 0 and one at the final step.
pub fn run(config: &ProcessConfig) -> Result<(ProcessState, ProcessTrace)> {
    config.validate()?;
    let (n, q) = (config.n as u64, config.q as u64);
    let params = TrajectoryParams::new(n, q).ok();
    let target = match config.stop {
        StopRule::Steps(m) => Some(m),
        StopRule::Maximal => None,
        StopRule::M0 => Some(
            params
                .as_ref()
                .ok_or_else(|| Error::Domain(format!("m0 is undefined for n = {n}, q = {q}")))?
                .m0,
        ),
    };
    let stride = config.stride();
    let mut state = ProcessState::new(config.n, config.q, config.seed, config.rejection_cap)?;
    let mut diag = rng::stream(config.seed, rng::DIAGNOSTIC_STREAM);
    let family = config.tracking.family(config.n, config.q, config.seed)?;
    let m0 = params.as_ref().map(|p| p.m0);
    let mut tracker = CodegreeTracker::new(family, params, config.budgets);

    let mut checkpoints = Vec::new();
    let mut reached_maximal = false;
    checkpoints.push(take_checkpoint(
        &mut state,
        &mut tracker,
        &config.budgets,
        &mut diag,
    )?);
    loop {
        if target == Some(state.step()) {
            break;
        }
        match state.sample_available() {
            Draw::Edge(e) => state.apply(&e)?,
            Draw::Exhausted => {
                reached_maximal = true;
                break;
            }
        }
        if state.step() % stride == 0 {
            checkpoints.push(take_checkpoint(
                &mut state,
                &mut tracker,
                &config.budgets,
                &mut diag,
            )?);
        }
    }
    if checkpoints.last().map(|c| c.step) != Some(state.step()) {
        checkpoints.push(take_checkpoint(
            &mut state,
            &mut tracker,
            &config.budgets,
            &mut diag,
        )?);
    }
    let trace = ProcessTrace {
        n: config.n,
        q: config.q,
        seed: config.seed,
        stride,
        m0,
        tracked: tracker.sets().iter().map(|s| s.set.clone()).collect(),
        checkpoints,
        band_good: tracker.band_good(),
        reached_maximal,
        edges: state.hypergraph().to_edge_list(),
    };
    Ok((state, trace))
}

fn take_checkpoint(
    state: &mut ProcessState,
    tracker: &mut CodegreeTracker,
    budgets: &Budgets,
    diag: &mut RunRng,
) -> Result<Checkpoint> {
    let available = checkpoint_available(state, budgets, diag)?;
    state.note_available(available.value, available.exact);
    let readings = tracker.update_tracked(state.hypergraph(), state.step(), &available, diag)?;
    Ok(Checkpoint {
        step: state.step(),
        covered_pairs: state.hypergraph().coverage().covered_count(),
        available,
        readings,
    })
}

/// Runs to maximality without a trace and returns the final hypergraph.
pub fn run_to_maximal(n: usize, q: usize, seed: u64) -> Result<LinearHypergraph> {
    let mut state = ProcessState::new(n, q, seed, RejectionCap::Adaptive)?;
    while state.advance().is_some() {
        // q <= 3 counts are cheap, so keep the adaptive cap informed
        if q <= 3 && !state.uses_exact_pool() && state.step() % 16 == 0 {
            let k = state
                .hypergraph()
                .count_available(&mut SearchBudget::unlimited())?;
            state.note_available(k as f64, true);
        }
    }
    Ok(state.into_hypergraph())
}
