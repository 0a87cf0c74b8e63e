//! Codegrees `|Y_J(i)|` of tracked vertex sets and their trajectory bands.
//!
//! `Y_J(i)` is the set of `(q-j)`-sets `K` disjoint from `J` with `J ∪ K`
//! available. A tracked set freezes at the first checkpoint where no
//! available edge contains it (its codegree is then 0 for good) and is
//! excluded from the band test from then on.

use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::binom::binomial_f64;
use crate::error::{Error, Result};
use crate::hypergraph::{LinearHypergraph, SearchBudget, Vertex};
use crate::process::{AvailableCount, Budgets, Estimate};
use crate::rng;
use crate::trajectory::TrajectoryParams;

/// Estimates of zero with at least this many samples trigger an exact check
/// before a set is frozen.
pub const FREEZE_CONFIRM_SAMPLES: u64 = 10_000;

/// Exact confirmation of a sampled zero may use this many times the usual budget.
const CONFIRM_BUDGET_FACTOR: u64 = 100;

/// Which sets `J` a run tracks. The empty set is always tracked first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TrackingPolicy {
    EmptyOnly,
    /// `per_size` random sets of each size `j` in `{1, 2}`, and every
    /// `j <= q-1` when `q <= 4`, drawn from the run seed.
    Random {
        per_size: usize,
    },
    /// These sets (0-based) after the empty set.
    Explicit(Vec<Vec<Vertex>>),
}

impl Default for TrackingPolicy {
    fn default() -> Self {
        Self::Random { per_size: 25 }
    }
}

impl TrackingPolicy {
    pub fn family(&self, n: usize, q: usize, seed: u64) -> Result<Vec<Vec<Vertex>>> {
        let mut out: Vec<Vec<Vertex>> = vec![Vec::new()];
        match self {
            Self::EmptyOnly => {}
            Self::Random { per_size } => {
                let mut rng = rng::stream(seed, rng::TRACKING_STREAM);
                let top = if q <= 4 { q - 1 } else { 2 };
                let mut buf = Vec::new();
                for j in 1..=top {
                    let available = binomial_f64(n as u64, j as u64);
                    let want = (*per_size as f64).min(available) as usize;
                    let mut picked: Vec<Vec<Vertex>> = Vec::with_capacity(want);
                    while picked.len() < want {
                        rng::sample_subset(&mut rng, n as u32, j, &mut buf);
                        if !picked.contains(&buf) {
                            picked.push(buf.clone());
                        }
                    }
                    out.extend(picked);
                }
            }
            Self::Explicit(sets) => {
                for s in sets {
                    let mut s = s.clone();
                    s.sort_unstable();
                    if s.len() >= q
                        || s.iter().any(|&v| v as usize >= n)
                        || s.windows(2).any(|w| w[0] == w[1])
                    {
                        return Err(Error::Input(format!(
                            "cannot track {s:?} with n = {n}, q = {q}"
                        )));
                    }
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodegreeRecord {
    pub step: u64,
    pub value: f64,
    pub estimated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackedSet {
    pub set: Vec<Vertex>,
    pub frozen: bool,
    pub frozen_at: Option<u64>,
    pub frozen_value: Option<f64>,
    pub history: Vec<CodegreeRecord>,
}

impl TrackedSet {
    pub fn new(set: Vec<Vertex>) -> Self {
        Self {
            set,
            frozen: false,
            frozen_at: None,
            frozen_value: None,
            history: Vec::new(),
        }
    }

    pub fn j(&self) -> usize {
        self.set.len()
    }

    /// Sampled codegree, or the frozen value without drawing anything.
    pub fn sampled<R: RngCore + ?Sized>(
        &self,
        h: &LinearHypergraph,
        samples: u64,
        rng: &mut R,
    ) -> Result<Estimate> {
        match self.frozen_value {
            Some(v) if self.frozen => Ok(Estimate {
                value: v,
                std_error: 0.0,
            }),
            _ => sampled_codegree(h, &self.set, samples, rng),
        }
    }
}

/// `Y_J^+` and `Y_J^-` at one checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandResidual {
    pub step: u64,
    /// Index into the tracked family.
    pub tracked: usize,
    pub j: usize,
    /// `|Y_J| - (y_j + eps_j)`.
    pub plus: f64,
    /// `|Y_J| - (y_j - eps_j)`.
    pub minus: f64,
    pub good: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CodegreeReading {
    pub value: f64,
    pub std_error: f64,
    pub estimated: bool,
    pub frozen: bool,
    /// Absent for frozen sets, past `m0`, or without trajectory parameters.
    pub residual: Option<BandResidual>,
}

fn check_subset(h: &LinearHypergraph, set: &[Vertex]) -> Result<()> {
    if set.len() >= h.q() {
        return Err(Error::Input(format!(
            "|J| = {} must be below q = {}",
            set.len(),
            h.q()
        )));
    }
    h.check_set(set, set.len())
}

/// Exact `|Y_J|`, counted as `(q-j)`-cliques of the free-pair graph inside
/// the common free neighbourhood of `J`.
pub fn exact_codegree(
    h: &LinearHypergraph,
    set: &[Vertex],
    budget: &mut SearchBudget,
) -> Result<u128> {
    check_subset(h, set)?;
    if set.is_empty() {
        return h.count_available(budget);
    }
    let free = h.free_graph();
    match free.common_neighborhood(set) {
        None => Ok(0),
        Some(cand) => free.count_cliques_in(&cand, h.q() - set.len(), budget),
    }
}

/// `C(n-j, q-j)` times the fraction of uniform `(q-j)`-sets `K` outside `J`
/// with `J ∪ K` available.
pub fn sampled_codegree<R: RngCore + ?Sized>(
    h: &LinearHypergraph,
    set: &[Vertex],
    samples: u64,
    rng: &mut R,
) -> Result<Estimate> {
    check_subset(h, set)?;
    if samples == 0 {
        return Err(Error::Input("need at least one sample".into()));
    }
    let (n, q, j) = (h.n(), h.q(), set.len());
    let outside: Vec<Vertex> = (0..n as Vertex).filter(|v| !set.contains(v)).collect();
    let mut idx = Vec::with_capacity(q - j);
    let mut union = Vec::with_capacity(q);
    let mut hits = 0u64;
    for _ in 0..samples {
        rng::sample_subset(rng, outside.len() as u32, q - j, &mut idx);
        union.clear();
        union.extend_from_slice(set);
        union.extend(idx.iter().map(|&k| outside[k as usize]));
        hits += u64::from(h.is_available_unchecked(&union));
    }
    Ok(Estimate::from_hits(
        binomial_f64((n - j) as u64, (q - j) as u64),
        hits,
        samples,
    ))
}

/// Owns the tracked family of one run.
#[derive(Clone, Debug)]
pub struct CodegreeTracker {
    sets: Vec<TrackedSet>,
    params: Option<TrajectoryParams>,
    budgets: Budgets,
    band_good: bool,
}

impl CodegreeTracker {
    pub fn new(
        family: Vec<Vec<Vertex>>,
        params: Option<TrajectoryParams>,
        budgets: Budgets,
    ) -> Self {
        Self {
            sets: family.into_iter().map(TrackedSet::new).collect(),
            params,
            budgets,
            band_good: true,
        }
    }

    pub fn sets(&self) -> &[TrackedSet] {
        &self.sets
    }

    /// The good event `G` through the last checkpoint at or before `m0`.
    /// Once a residual goes bad this stays `false`.
    pub fn band_good(&self) -> Option<bool> {
        self.params.as_ref().map(|_| self.band_good)
    }

    /// Refreshes every unfrozen set at `step`, freezes sets that lost their
    /// last available superset, and scores the rest against `y_j ± eps_j`.
    /// `available` is `|H(i)|`, reused for the empty set.
    pub fn update_tracked<R: RngCore + ?Sized>(
        &mut self,
        h: &LinearHypergraph,
        step: u64,
        available: &AvailableCount,
        rng: &mut R,
    ) -> Result<Vec<CodegreeReading>> {
        let curve = match &self.params {
            Some(p) if step <= p.m0 => Some(p.eval_at_step(step)?),
            _ => None,
        };
        let mut readings = Vec::with_capacity(self.sets.len());
        for (k, tracked) in self.sets.iter_mut().enumerate() {
            if tracked.frozen {
                let v = tracked.frozen_value.unwrap_or(0.0);
                tracked.history.push(CodegreeRecord {
                    step,
                    value: v,
                    estimated: false,
                });
                readings.push(CodegreeReading {
                    value: v,
                    std_error: 0.0,
                    estimated: false,
                    frozen: true,
                    residual: None,
                });
                continue;
            }
            let (mut value, mut std_error, mut estimated) = if tracked.set.is_empty() {
                (available.value, available.std_error, !available.exact)
            } else {
                match exact_codegree(
                    h,
                    &tracked.set,
                    &mut SearchBudget::new(self.budgets.enumeration_nodes),
                ) {
                    Ok(c) => (c as f64, 0.0, false),
                    Err(Error::Budget { .. }) => {
                        let est = sampled_codegree(h, &tracked.set, self.budgets.samples, rng)?;
                        (est.value, est.std_error, true)
                    }
                    Err(e) => return Err(e),
                }
            };
            if estimated && value == 0.0 && self.budgets.samples >= FREEZE_CONFIRM_SAMPLES {
                let limit = self
                    .budgets
                    .enumeration_nodes
                    .saturating_mul(CONFIRM_BUDGET_FACTOR);
                if let Ok(c) = exact_codegree(h, &tracked.set, &mut SearchBudget::new(limit)) {
                    (value, std_error, estimated) = (c as f64, 0.0, false);
                }
            }
            tracked.history.push(CodegreeRecord {
                step,
                value,
                estimated,
            });
            if !estimated && value == 0.0 {
                tracked.frozen = true;
                tracked.frozen_at = Some(step);
                tracked.frozen_value = Some(0.0);
                readings.push(CodegreeReading {
                    value,
                    std_error,
                    estimated,
                    frozen: true,
                    residual: None,
                });
                continue;
            }
            let residual = curve.as_ref().map(|c| {
                let j = tracked.j();
                let (y, eps) = (c.y(j), c.eps(j));
                let plus = value - (y + eps);
                let minus = value - (y - eps);
                BandResidual {
                    step,
                    tracked: k,
                    j,
                    plus,
                    minus,
                    good: plus <= 0.0 && 0.0 <= minus,
                }
            });
            if let Some(r) = &residual {
                self.band_good &= r.good;
            }
            readings.push(CodegreeReading {
                value,
                std_error,
                estimated,
                frozen: false,
                residual,
            });
        }
        Ok(readings)
    }
}
