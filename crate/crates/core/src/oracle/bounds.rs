use serde::Serialize;

use super::bruteforce_codegree;
use crate::binom::binomial;
use crate::error::{Error, Result};
use crate::hypergraph::{LinearHypergraph, Vertex};

/// One-step change of `|Y_J|` when `e` is added, against `(q-1) C(n-j, q-j-1)`.
#[derive(Clone, Debug, Serialize)]
pub struct AbsoluteBoundCheck {
    pub delta: i128,
    pub bound: u128,
    pub holds: bool,
}

pub fn absolute_bound_check(
    h: &LinearHypergraph,
    set: &[Vertex],
    e: &[Vertex],
) -> Result<AbsoluteBoundCheck> {
    if set.len() >= h.q() {
        return Err(Error::Input(format!(
            "|J| = {} must be below q = {}",
            set.len(),
            h.q()
        )));
    }
    h.check_set(set, set.len())?;
    if !h.is_available(e)? {
        return Err(Error::Contract(format!("{e:?} is not available")));
    }
    let (n, q, j) = (h.n() as u64, h.q() as u64, set.len() as u64);
    let bound = (q as u128 - 1)
        * binomial(n - j, q - j - 1).ok_or_else(|| Error::Domain("binomial overflow".into()))?;
    let delta = if e.iter().filter(|v| set.contains(v)).count() >= 2 {
        0
    } else {
        let mut next = h.clone();
        next.add_edge(e)?;
        bruteforce_codegree(&next, set) as i128 - bruteforce_codegree(h, set) as i128
    };
    Ok(AbsoluteBoundCheck {
        delta,
        bound,
        holds: delta.unsigned_abs() <= bound,
    })
}

/// Edge-count bounds for a final hypergraph.
#[derive(Clone, Debug, Serialize)]
pub struct PropositionReport {
    pub n: u64,
    pub q: u64,
    pub edges: u64,
    pub maximal: bool,
    /// `ceil(n(n-q+1) / (q(q-1)^2))`, checked only for maximal hypergraphs.
    pub turan_lower: Option<u64>,
    pub turan_holds: Option<bool>,
    /// Set when `q^2 >= 2n`.
    pub large_q: Option<LargeQ>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LargeQ {
    pub below_q: bool,
    /// `(n-q)/q < edges <= 2n/q`, checked only for maximal hypergraphs.
    pub maximal_range: Option<bool>,
}

impl PropositionReport {
    pub fn all_hold(&self) -> bool {
        self.turan_holds.unwrap_or(true)
            && self
                .large_q
                .as_ref()
                .is_none_or(|l| l.below_q && l.maximal_range.unwrap_or(true))
    }
}

pub fn proposition_bounds(n: u64, q: u64, edges: u64, maximal: bool) -> Result<PropositionReport> {
    if q < 2 || q > n {
        return Err(Error::Input(format!(
            "need 2 <= q <= n, got n = {n}, q = {q}"
        )));
    }
    let turan_lower = maximal.then(|| {
        let num = n as u128 * (n - q + 1) as u128;
        let den = q as u128 * (q - 1) as u128 * (q - 1) as u128;
        num.div_ceil(den) as u64
    });
    let large_q = (q * q >= 2 * n).then(|| LargeQ {
        below_q: edges < q,
        maximal_range: maximal.then(|| edges * q > n - q && edges * q <= 2 * n),
    });
    Ok(PropositionReport {
        n,
        q,
        edges,
        maximal,
        turan_lower,
        turan_holds: turan_lower.map(|b| edges >= b),
        large_q,
    })
}
