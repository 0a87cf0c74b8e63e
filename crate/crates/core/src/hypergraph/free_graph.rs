//! The graph of uncovered pairs, kept as one bitset row per vertex.
//!
//! An available q-set is exactly a `K_q` of this graph, so availability
//! counts, codegrees and the maximality test are all clique searches here.

use crate::error::{Error, Result};
use crate::hypergraph::{PairCoverage, Vertex};

/// Node limit for exact clique searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    limit: u64,
    used: u64,
}

impl SearchBudget {
    pub fn new(limit: u64) -> Self {
        Self { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    #[inline(always)]
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::Budget { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePairGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: usize,
}

#[inline(always)]
fn popcount(bits: &[u64]) -> u32 {
    bits.iter().map(|w| w.count_ones()).sum()
}

/// Calls `f` on every set bit, in increasing order.
#[inline(always)]
fn for_each_bit(bits: &[u64], mut f: impl FnMut(Vertex) -> Result<bool>) -> Result<bool> {
    for (wi, &word) in bits.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            let b = w.trailing_zeros();
            if !f((wi as u32) * 64 + b)? {
                return Ok(false);
            }
            w &= w - 1;
        }
    }
    Ok(true)
}

/// `out = a & b`, restricted to bits strictly above `v`.
#[inline(always)]
fn and_above(out: &mut [u64], a: &[u64], b: &[u64], v: Vertex) {
    let wv = (v / 64) as usize;
    for w in out[..wv].iter_mut() {
        *w = 0;
    }
    out[wv] = a[wv] & b[wv] & ((u64::MAX << (v % 64)) << 1);
    for i in wv + 1..out.len() {
        out[i] = a[i] & b[i];
    }
}

impl FreePairGraph {
    /// Complete graph on `n` vertices: nothing covered yet.
    pub fn complete(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * words];
        for v in 0..n {
            let row = &mut rows[v * words..(v + 1) * words];
            for u in 0..n {
                if u != v {
                    row[u / 64] |= 1 << (u % 64);
                }
            }
        }
        Self {
            n,
            words,
            rows,
            edges: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn from_coverage(coverage: &PairCoverage) -> Self {
        let mut g = Self::complete(coverage.n());
        let n = coverage.n() as Vertex;
        for v in 0..n {
            for u in 0..v {
                if coverage.is_covered(u, v) {
                    g.remove_pair(u, v);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of free pairs.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline(always)]
    pub fn neighbors(&self, v: Vertex) -> &[u64] {
        let v = v as usize;
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline(always)]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u)[(v / 64) as usize] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        popcount(self.neighbors(v))
    }

    pub(crate) fn remove_pair(&mut self, u: Vertex, v: Vertex) {
        if !self.has_edge(u, v) {
            return;
        }
        let w = self.words;
        self.rows[u as usize * w + (v / 64) as usize] &= !(1 << (v % 64));
        self.rows[v as usize * w + (u / 64) as usize] &= !(1 << (u % 64));
        self.edges -= 1;
    }

    /// Bitset of vertices adjacent to every vertex of `set` and not in it.
    /// `None` if `set` is not itself a clique.
    pub fn common_neighborhood(&self, set: &[Vertex]) -> Option<Vec<u64>> {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                if !self.has_edge(a, b) {
                    return None;
                }
            }
        }
        let mut cand = vec![0u64; self.words];
        for v in 0..self.n {
            cand[v / 64] |= 1 << (v % 64);
        }
        for &a in set {
            for (c, r) in cand.iter_mut().zip(self.neighbors(a)) {
                *c &= r;
            }
        }
        Some(cand)
    }

    /// All vertices as a bitset.
    pub fn all_vertices(&self) -> Vec<u64> {
        let mut cand = vec![0u64; self.words];
        for v in 0..self.n {
            cand[v / 64] |= 1 << (v % 64);
        }
        cand
    }

    /// Number of triangles, without a budget. Cost is `O(free pairs * n / 64)`.
    pub fn count_triangles(&self) -> u128 {
        let mut scratch = vec![0u64; self.words];
        let mut total = 0u128;
        for u in 0..self.n as Vertex {
            let nu = self.neighbors(u);
            let _ = for_each_bit(nu, |v| {
                if v > u {
                    and_above(&mut scratch, nu, self.neighbors(v), v);
                    total += u128::from(popcount(&scratch));
                }
                Ok(true)
            });
        }
        total
    }

    /// Number of `r`-cliques inside the vertex set `cand`.
    pub fn count_cliques_in(
        &self,
        cand: &[u64],
        r: usize,
        budget: &mut SearchBudget,
    ) -> Result<u128> {
        match r {
            0 => Ok(1),
            1 => Ok(u128::from(popcount(cand))),
            _ => {
                let mut scratch = vec![vec![0u64; self.words]; r - 1];
                self.count_rec(cand, r, &mut scratch, budget)
            }
        }
    }

    fn count_rec(
        &self,
        cand: &[u64],
        r: usize,
        scratch: &mut [Vec<u64>],
        budget: &mut SearchBudget,
    ) -> Result<u128> {
        let (cur, rest) = scratch
            .split_first_mut()
            .expect("one scratch row per level");
        let mut total = 0u128;
        for_each_bit(cand, |v| {
            budget.tick()?;
            and_above(cur, cand, self.neighbors(v), v);
            let left = popcount(cur);
            if r == 2 {
                total += u128::from(left);
            } else if left as usize >= r - 1 {
                total += self.count_rec(cur, r - 1, rest, budget)?;
            }
            Ok(true)
        })?;
        Ok(total)
    }

    /// Whether `cand` contains an `r`-clique. Branch and bound: a branch is
    /// cut as soon as fewer than `r - depth` candidates remain.
    pub fn has_clique_in(&self, cand: &[u64], r: usize, budget: &mut SearchBudget) -> Result<bool> {
        match r {
            0 => Ok(true),
            1 => Ok(popcount(cand) > 0),
            _ => {
                let mut scratch = vec![vec![0u64; self.words]; r - 1];
                self.has_rec(cand, r, &mut scratch, budget)
            }
        }
    }

    fn has_rec(
        &self,
        cand: &[u64],
        r: usize,
        scratch: &mut [Vec<u64>],
        budget: &mut SearchBudget,
    ) -> Result<bool> {
        if (popcount(cand) as usize) < r {
            return Ok(false);
        }
        let (cur, rest) = scratch
            .split_first_mut()
            .expect("one scratch row per level");
        let mut found = false;
        for_each_bit(cand, |v| {
            budget.tick()?;
            and_above(cur, cand, self.neighbors(v), v);
            found = if r == 2 {
                popcount(cur) > 0
            } else {
                self.has_rec(cur, r - 1, rest, budget)?
            };
            Ok(!found)
        })?;
        Ok(found)
    }

    /// Calls `visit` with every `r`-clique of `cand` (vertices ascending).
    pub fn for_each_clique_in(
        &self,
        cand: &[u64],
        r: usize,
        budget: &mut SearchBudget,
        visit: &mut dyn FnMut(&[Vertex]),
    ) -> Result<()> {
        let mut path = Vec::with_capacity(r);
        if r == 0 {
            visit(&path);
            return Ok(());
        }
        let mut scratch = vec![vec![0u64; self.words]; r];
        self.list_rec(cand, r, &mut path, &mut scratch, budget, visit)
    }

    fn list_rec(
        &self,
        cand: &[u64],
        r: usize,
        path: &mut Vec<Vertex>,
        scratch: &mut [Vec<u64>],
        budget: &mut SearchBudget,
        visit: &mut dyn FnMut(&[Vertex]),
    ) -> Result<()> {
        let (cur, rest) = scratch
            .split_first_mut()
            .expect("one scratch row per level");
        for_each_bit(cand, |v| {
            budget.tick()?;
            path.push(v);
            if r == 1 {
                visit(path);
            } else {
                and_above(cur, cand, self.neighbors(v), v);
                if popcount(cur) as usize >= r - 1 {
                    self.list_rec(cur, r - 1, path, rest, budget, visit)?;
                }
            }
            path.pop();
            Ok(true)
        })?;
        Ok(())
    }
}
