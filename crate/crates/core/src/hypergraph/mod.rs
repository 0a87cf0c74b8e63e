//! Linear q-uniform hypergraphs on `[n]` and the queries the process needs.
//!
//! Vertices are `0..n` internally. Anything read from or written for a
//! person (CLI, CSV, JSON) uses labels `1..=n`; see [`from_labels`] and
//! [`to_labels`].

mod coverage;
mod free_graph;

pub use coverage::PairCoverage;
pub use free_graph::{FreePairGraph, SearchBudget};

use serde::{Deserialize, Serialize};

use crate::binom::binomial;
use crate::error::{Error, Result};

pub type Vertex = u32;

/// Converts 1-based labels to internal vertices.
pub fn from_labels(labels: &[u32]) -> Result<Vec<Vertex>> {
    labels
        .iter()
        .map(|&l| {
            l.checked_sub(1)
                .ok_or_else(|| Error::Input("vertex labels start at 1".into()))
        })
        .collect()
}

pub fn to_labels(vertices: &[Vertex]) -> Vec<u32> {
    vertices.iter().map(|v| v + 1).collect()
}

#[derive(Clone, Debug)]
pub struct LinearHypergraph {
    n: usize,
    q: usize,
    /// Edges back to back, each sorted, `q` vertices apiece.
    edges: Vec<Vertex>,
    coverage: PairCoverage,
    free: FreePairGraph,
}

/// Serializable snapshot: the edge list in insertion order, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    pub n: usize,
    pub q: usize,
    pub edges: Vec<Vec<u32>>,
}

impl LinearHypergraph {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        if q < 2 || q > n {
            return Err(Error::Input(format!(
                "need 2 <= q <= n, got n = {n}, q = {q}"
            )));
        }
        if n > u32::MAX as usize / 2 {
            return Err(Error::Input(format!("n = {n} is too large")));
        }
        Ok(Self {
            n,
            q,
            edges: Vec::new(),
            coverage: PairCoverage::new(n),
            free: FreePairGraph::complete(n),
        })
    }

    /// Rebuilds a hypergraph by adding `edges` in order.
    pub fn from_edges(n: usize, q: usize, edges: &[Vec<Vertex>]) -> Result<Self> {
        let mut h = Self::new(n, q)?;
        for e in edges {
            h.add_edge(e)?;
        }
        Ok(h)
    }

    pub fn from_edge_list(list: &EdgeList) -> Result<Self> {
        let edges = list
            .edges
            .iter()
            .map(|e| from_labels(e))
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(list.n, list.q, &edges)
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList {
            n: self.n,
            q: self.q,
            edges: self.edges().map(to_labels).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.q
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[Vertex]> + '_ {
        self.edges.chunks_exact(self.q)
    }

    pub fn edge(&self, i: usize) -> &[Vertex] {
        &self.edges[i * self.q..(i + 1) * self.q]
    }

    pub fn coverage(&self) -> &PairCoverage {
        &self.coverage
    }

    pub fn free_graph(&self) -> &FreePairGraph {
        &self.free
    }

    /// Checks that `set` has `size` distinct vertices of `[n]`.
    pub fn check_set(&self, set: &[Vertex], size: usize) -> Result<()> {
        if set.len() != size {
            return Err(Error::Input(format!(
                "expected {size} vertices, got {}",
                set.len()
            )));
        }
        for (i, &v) in set.iter().enumerate() {
            if v as usize >= self.n {
                return Err(Error::Input(format!(
                    "vertex label {} outside [1, {}]",
                    v + 1,
                    self.n
                )));
            }
            if set[..i].contains(&v) {
                return Err(Error::Input(format!("vertex label {} repeated", v + 1)));
            }
        }
        Ok(())
    }

    /// Whether the q-set `e` can be added without breaking linearity.
    pub fn is_available(&self, e: &[Vertex]) -> Result<bool> {
        self.check_set(e, self.q)?;
        Ok(self.is_available_unchecked(e))
    }

    /// [`is_available`](Self::is_available) for a set already known to be a
    /// valid q-set. `C(q, 2)` bit probes.
    #[inline]
    pub fn is_available_unchecked(&self, e: &[Vertex]) -> bool {
        self.pairs_free(e)
    }

    /// True iff no pair inside `set` is covered (any size).
    #[inline]
    pub fn pairs_free(&self, set: &[Vertex]) -> bool {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                if self.coverage.is_covered(a, b) {
                    return false;
                }
            }
        }
        true
    }

    pub fn add_edge(&mut self, e: &[Vertex]) -> Result<()> {
        self.check_set(e, self.q)?;
        if !self.is_available_unchecked(e) {
            return Err(Error::Contract(format!(
                "edge {:?} shares a covered pair with an existing edge",
                to_labels(e)
            )));
        }
        self.push_edge(e);
        Ok(())
    }

    /// Appends an edge known to be available.
    pub(crate) fn push_edge(&mut self, e: &[Vertex]) {
        debug_assert!(self.is_available_unchecked(e));
        let start = self.edges.len();
        self.edges.extend_from_slice(e);
        self.edges[start..].sort_unstable();
        for (i, &a) in e.iter().enumerate() {
            for &b in &e[i + 1..] {
                self.coverage.cover(a, b);
                self.free.remove_pair(a, b);
            }
        }
    }

    /// `|H(i)|`: how many q-sets are available, exactly.
    ///
    /// `q <= 3` needs no budget (free pairs or triangle counting); larger `q`
    /// runs a clique count limited by `budget`.
    pub fn count_available(&self, budget: &mut SearchBudget) -> Result<u128> {
        if self.edges.is_empty() {
            return Ok(binomial(self.n as u64, self.q as u64).expect("C(n, q) fits in u128"));
        }
        match self.q {
            2 => Ok(self.free.edge_count() as u128),
            3 => Ok(self.free.count_triangles()),
            q => self
                .free
                .count_cliques_in(&self.free.all_vertices(), q, budget),
        }
    }

    /// Every available q-set, each sorted, in lexicographic order.
    pub fn available_sets(&self, budget: &mut SearchBudget) -> Result<Vec<Vertex>> {
        let mut out = Vec::new();
        self.free
            .for_each_clique_in(&self.free.all_vertices(), self.q, budget, &mut |c| {
                out.extend_from_slice(c)
            })?;
        Ok(out)
    }

    /// True iff no q-set can be added: the free-pair graph is `K_q`-free.
    pub fn is_maximal(&self, budget: &mut SearchBudget) -> Result<bool> {
        Ok(!self
            .free
            .has_clique_in(&self.free.all_vertices(), self.q, budget)?)
    }

    /// Full invariant check, for tests and debugging. Quadratic in the edge count.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Contract(m));
        let mut expect = PairCoverage::new(self.n);
        for e in self.edges() {
            self.check_set(e, self.q)?;
            for (i, &a) in e.iter().enumerate() {
                for &b in &e[i + 1..] {
                    if !expect.cover(a, b) {
                        return bad(format!("pair {{{}, {}}} lies in two edges", a + 1, b + 1));
                    }
                }
            }
        }
        if expect != self.coverage {
            return bad("coverage does not match the edge list".into());
        }
        if self.coverage.recount() != self.coverage.covered_count() {
            return bad("covered_count is stale".into());
        }
        if self.coverage.covered_count() != self.edge_count() * self.q * (self.q - 1) / 2 {
            return bad("covered_count != i * C(q, 2)".into());
        }
        if self.free != FreePairGraph::from_coverage(&self.coverage) {
            return bad("free-pair graph is not the complement of the coverage".into());
        }
        if self.free.edge_count() != self.coverage.total_pairs() - self.coverage.covered_count() {
            return bad("free-pair edge count is stale".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: usize, q: usize, edges: &[&[u32]]) -> LinearHypergraph {
        let edges: Vec<Vec<Vertex>> = edges.iter().map(|e| from_labels(e).unwrap()).collect();
        LinearHypergraph::from_edges(n, q, &edges).unwrap()
    }

    fn set(labels: &[u32]) -> Vec<Vertex> {
        from_labels(labels).unwrap()
    }

    #[test]
    fn availability_examples() {
        let empty = LinearHypergraph::new(6, 3).unwrap();
        assert!(empty.is_available(&set(&[1, 2, 3])).unwrap());
        let one = h(6, 3, &[&[1, 2, 3]]);
        assert!(!one.is_available(&set(&[1, 2, 4])).unwrap());
        assert!(one.is_available(&set(&[1, 4, 5])).unwrap());
    }

    #[test]
    fn availability_rejects_bad_input() {
        let g = LinearHypergraph::new(6, 3).unwrap();
        assert!(matches!(
            g.is_available(&set(&[1, 2])),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            g.is_available(&set(&[1, 2, 7])),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            g.is_available(&set(&[1, 2, 2])),
            Err(Error::Input(_))
        ));
        assert!(matches!(from_labels(&[0, 1]), Err(Error::Input(_))));
    }

    #[test]
    fn add_edge_examples() {
        let mut g = LinearHypergraph::new(6, 3).unwrap();
        g.add_edge(&set(&[1, 2, 3])).unwrap();
        assert_eq!(g.coverage().covered_count(), 3);
        g.add_edge(&set(&[1, 4, 5])).unwrap();
        assert_eq!(g.coverage().covered_count(), 6);
        let err = g.add_edge(&set(&[1, 2, 6])).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert_eq!(g.edge_count(), 2);
        g.validate().unwrap();
    }

    #[test]
    fn count_available_examples() {
        let mut b = SearchBudget::unlimited();
        assert_eq!(
            LinearHypergraph::new(6, 3)
                .unwrap()
                .count_available(&mut b)
                .unwrap(),
            20
        );
        assert_eq!(h(6, 3, &[&[1, 2, 3]]).count_available(&mut b).unwrap(), 10);
        assert_eq!(
            h(5, 5, &[&[1, 2, 3, 4, 5]])
                .count_available(&mut b)
                .unwrap(),
            0
        );
        // q = 4 goes through the general clique count
        assert_eq!(
            h(8, 4, &[&[1, 2, 3, 4]]).count_available(&mut b).unwrap(),
            70 - 1 - 4 * 4 - 6 * 6
        );
    }

    #[test]
    fn maximality_examples() {
        let mut b = SearchBudget::unlimited();
        assert!(h(8, 4, &[&[1, 2, 3, 4], &[5, 6, 7, 8]])
            .is_maximal(&mut b)
            .unwrap());
        assert!(!h(6, 3, &[&[1, 2, 3]]).is_maximal(&mut b).unwrap());
        let mut all_pairs = LinearHypergraph::new(5, 2).unwrap();
        for v in 0..5 {
            for u in 0..v {
                all_pairs.add_edge(&[u, v]).unwrap();
            }
        }
        assert!(all_pairs.is_maximal(&mut b).unwrap());
        assert_eq!(all_pairs.count_available(&mut b).unwrap(), 0);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = h(7, 3, &[&[3, 1, 2], &[1, 4, 5]]);
        let list = g.to_edge_list();
        assert_eq!(list.edges, vec![vec![1, 2, 3], vec![1, 4, 5]]);
        let back = LinearHypergraph::from_edge_list(&list).unwrap();
        assert_eq!(back.coverage(), g.coverage());
    }

    #[test]
    fn rejects_bad_uniformity() {
        assert!(LinearHypergraph::new(3, 4).is_err());
        assert!(LinearHypergraph::new(3, 1).is_err());
    }
}
