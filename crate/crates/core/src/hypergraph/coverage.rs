use crate::hypergraph::Vertex;

/// Which vertex pairs of `[n]` already lie inside an edge.
///
/// Stored as a flat lower-triangular bit array: pair `{u, v}` with `u < v`
/// lives at bit `v * (v - 1) / 2 + u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCoverage {
    n: usize,
    bits: Vec<u64>,
    covered: usize,
}

#[inline(always)]
pub(crate) fn pair_index(u: Vertex, v: Vertex) -> usize {
    let (a, b) = if u < v {
        (u as usize, v as usize)
    } else {
        (v as usize, u as usize)
    };
    b * (b - 1) / 2 + a
}

impl PairCoverage {
    pub fn new(n: usize) -> Self {
        let pairs = n * n.saturating_sub(1) / 2;
        Self {
            n,
            bits: vec![0; pairs.div_ceil(64)],
            covered: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(n, 2)`.
    pub fn total_pairs(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn covered_count(&self) -> usize {
        self.covered
    }

    #[inline(always)]
    pub fn is_covered(&self, u: Vertex, v: Vertex) -> bool {
        debug_assert!(u != v && (u as usize) < self.n && (v as usize) < self.n);
        let idx = pair_index(u, v);
        self.bits[idx >> 6] >> (idx & 63) & 1 == 1
    }

    /// Marks `{u, v}` covered; returns `false` if it already was.
    pub(crate) fn cover(&mut self, u: Vertex, v: Vertex) -> bool {
        let idx = pair_index(u, v);
        let word = &mut self.bits[idx >> 6];
        let mask = 1u64 << (idx & 63);
        if *word & mask != 0 {
            return false;
        }
        *word |= mask;
        self.covered += 1;
        true
    }

    /// Number of set bits, recomputed from scratch.
    pub fn recount(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_a_bijection() {
        let n = 9u32;
        let mut seen = std::collections::HashSet::new();
        for v in 0..n {
            for u in 0..v {
                assert_eq!(pair_index(u, v), pair_index(v, u));
                assert!(seen.insert(pair_index(u, v)));
            }
        }
        assert_eq!(seen.len(), 36);
        assert_eq!(*seen.iter().max().unwrap(), 35);
    }

    #[test]
    fn cover_counts_once() {
        let mut c = PairCoverage::new(5);
        assert!(c.cover(1, 3));
        assert!(!c.cover(3, 1));
        assert!(c.is_covered(3, 1));
        assert!(!c.is_covered(0, 1));
        assert_eq!(c.covered_count(), 1);
        assert_eq!(c.recount(), 1);
        assert_eq!(c.total_pairs(), 10);
    }
}
