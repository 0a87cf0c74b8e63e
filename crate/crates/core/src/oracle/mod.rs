//! Brute-force ground truth, independent of the bitset machinery where it
//! matters: every count the oracles assert on is recomputed by plain
//! enumeration of subsets of `[n]`.

mod bounds;
mod delta;
mod identities;
mod packing;

pub use bounds::{absolute_bound_check, proposition_bounds, AbsoluteBoundCheck, PropositionReport};
pub use delta::{
    delta_report, edge_weight_cases, expected_delta_bruteforce, expected_delta_formula, CaseCount,
    DeltaReport,
};
pub use identities::{identities, IdentityKind};
pub use packing::{
    build_packing_instance, packing_equivalence, PackingEquivalence, PackingInstance,
};

use crate::hypergraph::{LinearHypergraph, Vertex};

/// Calls `f` with every `k`-subset of `pool` (in lexicographic order of positions).
pub fn for_each_combination(pool: &[Vertex], k: usize, f: &mut dyn FnMut(&[Vertex])) {
    if k > pool.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<Vertex> = idx.iter().map(|&i| pool[i]).collect();
    loop {
        f(&buf);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < pool.len() - (k - i) {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for t in i + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
        for t in i..k {
            buf[t] = pool[idx[t]];
        }
    }
}

/// `|Y_J|` by checking every `(q-j)`-subset of `[n] \ J`.
pub fn bruteforce_codegree(h: &LinearHypergraph, set: &[Vertex]) -> u64 {
    let outside: Vec<Vertex> = (0..h.n() as Vertex).filter(|v| !set.contains(v)).collect();
    let mut union = Vec::with_capacity(h.q());
    let mut count = 0;
    for_each_combination(&outside, h.q() - set.len(), &mut |k| {
        union.clear();
        union.extend_from_slice(set);
        union.extend_from_slice(k);
        count += u64::from(h.is_available_unchecked(&union));
    });
    count
}

/// Every available q-set, found by checking all of `C(n, q)`.
pub fn bruteforce_available(h: &LinearHypergraph) -> Vec<Vec<Vertex>> {
    let all: Vec<Vertex> = (0..h.n() as Vertex).collect();
    let mut out = Vec::new();
    for_each_combination(&all, h.q(), &mut |e| {
        if h.is_available_unchecked(e) {
            out.push(e.to_vec());
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_enumerate_everything() {
        let pool = [3u32, 5, 8, 9, 11];
        let mut seen = Vec::new();
        for_each_combination(&pool, 3, &mut |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![3, 5, 8]);
        assert_eq!(seen[9], vec![8, 9, 11]);
        let mut empty = 0;
        for_each_combination(&pool, 0, &mut |c| {
            assert!(c.is_empty());
            empty += 1
        });
        assert_eq!(empty, 1);
        for_each_combination(&pool, 6, &mut |_| panic!("too large"));
    }
}
