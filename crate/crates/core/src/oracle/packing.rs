//! The linear process as greedy packing: vertices are the pairs of `[n]`,
//! and each q-set becomes the edge of its `C(q,2)` pairs.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::for_each_combination;
use crate::error::{Error, Result};
use crate::hypergraph::{LinearHypergraph, Vertex};

/// Largest `C(n,q) * C(q,2)` the builder will materialize.
const MATERIALIZE_LIMIT: u128 = 5_000_000;

#[derive(Clone, Debug)]
pub struct PackingInstance {
    pub n: usize,
    pub q: usize,
    /// `C(n,2)` pair-vertices.
    pub nu: usize,
    /// `C(q,2)` pairs per edge.
    pub k: usize,
    /// Pair-vertex ids of each edge.
    pub edges: Vec<Vec<usize>>,
    /// The q-set behind each edge.
    pub sets: Vec<Vec<Vertex>>,
    index: HashMap<Vec<Vertex>, usize>,
}

pub fn build_packing_instance(n: usize, q: usize) -> Result<PackingInstance> {
    if q < 2 || q > n {
        return Err(Error::Input(format!(
            "need 2 <= q <= n, got n = {n}, q = {q}"
        )));
    }
    let size = crate::binom::binomial(n as u64, q as u64)
        .unwrap_or(u128::MAX)
        .saturating_mul((q * (q - 1) / 2) as u128);
    if size > MATERIALIZE_LIMIT {
        return Err(Error::Budget {
            limit: MATERIALIZE_LIMIT as u64,
        });
    }
    let mut pair_id = vec![vec![usize::MAX; n]; n];
    let mut nu = 0;
    for (u, row) in pair_id.iter_mut().enumerate() {
        for slot in row.iter_mut().skip(u + 1) {
            *slot = nu;
            nu += 1;
        }
    }
    let all: Vec<Vertex> = (0..n as Vertex).collect();
    let (mut edges, mut sets, mut index) = (Vec::new(), Vec::new(), HashMap::new());
    for_each_combination(&all, q, &mut |s| {
        let mut pairs = Vec::with_capacity(q * (q - 1) / 2);
        for a in 0..q {
            for b in a + 1..q {
                pairs.push(pair_id[s[a] as usize][s[b] as usize]);
            }
        }
        index.insert(s.to_vec(), sets.len());
        edges.push(pairs);
        sets.push(s.to_vec());
    });
    Ok(PackingInstance {
        n,
        q,
        nu,
        k: q * (q - 1) / 2,
        edges,
        sets,
        index,
    })
}

impl PackingInstance {
    pub fn edge_of(&self, set: &[Vertex]) -> Option<usize> {
        let mut s = set.to_vec();
        s.sort_unstable();
        self.index.get(&s).copied()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PackingEquivalence {
    pub steps_checked: u64,
    pub holds: bool,
    pub first_failure: Option<u64>,
}

/// Replays `sequence` in both models and compares the available sets
/// before every step and after the last one.
pub fn packing_equivalence(
    instance: &PackingInstance,
    sequence: &[Vec<Vertex>],
) -> Result<PackingEquivalence> {
    let mut h = LinearHypergraph::new(instance.n, instance.q)?;
    let mut used = vec![false; instance.nu];
    for step in 0..=sequence.len() {
        let packing: BTreeSet<usize> = (0..instance.edges.len())
            .filter(|&id| instance.edges[id].iter().all(|&p| !used[p]))
            .collect();
        let linear: BTreeSet<usize> = (0..instance.sets.len())
            .filter(|&id| h.is_available_unchecked(&instance.sets[id]))
            .collect();
        let fail = || PackingEquivalence {
            steps_checked: step as u64,
            holds: false,
            first_failure: Some(step as u64),
        };
        if packing != linear {
            return Ok(fail());
        }
        let Some(e) = sequence.get(step) else { break };
        let id = instance
            .edge_of(e)
            .ok_or_else(|| Error::Input(format!("{e:?} is not a q-set of [n]")))?;
        if !packing.contains(&id) {
            return Ok(fail());
        }
        for &p in &instance.edges[id] {
            used[p] = true;
        }
        h.add_edge(e)?;
    }
    Ok(PackingEquivalence {
        steps_checked: sequence.len() as u64 + 1,
        holds: true,
        first_failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::run_to_maximal;

    #[test]
    fn instance_shape() {
        let p = build_packing_instance(7, 3).unwrap();
        assert_eq!((p.nu, p.k, p.edges.len()), (21, 3, 35));
        assert!(p.edges.iter().all(|e| e.len() == 3));
    }

    #[test]
    fn five_three() {
        let p = build_packing_instance(5, 3).unwrap();
        assert_eq!((p.nu, p.k, p.edges.len()), (10, 3, 10));
    }

    #[test]
    fn remaining_edges_after_one_triple() {
        let p = build_packing_instance(6, 3).unwrap();
        let used: Vec<usize> = p.edges[p.edge_of(&[0, 1, 2]).unwrap()].clone();
        let remaining = p
            .edges
            .iter()
            .filter(|e| e.iter().all(|v| !used.contains(v)))
            .count();
        let h = LinearHypergraph::from_edges(6, 3, &[vec![0, 1, 2]]).unwrap();
        let count = h
            .count_available(&mut crate::hypergraph::SearchBudget::unlimited())
            .unwrap();
        assert_eq!(remaining, 10);
        assert_eq!(count, 10);
    }

    #[test]
    fn maximal_runs_agree() {
        let p = build_packing_instance(8, 3).unwrap();
        for seed in 0..5 {
            let h = run_to_maximal(8, 3, seed).unwrap();
            let seq: Vec<Vec<Vertex>> = h.edges().map(|e| e.to_vec()).collect();
            let r = packing_equivalence(&p, &seq).unwrap();
            assert!(r.holds);
        }
    }

    #[test]
    fn non_linear_step_is_rejected() {
        let p = build_packing_instance(6, 3).unwrap();
        let r = packing_equivalence(&p, &[vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert!(!r.holds);
        assert_eq!(r.first_failure, Some(1));
    }

    #[test]
    fn too_large_to_materialize() {
        assert!(matches!(
            build_packing_instance(60, 6),
            Err(Error::Budget { .. })
        ));
    }
}
