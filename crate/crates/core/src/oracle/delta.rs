//! Expected one-step change of a codegree, two ways.
//!
//! The formula side sums signed codegrees of the subsets `S ∪ T`
//! (`S ⊆ J`, `T ⊆ K`) using the clique counter; the brute-force side adds
//! each available edge to a copy of the hypergraph and recounts by plain
//! enumeration. Both are exact rationals.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{bruteforce_available, bruteforce_codegree};
use crate::codegree::exact_codegree;
use crate::error::{Error, Result};
use crate::hypergraph::{LinearHypergraph, SearchBudget, Vertex};

/// Node limit for each exact count the formula needs.
const FORMULA_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    pub set: Vec<Vertex>,
    pub formula: String,
    pub bruteforce: String,
    pub matches: bool,
}

fn check(h: &LinearHypergraph, set: &[Vertex]) -> Result<()> {
    if set.len() >= h.q() {
        return Err(Error::Input(format!(
            "|J| = {} must be below q = {}",
            set.len(),
            h.q()
        )));
    }
    h.check_set(set, set.len())
}

fn subsets(set: &[Vertex]) -> impl Iterator<Item = Vec<Vertex>> + '_ {
    (0u32..1 << set.len()).map(move |mask| {
        set.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Codegrees of `S ∪ T`, with `|Y_A|` for a full q-set `A` read as "A is available".
struct CodegreeMemo<'a> {
    h: &'a LinearHypergraph,
    seen: HashMap<Vec<Vertex>, u128>,
}

impl CodegreeMemo<'_> {
    fn get(&mut self, mut a: Vec<Vertex>) -> Result<u128> {
        a.sort_unstable();
        if let Some(&c) = self.seen.get(&a) {
            return Ok(c);
        }
        let c = if a.len() == self.h.q() {
            u128::from(self.h.is_available_unchecked(&a))
        } else {
            exact_codegree(self.h, &a, &mut SearchBudget::new(FORMULA_BUDGET))?
        };
        self.seen.insert(a, c);
        Ok(c)
    }
}

/// `sum_{S ⊆ J, T ⊆ K, |S|+|T| >= 2, |T| >= 1} (-1)^(|S|+|T|) (|S|+|T|-1) |Y_{S ∪ T}|`:
/// the number of available edges that knock `K` out of `Y_J`.
fn inner_sum(memo: &mut CodegreeMemo<'_>, set: &[Vertex], k: &[Vertex]) -> Result<i128> {
    let mut total = 0i128;
    for s in subsets(set) {
        for t in subsets(k) {
            let size = s.len() + t.len();
            if t.is_empty() || size < 2 {
                continue;
            }
            let sign = if size % 2 == 0 { 1 } else { -1 };
            let mut union = s.clone();
            union.extend_from_slice(&t);
            total += sign * (size as i128 - 1) * memo.get(union)? as i128;
        }
    }
    Ok(total)
}

/// `E[ΔY_J | F_i]` from the inclusion-exclusion formula.
pub fn expected_delta_formula(h: &LinearHypergraph, set: &[Vertex]) -> Result<BigRational> {
    check(h, set)?;
    let available = h.count_available(&mut SearchBudget::new(FORMULA_BUDGET))?;
    if available == 0 {
        return Err(Error::Undefined("no available edge, |H(i)| = 0".into()));
    }
    let free = h.free_graph();
    let mut ks: Vec<Vec<Vertex>> = Vec::new();
    let cand = if set.is_empty() {
        Some(free.all_vertices())
    } else {
        free.common_neighborhood(set)
    };
    if let Some(cand) = cand {
        free.for_each_clique_in(
            &cand,
            h.q() - set.len(),
            &mut SearchBudget::new(FORMULA_BUDGET),
            &mut |k| ks.push(k.to_vec()),
        )?;
    }
    let mut memo = CodegreeMemo {
        h,
        seen: HashMap::new(),
    };
    let mut total = 0i128;
    for k in &ks {
        total += inner_sum(&mut memo, set, k)?;
    }
    Ok(BigRational::new(
        BigInt::from(-total),
        BigInt::from(available),
    ))
}

/// `E[ΔY_J | F_i]` by trying every available edge. An edge meeting `J` in
/// two or more vertices freezes `Y_J`, so its change counts as 0.
pub fn expected_delta_bruteforce(h: &LinearHypergraph, set: &[Vertex]) -> Result<BigRational> {
    check(h, set)?;
    let available = bruteforce_available(h);
    if available.is_empty() {
        return Err(Error::Undefined("no available edge, |H(i)| = 0".into()));
    }
    let before = bruteforce_codegree(h, set) as i128;
    let mut total = 0i128;
    for e in &available {
        if e.iter().filter(|v| set.contains(v)).count() >= 2 {
            continue;
        }
        let mut next = h.clone();
        next.add_edge(e)?;
        total += bruteforce_codegree(&next, set) as i128 - before;
    }
    Ok(BigRational::new(
        BigInt::from(total),
        BigInt::from(available.len()),
    ))
}

pub fn delta_report(h: &LinearHypergraph, set: &[Vertex]) -> Result<DeltaReport> {
    let formula = expected_delta_formula(h, set)?;
    let bruteforce = expected_delta_bruteforce(h, set)?;
    Ok(DeltaReport {
        set: set.to_vec(),
        formula: formula.to_string(),
        bruteforce: bruteforce.to_string(),
        matches: formula == bruteforce,
    })
}

/// Available edges meeting `J` in `k` and `K` in `l` vertices (`k + l >= 2`),
/// with the weight the inner sum gives each of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseCount {
    pub k: usize,
    pub l: usize,
    pub edges: u64,
    pub weight: i64,
}

/// Per-edge view of the inner sum for one `K ∈ Y_J`: groups the available
/// edges by `(|e ∩ J|, |e ∩ K|)` and reports the signed multiplicity each
/// case contributes. The formula is right exactly when that multiplicity
/// is 1 for `k <= 1` (with `l >= 1`) and 0 for `k >= 2`.
pub fn edge_weight_cases(
    h: &LinearHypergraph,
    set: &[Vertex],
    k_set: &[Vertex],
) -> Result<Vec<CaseCount>> {
    check(h, set)?;
    let mut cases: BTreeMap<(usize, usize), CaseCount> = BTreeMap::new();
    for e in bruteforce_available(h) {
        let in_j: Vec<Vertex> = e.iter().copied().filter(|v| set.contains(v)).collect();
        let in_k: Vec<Vertex> = e.iter().copied().filter(|v| k_set.contains(v)).collect();
        let (k, l) = (in_j.len(), in_k.len());
        if k + l < 2 {
            continue;
        }
        let mut weight = 0i64;
        for s in subsets(&in_j) {
            for t in subsets(&in_k) {
                let size = s.len() + t.len();
                if !t.is_empty() && size >= 2 {
                    weight += if size % 2 == 0 { 1 } else { -1 } * (size as i64 - 1);
                }
            }
        }
        let entry = cases.entry((k, l)).or_insert(CaseCount {
            k,
            l,
            edges: 0,
            weight,
        });
        debug_assert_eq!(entry.weight, weight);
        entry.edges += 1;
    }
    Ok(cases.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::from_labels;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn empty_j_on_empty_hypergraph() {
        let h = LinearHypergraph::new(6, 3).unwrap();
        assert_eq!(expected_delta_formula(&h, &[]).unwrap(), r(-10, 1));
        assert_eq!(expected_delta_bruteforce(&h, &[]).unwrap(), r(-10, 1));
    }

    #[test]
    fn single_vertex_after_one_edge() {
        let h = LinearHypergraph::from_edges(6, 3, &[from_labels(&[1, 2, 3]).unwrap()]).unwrap();
        let j = from_labels(&[4]).unwrap();
        let f = expected_delta_formula(&h, &j).unwrap();
        assert_eq!(f, expected_delta_bruteforce(&h, &j).unwrap());
        assert!(f < r(0, 1));
    }

    #[test]
    fn frozen_j_has_zero_change() {
        let h = LinearHypergraph::from_edges(6, 3, &[from_labels(&[1, 2, 3]).unwrap()]).unwrap();
        let j = from_labels(&[1, 2]).unwrap();
        assert_eq!(expected_delta_formula(&h, &j).unwrap(), r(0, 1));
        assert_eq!(expected_delta_bruteforce(&h, &j).unwrap(), r(0, 1));
    }

    #[test]
    fn pairs_remove_only_themselves() {
        let h = LinearHypergraph::from_edges(7, 2, &[vec![0, 1], vec![2, 5]]).unwrap();
        assert_eq!(expected_delta_bruteforce(&h, &[]).unwrap(), r(-1, 1));
        assert_eq!(expected_delta_formula(&h, &[]).unwrap(), r(-1, 1));
    }

    #[test]
    fn maximal_state_is_undefined() {
        let h = LinearHypergraph::from_edges(3, 3, &[vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            expected_delta_formula(&h, &[]),
            Err(Error::Undefined(_))
        ));
        assert!(matches!(
            expected_delta_bruteforce(&h, &[]),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn case_weights_follow_the_identities() {
        let h = LinearHypergraph::from_edges(8, 4, &[from_labels(&[1, 2, 3, 4]).unwrap()]).unwrap();
        let j = from_labels(&[5, 6]).unwrap();
        let k = from_labels(&[7, 8]).unwrap();
        let cases = edge_weight_cases(&h, &j, &k).unwrap();
        assert!(!cases.is_empty());
        for c in cases {
            let want = if c.k <= 1 && c.l >= 1 { 1 } else { 0 };
            assert_eq!(c.weight, want, "{c:?}");
        }
    }
}
