//! Run randomness.
//!
//! Every run is driven by ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Independent consumers use separate ChaCha streams of
//! the same key, so the edge sequence of a run does not depend on how many
//! diagnostic samples are drawn. Bounded integers use Lemire's
//! multiply-and-reject method on `next_u64`, so the bit stream to value
//! mapping is fixed here rather than by an external crate version.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

/// Stream that draws the process edges.
pub const PROCESS_STREAM: u64 = 0;
/// Stream for Monte Carlo estimates taken at checkpoints.
pub const DIAGNOSTIC_STREAM: u64 = 1;
/// Stream that picks the tracked codegree family.
pub const TRACKING_STREAM: u64 = 2;

pub fn stream(seed: u64, stream: u64) -> RunRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform integer in `0..bound`. `bound` must be positive.
#[inline]
pub fn below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let mut m = u128::from(rng.next_u64()) * u128::from(bound);
    if (m as u64) < bound {
        let threshold = bound.wrapping_neg() % bound;
        while (m as u64) < threshold {
            m = u128::from(rng.next_u64()) * u128::from(bound);
        }
    }
    (m >> 64) as u64
}

/// Floyd's algorithm: a uniform `k`-subset of `0..n`, sorted, written to `out`.
#[inline]
pub fn sample_subset<R: RngCore + ?Sized>(rng: &mut R, n: u32, k: usize, out: &mut Vec<u32>) {
    debug_assert!(k as u64 <= u64::from(n));
    out.clear();
    for j in (n - k as u32)..n {
        let t = below(rng, u64::from(j) + 1) as u32;
        if out.contains(&t) {
            out.push(j);
        } else {
            out.push(t);
        }
    }
    out.sort_unstable();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_stays_in_range() {
        let mut rng = stream(7, 0);
        for bound in [1u64, 2, 3, 10, 1 << 40, u64::MAX] {
            for _ in 0..200 {
                assert!(below(&mut rng, bound) < bound);
            }
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = stream(1, PROCESS_STREAM);
        let mut b = stream(1, DIAGNOSTIC_STREAM);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn floyd_covers_all_subsets_evenly() {
        // 5 choose 2 = 10 subsets, each should show up about 10% of the time
        let mut rng = stream(3, 0);
        let mut counts = std::collections::HashMap::new();
        let mut buf = Vec::new();
        let draws = 100_000;
        for _ in 0..draws {
            sample_subset(&mut rng, 5, 2, &mut buf);
            assert!(buf[0] < buf[1]);
            *counts.entry(buf.clone()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 10);
        for &c in counts.values() {
            let freq = f64::from(c) / draws as f64;
            assert!((freq - 0.1).abs() < 0.005, "{freq}");
        }
    }

    #[test]
    fn full_subset() {
        let mut rng = stream(0, 0);
        let mut buf = Vec::new();
        sample_subset(&mut rng, 4, 4, &mut buf);
        assert_eq!(buf, vec![0, 1, 2, 3]);
    }
}
