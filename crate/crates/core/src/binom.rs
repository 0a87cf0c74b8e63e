//! Binomial coefficients, exact where they fit and in log-space otherwise.

use statrs::function::gamma::ln_gamma;

/// Values below this are produced from the exact integer and then converted.
const EXACT_THRESHOLD: u128 = 1_000_000_000_000_000;

/// Largest lower index for which the product form is summed term by term.
const PRODUCT_FORM_MAX_K: u64 = 512;

/// `C(n, k)` as an exact integer, or `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc == C(n, i) here, and C(n, i) * (n - i) is divisible by i + 1.
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

/// `C(n, k)` as `f64` (may round, may be `inf` for astronomically large values).
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    match binomial(n, k) {
        Some(v) => v as f64,
        None => ln_binomial(n, k).exp(),
    }
}

/// Natural log of `C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if let Some(v) = binomial(n, k) {
        if v < EXACT_THRESHOLD {
            return (v as f64).ln();
        }
    }
    if k <= PRODUCT_FORM_MAX_K {
        (0..k).map(|i| ((n - i) as f64 / (k - i) as f64).ln()).sum()
    } else {
        ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
    }
}

/// `C(j, 2)` for small `j`.
pub const fn choose2(j: u64) -> u64 {
    j * j.saturating_sub(1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(5, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(64, 32), Some(1_832_624_140_942_590_534));
        assert_eq!(choose2(0), 0);
        assert_eq!(choose2(1), 0);
        assert_eq!(choose2(5), 10);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(binomial(1000, 500).is_none());
    }

    #[test]
    fn log_paths_agree() {
        // exact path vs product path vs lgamma path
        for &(n, k) in &[
            (100u64, 3u64),
            (10_000, 5),
            (100_000, 5),
            (70, 35),
            (1_000, 20),
        ] {
            let direct: f64 = (0..k)
                .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
                .sum();
            let got = ln_binomial(n, k);
            assert!(
                (got - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "{n} {k}"
            );
        }
        let big = ln_binomial(5_000, 2_000);
        let via_gamma = ln_gamma(5_001.0) - ln_gamma(2_001.0) - ln_gamma(3_001.0);
        assert!((big - via_gamma).abs() < 1e-9 * big);
    }

    #[test]
    fn out_of_range_is_neg_infinity() {
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
    }
}
