use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// The three alternating sums behind the edge-counting argument for the
/// expected one-step change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    /// `sum_{m=2..l} C(l,m) (-1)^m (m-1)`; equals 1 for `l >= 2`.
    A,
    /// `A + sum_{m=1..l} C(l,m) (-1)^(m+1) m`; equals 1.
    B,
    /// `sum C(k,m1) C(l,m2) (-1)^(m1+m2) (m1+m2-1)` over `0 <= m1 <= k`,
    /// `1 <= m2 <= l`, `m1 + m2 >= 2`; equals 0 for `k >= 2`.
    C,
}

/// `C(n, 0), .., C(n, n)`.
fn pascal_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::from(1u32);
    row.push(acc.clone());
    for i in 0..n {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        row.push(acc.clone());
    }
    row
}

fn sign(e: u64) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Evaluates one identity exactly. `k` is only read by kind C.
pub fn identities(kind: IdentityKind, k: u64, l: u64) -> Result<BigInt> {
    if !(1..=64).contains(&l) {
        return Err(Error::Input(format!("l = {l} outside [1, 64]")));
    }
    let cl = pascal_row(l);
    let part_a = || -> BigInt {
        (2..=l)
            .map(|m| &cl[m as usize] * BigInt::from(sign(m) * (m as i64 - 1)))
            .sum()
    };
    match kind {
        IdentityKind::A => Ok(part_a()),
        IdentityKind::B => {
            let tail: BigInt = (1..=l)
                .map(|m| &cl[m as usize] * BigInt::from(sign(m + 1) * m as i64))
                .sum();
            Ok(part_a() + tail)
        }
        IdentityKind::C => {
            if k < 2 {
                return Err(Error::Input(format!("kind C needs k >= 2, got {k}")));
            }
            let ck = pascal_row(k);
            let mut total = BigInt::zero();
            for (m1, left) in (0..=k).zip(&ck) {
                for m2 in 1..=l {
                    if m1 + m2 < 2 {
                        continue;
                    }
                    total += left
                        * &cl[m2 as usize]
                        * BigInt::from(sign(m1 + m2) * (m1 + m2) as i64 - sign(m1 + m2));
                }
            }
            Ok(total)
        }
    }
}
