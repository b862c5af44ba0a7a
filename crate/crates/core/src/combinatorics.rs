//! Binomial coefficients and lexicographic subset enumeration.

use crate::error::{Error, Result};

/// `C(n, k)` in 128-bit arithmetic; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiply
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Checks `C(n, k+1)·(k+1) = C(n, k)·(n−k)` in exact integer arithmetic.
pub fn counting_identity_check(n: u64, k: u64) -> Result<bool> {
    if k == 0 || n <= k {
        return Err(Error::OutOfRange(format!("need n > k >= 1 (n={n}, k={k})")));
    }
    let lhs = binomial(n, k + 1)
        .and_then(|c| c.checked_mul((k + 1) as u128))
        .ok_or_else(|| Error::OutOfRange(format!("overflow at n={n}")))?;
    let rhs = binomial(n, k)
        .and_then(|c| c.checked_mul((n - k) as u128))
        .ok_or_else(|| Error::OutOfRange(format!("overflow at n={n}")))?;
    Ok(lhs == rhs)
}

/// The `rank`-th `k`-subset of `{0..n}` in lexicographic order.
pub fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for slot in 0..k {
        let remaining = (k - slot - 1) as u64;
        let mut c = next;
        loop {
            let count = binomial((n - c - 1) as u64, remaining).unwrap_or(u128::MAX);
            if rank < count {
                break;
            }
            rank -= count;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Advance `idx` to the next `k`-subset of `{0..n}` in lexicographic order.
/// Returns `false` once the last subset has been passed.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(12, 4), Some(495));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(64, 32), Some(1_832_624_140_942_590_534));
    }

    #[test]
    fn identity_examples() {
        assert!(counting_identity_check(5, 2).unwrap());
        assert!(counting_identity_check(12, 3).unwrap());
        assert!(counting_identity_check(3, 3).is_err());
    }

    #[test]
    fn unrank_walks_in_order() {
        let (n, k) = (7, 3);
        let total = binomial(n as u64, k as u64).unwrap();
        let mut cur = (0..k).collect::<Vec<_>>();
        for r in 0..total {
            assert_eq!(unrank_combination(n, k, r), cur);
            let more = next_combination(&mut cur, n);
            assert_eq!(more, r + 1 < total);
        }
    }
}
