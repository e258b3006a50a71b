//! Small integer helpers shared by the group and brace code.

use std::collections::BTreeSet;

pub use num_integer::{gcd, lcm};

/// The set of primes dividing `n` (empty for `n <= 1`).
pub fn prime_divisors(mut n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.insert(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

/// Returns `(p, v)` with `m = p^v`, `v >= 1`, if `m` is a prime power.
pub fn prime_power(m: u64) -> Option<(u64, u32)> {
    let primes = prime_divisors(m);
    if primes.len() != 1 {
        return None;
    }
    let p = *primes.iter().next().unwrap();
    let mut v = 0;
    let mut rest = m;
    while rest.is_multiple_of(p) {
        rest /= p;
        v += 1;
    }
    Some((p, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_divisors_small() {
        assert!(prime_divisors(1).is_empty());
        assert_eq!(prime_divisors(8).into_iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(prime_divisors(60).into_iter().collect::<Vec<_>>(), vec![2, 3, 5]);
        assert_eq!(prime_divisors(49).into_iter().collect::<Vec<_>>(), vec![7]);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
