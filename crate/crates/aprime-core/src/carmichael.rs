//! Carmichael numbers: the exhaustive Fermat-congruence oracle, the Korselt
//! test, and a segmented generator that carries factorizations forward.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{mod_pow, FactoredInteger};

/// Exhaustive check of `a^n = a (mod n)` for every `a in [0, n)`, returning
/// early at the first witness. Cost `O(n log n)`; intended for small `n`.
pub fn fermat_oracle(n: u64) -> bool {
    assert!(n >= 2);
    (0..n).all(|a| mod_pow(a, n, n) == a)
}

/// Korselt's criterion: composite, square-free, and `p - 1 | n - 1` for
/// every prime divisor `p`.
pub fn is_carmichael(f: &FactoredInteger) -> bool {
    if !f.is_composite() || !f.is_square_free() {
        return false;
    }
    let n = f.value();
    f.primes().all(|p| (n - 1) % (p - 1) == 0)
}

/// Block-factoring sieve: factors every integer in a window using one shared
/// table of base primes up to `sqrt(limit)`. Safe to share across threads.
pub struct FactorSieve {
    limit: u64,
    base_primes: Vec<u64>,
}

impl FactorSieve {
    /// Prepares base primes for factoring any `n <= limit`.
    pub fn new(limit: u64) -> Self {
        let bound = limit.isqrt();
        let mut composite = vec![false; bound as usize + 1];
        let mut base_primes = Vec::new();
        for p in 2..=bound {
            if !composite[p as usize] {
                base_primes.push(p);
                let mut m = p * p;
                while m <= bound {
                    composite[m as usize] = true;
                    m += p;
                }
            }
        }
        FactorSieve { limit, base_primes }
    }

    /// Factorizations of every `n` in `[lo, hi)`; requires `1 <= lo` and
    /// `hi - 1 <= limit`.
    pub fn factor_range(&self, lo: u64, hi: u64) -> Vec<FactoredInteger> {
        assert!(lo >= 1 && lo <= hi);
        assert!(hi == lo || hi - 1 <= self.limit, "window exceeds sieve limit");
        let len = (hi - lo) as usize;
        let mut rem: Vec<u64> = (lo..hi).collect();
        let mut facs: Vec<Vec<(u64, u32)>> = vec![Vec::new(); len];
        for &p in &self.base_primes {
            if p * p >= hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                let mut e = 0u32;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                    e += 1;
                }
                facs[i].push((p, e));
                m += p;
            }
        }
        rem.into_iter()
            .zip(facs)
            .enumerate()
            .map(|(i, (r, mut fs))| {
                if r > 1 {
                    fs.push((r, 1)); // cofactor above sqrt(hi) is prime
                }
                FactoredInteger::new_unchecked(lo + i as u64, fs)
            })
            .collect()
    }

    /// Carmichael numbers in `[lo, hi)`, ascending, with factorizations.
    pub fn carmichael_in_range(&self, lo: u64, hi: u64) -> Vec<FactoredInteger> {
        let lo = lo.max(2);
        if lo >= hi {
            return Vec::new();
        }
        self.factor_range(lo, hi)
            .into_iter()
            .filter(|f| f.value() % 2 == 1 && is_carmichael(f))
            .collect()
    }
}

const DEFAULT_BLOCK: u64 = 1 << 16;

/// All Carmichael numbers `<= limit`, ascending, each with its factorization.
pub fn carmichael_up_to(limit: u64) -> Vec<FactoredInteger> {
    carmichael_up_to_with_block(limit, DEFAULT_BLOCK)
}

/// Same as [`carmichael_up_to`] with an explicit sieve window size; the
/// window partition must not affect the result.
pub fn carmichael_up_to_with_block(limit: u64, block: u64) -> Vec<FactoredInteger> {
    assert!(block >= 1);
    if limit < 2 {
        return Vec::new();
    }
    let sieve = FactorSieve::new(limit);
    let mut out = Vec::new();
    let mut lo = 2u64;
    while lo <= limit {
        let hi = limit.min(lo + block - 1) + 1;
        out.extend(sieve.carmichael_in_range(lo, hi));
        lo = hi;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor;

    #[test]
    fn fermat_oracle_examples() {
        assert!(fermat_oracle(561));
        assert!(!fermat_oracle(15)); // 2^15 = 8 (mod 15)
        assert_eq!(mod_pow(2, 15, 15), 8);
        for p in [2u64, 3, 13, 97] {
            assert!(fermat_oracle(p));
        }
    }

    #[test]
    fn korselt_examples() {
        assert!(is_carmichael(&factor(561).unwrap()));
        assert!(!is_carmichael(&factor(4).unwrap()));
        assert!(is_carmichael(&factor(1105).unwrap()));
        assert!(!is_carmichael(&factor(13).unwrap()));
        assert!(!is_carmichael(&factor(1).unwrap()));
        assert!(!is_carmichael(&factor(15).unwrap()));
    }

    #[test]
    fn generation_examples() {
        let up_to_1000: Vec<u64> = carmichael_up_to(1000).iter().map(|f| f.value()).collect();
        assert_eq!(up_to_1000, vec![561]);
        let up_to_2000: Vec<u64> = carmichael_up_to(2000).iter().map(|f| f.value()).collect();
        assert_eq!(up_to_2000, vec![561, 1105, 1729]);
        assert!(carmichael_up_to(100).is_empty());
    }

    #[test]
    fn generation_block_invariance() {
        let a = carmichael_up_to_with_block(20_000, 1 << 16);
        let b = carmichael_up_to_with_block(20_000, 777);
        assert_eq!(a, b);
    }

    #[test]
    fn factor_range_agrees_with_factor() {
        let sieve = FactorSieve::new(20_000);
        for f in sieve.factor_range(1, 3000) {
            assert_eq!(f, factor(f.value()).unwrap());
        }
        for f in sieve.factor_range(19_900, 20_001) {
            assert_eq!(f, factor(f.value()).unwrap());
        }
    }

    #[test]
    fn sieve_matches_fermat_scan_small() {
        let sieve: Vec<u64> = carmichael_up_to(20_000).iter().map(|f| f.value()).collect();
        let scan: Vec<u64> = (2..=20_000u64)
            .filter(|&n| !crate::arith::is_prime(n) && fermat_oracle(n))
            .collect();
        assert_eq!(sieve, scan);
    }
}
