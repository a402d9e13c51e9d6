//! Exact 64-bit integer arithmetic: primality, factorization, divisors,
//! multiplicative functions, orders, and primitive roots.
//!
//! All modular products go through 128-bit intermediates, so every operation
//! is exact over the full supported range `[1, 2^63 - 1]`. Factorization uses
//! trial division for small factors and a fixed-seed Brent cycle search with
//! deterministic primality certification above that, so outputs are
//! reproducible run to run.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, MAX_VALUE};

/// Trial division strips factors below this bound before the rho stage.
const TRIAL_LIMIT: u64 = 1_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exponent mod modulus`. Panics if `modulus == 0`.
pub fn mod_pow(base: u64, mut exponent: u64, modulus: u64) -> u64 {
    assert!(modulus >= 1, "mod_pow: modulus must be nonzero");
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = base % modulus;
    while exponent > 0 {
        if exponent & 1 == 1 {
            acc = mod_mul(acc, base, modulus);
        }
        base = mod_mul(base, base, modulus);
        exponent >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, when it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Unique `x mod m1*m2` with `x = r1 (mod m1)`, `x = r2 (mod m2)`;
/// requires `gcd(m1, m2) = 1`.
pub fn crt2(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    debug_assert_eq!(gcd(m1, m2), 1);
    let inv = mod_inverse(m1 % m2, m2).expect("crt2: moduli must be coprime");
    let diff = (r2 + m2 - r1 % m2) % m2;
    let k = mod_mul(diff, inv, m2);
    r1 + m1 * k
}

/// Largest `e` with `p^e | n`. Requires `p >= 2`, `n >= 1`.
pub fn nu(p: u64, mut n: u64) -> u32 {
    debug_assert!(p >= 2 && n >= 1);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Deterministic primality test, exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &SMALL {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // Deterministic Miller-Rabin base set for the full 64-bit range.
    const BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &base in &BASES {
        let a = base % n;
        if a == 0 {
            continue;
        }
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Brent-style rho cycle search. `n` must be odd, composite and free of
/// factors below `TRIAL_LIMIT`; returns a nontrivial factor.
fn rho_factor(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    let mut seed = n ^ 0x5851f42d4c957f2d;
    loop {
        let c = splitmix64(&mut seed) % (n - 1) + 1;
        let mut y = splitmix64(&mut seed) % n;
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = (mod_mul(y, y, n) + c) % n;
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    y = (mod_mul(y, y, n) + c) % n;
                    q = mod_mul(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += batch;
            }
            r <<= 1;
        }
        if g == n {
            // Batched gcd overshot; replay one step at a time.
            loop {
                ys = (mod_mul(ys, ys, n) + c) % n;
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

/// An integer together with its verified prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Builds a factored integer, checking every invariant: primes strictly
    /// ascending and certified prime, exponents positive, product equal to
    /// `value`.
    pub fn new(value: u64, factors: Vec<(u64, u32)>) -> Result<Self, Error> {
        if value == 0 || value > MAX_VALUE {
            return Err(Error::OutOfRange(value));
        }
        let mut product: u64 = 1;
        let mut last = 0;
        for &(p, e) in &factors {
            if p <= last || e == 0 || !is_prime(p) {
                return Err(Error::InvalidArgument(
                    "factors must be ascending primes with positive exponents",
                ));
            }
            last = p;
            for _ in 0..e {
                product = product
                    .checked_mul(p)
                    .ok_or(Error::OutOfRange(value))?;
            }
        }
        if product != value {
            return Err(Error::InvalidArgument(
                "factor product does not reconstruct the value",
            ));
        }
        Ok(FactoredInteger { value, factors })
    }

    /// Internal constructor for callers that produce factorizations by
    /// construction (sieves, `factor`). Invariants checked in debug builds.
    pub(crate) fn new_unchecked(value: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert!(FactoredInteger::new(value, factors.clone()).is_ok());
        FactoredInteger { value, factors }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs in ascending prime order.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u64 {
        self.factors.len() as u64
    }

    /// Number of divisors `d(n)`.
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime_value(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn is_composite(&self) -> bool {
        self.value > 1 && !self.is_prime_value()
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut power = 1u64;
            for _ in 0..e {
                power *= p;
                for i in 0..len {
                    divs.push(divs[i] * power);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Euler's totient, computed multiplicatively.
    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

impl core::fmt::Display for FactoredInteger {
    /// Factored form, e.g. `3 * 11 * 17` or `2^2`; `1` for the empty product.
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Full prime factorization of `n`; `factor(1)` has an empty factor list.
pub fn factor(n: u64) -> Result<FactoredInteger, Error> {
    if n == 0 || n > MAX_VALUE {
        return Err(Error::OutOfRange(n));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;
    for p in [2u64, 3, 5] {
        let e = nu(p, rest);
        if e > 0 {
            factors.push((p, e));
            rest /= p.pow(e);
        }
    }
    // 30-wheel trial division up to TRIAL_LIMIT.
    const WHEEL: [u64; 8] = [7, 11, 13, 17, 19, 23, 29, 31];
    let mut base = 0u64;
    'trial: while rest > 1 {
        for &off in &WHEEL {
            let p = base + off;
            if p > TRIAL_LIMIT || p * p > rest {
                break 'trial;
            }
            let e = nu(p, rest);
            if e > 0 {
                factors.push((p, e));
                rest /= p.pow(e);
            }
        }
        base += 30;
    }
    if rest > 1 {
        if is_prime(rest) {
            factors.push((rest, 1));
        } else {
            split_composite(rest, &mut factors);
        }
        factors.sort_unstable();
        // Merge equal primes produced by independent rho splits.
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => merged.push((p, e)),
            }
        }
        factors = merged;
    }
    Ok(FactoredInteger::new_unchecked(n, factors))
}

fn split_composite(n: u64, out: &mut Vec<(u64, u32)>) {
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            out.push((m, 1));
            continue;
        }
        let d = rho_factor(m);
        stack.push(d);
        stack.push(m / d);
    }
}

/// Least `l >= 1` with `a^l = 1 (mod m)`; requires `m >= 2` and
/// `gcd(a, m) = 1`.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64, Error> {
    if m < 2 {
        return Err(Error::InvalidArgument(
            "multiplicative_order requires modulus >= 2",
        ));
    }
    let a = a % m;
    if gcd(a, m) != 1 {
        return Err(Error::NotCoprime { a, modulus: m });
    }
    // Start from phi(m) (a multiple of the order) and strip primes.
    let phi = factor(m)?.euler_phi();
    let mut order = phi;
    for p in factor(phi)?.primes() {
        while order % p == 0 && mod_pow(a, order / p, m) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// Decomposes an odd prime power `s = q^v`, `v >= 1`.
pub fn odd_prime_power(s: u64) -> Result<(u64, u32), Error> {
    if s < 3 || s % 2 == 0 {
        return Err(Error::NotOddPrimePower(s));
    }
    let f = factor(s)?;
    match f.factors() {
        [(q, e)] => Ok((*q, *e)),
        _ => Err(Error::NotOddPrimePower(s)),
    }
}

/// Smallest generator of `(Z/sZ)^*` for an odd prime power `s >= 3`.
pub fn primitive_root(s: u64) -> Result<u64, Error> {
    let (q, e) = odd_prime_power(s)?;
    let phi = (q - 1) * q.pow(e - 1);
    let phi_primes: Vec<u64> = factor(phi)?.primes().collect();
    for g in 2..s {
        if g % q == 0 {
            continue;
        }
        if phi_primes.iter().all(|&r| mod_pow(g, phi / r, s) != 1) {
            return Ok(g);
        }
    }
    unreachable!("odd prime powers always have a primitive root")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(561));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(999_983));
        assert!(!is_prime(999_981));
        assert!(is_prime(9_223_372_036_854_775_783)); // largest prime < 2^63
    }

    #[test]
    fn factor_examples() {
        assert_eq!(
            factor(561).unwrap().factors(),
            &[(3, 1), (11, 1), (17, 1)]
        );
        assert_eq!(factor(1).unwrap().factors(), &[]);
        assert_eq!(
            factor(1729).unwrap().factors(),
            &[(7, 1), (13, 1), (19, 1)]
        );
        assert_eq!(factor(1024).unwrap().factors(), &[(2, 10)]);
        assert!(factor(0).is_err());
        assert!(factor(u64::MAX).is_err());
    }

    #[test]
    fn factor_large_semiprime() {
        // 1000003 * 1000033, both above the trial bound.
        let n = 1_000_003u64 * 1_000_033;
        assert_eq!(
            factor(n).unwrap().factors(),
            &[(1_000_003, 1), (1_000_033, 1)]
        );
    }

    #[test]
    fn divisors_examples() {
        let f = factor(561).unwrap();
        assert_eq!(f.divisors(), vec![1, 3, 11, 17, 33, 51, 187, 561]);
        assert_eq!(factor(13).unwrap().divisors(), vec![1, 13]);
        assert_eq!(factor(1).unwrap().divisors(), vec![1]);
        assert_eq!(f.divisor_count(), 8);
    }

    #[test]
    fn euler_phi_examples() {
        assert_eq!(factor(561).unwrap().euler_phi(), 320);
        assert_eq!(factor(97).unwrap().euler_phi(), 96);
        assert_eq!(factor(1).unwrap().euler_phi(), 1);
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(2, 16), 4);
        assert_eq!(nu(2, 17 - 1), 4);
        assert_eq!(nu(3, 5), 0);
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(2, 10, 1000), 24);
        assert_eq!(mod_pow(12345, 0, 7), 1);
        assert_eq!(mod_pow(2, 2, 11), 4);
        assert_eq!(mod_pow(5, 3, 1), 0);
    }

    #[test]
    #[should_panic]
    fn mod_pow_zero_modulus_panics() {
        mod_pow(2, 3, 0);
    }

    #[test]
    fn multiplicative_order_examples() {
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert_eq!(multiplicative_order(1, 100).unwrap(), 1);
        assert_eq!(multiplicative_order(3, 10).unwrap(), 4);
        assert_eq!(
            multiplicative_order(6, 10),
            Err(Error::NotCoprime { a: 6, modulus: 10 })
        );
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(5).unwrap(), 2);
        assert_eq!(primitive_root(9).unwrap(), 2);
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert_eq!(primitive_root(27).unwrap(), 2);
        assert!(primitive_root(15).is_err());
        assert!(primitive_root(4).is_err());
        assert!(primitive_root(2).is_err());
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(crt2(2, 3, 4, 5), 14);
        assert_eq!(mod_inverse(4, 5), Some(4));
        assert_eq!(mod_inverse(6, 9), None);
    }

    #[test]
    fn factored_integer_validation() {
        assert!(FactoredInteger::new(561, vec![(3, 1), (11, 1), (17, 1)]).is_ok());
        assert!(FactoredInteger::new(561, vec![(11, 1), (3, 1), (17, 1)]).is_err());
        assert!(FactoredInteger::new(561, vec![(3, 1), (11, 1)]).is_err());
        assert!(FactoredInteger::new(561, vec![(3, 1), (11, 0), (17, 1)]).is_err());
        assert!(FactoredInteger::new(9, vec![(9, 1)]).is_err());
    }

}
