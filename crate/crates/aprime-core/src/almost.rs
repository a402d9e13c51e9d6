//! The almost-prime predicates.
//!
//! `T_n(x) = x^{d_1} + ... + x^{d_k} - k*x` over the divisors `d_i` of `n`.
//! A number is weakly almost-prime when `n | T_n(x)` for every integer `x`,
//! and almost-prime when additionally square-free.
//!
//! The fast route decides the predicate from the factorization alone. For a
//! prime `p | n`, reduce each divisor exponent by `e(d) = ((d-1) mod (p-1)) + 1`,
//! which keeps `x^d` and `x^{e(d)}` equal as functions on `F_p` (including
//! `x = 0`). `T_n` then vanishes on all of `F_p` exactly when the class-1
//! count is `d(n) mod p` and every other class count is `0 mod p` - a
//! polynomial of degree below `p` with `p` roots is the zero polynomial. For
//! square-free `n` the per-prime checks combine by CRT into an exact
//! characterization; prime-square components are confirmed by evaluating
//! `T_n` over the full residue ring of each `p^e`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arith::{mod_mul, mod_pow, FactoredInteger};
use crate::Error;

/// `T_n(x) mod n`. Requires `n >= 2`.
pub fn t_n_eval(n: u64, x: i64) -> u64 {
    assert!(n >= 2, "t_n_eval requires n >= 2");
    let f = crate::arith::factor(n).expect("n in supported range");
    let xr = x.rem_euclid(n as i64) as u64;
    t_n_eval_with(&f.divisors(), xr, n)
}

/// `T_n(x) mod m` from a precomputed divisor list of `n`.
fn t_n_eval_with(divisors: &[u64], x: u64, m: u64) -> u64 {
    let k = divisors.len() as u64;
    let mut acc = 0u64;
    for &d in divisors {
        acc = (acc + mod_pow(x, d, m)) % m;
    }
    let kx = mod_mul(k % m, x % m, m);
    (acc + m - kx) % m
}

/// Power chains through the divisor lattice: divisor `d_i > 1` is obtained
/// from `d_i / p` for its smallest prime `p`, so each `x^{d_i}` costs one
/// short exponentiation instead of a full `mod_pow`.
struct DivisorChain {
    divisors: Vec<u64>,
    steps: Vec<(usize, u64)>, // (parent index, prime)
}

impl DivisorChain {
    fn new(f: &FactoredInteger) -> Self {
        let divisors = f.divisors();
        let mut steps = Vec::with_capacity(divisors.len());
        for (i, &d) in divisors.iter().enumerate() {
            if i == 0 {
                steps.push((0, 1));
                continue;
            }
            let p = f.primes().find(|&p| d % p == 0).expect("d > 1 has a prime");
            let parent = divisors.binary_search(&(d / p)).expect("divisor lattice");
            steps.push((parent, p));
        }
        DivisorChain { divisors, steps }
    }

    /// `T_n(x) mod m` (the divisor set is `n`'s, the modulus is arbitrary).
    fn eval(&self, x: u64, m: u64, scratch: &mut Vec<u64>) -> u64 {
        scratch.clear();
        let mut acc = 0u64;
        for (i, &(parent, p)) in self.steps.iter().enumerate() {
            let pw = if i == 0 {
                x % m
            } else {
                mod_pow(scratch[parent], p, m)
            };
            scratch.push(pw);
            acc = (acc + pw) % m;
        }
        let k = self.divisors.len() as u64;
        (acc + m - mod_mul(k % m, x % m, m)) % m
    }
}

/// Exhaustive check of `n | T_n(x)` for every `x in [0, n)`.
///
/// Exact for any `n >= 2`; intended for small `n` (cost `O(n * d(n))`),
/// returning early at the first witness.
pub fn is_weakly_almost_prime_oracle(n: u64) -> bool {
    assert!(n >= 2);
    let f = crate::arith::factor(n).expect("n in supported range");
    let chain = DivisorChain::new(&f);
    let mut scratch = Vec::with_capacity(chain.divisors.len());
    (0..n).all(|x| chain.eval(x, n, &mut scratch) == 0)
}

/// Counts of divisors of `n` in each residue class modulo `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClassProfile {
    pub modulus: u64,
    /// `counts[r]` = number of divisors congruent to `r (mod modulus)`.
    pub counts: Vec<u64>,
}

pub fn divisor_class_profile(f: &FactoredInteger, m: u64) -> DivisorClassProfile {
    assert!(m >= 1);
    let mut counts = alloc::vec![0u64; m as usize];
    for d in f.divisors() {
        counts[(d % m) as usize] += 1;
    }
    DivisorClassProfile { modulus: m, counts }
}

/// A failing divisor-class count: `count` divisors in class `class` modulo
/// `modulus`, violating the divisibility the criterion demands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassWitness {
    pub modulus: u64,
    pub class: u64,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionOutcome {
    Pass,
    Fail(ClassWitness),
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CriterionOutcome::Pass)
    }

    pub fn witness(&self) -> Option<ClassWitness> {
        match self {
            CriterionOutcome::Pass => None,
            CriterionOutcome::Fail(w) => Some(*w),
        }
    }
}

/// The divisor-class criterion at a prime divisor `p` of `n`: with divisor
/// exponents reduced by `e(d) = ((d-1) mod (p-1)) + 1`, class 1 must hold
/// `d(n) mod p` divisors and every other class `0 mod p` of them. This is
/// exactly "`T_n` vanishes identically on `F_p`".
///
/// Classes other than 1 are examined in ascending order first, so the
/// reported witness is the smallest violated class modulo `p - 1`.
pub fn weak_criterion_at_prime(
    f: &FactoredInteger,
    p: u64,
) -> Result<CriterionOutcome, Error> {
    if !f.primes().any(|q| q == p) {
        return Err(Error::InvalidArgument("p does not divide n"));
    }
    if p == 2 {
        // Classes modulo 1 collapse; the class-1 condition is d(n) = d(n).
        return Ok(CriterionOutcome::Pass);
    }
    let m = p - 1;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for d in f.divisors() {
        *counts.entry((d - 1) % m + 1).or_insert(0) += 1;
    }
    for (&class, &count) in &counts {
        if class != 1 && count % p != 0 {
            return Ok(CriterionOutcome::Fail(ClassWitness {
                modulus: m,
                class,
                count,
            }));
        }
    }
    let class_one = counts.get(&1).copied().unwrap_or(0);
    if class_one % p != f.divisor_count() % p {
        return Ok(CriterionOutcome::Fail(ClassWitness {
            modulus: m,
            class: 1,
            count: class_one,
        }));
    }
    Ok(CriterionOutcome::Pass)
}

/// Almost-prime: square-free and the divisor-class criterion holds at every
/// prime divisor. For square-free `n` this equals the exhaustive oracle.
pub fn is_almost_prime(f: &FactoredInteger) -> bool {
    if f.value() < 2 || !f.is_square_free() {
        return false;
    }
    f.primes().all(|p| {
        weak_criterion_at_prime(f, p)
            .expect("p divides n")
            .passed()
    })
}

/// First prime-power component `p^e` (with `e >= 2`) over which `T_n` fails
/// to vanish, or `None` when every such component confirms. Exhaustive over
/// `Z/p^eZ` per component; only meaningful once the per-prime criterion has
/// passed.
pub fn failing_prime_power(f: &FactoredInteger) -> Option<u64> {
    let squares: Vec<u64> = f
        .factors()
        .iter()
        .filter(|&&(_, e)| e >= 2)
        .map(|&(p, e)| p.pow(e))
        .collect();
    if squares.is_empty() {
        return None;
    }
    let chain = DivisorChain::new(f);
    let mut scratch = Vec::with_capacity(chain.divisors.len());
    squares
        .into_iter()
        .find(|&q| (0..q).any(|x| chain.eval(x, q, &mut scratch) != 0))
}

/// Weakly almost-prime: the criterion holds at every prime divisor (exact
/// for exponent-1 primes), and every prime-square component `p^e` is
/// confirmed by evaluating `T_n` over all of `Z/p^eZ`.
pub fn is_weakly_almost_prime(f: &FactoredInteger) -> bool {
    if f.value() < 2 {
        return false;
    }
    for p in f.primes() {
        if !weak_criterion_at_prime(f, p).expect("p divides n").passed() {
            return false;
        }
    }
    failing_prime_power(f).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor;

    #[test]
    fn t_n_examples() {
        assert_eq!(t_n_eval(6, 2), 4); // 2 + 4 + 8 + 64 - 8 = 70 = 4 (mod 6)
        assert_eq!(t_n_eval(4, 3), 0); // 3 + 9 + 81 - 9 = 84 = 0 (mod 4)
        for p in [2u64, 3, 5, 13, 97] {
            for x in [-5i64, 0, 1, 2, 7] {
                assert_eq!(t_n_eval(p, x), 0, "T_p(x) = x^p - x vanishes mod {p}");
            }
        }
    }

    #[test]
    fn oracle_examples() {
        assert!(is_weakly_almost_prime_oracle(4));
        assert!(!is_weakly_almost_prime_oracle(6)); // witness x = 2
        assert!(!is_weakly_almost_prime_oracle(9));
        assert!(is_weakly_almost_prime_oracle(2));
        for p in [2u64, 3, 5, 7, 11, 101, 9973] {
            assert!(is_weakly_almost_prime_oracle(p));
        }
    }

    #[test]
    fn profile_examples() {
        let f = factor(561).unwrap();
        let p2 = divisor_class_profile(&f, 2);
        assert_eq!(p2.counts, vec![0, 8]);
        let p10 = divisor_class_profile(&f, 10);
        assert_eq!(p10.counts[1], 4);
        assert_eq!(p10.counts[3], 2);
        assert_eq!(p10.counts[7], 2);
        assert_eq!(p10.counts.iter().sum::<u64>(), 8);

        let prime = factor(13).unwrap();
        let pp = divisor_class_profile(&prime, 12);
        assert_eq!(pp.counts[1], 2);
        assert_eq!(pp.counts.iter().sum::<u64>(), 2);
    }

    #[test]
    fn criterion_examples() {
        let f = factor(561).unwrap();
        assert!(weak_criterion_at_prime(&f, 3).unwrap().passed());
        let w = weak_criterion_at_prime(&f, 11).unwrap().witness().unwrap();
        assert_eq!(
            w,
            ClassWitness {
                modulus: 10,
                class: 3,
                count: 2
            }
        );
        let p = factor(13).unwrap();
        assert!(weak_criterion_at_prime(&p, 13).unwrap().passed());
        assert!(weak_criterion_at_prime(&f, 5).is_err());
    }

    #[test]
    fn almost_prime_examples() {
        for p in [2u64, 3, 13, 997] {
            assert!(is_almost_prime(&factor(p).unwrap()));
        }
        assert!(!is_almost_prime(&factor(561).unwrap()));
        assert!(!is_almost_prime(&factor(4).unwrap())); // not square-free
    }

    #[test]
    fn weakly_almost_prime_examples() {
        assert!(is_weakly_almost_prime(&factor(4).unwrap()));
        assert!(!is_weakly_almost_prime(&factor(9).unwrap()));
        assert!(is_weakly_almost_prime(&factor(2).unwrap()));
        assert!(!is_weakly_almost_prime(&factor(6).unwrap()));
        assert_eq!(failing_prime_power(&factor(4).unwrap()), None);
        assert_eq!(failing_prime_power(&factor(9).unwrap()), Some(9));
        assert_eq!(failing_prime_power(&factor(12).unwrap()), Some(4)); // criterion also fails
    }

    #[test]
    fn criterion_matches_oracle_small() {
        for n in 2..=2000u64 {
            let f = factor(n).unwrap();
            assert_eq!(
                is_weakly_almost_prime(&f),
                is_weakly_almost_prime_oracle(n),
                "mismatch at n = {n}"
            );
            if f.is_square_free() {
                assert_eq!(
                    is_almost_prime(&f),
                    is_weakly_almost_prime_oracle(n),
                    "square-free mismatch at n = {n}"
                );
            }
        }
    }

    #[test]
    fn even_numbers_fail_and_primes_pass() {
        for n in (4..2000u64).step_by(2) {
            assert!(!is_almost_prime(&factor(n).unwrap()), "even n = {n}");
        }
    }
}
