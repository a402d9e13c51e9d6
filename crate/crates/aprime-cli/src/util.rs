use aprime_core::arith::{factor, FactoredInteger};

/// FNV-1a over a canonical byte string; stable across builds, used to bind
/// checkpoints to their search configuration.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Compact factorization for CSV cells, e.g. `3*11*17` or `2^2*5`.
pub fn compact_factors(f: &FactoredInteger) -> String {
    if f.factors().is_empty() {
        return "1".into();
    }
    f.factors()
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                format!("{p}")
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// `(#{p | n : omega(p-1) > 2}, omega(n))` - the numerator and denominator
/// of the statistic `rho(n)`.
pub fn rho_counts(f: &FactoredInteger) -> (u64, u64) {
    let over = f
        .primes()
        .filter(|&p| factor(p - 1).expect("p - 1 in range").omega() > 2)
        .count() as u64;
    (over, f.omega())
}
