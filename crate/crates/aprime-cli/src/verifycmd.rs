//! The `verify` subcommand: end-to-end self-checks of every module's stated
//! invariants, at full bounds by default and reduced bounds with `--quick`.

use std::time::Instant;

use rayon::prelude::*;

use aprime_core::almost::{
    divisor_class_profile, is_almost_prime, is_weakly_almost_prime,
    is_weakly_almost_prime_oracle,
};
use aprime_core::arith::{factor, gcd, is_prime, multiplicative_order, primitive_root};
use aprime_core::carmichael::{
    carmichael_up_to, carmichael_up_to_with_block, fermat_oracle, is_carmichael, FactorSieve,
};
use aprime_core::cyclotomic::{cyclotomic_poly, resultant_binomial, IntPolynomial};
use aprime_core::filters::{
    admissible_prime_powers, cyclotomic_check, fermat_classes_check, gcd_order_unit,
    multi_omega_profile, multidim_check, multidim_combinations, omega_profile, run_pipeline,
    OmegaProfile, PipelineConfig,
};

use crate::CliError;

struct Bounds {
    oracle_scan: u64,
    korselt_scan: u64,
    carmichael_limit: u64,
    prime_soundness: u64,
    implication_limit: u64,
}

const FULL: Bounds = Bounds {
    oracle_scan: 20_000,
    korselt_scan: 100_000,
    carmichael_limit: 1_000_000,
    prime_soundness: 1_000_000,
    implication_limit: 1_000_000,
};

const QUICK: Bounds = Bounds {
    oracle_scan: 2_000,
    korselt_scan: 10_000,
    carmichael_limit: 100_000,
    prime_soundness: 20_000,
    implication_limit: 100_000,
};

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn identities(_: &Bounds) -> Result<(), String> {
    for m in (3..200u64).step_by(2) {
        let v = cyclotomic_poly(m).eval(-1);
        if v != 1 {
            return Err(format!("Phi_{m}(-1) = {v}, expected 1"));
        }
    }
    for k in 1..=30u64 {
        let mut prod = IntPolynomial::one();
        for d in factor(k).expect("small").divisors() {
            prod = prod.mul(&cyclotomic_poly(d));
        }
        if prod != IntPolynomial::x_pow_minus_one(k as usize) {
            return Err(format!("product of Phi_d over d | {k} != x^{k} - 1"));
        }
    }
    for u in 1..=10u32 {
        for v in 1..=10u32 {
            for a in -3..=3i64 {
                for b in -3..=3i64 {
                    resultant_binomial(u, a, v, b)
                        .map_err(|e| format!("resultant(u={u},a={a},v={v},b={b}): {e}"))?;
                }
            }
        }
    }
    let pool: [u64; 20] = [3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37, 41, 49, 81, 121, 125, 343];
    let mut state = 0x5eed_0005u64;
    let mut checked = 0;
    while checked < 100 {
        let s1 = pool[(splitmix(&mut state) % pool.len() as u64) as usize];
        let s2 = pool[(splitmix(&mut state) % pool.len() as u64) as usize];
        if gcd(s1, s2) != 1 {
            continue;
        }
        let (d, x0) = gcd_order_unit(s1, s2).map_err(|e| format!("{e}"))?;
        let order = multiplicative_order(x0, s1 * s2).map_err(|e| format!("{e}"))?;
        if order != d {
            return Err(format!(
                "x0 = {x0} has order {order} mod {} but d = {d}",
                s1 * s2
            ));
        }
        checked += 1;
    }
    Ok(())
}

fn oracle_equivalence(b: &Bounds) -> Result<(), String> {
    (2..=b.oracle_scan).into_par_iter().try_for_each(|n| {
        let f = factor(n).expect("in range");
        let fast = is_weakly_almost_prime(&f);
        let slow = is_weakly_almost_prime_oracle(n);
        if fast != slow {
            return Err(format!(
                "criterion says {fast} but oracle says {slow} at n = {n}"
            ));
        }
        if f.is_square_free() && is_almost_prime(&f) != slow {
            return Err(format!("almost-prime criterion disagrees with oracle at n = {n}"));
        }
        Ok(())
    })
}

fn lemma_necessity(b: &Bounds) -> Result<(), String> {
    (2..=b.oracle_scan).into_par_iter().try_for_each(|n| {
        if !is_weakly_almost_prime_oracle(n) {
            return Ok(());
        }
        let f = factor(n).expect("in range");
        for p in f.primes() {
            for m in factor(p - 1).expect("in range").divisors() {
                let profile = divisor_class_profile(&f, m);
                for r in 0..m {
                    if r % m != 1 % m && profile.counts[r as usize] % p != 0 {
                        return Err(format!(
                            "n = {n}: class {r} mod {m} holds {} divisors, not divisible by {p}",
                            profile.counts[r as usize]
                        ));
                    }
                }
            }
        }
        Ok(())
    })
}

fn korselt_equivalence(b: &Bounds) -> Result<(), String> {
    let sieve = FactorSieve::new(b.korselt_scan);
    let window = 1u64 << 14;
    let windows: Vec<u64> = (2..=b.korselt_scan).step_by(window as usize).collect();
    windows.par_iter().try_for_each(|&lo| {
        let hi = b.korselt_scan.min(lo + window - 1);
        for f in sieve.factor_range(lo, hi + 1) {
            if f.is_prime_value() {
                continue;
            }
            let korselt = is_carmichael(&f);
            let fermat = fermat_oracle(f.value());
            if korselt != fermat {
                return Err(format!(
                    "n = {}: korselt says {korselt}, fermat oracle says {fermat}",
                    f.value()
                ));
            }
        }
        Ok(())
    })?;
    // generated list equals the oracle scan list
    let generated: Vec<u64> = carmichael_up_to(b.korselt_scan)
        .iter()
        .map(|f| f.value())
        .collect();
    let scanned: Vec<u64> = (2..=b.korselt_scan)
        .into_par_iter()
        .filter(|&n| !is_prime(n) && fermat_oracle(n))
        .collect();
    if generated != scanned {
        return Err(format!(
            "generator found {} numbers, oracle scan found {}",
            generated.len(),
            scanned.len()
        ));
    }
    Ok(())
}

fn carmichael_block_consistency(b: &Bounds) -> Result<(), String> {
    let a = carmichael_up_to_with_block(b.carmichael_limit, 1 << 16);
    let c = carmichael_up_to_with_block(b.carmichael_limit, 99_991);
    if a != c {
        return Err(format!(
            "window partitions disagree: {} vs {} numbers",
            a.len(),
            c.len()
        ));
    }
    Ok(())
}

fn prime_soundness(b: &Bounds) -> Result<(), String> {
    let config = PipelineConfig {
        exhaustive: true,
        ..PipelineConfig::default()
    };
    (2..=b.prime_soundness).into_par_iter().try_for_each(|n| {
        if !is_prime(n) {
            return Ok(());
        }
        let f = factor(n).expect("in range");
        if !is_almost_prime(&f) {
            return Err(format!("prime {n} rejected by the almost-prime criterion"));
        }
        let report = run_pipeline(&f, &config);
        if let Some(kind) = report.first_failure {
            return Err(format!("prime {n} fails filter {}", kind.name()));
        }
        Ok(())
    })
}

fn synthetic_profile(state: &mut u64) -> OmegaProfile {
    const MODULI: [u64; 8] = [3, 5, 7, 9, 11, 13, 25, 27];
    let s = MODULI[(splitmix(state) % MODULI.len() as u64) as usize];
    let g = primitive_root(s).expect("odd prime power");
    let phi = factor(s).expect("small").euler_phi();
    let mut counts = vec![0u64; phi as usize];
    if splitmix(state) % 2 == 0 {
        counts[(phi - 1) as usize] = splitmix(state) % 6 + 1;
    } else {
        for c in counts.iter_mut() {
            *c = splitmix(state) % 3;
        }
    }
    OmegaProfile::from_counts(s, g, counts)
}

fn implication_chain(b: &Bounds) -> Result<(), String> {
    let numbers = carmichael_up_to(b.implication_limit);
    numbers.par_iter().try_for_each(|f| {
        let d_n = f.divisor_count();
        for p in f.primes() {
            for s in admissible_prime_powers(f, p, 512) {
                let profile = omega_profile(f, s).map_err(|e| format!("{e}"))?;
                if cyclotomic_check(&profile, p, d_n).is_none() {
                    if let Some(w) = aprime_core::filters::two_adic_check(&profile, p) {
                        return Err(format!(
                            "n = {}: root congruence holds but two-adic fails: {w}",
                            f.value()
                        ));
                    }
                    if let Some(w) = fermat_classes_check(&profile, p) {
                        return Err(format!(
                            "n = {}: root congruence holds but class filter fails: {w}",
                            f.value()
                        ));
                    }
                }
            }
            for combo in multidim_combinations(f, p, 512) {
                let profile = multi_omega_profile(f, &combo).map_err(|e| format!("{e}"))?;
                // the check runs part (1) before (2)/(3); a part-(2)/(3)
                // witness therefore means part (1) passed, violating the
                // implication
                if let Some(w) = multidim_check(&profile, p, d_n) {
                    use aprime_core::filters::Witness;
                    if matches!(
                        w,
                        Witness::MultiTwoAdicPower { .. } | Witness::MultiTwoAdicNorm { .. }
                    ) {
                        return Err(format!(
                            "n = {}: joint root congruence holds but consequence fails: {w}",
                            f.value()
                        ));
                    }
                }
            }
        }
        Ok(())
    })?;
    // synthetic profiles
    let mut state = 0x5eed_0004u64;
    let mut primes_pool = Vec::new();
    for _ in 0..64 {
        let mut p = 1000 + splitmix(&mut state) % 100_000;
        while !is_prime(p) {
            p += 1;
        }
        primes_pool.push(p);
    }
    for _ in 0..1000 {
        let profile = synthetic_profile(&mut state);
        let p = primes_pool[(splitmix(&mut state) % primes_pool.len() as u64) as usize];
        if profile.omega() == 0 {
            continue;
        }
        let d_n = 1u64 << profile.omega().min(62);
        if cyclotomic_check(&profile, p, d_n).is_none() {
            if aprime_core::filters::two_adic_check(&profile, p).is_some()
                || fermat_classes_check(&profile, p).is_some()
            {
                return Err(format!(
                    "synthetic profile mod {} at p = {p}: implications violated",
                    profile.s()
                ));
            }
        }
    }
    Ok(())
}

fn almost_implies_carmichael(b: &Bounds) -> Result<(), String> {
    (2..=b.korselt_scan).into_par_iter().try_for_each(|n| {
        let f = factor(n).expect("in range");
        if f.is_composite() && is_almost_prime(&f) && !is_carmichael(&f) {
            return Err(format!("composite almost-prime {n} is not a Carmichael number"));
        }
        Ok(())
    })
}

pub fn run(quick: bool) -> Result<(), CliError> {
    let bounds = if quick { QUICK } else { FULL };
    let suites: [(&str, fn(&Bounds) -> Result<(), String>); 8] = [
        ("identities", identities),
        ("oracle_equivalence", oracle_equivalence),
        ("lemma_necessity", lemma_necessity),
        ("korselt_equivalence", korselt_equivalence),
        ("carmichael_block_consistency", carmichael_block_consistency),
        ("prime_soundness", prime_soundness),
        ("implication_chain", implication_chain),
        ("almost_implies_carmichael", almost_implies_carmichael),
    ];
    let mut failed = 0;
    for (name, suite) in suites {
        let start = Instant::now();
        match suite(&bounds) {
            Ok(()) => {
                println!("ok   {name} ({:.1}s)", start.elapsed().as_secs_f64());
            }
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        Err(CliError::Verification(format!("{failed} suite(s) failed")))
    } else {
        Ok(())
    }
}
