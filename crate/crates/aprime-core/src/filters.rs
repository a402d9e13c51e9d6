//! Necessary-condition filters over factored candidates, and the pipeline
//! that composes them.
//!
//! Every filter encodes a property that a (composite) almost-prime must
//! satisfy; a failure therefore disqualifies the candidate, while passing
//! everything proves nothing - only the exact criterion in [`crate::almost`]
//! decides the predicate. Filters report pass/fail/not-applicable with a
//! concrete witness on failure, so a search can histogram which condition
//! killed each candidate.
//!
//! The congruence family works per pair `(p, s)` of a prime divisor `p` of
//! `n` and an odd prime power `s | p - 1`: prime divisors of `n` are counted
//! by discrete-log class modulo `s` (an [`OmegaProfile`]), and the counts
//! must satisfy congruences in `(Z/pZ)[x]/(Phi_m(x))` for every root order
//! `m | phi(s)`, plus rational-integer consequences on powers of two. The
//! multidimensional variant constrains several moduli `s_i` jointly.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::almost::{weak_criterion_at_prime, ClassWitness};
use crate::arith::{
    crt2, factor, gcd, lcm, mod_pow, multiplicative_order, nu, primitive_root,
    FactoredInteger,
};
use crate::carmichael::is_carmichael;
use crate::cyclotomic::{eval_f_at_root, CyclotomicElement, CyclotomicRing};
use crate::Error;

/// Counts of prime divisors of `n` per discrete-log class modulo an odd
/// prime power `s`: `count(l)` is the number of prime divisors congruent to
/// `g^l (mod s)`, for the smallest generator `g` and `l in [1, phi(s)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaProfile {
    s: u64,
    generator: u64,
    counts: Vec<u64>,
}

impl OmegaProfile {
    /// Builds a profile directly from class counts (`counts[l-1]` for class
    /// `l`); used for synthetic profiles in tests and verification.
    pub fn from_counts(s: u64, generator: u64, counts: Vec<u64>) -> Self {
        OmegaProfile { s, generator, counts }
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn phi_s(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Count for class `l in [1, phi(s)]`.
    pub fn count(&self, l: u64) -> u64 {
        self.counts[(l - 1) as usize]
    }

    /// Total number of prime divisors counted.
    pub fn omega(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Count of prime divisors congruent to 1 modulo `s` (class `phi(s)`).
    pub fn omega_one(&self) -> u64 {
        *self.counts.last().expect("phi(s) >= 1")
    }

    pub fn nonzero_classes(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| (i as u64 + 1, c))
    }
}

/// Discrete-log class counts of the prime divisors of `n` modulo `s`.
/// Errors if `s` is not an odd prime power or some prime divisor shares a
/// factor with `s`.
pub fn omega_profile(f: &FactoredInteger, s: u64) -> Result<OmegaProfile, Error> {
    let generator = primitive_root(s)?;
    let phi = factor(s)?.euler_phi();
    if f.primes().any(|p| p % s == 0 || gcd(p, s) != 1) {
        return Err(Error::NotCoprimeToModulus { n: f.value(), s });
    }
    // residue -> discrete log, built by walking the generator's powers
    let mut dlog = vec![0u64; s as usize];
    let mut acc = 1u64;
    for l in 1..=phi {
        acc = acc * generator % s;
        dlog[acc as usize] = l;
    }
    let mut counts = vec![0u64; phi as usize];
    for p in f.primes() {
        let l = dlog[(p % s) as usize];
        counts[(l - 1) as usize] += 1;
    }
    Ok(OmegaProfile { s, generator, counts })
}

/// Joint class counts for several pairwise-coprime odd prime powers: each
/// prime divisor of `n` contributes to the tuple of its discrete-log classes
/// `(l_1, ..., l_r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiOmegaProfile {
    moduli: Vec<u64>,
    generators: Vec<u64>,
    phis: Vec<u64>,
    counts: BTreeMap<Vec<u64>, u64>,
    omega: u64,
}

impl MultiOmegaProfile {
    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn phis(&self) -> &[u64] {
        &self.phis
    }

    pub fn omega(&self) -> u64 {
        self.omega
    }

    pub fn counts(&self) -> &BTreeMap<Vec<u64>, u64> {
        &self.counts
    }

    /// Builds a synthetic tuple profile; class tuples must index classes in
    /// `[1, phi(s_i)]`.
    pub fn from_counts(moduli: Vec<u64>, counts: BTreeMap<Vec<u64>, u64>) -> Result<Self, Error> {
        let mut generators = Vec::new();
        let mut phis = Vec::new();
        for &s in &moduli {
            generators.push(primitive_root(s)?);
            phis.push(factor(s)?.euler_phi());
        }
        let omega = counts.values().sum();
        Ok(MultiOmegaProfile {
            moduli,
            generators,
            phis,
            counts,
            omega,
        })
    }
}

pub fn multi_omega_profile(
    f: &FactoredInteger,
    s_list: &[u64],
) -> Result<MultiOmegaProfile, Error> {
    if s_list.len() < 2 {
        return Err(Error::InvalidArgument("need at least two moduli"));
    }
    for (i, &a) in s_list.iter().enumerate() {
        for &b in &s_list[i + 1..] {
            if gcd(a, b) != 1 {
                return Err(Error::InvalidArgument("moduli must be pairwise coprime"));
            }
        }
    }
    let singles: Vec<OmegaProfile> = s_list
        .iter()
        .map(|&s| omega_profile(f, s))
        .collect::<Result<_, _>>()?;
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    // recompute per prime so each prime lands on one tuple
    let mut dlogs: Vec<Vec<u64>> = Vec::new();
    for prof in &singles {
        let mut table = vec![0u64; prof.s() as usize];
        let mut acc = 1u64;
        for l in 1..=prof.phi_s() {
            acc = acc * prof.generator() % prof.s();
            table[acc as usize] = l;
        }
        dlogs.push(table);
    }
    for p in f.primes() {
        let tuple: Vec<u64> = s_list
            .iter()
            .zip(&dlogs)
            .map(|(&s, table)| table[(p % s) as usize])
            .collect();
        *counts.entry(tuple).or_insert(0) += 1;
    }
    Ok(MultiOmegaProfile {
        moduli: s_list.to_vec(),
        generators: singles.iter().map(|p| p.generator()).collect(),
        phis: singles.iter().map(|p| p.phi_s()).collect(),
        counts,
        omega: f.omega(),
    })
}

/// Filter verdict status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

/// Failure witness, specific enough to recompute the violation by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    NotSquareFree { p: u64, exponent: u32 },
    KorseltFails { p: u64 },
    PrimeBound { p: u64, bound: u64 },
    EvenCandidate,
    SharedFactor { q: u64, p: u64 },
    UnevenTwoAdic { p_a: u64, v_a: u32, p_b: u64, v_b: u32 },
    EvenOrder { p: u64, q: u64, order: u64 },
    OrderUndefined { p: u64, q: u64 },
    DivisorClass { p: u64, witness: ClassWitness },
    OccupiedClass { p: u64, s: u64, l: u64, residue: u64, count: u64 },
    TwoAdicPower { p: u64, s: u64, t: u64, exponent: u64, value: u64 },
    TwoAdicNorm { p: u64, s: u64, exponent: u64, value: u64 },
    OmegaOneMismatch { p: u64, q: u64, omega: u64, omega_one: u64 },
    RootValue {
        p: u64,
        s: u64,
        conductor: u64,
        unit: u64,
        value: CyclotomicElement,
        expected: u64,
    },
    MultiRootValue {
        p: u64,
        s_list: Vec<u64>,
        conductors: Vec<u64>,
        units: Vec<u64>,
        value: CyclotomicElement,
        expected: u64,
    },
    MultiTwoAdicPower { p: u64, s_list: Vec<u64>, t: Vec<u64>, exponent: u64, value: u64 },
    MultiTwoAdicNorm { p: u64, s_list: Vec<u64>, x0: u64, exponent: u64, value: u64 },
}

impl core::fmt::Display for Witness {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Witness::NotSquareFree { p, exponent } => {
                write!(f, "{p}^{exponent} divides n")
            }
            Witness::KorseltFails { p } => write!(f, "{p} - 1 does not divide n - 1"),
            Witness::PrimeBound { p, bound } => write!(f, "prime {p} >= 2^omega = {bound}"),
            Witness::EvenCandidate => write!(f, "n is even"),
            Witness::SharedFactor { q, p } => write!(f, "{q} | n and {q} | {p} - 1"),
            Witness::UnevenTwoAdic { p_a, v_a, p_b, v_b } => {
                write!(f, "nu2({p_a}-1) = {v_a} but nu2({p_b}-1) = {v_b}")
            }
            Witness::EvenOrder { p, q, order } => {
                write!(f, "order of {p} mod {q}-1 is {order} (even)")
            }
            Witness::OrderUndefined { p, q } => {
                write!(f, "order of {p} mod {q}-1 undefined (not coprime)")
            }
            Witness::DivisorClass { p, witness } => write!(
                f,
                "{} divisors in class {} mod {} (not 0 mod {p})",
                witness.count, witness.class, witness.modulus
            ),
            Witness::OccupiedClass { p, s, l, residue, count } => write!(
                f,
                "(p={p}, s={s}): {count} prime(s) in class g^{l} = {residue}, a forbidden 2-adic level"
            ),
            Witness::TwoAdicPower { p, s, t, exponent, value } => write!(
                f,
                "(p={p}, s={s}): 2^A({t}) = 2^{exponent} = {value} != 1 (mod {p})"
            ),
            Witness::TwoAdicNorm { p, s, exponent, value } => write!(
                f,
                "(p={p}, s={s}): 2^B = 2^{exponent} = {value} != 1 (mod {p})"
            ),
            Witness::OmegaOneMismatch { p, q, omega, omega_one } => write!(
                f,
                "(p={p}): omega(n) = {omega} != omega_1 = {omega_one} (mod {q})"
            ),
            Witness::RootValue { p, s, conductor, unit, value, expected } => write!(
                f,
                "(p={p}, s={s}): f(eta) = {value} != d(n) = {expected} at conductor {conductor}, unit {unit}"
            ),
            Witness::MultiRootValue { p, s_list, conductors, units, value, expected } => write!(
                f,
                "(p={p}, s={s_list:?}): f = {value} != d(n) = {expected} at conductors {conductors:?}, units {units:?}"
            ),
            Witness::MultiTwoAdicPower { p, s_list, t, exponent, value } => write!(
                f,
                "(p={p}, s={s_list:?}): 2^A({t:?}) = 2^{exponent} = {value} != 1 (mod {p})"
            ),
            Witness::MultiTwoAdicNorm { p, s_list, x0, exponent, value } => write!(
                f,
                "(p={p}, s={s_list:?}, x0={x0}): 2^B = 2^{exponent} = {value} != 1 (mod {p})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { status: Status::Pass, witness: None }
    }

    pub fn fail(witness: Witness) -> Self {
        Verdict { status: Status::Fail, witness: Some(witness) }
    }

    pub fn not_applicable() -> Self {
        Verdict { status: Status::NotApplicable, witness: None }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Carmichael gate: a composite almost-prime must be a Carmichael number.
pub fn filter_carmichael(f: &FactoredInteger) -> Verdict {
    if let Some(&(p, e)) = f.factors().iter().find(|&&(_, e)| e > 1) {
        return Verdict::fail(Witness::NotSquareFree { p, exponent: e });
    }
    if is_carmichael(f) {
        Verdict::pass()
    } else {
        match f.primes().find(|&p| (f.value() - 1) % (p - 1) != 0) {
            Some(p) => Verdict::fail(Witness::KorseltFails { p }),
            None => Verdict::pass(),
        }
    }
}

/// Every prime divisor of a composite almost-prime is below `d(n) = 2^omega`.
pub fn filter_prime_bound(f: &FactoredInteger) -> Verdict {
    let bound = 1u64 << f.omega().min(63);
    match f.primes().find(|&p| p >= bound) {
        Some(p) => Verdict::fail(Witness::PrimeBound { p, bound }),
        None => Verdict::pass(),
    }
}

/// `gcd(n, phi(n)) = 1`: `n` is odd and no prime divisor divides another's
/// `p - 1`.
pub fn filter_gcd_phi(f: &FactoredInteger) -> Verdict {
    if f.value() % 2 == 0 {
        return Verdict::fail(Witness::EvenCandidate);
    }
    for q in f.primes() {
        for p in f.primes() {
            if (p - 1) % q == 0 {
                return Verdict::fail(Witness::SharedFactor { q, p });
            }
        }
    }
    Verdict::pass()
}

/// `nu2(p - 1)` must not depend on the prime divisor `p`.
pub fn filter_nu2_uniform(f: &FactoredInteger) -> Verdict {
    let mut primes = f.primes();
    let Some(first) = primes.next() else {
        return Verdict::not_applicable();
    };
    let v0 = nu(2, first - 1);
    for p in primes {
        let v = nu(2, p - 1);
        if v != v0 {
            return Verdict::fail(Witness::UnevenTwoAdic {
                p_a: first,
                v_a: v0,
                p_b: p,
                v_b: v,
            });
        }
    }
    Verdict::pass()
}

/// For every ordered pair of prime divisors `(p, q)`, the order of `p`
/// modulo `q - 1` must be odd.
pub fn filter_odd_order(f: &FactoredInteger) -> Verdict {
    for q in f.primes() {
        if q == 2 {
            continue; // modulus 1, trivial group
        }
        for p in f.primes() {
            if p == q {
                continue;
            }
            match multiplicative_order(p, q - 1) {
                Ok(order) if order % 2 == 0 => {
                    return Verdict::fail(Witness::EvenOrder { p, q, order });
                }
                Ok(_) => {}
                Err(_) => return Verdict::fail(Witness::OrderUndefined { p, q }),
            }
        }
    }
    Verdict::pass()
}

/// Classes at too-low 2-adic level must be empty: `omega_{g^l} = 0` whenever
/// `nu2(l) < nu2(phi(s))`. For a Fermat prime `s` this forces every prime
/// divisor to be `1 (mod s)`.
pub fn fermat_classes_check(profile: &OmegaProfile, p: u64) -> Option<Witness> {
    let phi = profile.phi_s();
    let level = nu(2, phi);
    for (l, count) in profile.nonzero_classes() {
        if nu(2, l) < level {
            return Some(Witness::OccupiedClass {
                p,
                s: profile.s(),
                l,
                residue: mod_pow(profile.generator(), l, profile.s()),
                count,
            });
        }
    }
    None
}

/// The power-of-two congruences: `2^A(t) = 1 (mod p)` for every `t | phi(s)`
/// with `A(t) = sum_l (t - gcd(t, l)) * omega_{g^l}`, and `2^B = 1 (mod p)`
/// with `B = phi(phi(s)) * (omega(n) - omega_1)`.
pub fn two_adic_check(profile: &OmegaProfile, p: u64) -> Option<Witness> {
    let phi = profile.phi_s();
    let s = profile.s();
    for t in factor(phi).expect("phi in range").divisors() {
        let a: u64 = profile
            .nonzero_classes()
            .map(|(l, count)| (t - gcd(t, l)) * count)
            .sum();
        let value = mod_pow(2, a, p);
        if value != 1 {
            return Some(Witness::TwoAdicPower { p, s, t, exponent: a, value });
        }
    }
    let b = factor(phi).expect("phi in range").euler_phi()
        * (profile.omega() - profile.omega_one());
    let value = mod_pow(2, b, p);
    if value != 1 {
        return Some(Witness::TwoAdicNorm { p, s, exponent: b, value });
    }
    None
}

/// The root-of-unity congruence: `f(eta) = d(n) (mod p)` for every
/// `phi(s)`-th root of unity `eta`, enumerated as every conductor
/// `m | phi(s)` (largest first) and every unit `c mod m`.
pub fn cyclotomic_check(profile: &OmegaProfile, p: u64, div_count: u64) -> Option<Witness> {
    let phi = profile.phi_s();
    let expected = div_count % p;
    for m in factor(phi).expect("phi in range").divisors().into_iter().rev() {
        for c in (1..=m).filter(|&c| gcd(c, m) == 1) {
            let value = eval_f_at_root(profile, p, m, c).expect("valid root spec");
            if !value.is_constant(expected) {
                return Some(Witness::RootValue {
                    p,
                    s: profile.s(),
                    conductor: m,
                    unit: c,
                    value,
                    expected,
                });
            }
        }
    }
    None
}

fn validate_prime_power_pair(f: &FactoredInteger, p: u64, s: u64) -> Result<(), Error> {
    if !f.primes().any(|q| q == p) {
        return Err(Error::InvalidArgument("p must be a prime divisor of n"));
    }
    if s < 3 || (p - 1) % s != 0 {
        return Err(Error::InvalidArgument("s must divide p - 1"));
    }
    Ok(())
}

pub fn filter_fermat_classes(f: &FactoredInteger, p: u64, s: u64) -> Result<Verdict, Error> {
    validate_prime_power_pair(f, p, s)?;
    let profile = omega_profile(f, s)?;
    Ok(match fermat_classes_check(&profile, p) {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    })
}

pub fn filter_two_adic(f: &FactoredInteger, p: u64, s: u64) -> Result<Verdict, Error> {
    validate_prime_power_pair(f, p, s)?;
    let profile = omega_profile(f, s)?;
    Ok(match two_adic_check(&profile, p) {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    })
}

pub fn filter_cyclotomic(f: &FactoredInteger, p: u64, s: u64) -> Result<Verdict, Error> {
    validate_prime_power_pair(f, p, s)?;
    let profile = omega_profile(f, s)?;
    Ok(match cyclotomic_check(&profile, p, f.divisor_count()) {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    })
}

/// Applies when `p - 1 = 2^h * q^v` with `h <= 5`, `v >= 1`, `q` odd prime:
/// then `omega(n) = omega_1 (mod q)` with `omega_1` counting prime divisors
/// congruent to 1 modulo `q`.
pub fn filter_omega_one(f: &FactoredInteger, p: u64) -> Verdict {
    let h = nu(2, p - 1);
    let odd = (p - 1) >> h;
    if h > 5 || odd == 1 {
        return Verdict::not_applicable();
    }
    let Ok((q, _)) = crate::arith::odd_prime_power(odd) else {
        return Verdict::not_applicable();
    };
    let omega = f.omega();
    let omega_one = f.primes().filter(|&r| r % q == 1).count() as u64;
    if omega % q == omega_one % q {
        Verdict::pass()
    } else {
        Verdict::fail(Witness::OmegaOneMismatch { p, q, omega, omega_one })
    }
}

fn unit_tuples(moduli: &[u64]) -> Vec<Vec<u64>> {
    let dims: Vec<Vec<u64>> = moduli
        .iter()
        .map(|&m| (1..=m).filter(|&c| gcd(c, m) == 1).collect())
        .collect();
    cartesian(&dims)
}

fn cartesian(dims: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for dim in dims {
        let mut next = Vec::with_capacity(out.len() * dim.len());
        for prefix in &out {
            for &v in dim {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// The joint congruence checks for a tuple profile over `(s_1, ..., s_r)`:
///
/// 1. the multivariate `f` equals `d(n)` at every tuple of roots of unity
///    (all conductor tuples `m_i | phi(s_i)`, all unit tuples), evaluated in
///    the common conductor `lcm(m_i)`;
/// 2. `2^A(t_1..t_r) = 1 (mod p)` for all divisor tuples `t_i | phi(s_i)`;
/// 3. for `r = 2`, `2^B = 1 (mod p)` where `B` counts primes outside the
///    cyclic family generated by the CRT residue `x_0` whose order modulo
///    `s_1 s_2` is `d = gcd(phi(s_1), phi(s_2))`.
pub fn multidim_check(profile: &MultiOmegaProfile, p: u64, div_count: u64) -> Option<Witness> {
    let s_list = profile.moduli().to_vec();
    let expected = div_count % p;

    // (1) root-tuple congruences
    let divisor_lists: Vec<Vec<u64>> = profile
        .phis()
        .iter()
        .map(|&phi| {
            let mut ds = factor(phi).expect("phi in range").divisors();
            ds.reverse();
            ds
        })
        .collect();
    for m_tuple in cartesian(&divisor_lists) {
        let m_lcm = m_tuple.iter().copied().fold(1u64, lcm);
        let ring = CyclotomicRing::new(m_lcm, p);
        for units in unit_tuples(&m_tuple) {
            let mut acc = ring.one();
            for (tuple, &count) in profile.counts() {
                let mut e = 0u64;
                for i in 0..tuple.len() {
                    e = (e + units[i] * (m_lcm / m_tuple[i]) % m_lcm * (tuple[i] % m_lcm))
                        % m_lcm;
                }
                let base = ring.add(&ring.one(), &ring.root_power(e));
                acc = ring.mul(&acc, &ring.pow(&base, count));
            }
            if !acc.is_constant(expected) {
                return Some(Witness::MultiRootValue {
                    p,
                    s_list,
                    conductors: m_tuple,
                    units,
                    value: acc,
                    expected,
                });
            }
        }
    }

    // (2) power-of-two congruences over divisor tuples
    let t_lists: Vec<Vec<u64>> = profile
        .phis()
        .iter()
        .map(|&phi| factor(phi).expect("phi in range").divisors())
        .collect();
    for t_tuple in cartesian(&t_lists) {
        let t_prod: u64 = t_tuple.iter().product();
        let mut a = 0u64;
        for (tuple, &count) in profile.counts() {
            let g_prod: u64 = t_tuple
                .iter()
                .zip(tuple)
                .map(|(&t, &l)| gcd(t, l))
                .product();
            a += (t_prod - g_prod) * count;
        }
        let value = mod_pow(2, a, p);
        if value != 1 {
            return Some(Witness::MultiTwoAdicPower {
                p,
                s_list,
                t: t_tuple,
                exponent: a,
                value,
            });
        }
    }

    // (3) the norm congruence for r = 2
    if profile.moduli().len() == 2 {
        let (s1, s2) = (profile.moduli()[0], profile.moduli()[1]);
        let (g1, g2) = (profile.generators()[0], profile.generators()[1]);
        let (phi1, phi2) = (profile.phis()[0], profile.phis()[1]);
        let d = gcd(phi1, phi2);
        let x0 = crt2(
            mod_pow(g1, phi1 / d, s1),
            s1,
            mod_pow(g2, phi2 - phi2 / d, s2),
            s2,
        );
        let s = s1 * s2;
        assert_eq!(
            multiplicative_order(x0, s).expect("x0 is a unit"),
            d,
            "x0 must have order d modulo s1*s2"
        );
        let family: Vec<u64> = (0..d).map(|k| mod_pow(x0, k, s)).collect();
        let mut inside = 0u64;
        for (tuple, &count) in profile.counts() {
            let residue = crt2(
                mod_pow(g1, tuple[0], s1),
                s1,
                mod_pow(g2, tuple[1], s2),
                s2,
            );
            if family.contains(&residue) {
                inside += count;
            }
        }
        let b = factor(phi1 * phi2).expect("phi in range").euler_phi()
            * (profile.omega() - inside);
        let value = mod_pow(2, b, p);
        if value != 1 {
            return Some(Witness::MultiTwoAdicNorm {
                p,
                s_list,
                x0,
                exponent: b,
                value,
            });
        }
    }
    None
}

/// The CRT residue of the two-modulus norm argument: returns `(d, x0)` with
/// `d = gcd(phi(s1), phi(s2))` and `x0` of multiplicative order exactly `d`
/// modulo `s1 * s2`.
pub fn gcd_order_unit(s1: u64, s2: u64) -> Result<(u64, u64), Error> {
    if gcd(s1, s2) != 1 {
        return Err(Error::InvalidArgument("moduli must be coprime"));
    }
    let g1 = primitive_root(s1)?;
    let g2 = primitive_root(s2)?;
    let phi1 = factor(s1)?.euler_phi();
    let phi2 = factor(s2)?.euler_phi();
    let d = gcd(phi1, phi2);
    let x0 = crt2(
        mod_pow(g1, phi1 / d, s1),
        s1,
        mod_pow(g2, phi2 - phi2 / d, s2),
        s2,
    );
    Ok((d, x0))
}

pub fn filter_multidim(f: &FactoredInteger, p: u64, s_list: &[u64]) -> Result<Verdict, Error> {
    if s_list.len() < 2 {
        return Err(Error::InvalidArgument("multidim needs r >= 2 moduli"));
    }
    for &s in s_list {
        validate_prime_power_pair(f, p, s)?;
    }
    let profile = multi_omega_profile(f, s_list)?;
    Ok(match multidim_check(&profile, p, f.divisor_count()) {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    })
}

/// Stable filter identifiers, in default pipeline order (cheap structural
/// checks first, then order-based, then the congruence family).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    Carmichael,
    PrimeBound,
    GcdPhi,
    Nu2Uniform,
    OddOrder,
    FermatClasses,
    TwoAdic,
    OmegaOne,
    Cyclotomic,
    Multidim,
}

impl FilterKind {
    pub const ALL: [FilterKind; 10] = [
        FilterKind::Carmichael,
        FilterKind::PrimeBound,
        FilterKind::GcdPhi,
        FilterKind::Nu2Uniform,
        FilterKind::OddOrder,
        FilterKind::FermatClasses,
        FilterKind::TwoAdic,
        FilterKind::OmegaOne,
        FilterKind::Cyclotomic,
        FilterKind::Multidim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Carmichael => "carmichael",
            FilterKind::PrimeBound => "prime_bound",
            FilterKind::GcdPhi => "gcd_phi",
            FilterKind::Nu2Uniform => "nu2_uniform",
            FilterKind::OddOrder => "odd_order",
            FilterKind::FermatClasses => "fermat_classes",
            FilterKind::TwoAdic => "two_adic",
            FilterKind::OmegaOne => "omega_one",
            FilterKind::Cyclotomic => "cyclotomic",
            FilterKind::Multidim => "multidim",
        }
    }

    /// Whether the filter only makes sense for composite candidates.
    fn composite_only(self) -> bool {
        matches!(
            self,
            FilterKind::Carmichael
                | FilterKind::PrimeBound
                | FilterKind::GcdPhi
                | FilterKind::Nu2Uniform
                | FilterKind::OddOrder
        )
    }
}

impl core::fmt::Display for FilterKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FilterKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(Error::InvalidArgument("unknown filter name"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Enabled filters, in execution order.
    pub filters: Vec<FilterKind>,
    /// Upper bound on the odd prime powers `s` (and products of them for the
    /// multidimensional filter) examined per prime divisor.
    pub s_cap: u64,
    /// Run every filter even after a failure.
    pub exhaustive: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            filters: FilterKind::ALL.to_vec(),
            s_cap: 512,
            exhaustive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterReport {
    pub n: u64,
    pub verdicts: Vec<(FilterKind, Verdict)>,
    pub first_failure: Option<FilterKind>,
}

impl FilterReport {
    pub fn verdict_for(&self, kind: FilterKind) -> Option<&Verdict> {
        self.verdicts
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, v)| v)
    }

    pub fn all_pass_or_na(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl core::fmt::Display for FilterReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (kind, verdict) in &self.verdicts {
            let status = match verdict.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::NotApplicable => "n/a",
            };
            write!(f, "  {:<16} {status}", kind.name())?;
            if let Some(w) = &verdict.witness {
                write!(f, "  {w}")?;
            }
            writeln!(f)?;
        }
        match self.first_failure {
            Some(k) => writeln!(f, "first failure: {}", k.name()),
            None => writeln!(f, "first failure: none"),
        }
    }
}

/// Odd prime powers `s | p - 1` with `3 <= s <= s_cap` and `gcd(n, s) = 1`,
/// ascending.
pub fn admissible_prime_powers(f: &FactoredInteger, p: u64, s_cap: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for (q, e) in factor(p - 1).expect("p - 1 in range").factors() {
        if *q == 2 || f.value() % q == 0 {
            continue;
        }
        let mut s = 1u64;
        for _ in 0..*e {
            s *= q;
            if s <= s_cap {
                out.push(s);
            } else {
                break;
            }
        }
    }
    out.sort_unstable();
    out
}

/// Pairwise-coprime combinations (one power per base prime, `r >= 2`,
/// product `<= s_cap`) of the admissible prime powers, in lexicographic
/// order by ascending base prime.
pub fn multidim_combinations(f: &FactoredInteger, p: u64, s_cap: u64) -> Vec<Vec<u64>> {
    let singles = admissible_prime_powers(f, p, s_cap);
    // group powers of the same base prime
    let mut groups: Vec<Vec<u64>> = Vec::new();
    let mut seen: Vec<u64> = Vec::new();
    for s in singles {
        let q = factor(s).expect("s in range").primes().next().expect("s > 1");
        match seen.iter().position(|&x| x == q) {
            Some(i) => groups[i].push(s),
            None => {
                seen.push(q);
                groups.push(vec![s]);
            }
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn dfs(
        groups: &[Vec<u64>],
        idx: usize,
        product: u64,
        s_cap: u64,
        current: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if idx == groups.len() {
            if current.len() >= 2 {
                out.push(current.clone());
            }
            return;
        }
        dfs(groups, idx + 1, product, s_cap, current, out);
        for &s in &groups[idx] {
            if product * s <= s_cap {
                current.push(s);
                dfs(groups, idx + 1, product * s, s_cap, current, out);
                current.pop();
            }
        }
    }
    dfs(&groups, 0, 1, s_cap, &mut current, &mut out);
    out.sort();
    out
}

fn aggregate_single(
    f: &FactoredInteger,
    s_cap: u64,
    check: impl Fn(&OmegaProfile, u64) -> Option<Witness>,
) -> Verdict {
    let mut ran = false;
    for p in f.primes() {
        for s in admissible_prime_powers(f, p, s_cap) {
            let Ok(profile) = omega_profile(f, s) else {
                continue;
            };
            ran = true;
            if let Some(w) = check(&profile, p) {
                return Verdict::fail(w);
            }
        }
    }
    if ran {
        Verdict::pass()
    } else {
        Verdict::not_applicable()
    }
}

/// Runs the configured filters in order, short-circuiting at the first
/// failure unless `exhaustive` is set. Composite-only filters report
/// not-applicable on primes; congruence filters run on any candidate (a
/// prime is an almost-prime, so they must pass on primes).
pub fn run_pipeline(f: &FactoredInteger, config: &PipelineConfig) -> FilterReport {
    let prime = f.is_prime_value();
    let div_count = f.divisor_count();
    let mut verdicts = Vec::with_capacity(config.filters.len());
    let mut first_failure = None;
    for &kind in &config.filters {
        let verdict = if prime && kind.composite_only() {
            Verdict::not_applicable()
        } else {
            match kind {
                FilterKind::Carmichael => filter_carmichael(f),
                FilterKind::PrimeBound => filter_prime_bound(f),
                FilterKind::GcdPhi => filter_gcd_phi(f),
                FilterKind::Nu2Uniform => filter_nu2_uniform(f),
                FilterKind::OddOrder => filter_odd_order(f),
                FilterKind::FermatClasses => {
                    aggregate_single(f, config.s_cap, fermat_classes_check)
                }
                FilterKind::TwoAdic => aggregate_single(f, config.s_cap, two_adic_check),
                FilterKind::Cyclotomic => aggregate_single(f, config.s_cap, |prof, p| {
                    cyclotomic_check(prof, p, div_count)
                }),
                FilterKind::OmegaOne => {
                    let mut ran = false;
                    let mut result = Verdict::not_applicable();
                    for p in f.primes() {
                        let v = filter_omega_one(f, p);
                        if v.status != Status::NotApplicable {
                            ran = true;
                        }
                        if v.failed() {
                            result = v;
                            break;
                        }
                    }
                    if result.failed() {
                        result
                    } else if ran {
                        Verdict::pass()
                    } else {
                        Verdict::not_applicable()
                    }
                }
                FilterKind::Multidim => {
                    let mut ran = false;
                    let mut result = Verdict::not_applicable();
                    'outer: for p in f.primes() {
                        for combo in multidim_combinations(f, p, config.s_cap) {
                            let Ok(profile) = multi_omega_profile(f, &combo) else {
                                continue;
                            };
                            ran = true;
                            if let Some(w) = multidim_check(&profile, p, div_count) {
                                result = Verdict::fail(w);
                                break 'outer;
                            }
                        }
                    }
                    if result.failed() {
                        result
                    } else if ran {
                        Verdict::pass()
                    } else {
                        Verdict::not_applicable()
                    }
                }
            }
        };
        let failed = verdict.failed();
        verdicts.push((kind, verdict));
        if failed {
            if first_failure.is_none() {
                first_failure = Some(kind);
            }
            if !config.exhaustive {
                break;
            }
        }
    }
    FilterReport {
        n: f.value(),
        verdicts,
        first_failure,
    }
}

/// The divisor-class criterion as a witness-producing check, for diagnostic
/// reports: first failing prime with its class witness.
pub fn weak_criterion_witness(f: &FactoredInteger) -> Option<Witness> {
    for p in f.primes() {
        if let Some(witness) = weak_criterion_at_prime(f, p)
            .expect("p divides n")
            .witness()
        {
            return Some(Witness::DivisorClass { p, witness });
        }
    }
    None
}

/// Formats a witness for line-oriented output.
pub fn witness_string(w: &Witness) -> String {
    alloc::format!("{w}")
}
