//! Exact cyclotomic polynomial arithmetic and quotient rings
//! `(Z/pZ)[x]/(Phi_m(x))`.
//!
//! Congruences between algebraic integers in `Z[zeta_m]` and rationals are
//! decided in this quotient ring: divisibility by `p` of an element of
//! `Z[zeta_m]` is visible in its residue there. A root of unity of order
//! `m' | m` is handled by switching to conductor `m'` instead of working in
//! a larger ring.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{factor, gcd, mod_mul};
use crate::filters::OmegaProfile;
use crate::Error;

/// Integer polynomial, coefficients in ascending degree, trailing zeros
/// trimmed; the zero polynomial has an empty coefficient list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial { coeffs: vec![1] }
    }

    /// `x^k - 1`.
    pub fn x_pow_minus_one(k: usize) -> Self {
        let mut coeffs = vec![0i64; k + 1];
        coeffs[0] = -1;
        coeffs[k] = 1;
        IntPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: i64) -> i128 {
        let mut acc = 0i128;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x as i128 + c as i128;
        }
        acc
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a as i128 * b as i128;
            }
        }
        IntPolynomial::from_coeffs(
            out.into_iter()
                .map(|c| i64::try_from(c).expect("coefficient fits i64"))
                .collect(),
        )
    }

    /// Substitutes `x^t` for `x`.
    pub fn compose_x_pow(&self, t: usize) -> IntPolynomial {
        assert!(t >= 1);
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![0i64; (self.coeffs.len() - 1) * t + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * t] = c;
        }
        IntPolynomial { coeffs }
    }

    /// Exact division by a monic divisor; panics if the divisor is not monic
    /// or the division leaves a remainder.
    pub fn exact_div(&self, divisor: &IntPolynomial) -> IntPolynomial {
        assert_eq!(divisor.coeffs.last(), Some(&1), "divisor must be monic");
        let d = divisor.coeffs.len() - 1;
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        assert!(self.coeffs.len() > d || d == 0);
        let mut rem: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        let qlen = rem.len() - d;
        let mut quot = vec![0i128; qlen];
        for k in (0..qlen).rev() {
            let q = rem[k + d];
            quot[k] = q;
            if q != 0 {
                for (j, &dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= q * dc as i128;
                }
            }
        }
        assert!(rem.iter().all(|&c| c == 0), "division is not exact");
        IntPolynomial::from_coeffs(
            quot.into_iter()
                .map(|c| i64::try_from(c).expect("coefficient fits i64"))
                .collect(),
        )
    }
}

impl core::fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.unsigned_abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// The `m`-th cyclotomic polynomial with exact integer coefficients.
///
/// Uses radical reduction `Phi_m(x) = Phi_rad(m)(x^{m/rad(m)})` and, for
/// square-free `m = p*r`, the exact division `Phi_{pr}(x) = Phi_r(x^p) / Phi_r(x)`.
pub fn cyclotomic_poly(m: u64) -> IntPolynomial {
    assert!(m >= 1);
    if m == 1 {
        return IntPolynomial::from_coeffs(vec![-1, 1]);
    }
    let f = factor(m).expect("m in supported range");
    let radical: u64 = f.primes().product();
    if radical != m {
        return cyclotomic_poly(radical).compose_x_pow((m / radical) as usize);
    }
    if f.is_prime_value() {
        return IntPolynomial::from_coeffs(vec![1; m as usize]);
    }
    let p = f.primes().next().expect("m > 1");
    let phi_r = cyclotomic_poly(m / p);
    phi_r.compose_x_pow(p as usize).exact_div(&phi_r)
}

/// Residue in `(Z/pZ)[x]/(Phi_m(x))`; `conductor` is `m`, coefficients have
/// length `phi(m)` with entries in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicElement {
    pub conductor: u64,
    pub modulus: u64,
    pub coeffs: Vec<u64>,
}

impl CyclotomicElement {
    /// True when the element is the constant `c mod p`.
    pub fn is_constant(&self, c: u64) -> bool {
        self.coeffs[0] == c % self.modulus && self.coeffs[1..].iter().all(|&x| x == 0)
    }

    /// Constant value if the element is rational, else `None`.
    pub fn as_constant(&self) -> Option<u64> {
        self.coeffs[1..]
            .iter()
            .all(|&x| x == 0)
            .then_some(self.coeffs[0])
    }
}

impl core::fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.as_constant() {
            Some(c) => write!(f, "{c}"),
            None => {
                let poly = IntPolynomial::from_coeffs(
                    self.coeffs.iter().map(|&c| c as i64).collect(),
                );
                write!(f, "{poly}")
            }
        }
    }
}

/// Arithmetic context for one `(conductor, modulus)` pair; precomputes
/// `Phi_m mod p` and the reductions of `x^j` for `j in [0, m)`.
pub struct CyclotomicRing {
    conductor: u64,
    modulus: u64,
    phi: usize,
    xpow: Vec<Vec<u64>>,
}

impl CyclotomicRing {
    pub fn new(m: u64, p: u64) -> Self {
        assert!(m >= 1 && p >= 2);
        let phi_poly = cyclotomic_poly(m);
        let phi = phi_poly.degree().expect("Phi_m is nonzero");
        let modpoly: Vec<u64> = phi_poly
            .coeffs()
            .iter()
            .map(|&c| (c as i128).rem_euclid(p as i128) as u64)
            .collect();
        // x^j mod (p, Phi_m) for j in [0, m); x^m reduces to 1, so any
        // exponent is first taken mod m.
        let mut xpow: Vec<Vec<u64>> = Vec::with_capacity(m as usize);
        let mut cur = vec![0u64; phi];
        cur[0] = 1 % p;
        xpow.push(cur.clone());
        for _ in 1..m {
            let top = if phi == 0 { 0 } else { cur[phi - 1] };
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            if phi > 0 {
                cur[0] = 0;
            }
            if top != 0 {
                // subtract top * Phi_m's lower part (leading coeff is 1)
                for i in 0..phi {
                    let sub = mod_mul(top, modpoly[i], p);
                    cur[i] = (cur[i] + p - sub) % p;
                }
            }
            xpow.push(cur.clone());
        }
        CyclotomicRing {
            conductor: m,
            modulus: p,
            phi: phi.max(1),
            xpow,
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn element(&self, coeffs: Vec<u64>) -> CyclotomicElement {
        debug_assert_eq!(coeffs.len(), self.phi);
        CyclotomicElement {
            conductor: self.conductor,
            modulus: self.modulus,
            coeffs,
        }
    }

    pub fn constant(&self, c: u64) -> CyclotomicElement {
        let mut coeffs = vec![0u64; self.phi];
        coeffs[0] = c % self.modulus;
        self.element(coeffs)
    }

    pub fn one(&self) -> CyclotomicElement {
        self.constant(1)
    }

    /// `x^e` with the exponent reduced modulo the conductor.
    pub fn root_power(&self, e: u64) -> CyclotomicElement {
        let j = (e % self.conductor) as usize;
        let mut coeffs = self.xpow[j].clone();
        coeffs.resize(self.phi, 0);
        self.element(coeffs)
    }

    fn owns(&self, a: &CyclotomicElement) -> bool {
        a.conductor == self.conductor && a.modulus == self.modulus
    }

    pub fn add(&self, a: &CyclotomicElement, b: &CyclotomicElement) -> CyclotomicElement {
        assert!(self.owns(a) && self.owns(b));
        let p = self.modulus;
        self.element(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + y) % p)
                .collect(),
        )
    }

    pub fn mul(&self, a: &CyclotomicElement, b: &CyclotomicElement) -> CyclotomicElement {
        assert!(self.owns(a) && self.owns(b));
        let p = self.modulus;
        let mut conv = vec![0u64; 2 * self.phi - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                conv[i + j] = (conv[i + j] + mod_mul(x, y, p)) % p;
            }
        }
        let mut out = vec![0u64; self.phi];
        out.copy_from_slice(&conv[..self.phi]);
        for (j, &c) in conv.iter().enumerate().skip(self.phi) {
            if c == 0 {
                continue;
            }
            let red = &self.xpow[j % self.conductor as usize];
            for i in 0..red.len() {
                out[i] = (out[i] + mod_mul(c, red[i], p)) % p;
            }
        }
        self.element(out)
    }

    pub fn pow(&self, a: &CyclotomicElement, mut e: u64) -> CyclotomicElement {
        assert!(self.owns(a));
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Product of ring elements; errors on conductor or modulus mismatch.
pub fn ring_mul(
    a: &CyclotomicElement,
    b: &CyclotomicElement,
) -> Result<CyclotomicElement, Error> {
    if a.conductor != b.conductor || a.modulus != b.modulus {
        return Err(Error::RingMismatch);
    }
    let ring = CyclotomicRing::new(a.conductor, a.modulus);
    Ok(ring.mul(a, b))
}

/// Power of a ring element by square-and-multiply.
pub fn ring_pow(a: &CyclotomicElement, e: u64) -> CyclotomicElement {
    let ring = CyclotomicRing::new(a.conductor, a.modulus);
    ring.pow(a, e)
}

/// Evaluates `f(eta) mod p` for `f(x) = prod_l (1 + x^l)^{w_l}` built from a
/// class-count profile, at the root of unity `eta = x^c` of order dividing
/// `m` presented inside conductor `m`. Requires `m | phi(s)` and
/// `gcd(c, m) = 1`.
pub fn eval_f_at_root(
    profile: &OmegaProfile,
    p: u64,
    m: u64,
    c: u64,
) -> Result<CyclotomicElement, Error> {
    if m == 0 || profile.phi_s() % m != 0 || gcd(c, m) != 1 {
        return Err(Error::InvalidRoot { conductor: m, unit: c });
    }
    let ring = CyclotomicRing::new(m, p);
    let mut acc = ring.one();
    for (l, count) in profile.nonzero_classes() {
        let base = ring.add(&ring.one(), &ring.root_power((c % m) * (l % m) % m));
        acc = ring.mul(&acc, &ring.pow(&base, count));
    }
    Ok(acc)
}

fn checked_pow_i128(base: i128, exp: u32) -> Result<i128, Error> {
    base.checked_pow(exp).ok_or(Error::Overflow)
}

/// Closed form of the root-product resultant of `x^u - a` and `x^v - b`:
/// `prod (alpha^v - b)` over the `u` roots of `x^u - a` equals
/// `(-1)^u * (b^{u/d} - a^{v/d})^d` with `d = gcd(u, v)`.
fn resultant_closed_form(u: u32, a: i64, v: u32, b: i64) -> Result<i128, Error> {
    let d = gcd(u as u64, v as u64) as u32;
    let bu = checked_pow_i128(b as i128, u / d)?;
    let av = checked_pow_i128(a as i128, v / d)?;
    let base = bu.checked_sub(av).ok_or(Error::Overflow)?;
    let r = checked_pow_i128(base, d)?;
    Ok(if u % 2 == 1 { -r } else { r })
}

/// Sylvester-matrix resultant via fraction-free (Bareiss) elimination.
/// For monic `f` this is exactly `prod g(alpha)` over the roots of `f`.
fn resultant_sylvester(u: u32, a: i64, v: u32, b: i64) -> Result<i128, Error> {
    let (u, v) = (u as usize, v as usize);
    let n = u + v;
    let mut m = vec![vec![0i128; n]; n];
    for row in 0..v {
        m[row][row] = 1; // x^u
        m[row][row + u] = -(a as i128);
    }
    for row in 0..u {
        m[v + row][row] = 1; // x^v
        m[v + row][row + v] = -(b as i128);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return Ok(0);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j]
                    .checked_mul(m[k][k])
                    .and_then(|x| x.checked_sub(m[i][k].checked_mul(m[k][j])?))
                    .ok_or(Error::Overflow)?;
                m[i][j] = num / prev; // exact by Bareiss
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Resultant of the binomials `x^u - a` and `x^v - b` in the root-product
/// convention, computed by two independent routes (closed form and exact
/// Sylvester determinant) that must agree.
pub fn resultant_binomial(u: u32, a: i64, v: u32, b: i64) -> Result<i128, Error> {
    if u == 0 || v == 0 {
        return Err(Error::InvalidArgument("resultant requires u, v >= 1"));
    }
    let closed = resultant_closed_form(u, a, v, b)?;
    let sylvester = resultant_sylvester(u, a, v, b)?;
    if closed != sylvester {
        return Err(Error::ResultantMismatch {
            closed_form: closed,
            sylvester,
        });
    }
    Ok(closed)
}

/// Renders an element for witness strings.
pub fn element_to_string(e: &CyclotomicElement) -> String {
    format!("{e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::omega_profile;

    #[test]
    fn cyclotomic_poly_examples() {
        assert_eq!(cyclotomic_poly(1).coeffs(), &[-1, 1]);
        assert_eq!(cyclotomic_poly(2).coeffs(), &[1, 1]);
        assert_eq!(cyclotomic_poly(3).coeffs(), &[1, 1, 1]);
        assert_eq!(cyclotomic_poly(4).coeffs(), &[1, 0, 1]);
        assert_eq!(cyclotomic_poly(6).coeffs(), &[1, -1, 1]);
        assert_eq!(cyclotomic_poly(12).coeffs(), &[1, 0, -1, 0, 1]);
        // first index with a coefficient of magnitude 2
        assert!(cyclotomic_poly(105).coeffs().contains(&-2));
    }

    #[test]
    fn cyclotomic_at_minus_one() {
        assert_eq!(cyclotomic_poly(3).eval(-1), 1);
        for m in (3..200u64).step_by(2) {
            assert_eq!(cyclotomic_poly(m).eval(-1), 1, "Phi_{m}(-1)");
        }
    }

    #[test]
    fn cyclotomic_product_identity() {
        for k in 1..=30u64 {
            let mut prod = IntPolynomial::one();
            for d in crate::arith::factor(k).unwrap().divisors() {
                prod = prod.mul(&cyclotomic_poly(d));
            }
            assert_eq!(prod, IntPolynomial::x_pow_minus_one(k as usize), "k = {k}");
        }
    }

    #[test]
    fn ring_examples() {
        // (1 + x)^2 = 2x in (Z/5Z)[x]/(x^2 + 1)
        let ring = CyclotomicRing::new(4, 5);
        let one_plus_x = ring.add(&ring.one(), &ring.root_power(1));
        let sq = ring.pow(&one_plus_x, 2);
        assert_eq!(sq.coeffs, vec![0, 2]);

        // a * 1 = a
        let a = ring.add(&ring.constant(3), &ring.root_power(1));
        assert_eq!(ring.mul(&a, &ring.one()), a);
        assert_eq!(ring_mul(&a, &ring.one()).unwrap(), a);

        // x^m = 1 in conductor m
        for m in [1u64, 2, 3, 4, 12, 15] {
            let r = CyclotomicRing::new(m, 7);
            assert!(r.root_power(m).is_constant(1));
        }

        let other = CyclotomicRing::new(8, 5).one();
        assert_eq!(ring_mul(&a, &other), Err(Error::RingMismatch));
        assert!(ring_pow(&one_plus_x, 2).coeffs == vec![0, 2]);
    }

    #[test]
    fn eval_f_examples() {
        // prime candidate: profile of n = p has a single class at l = phi(s)
        let f = crate::arith::factor(11).unwrap();
        let prof = omega_profile(&f, 5).unwrap();
        for m in [1u64, 2, 4] {
            let v = eval_f_at_root(&prof, 11, m, 1).unwrap();
            assert!(v.is_constant(2), "f(eta) = 2 at conductor {m}");
        }

        // 561 at s = 5, p = 11, conductor 4: (1+i)(1+i^3)(1+i^4) = 4
        let f561 = crate::arith::factor(561).unwrap();
        let prof561 = omega_profile(&f561, 5).unwrap();
        let v = eval_f_at_root(&prof561, 11, 4, 1).unwrap();
        assert!(v.is_constant(4));
        // at conductor 1 the value is 2^3 = 8 = d(561)
        let v1 = eval_f_at_root(&prof561, 11, 1, 1).unwrap();
        assert!(v1.is_constant(8));

        // invalid root specs
        assert!(eval_f_at_root(&prof561, 11, 3, 1).is_err()); // 3 does not divide 4
        assert!(eval_f_at_root(&prof561, 11, 4, 2).is_err()); // gcd(2, 4) != 1
    }

    #[test]
    fn resultant_examples() {
        for l in [1u32, 3, 5, 7, 9] {
            assert_eq!(resultant_binomial(1, 1, l, -1).unwrap(), 2);
        }
        assert_eq!(resultant_binomial(3, 1, 3, -1).unwrap(), 8);
        assert_eq!(resultant_binomial(2, 1, 4, -1).unwrap(), 4); // 2^gcd(2,4)
        assert!(resultant_binomial(0, 1, 1, 1).is_err());
    }

    #[test]
    fn resultant_routes_agree_on_sweep() {
        for u in 1..=10u32 {
            for v in 1..=10u32 {
                for a in -3..=3i64 {
                    for b in -3..=3i64 {
                        // the two internal routes assert agreement
                        let r = resultant_binomial(u, a, v, b).unwrap();
                        // swap symmetry: Res(f,g) = (-1)^{uv} Res(g,f)
                        let s = resultant_binomial(v, b, u, a).unwrap();
                        let sign = if (u as u64 * v as u64) % 2 == 1 { -1 } else { 1 };
                        assert_eq!(r, sign * s, "u={u} v={v} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn display_forms() {
        let ring = CyclotomicRing::new(4, 11);
        assert_eq!(element_to_string(&ring.constant(4)), "4");
        let e = ring.add(&ring.constant(3), &ring.root_power(1));
        assert_eq!(element_to_string(&e), "x + 3");
        assert_eq!(
            format!("{}", cyclotomic_poly(12)),
            "x^4 - x^2 + 1"
        );
    }
}
