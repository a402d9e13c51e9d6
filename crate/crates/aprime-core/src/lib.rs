//! Exact integer machinery for almost-prime predicates.
//!
//! A positive integer `n` is *weakly almost-prime* when `n` divides
//! `T_n(x) = x^{d_1} + ... + x^{d_k} - k*x` for every integer `x`, where
//! `d_1 < ... < d_k` are the divisors of `n`; it is *almost-prime* when it is
//! additionally square-free. Every prime qualifies, and a composite
//! almost-prime is forced to be a Carmichael number, which makes Carmichael
//! enumeration the natural hunting ground for composite candidates.
//!
//! The crate provides:
//!
//! * [`arith`] - deterministic 64-bit primality, factorization, divisor
//!   enumeration, multiplicative orders, primitive roots;
//! * [`almost`] - the `T_n` evaluator, the exhaustive oracle, and the fast
//!   divisor-class criterion that decides the predicate from a factorization;
//! * [`carmichael`] - Korselt testing, the Fermat-congruence oracle, and a
//!   segmented generator;
//! * [`cyclotomic`] - exact cyclotomic polynomials, arithmetic in
//!   `(Z/pZ)[x]/(Phi_m(x))`, and resultants of binomials;
//! * [`filters`] - the necessary-condition filters over factored candidates
//!   and the pipeline that composes them.
//!
//! Everything is `no_std` + `alloc`; all operations are pure functions of
//! their inputs and safe to call concurrently.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod almost;
pub mod arith;
pub mod carmichael;
pub mod cyclotomic;
pub mod filters;

pub use arith::{factor, is_prime, FactoredInteger};

use core::fmt;

/// Supported integer range: positive values up to `2^63 - 1`.
pub const MAX_VALUE: u64 = i64::MAX as u64;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input outside `[1, 2^63 - 1]`.
    OutOfRange(u64),
    /// `gcd(a, modulus) != 1` where a unit was required.
    NotCoprime { a: u64, modulus: u64 },
    /// Argument was not an odd prime power `q^v` with `q` odd, `v >= 1`.
    NotOddPrimePower(u64),
    /// A prime divisor of `n` divides the profile modulus `s`.
    NotCoprimeToModulus { n: u64, s: u64 },
    /// Ring elements with different conductor or coefficient modulus.
    RingMismatch,
    /// Root specification `(conductor, unit)` invalid for the profile.
    InvalidRoot { conductor: u64, unit: u64 },
    /// The two independent resultant routes disagree (implementation bug).
    ResultantMismatch { closed_form: i128, sylvester: i128 },
    /// Exact integer computation exceeded 128 bits.
    Overflow,
    /// Precondition violation described by the message.
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfRange(n) => write!(f, "value {n} outside supported range [1, 2^63-1]"),
            Error::NotCoprime { a, modulus } => {
                write!(f, "{a} is not a unit modulo {modulus}")
            }
            Error::NotOddPrimePower(s) => write!(f, "{s} is not an odd prime power"),
            Error::NotCoprimeToModulus { n, s } => {
                write!(f, "{n} shares a prime factor with modulus {s}")
            }
            Error::RingMismatch => write!(f, "ring elements have mismatched conductor or modulus"),
            Error::InvalidRoot { conductor, unit } => {
                write!(f, "invalid root of unity: conductor {conductor}, unit {unit}")
            }
            Error::ResultantMismatch {
                closed_form,
                sylvester,
            } => write!(
                f,
                "resultant routes disagree: closed form {closed_form}, sylvester {sylvester}"
            ),
            Error::Overflow => write!(f, "exact computation overflowed 128 bits"),
            Error::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for Error {}
