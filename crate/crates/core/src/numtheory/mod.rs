//! Exact integer primitives: primality, factorization into [`FactoredInt`],
//! p-adic valuations, and the Euler totient together with its bounded
//! inverse enumeration.
//!
//! Every bound constant in this crate is carried as a [`FactoredInt`]. The
//! values get astronomically large quickly (a middle Betti number of 22
//! already produces a constant with dozens of digits) while their prime
//! support stays tiny.

mod factored;
mod primes;
mod totient;

pub use factored::FactoredInt;
pub use primes::{factorize_u64, is_prime, is_primitive_root_mod_square, PrimeIter};
pub use totient::{euler_phi, phi_inverse_bound, phi_inverse_set};

use thiserror::Error;

/// Errors raised by the integer primitives.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("zero is not a valid input here")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("integer {0} exceeds the supported 64-bit factorization range")]
    TooLarge(String),
}

/// Exact `q`-adic valuation of a positive machine integer.
pub fn valuation(n: u64, q: u64) -> Result<u32, NumError> {
    if n == 0 {
        return Err(NumError::Zero);
    }
    if !is_prime(q) {
        return Err(NumError::NotPrime(q));
    }
    let mut n = n;
    let mut v = 0;
    while n.is_multiple_of(q) {
        n /= q;
        v += 1;
    }
    Ok(v)
}

/// Keywise minimum of exponents.
pub fn gcd_factored(a: &FactoredInt, b: &FactoredInt) -> FactoredInt {
    a.gcd(b)
}
