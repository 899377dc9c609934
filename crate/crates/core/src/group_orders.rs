//! Orders of `GL_d(F_ℓ)` and `GL_d(Z/4Z)`, the per-prime constants `C_{ℓ,d}`.
//!
//! Outputs stay in factored form: each `ℓ^i - 1` is factored on its own and
//! the pieces are merged, so the full product is never expanded.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numtheory::{factorize_u64, is_prime, FactoredInt, NumError};

/// A request for `C_{ℓ,d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupOrderQuery {
    pub ell: u64,
    pub d: u32,
}

impl GroupOrderQuery {
    pub fn new(ell: u64, d: u32) -> Result<Self, NumError> {
        if !is_prime(ell) {
            return Err(NumError::NotPrime(ell));
        }
        Ok(GroupOrderQuery { ell, d })
    }

    pub fn order(&self) -> Result<FactoredInt, NumError> {
        c_ell_d(self.ell, self.d)
    }
}

/// `|GL_d(F_ℓ)| = ℓ^{d(d-1)/2} · ∏_{i=1..d} (ℓ^i - 1)`.
pub fn order_gl_fq(ell: u64, d: u32) -> Result<FactoredInt, NumError> {
    if !is_prime(ell) {
        return Err(NumError::NotPrime(ell));
    }
    let mut out = FactoredInt::prime_power(ell, d * d.saturating_sub(1) / 2)?;
    let mut cyclotomic = CyclotomicValues::new(ell);
    for i in 1..=d {
        out *= &factor_power_minus_one(ell, i, &mut cyclotomic)?;
    }
    Ok(out)
}

/// `|GL_d(Z/4Z)| = 2^{d²} · |GL_d(F_2)|`; the kernel of reduction mod 2 is
/// `1 + 2·M_d(F_2)`, of order `2^{d²}`.
pub fn order_gl_z4(d: u32) -> Result<FactoredInt, NumError> {
    Ok(&FactoredInt::prime_power(2, d * d)? * &order_gl_fq(2, d)?)
}

/// `C_{ℓ,d}`: `|GL_d(Z/4Z)|` when `ℓ = 2`, `|GL_d(F_ℓ)|` otherwise.
pub fn c_ell_d(ell: u64, d: u32) -> Result<FactoredInt, NumError> {
    if ell == 2 {
        order_gl_z4(d)
    } else {
        order_gl_fq(ell, d)
    }
}

/// Exponent of the prime `q` in `C_{ℓ,d}`, computed without factoring.
pub fn c_ell_d_valuation(ell: u64, d: u32, q: u64) -> u32 {
    if ell == q {
        let unipotent = d * d.saturating_sub(1) / 2;
        return if ell == 2 {
            unipotent + d * d
        } else {
            unipotent
        };
    }
    (1..=d).map(|i| valuation_power_minus_one(ell, i, q)).sum()
}

// v_q(ℓ^i - 1) for ℓ ≠ q.
fn valuation_power_minus_one(ell: u64, i: u32, q: u64) -> u32 {
    let r = ell % q;
    if r == 0 {
        return 0;
    }
    let mut acc = 1u128;
    for _ in 0..i {
        acc = acc * r as u128 % q as u128;
    }
    if acc != 1 {
        return 0;
    }
    let mut x = BigUint::from(ell).pow(i) - 1u32;
    let q = BigUint::from(q);
    let mut v = 0;
    loop {
        let (quot, rem) = (&x / &q, &x % &q);
        if !rem.is_zero() {
            return v;
        }
        x = quot;
        v += 1;
    }
}

fn factor_power_minus_one(
    ell: u64,
    i: u32,
    cyclotomic: &mut CyclotomicValues,
) -> Result<FactoredInt, NumError> {
    if let Some(small) = ell.checked_pow(i) {
        return FactoredInt::from_u64(small - 1);
    }
    // ℓ^i - 1 = ∏_{k | i} Φ_k(ℓ); each cyclotomic value is factored separately.
    let mut out = FactoredInt::one();
    for k in (1..=i).filter(|k| i.is_multiple_of(*k)) {
        let value = cyclotomic.get(k);
        let small = value
            .to_u64()
            .ok_or_else(|| NumError::TooLarge(value.to_string()))?;
        out *= &FactoredInt::from_factors(factorize_u64(small)?)?;
    }
    Ok(out)
}

struct CyclotomicValues {
    ell: BigUint,
    memo: BTreeMap<u32, BigUint>,
}

impl CyclotomicValues {
    fn new(ell: u64) -> Self {
        CyclotomicValues {
            ell: BigUint::from(ell),
            memo: BTreeMap::new(),
        }
    }

    // Φ_k(ℓ) = (ℓ^k - 1) / ∏_{m | k, m < k} Φ_m(ℓ)
    fn get(&mut self, k: u32) -> BigUint {
        if let Some(v) = self.memo.get(&k) {
            return v.clone();
        }
        let mut v = self.ell.pow(k) - BigUint::one();
        for m in (1..k).filter(|m| k.is_multiple_of(*m)) {
            v /= self.get(m);
        }
        self.memo.insert(k, v.clone());
        v
    }
}
