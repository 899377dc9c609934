use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use super::NumError;

// Deterministic for every n < 2^64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin primality test over the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Brent's variant of Pollard rho. `n` must be odd and composite.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut q) = (2u64, 2u64, 1u64);
        let mut g = 1u64;
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = (r - k).min(128);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            // Backtrack one step at a time.
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Full prime factorization of a positive machine integer as `prime -> exponent`.
pub fn factorize_u64(n: u64) -> Result<BTreeMap<u64, u32>, NumError> {
    if n == 0 {
        return Err(NumError::Zero);
    }
    let mut out = BTreeMap::new();
    let mut n = n;
    for &p in &SMALL_PRIMES {
        while n.is_multiple_of(p) {
            n /= p;
            *out.entry(p).or_insert(0) += 1;
        }
    }
    factor_into(n, &mut out);
    Ok(out)
}

/// `true` when `ell` generates `(Z/q²Z)^×`.
///
/// Equivalent to `ell` being a primitive root modulo `q` with
/// `ell^(q-1) ≢ 1 (mod q²)`. Only meaningful for odd primes `q`.
pub fn is_primitive_root_mod_square(ell: u64, q: u64) -> bool {
    if q < 3 || ell.is_multiple_of(q) {
        return false;
    }
    let order = q - 1;
    let Ok(factors) = factorize_u64(order) else {
        return false;
    };
    if factors.keys().any(|&r| pow_mod(ell % q, order / r, q) == 1) {
        return false;
    }
    let modulus = BigUint::from(q) * BigUint::from(q);
    BigUint::from(ell).modpow(&BigUint::from(order), &modulus) != BigUint::from(1u32)
}

/// Primes in increasing order, skipping an exclusion set.
///
/// Models the index set "every prime ℓ different from the residue
/// characteristic" over which the per-prime constants are combined.
#[derive(Debug, Clone)]
pub struct PrimeIter {
    exclusions: BTreeSet<u64>,
    next: u64,
}

impl PrimeIter {
    pub fn new() -> Self {
        Self::excluding(std::iter::empty())
    }

    pub fn excluding(exclusions: impl IntoIterator<Item = u64>) -> Self {
        PrimeIter {
            exclusions: exclusions.into_iter().collect(),
            next: 2,
        }
    }

    pub fn exclusions(&self) -> &BTreeSet<u64> {
        &self.exclusions
    }
}

impl Default for PrimeIter {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PrimeIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let candidate = self.next;
            self.next = candidate.checked_add(if candidate == 2 { 1 } else { 2 })?;
            if is_prime(candidate) && !self.exclusions.contains(&candidate) {
                return Some(candidate);
            }
        }
    }
}
