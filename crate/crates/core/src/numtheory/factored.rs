use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, MulAssign};

use num_bigint::BigUint;
use num_traits::One;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use super::primes::{factorize_u64, is_prime};
use super::NumError;

/// A positive integer stored as `prime -> exponent`.
///
/// The empty map is `1`. Keys are always prime and exponents are always
/// positive; every constructor and operation maintains that.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FactoredInt {
    factors: BTreeMap<u64, u32>,
}

impl FactoredInt {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_u64(n: u64) -> Result<Self, NumError> {
        Ok(FactoredInt {
            factors: factorize_u64(n)?,
        })
    }

    pub fn prime_power(p: u64, e: u32) -> Result<Self, NumError> {
        if !is_prime(p) {
            return Err(NumError::NotPrime(p));
        }
        let mut factors = BTreeMap::new();
        if e > 0 {
            factors.insert(p, e);
        }
        Ok(FactoredInt { factors })
    }

    /// Builds from an explicit factor map, checking primality of every key
    /// and dropping zero exponents.
    pub fn from_factors(map: impl IntoIterator<Item = (u64, u32)>) -> Result<Self, NumError> {
        let mut factors = BTreeMap::new();
        for (p, e) in map {
            if !is_prime(p) {
                return Err(NumError::NotPrime(p));
            }
            if e > 0 {
                *factors.entry(p).or_insert(0) += e;
            }
        }
        Ok(FactoredInt { factors })
    }

    pub fn factors(&self) -> &BTreeMap<u64, u32> {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn value(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, (&p, &e)| {
            acc * BigUint::from(p).pow(e)
        })
    }

    /// Number of decimal digits of [`value`](Self::value).
    pub fn decimal_digits(&self) -> usize {
        self.value().to_str_radix(10).len()
    }

    pub fn valuation(&self, q: u64) -> u32 {
        self.factors.get(&q).copied().unwrap_or(0)
    }

    /// The largest power of `q` dividing `self`.
    pub fn p_part(&self, q: u64) -> FactoredInt {
        let mut factors = BTreeMap::new();
        if let Some(&e) = self.factors.get(&q) {
            factors.insert(q, e);
        }
        FactoredInt { factors }
    }

    pub fn gcd(&self, other: &FactoredInt) -> FactoredInt {
        let factors = self
            .factors
            .iter()
            .filter_map(|(p, &e)| other.factors.get(p).map(|&f| (*p, e.min(f))))
            .collect();
        FactoredInt { factors }
    }

    pub fn lcm(&self, other: &FactoredInt) -> FactoredInt {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let slot = factors.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
        FactoredInt { factors }
    }

    pub fn pow(&self, k: u32) -> FactoredInt {
        if k == 0 {
            return FactoredInt::one();
        }
        FactoredInt {
            factors: self.factors.iter().map(|(&p, &e)| (p, e * k)).collect(),
        }
    }

    pub fn divides(&self, other: &FactoredInt) -> bool {
        self.factors.iter().all(|(p, &e)| other.valuation(*p) >= e)
    }

    /// Exact quotient `self / divisor`, or `None` when `divisor ∤ self`.
    pub fn checked_div(&self, divisor: &FactoredInt) -> Option<FactoredInt> {
        if !divisor.divides(self) {
            return None;
        }
        let factors = self
            .factors
            .iter()
            .filter_map(|(&p, &e)| {
                let rest = e - divisor.valuation(p);
                (rest > 0).then_some((p, rest))
            })
            .collect();
        Some(FactoredInt { factors })
    }
}

impl Mul<&FactoredInt> for &FactoredInt {
    type Output = FactoredInt;

    fn mul(self, rhs: &FactoredInt) -> FactoredInt {
        let mut out = self.clone();
        out *= rhs;
        out
    }
}

impl Mul for FactoredInt {
    type Output = FactoredInt;

    fn mul(mut self, rhs: FactoredInt) -> FactoredInt {
        self *= &rhs;
        self
    }
}

// Exponents add under multiplication.
#[allow(clippy::suspicious_op_assign_impl)]
impl MulAssign<&FactoredInt> for FactoredInt {
    fn mul_assign(&mut self, rhs: &FactoredInt) {
        for (&p, &e) in &rhs.factors {
            *self.factors.entry(p).or_insert(0) += e;
        }
    }
}

impl std::iter::Product for FactoredInt {
    fn product<I: Iterator<Item = FactoredInt>>(iter: I) -> Self {
        iter.fold(FactoredInt::one(), |acc, x| acc * x)
    }
}

impl<'a> std::iter::Product<&'a FactoredInt> for FactoredInt {
    fn product<I: Iterator<Item = &'a FactoredInt>>(iter: I) -> Self {
        iter.fold(FactoredInt::one(), |mut acc, x| {
            acc *= x;
            acc
        })
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in &self.factors {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

// Serialized as a JSON object `{"2": 4, "3": 1}` in increasing prime order.
impl Serialize for FactoredInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.factors.len()))?;
        for (p, e) in &self.factors {
            map.serialize_entry(&p.to_string(), e)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FactoredInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct FactorsVisitor;

        impl<'de> Visitor<'de> for FactorsVisitor {
            type Value = FactoredInt;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from prime (as a string) to exponent")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<FactoredInt, A::Error> {
                let mut pairs = Vec::new();
                while let Some((k, e)) = access.next_entry::<String, u32>()? {
                    let p: u64 = k
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad prime key {k:?}")))?;
                    pairs.push((p, e));
                }
                FactoredInt::from_factors(pairs).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_map(FactorsVisitor)
    }
}
