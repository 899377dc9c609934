//! `C_d = gcd(C_{ℓ,d} | ℓ ≠ p)` computed by a certified prime scan, its
//! `p`-part, and the refined tame/wild bounds.
//!
//! The gcd runs over infinitely many primes, so the scan carries a
//! certificate. Correctness lemma, for a prime `q` and `ℓ ≠ q`:
//!
//! * odd `q`: `v_q(ℓ^i - 1) ≥ [ord_q(ℓ) | i]·(1 + v_q(i))`, with equality for
//!   every `i` at once when `ℓ` generates `(Z/q²Z)^×` (lifting the exponent);
//! * `q = 2`: `v_2(ℓ^i - 1)` is `v_2(ℓ - 1) ≥ 1` for odd `i` and
//!   `v_2(ℓ² - 1) + v_2(i) - 1 ≥ 2 + v_2(i)` for even `i`, both minimal
//!   exactly when `ℓ ≡ 3 (mod 8)`.
//!
//! So the minimal `q`-valuation over all `ℓ ≠ p` is attained either at such a
//! witness or at `ℓ = q` itself. Once the scan has seen both, the scanned
//! minimum is the true one and the certificate is stable.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group_orders::{c_ell_d, c_ell_d_valuation};
use crate::numtheory::{
    is_prime, is_primitive_root_mod_square, phi_inverse_set, FactoredInt, NumError, PrimeIter,
};

pub const DEFAULT_SCAN_DEPTH: usize = 100;

const ODD_CLASSES_MOD_8: [u64; 4] = [1, 3, 5, 7];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("scan depth must be at least 2, got {0}")]
    DepthTooSmall(usize),
    #[error("scan for C_{d} (p = {p:?}) did not stabilize within {depth} primes")]
    Unstable {
        d: u32,
        p: Option<u64>,
        depth: usize,
    },
    #[error("the refined bound needs a residue characteristic p")]
    MissingCharacteristic,
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Evidence for one prime `q` dividing the gcd of the first two scanned
/// constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCertificate {
    pub q: u64,
    pub min_valuation: u32,
    /// First scanned `ℓ` at which `min_valuation` was attained.
    pub witness: u64,
    /// First scanned `ℓ` generating `(Z/q²Z)^×` (odd `q` only).
    pub primitive_root_witness: Option<u64>,
    pub settled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCertificate {
    pub d: u32,
    pub excluded_p: Option<u64>,
    pub primes_scanned: usize,
    pub largest_prime_scanned: u64,
    pub candidate_primes_q: Vec<u64>,
    pub witnesses: BTreeMap<u64, u64>,
    pub candidates: Vec<CandidateCertificate>,
    pub stable: bool,
}

/// A scanned `C_d` together with its certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdResult {
    pub value: FactoredInt,
    pub certificate: ScanCertificate,
}

impl CdResult {
    pub fn is_stable(&self) -> bool {
        self.certificate.stable
    }

    /// Fails with [`ScanError::Unstable`] unless the certificate is stable.
    pub fn certified(self, scan_depth: usize) -> Result<Self, ScanError> {
        if self.certificate.stable {
            Ok(self)
        } else {
            Err(ScanError::Unstable {
                d: self.certificate.d,
                p: self.certificate.excluded_p,
                depth: scan_depth,
            })
        }
    }
}

/// gcd of `C_{ℓ,d}` over the first `scan_depth` primes `ℓ ≠ p`.
///
/// The result is always returned; check [`CdResult::is_stable`] (or use
/// [`c_d_certified`]) before treating it as the infinite gcd.
pub fn c_d(d: u32, p: Option<u64>, scan_depth: usize) -> Result<CdResult, ScanError> {
    if scan_depth < 2 {
        return Err(ScanError::DepthTooSmall(scan_depth));
    }
    if let Some(p) = p {
        if !is_prime(p) {
            return Err(NumError::NotPrime(p).into());
        }
    }
    let primes: Vec<u64> = PrimeIter::excluding(p).take(scan_depth).collect();

    let seed = c_ell_d(primes[0], d)?.gcd(&c_ell_d(primes[1], d)?);
    let mut minima: BTreeMap<u64, (u32, u64)> = BTreeMap::new();
    for &q in seed.factors().keys() {
        let v0 = c_ell_d_valuation(primes[0], d, q);
        let v1 = c_ell_d_valuation(primes[1], d, q);
        let best = if v1 < v0 {
            (v1, primes[1])
        } else {
            (v0, primes[0])
        };
        minima.insert(q, best);
    }

    for &ell in &primes[2..] {
        for (&q, slot) in minima.iter_mut() {
            if slot.0 == 0 {
                continue;
            }
            let v = c_ell_d_valuation(ell, d, q);
            if v < slot.0 {
                *slot = (v, ell);
            }
        }
    }

    let scanned: BTreeSet<u64> = primes.iter().copied().collect();
    let classes: BTreeSet<u64> = primes
        .iter()
        .filter(|&&l| l % 2 == 1)
        .map(|l| l % 8)
        .collect();
    let all_classes = ODD_CLASSES_MOD_8.iter().all(|c| classes.contains(c));
    let q_accounted = |q: u64| scanned.contains(&q) || p == Some(q);

    let mut candidates = Vec::with_capacity(minima.len());
    for (&q, &(min_valuation, witness)) in &minima {
        let primitive_root_witness = if q == 2 {
            None
        } else {
            primes
                .iter()
                .copied()
                .find(|&ell| is_primitive_root_mod_square(ell, q))
        };
        let settled = min_valuation == 0
            || q_accounted(q)
                && if q == 2 {
                    all_classes
                } else {
                    primitive_root_witness.is_some()
                };
        candidates.push(CandidateCertificate {
            q,
            min_valuation,
            witness,
            primitive_root_witness,
            settled,
        });
    }

    let value = FactoredInt::from_factors(candidates.iter().map(|c| (c.q, c.min_valuation)))?;
    let certificate = ScanCertificate {
        d,
        excluded_p: p,
        primes_scanned: primes.len(),
        largest_prime_scanned: *primes.last().expect("scan_depth >= 2"),
        candidate_primes_q: minima.keys().copied().collect(),
        witnesses: minima.iter().map(|(&q, &(_, w))| (q, w)).collect(),
        stable: candidates.iter().all(|c| c.settled),
        candidates,
    };
    Ok(CdResult { value, certificate })
}

/// [`c_d`], failing unless the certificate is stable.
pub fn c_d_certified(d: u32, p: Option<u64>, scan_depth: usize) -> Result<CdResult, ScanError> {
    c_d(d, p, scan_depth)?.certified(scan_depth)
}

/// `p^{v_p(C_d)}` with the gcd taken over `ℓ ≠ p`.
pub fn p_part_c_d(d: u32, p: u64, scan_depth: usize) -> Result<FactoredInt, ScanError> {
    Ok(c_d_certified(d, Some(p), scan_depth)?.value.p_part(p))
}

/// Dimension-only bounds on the tame and wild parts of the monodromy image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedBound {
    pub d: u32,
    pub p: u64,
    /// Every `i` with `φ(i) ≤ d`: the possible orders of the tame generator.
    pub tame_set: Vec<u64>,
    pub tame_max: u64,
    /// `lcm(tame_set)`, the conservative exponent bound.
    pub tame_lcm: FactoredInt,
    /// `p^{v_p(C_d)}`.
    pub wild_part: FactoredInt,
    pub wild_trivial: bool,
    /// `p - 1 > d`, the exact condition under which `p ∤ C_d`.
    pub p_exceeds_d_plus_one: bool,
    /// `p < 2d + 1`, the usual threshold for trivial wild action.
    pub p_below_2d_plus_one: bool,
}

pub fn refined_bound(d: u32, p: u64, scan_depth: usize) -> Result<RefinedBound, ScanError> {
    let cd = c_d_certified(d, Some(p), scan_depth)?;
    refined_bound_from(&cd)
}

/// Builds a [`RefinedBound`] from an already certified `C_d` scan.
pub fn refined_bound_from(cd: &CdResult) -> Result<RefinedBound, ScanError> {
    let cert = &cd.certificate;
    let d = cert.d;
    let p = cert.excluded_p.ok_or(ScanError::MissingCharacteristic)?;
    if !cert.stable {
        return Err(ScanError::Unstable {
            d,
            p: Some(p),
            depth: cert.primes_scanned,
        });
    }
    let tame_set = phi_inverse_set(u64::from(d))?;
    let tame_max = *tame_set.last().expect("1 is always present");
    let mut tame_lcm = FactoredInt::one();
    for &i in &tame_set {
        tame_lcm = tame_lcm.lcm(&FactoredInt::from_u64(i)?);
    }
    let wild_part = cd.value.p_part(p);
    Ok(RefinedBound {
        d,
        p,
        tame_max,
        tame_lcm,
        wild_trivial: wild_part.is_one(),
        wild_part,
        p_exceeds_d_plus_one: p - 1 > u64::from(d),
        p_below_2d_plus_one: p < 2 * u64::from(d) + 1,
        tame_set,
    })
}
