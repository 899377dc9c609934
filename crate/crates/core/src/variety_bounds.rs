//! Betti/Chern data of a polarized variety, the middle Betti numbers of its
//! iterated hyperplane sections, and the product bound `C_{b,c,h}`.
//!
//! Only the half Betti vector `b_1..b_n` is stored; `b_0 = 1` (the variety is
//! geometrically connected) and `b_{2n-i} = b_i` (Poincaré duality) fill in
//! the rest on demand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat_bounds::{c_d_certified, CdResult, ScanCertificate, ScanError};
use crate::numtheory::{FactoredInt, NumError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("dimension {n} needs {n} Betti numbers and {} section invariants, got {b_len} and {c_len}", n.saturating_sub(1))]
    ShapeMismatch { n: u32, b_len: usize, c_len: usize },
    #[error(
        "d_{{b,c,{j}}} = {value} is negative; no smooth polarized variety has these invariants"
    )]
    NegativeBetti { j: u32, value: i128 },
    #[error("cannot take a hyperplane section of a variety of dimension {0}")]
    DimensionTooSmall(u32),
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: u32, n: u32 },
    #[error(transparent)]
    Scan(#[from] ScanError),
}

impl From<NumError> for VarietyError {
    fn from(e: NumError) -> Self {
        VarietyError::Scan(e.into())
    }
}

#[derive(Deserialize)]
struct RawInvariants {
    n: u32,
    b: Vec<u64>,
    #[serde(default)]
    c: Vec<i64>,
}

/// `(n, b, c)`: dimension, Betti numbers `b_1..b_n`, and the section
/// invariants `c_1..c_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInvariants")]
pub struct VarietyInvariants {
    n: u32,
    b: Vec<u64>,
    c: Vec<i64>,
}

impl TryFrom<RawInvariants> for VarietyInvariants {
    type Error = VarietyError;

    fn try_from(raw: RawInvariants) -> Result<Self, VarietyError> {
        VarietyInvariants::new(raw.n, raw.b, raw.c)
    }
}

/// `d_{b,c,1..n}`: middle Betti numbers of the `(n-j)`-fold hyperplane
/// sections, validated nonnegative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DVector(Vec<u64>);

impl DVector {
    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// 1-based access matching `d_{b,c,j}`.
    pub fn get(&self, j: u32) -> Option<u64> {
        (j >= 1)
            .then(|| self.0.get(j as usize - 1).copied())
            .flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub d_vector: DVector,
    pub h: u32,
    /// `C_{d_{b,c,j}}` for `j = 1..h`.
    pub factors: Vec<FactoredInt>,
    pub product: FactoredInt,
    pub certificates: Vec<ScanCertificate>,
}

impl VarietyInvariants {
    pub fn new(n: u32, b: Vec<u64>, c: Vec<i64>) -> Result<Self, VarietyError> {
        if n == 0 {
            return Err(VarietyError::ZeroDimension);
        }
        if b.len() != n as usize || c.len() != n as usize - 1 {
            return Err(VarietyError::ShapeMismatch {
                n,
                b_len: b.len(),
                c_len: c.len(),
            });
        }
        Ok(VarietyInvariants { n, b, c })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn c(&self) -> &[i64] {
        &self.c
    }

    /// `b_i` for `0 ≤ i ≤ 2n`, expanded through `b_0 = 1` and duality.
    pub fn betti(&self, i: u32) -> Option<u64> {
        let n = self.n;
        if i > 2 * n {
            return None;
        }
        let i = if i > n { 2 * n - i } else { i };
        Some(if i == 0 { 1 } else { self.b[i as usize - 1] })
    }

    pub fn full_betti(&self) -> Vec<u64> {
        (0..=2 * self.n).map(|i| self.betti(i).unwrap()).collect()
    }

    /// `c_j` for `1 ≤ j ≤ n-1`.
    pub fn c_at(&self, j: u32) -> Option<i64> {
        (j >= 1)
            .then(|| self.c.get(j as usize - 1).copied())
            .flatten()
    }

    // Σ_{i=0}^{k} (-1)^i b_i
    fn alternating_prefix(&self, k: u32) -> i128 {
        (0..=k)
            .map(|i| sign(i) * i128::from(self.betti(i).unwrap()))
            .sum()
    }

    /// The formula values of `d_{b,c,j}` before sign validation.
    pub fn raw_d_vector(&self) -> Vec<i128> {
        let n = self.n;
        (1..=n)
            .map(|j| {
                if j == n {
                    i128::from(self.b[n as usize - 1])
                } else {
                    let c = i128::from(self.c_at(n - j).unwrap());
                    sign(j) * (c - 2 * self.alternating_prefix(j - 1))
                }
            })
            .collect()
    }

    pub fn d_vector(&self) -> Result<DVector, VarietyError> {
        let raw = self.raw_d_vector();
        let mut out = Vec::with_capacity(raw.len());
        for (idx, value) in raw.into_iter().enumerate() {
            if value < 0 {
                return Err(VarietyError::NegativeBetti {
                    j: idx as u32 + 1,
                    value,
                });
            }
            out.push(u64::try_from(value).map_err(|_| NumError::TooLarge(value.to_string()))?);
        }
        Ok(DVector(out))
    }

    /// Euler characteristic of a smooth `j`-fold hyperplane section.
    ///
    /// `j = 0` is `X` itself, `Σ_{i=0}^{2n} (-1)^i b_i`; for `j ≥ 1` it is the
    /// stored `c_j`.
    pub fn euler_char_section(&self, j: u32) -> Result<i128, VarietyError> {
        if j >= self.n {
            return Err(VarietyError::IndexOutOfRange {
                index: j,
                n: self.n,
            });
        }
        if j == 0 {
            Ok(self.alternating_prefix(2 * self.n))
        } else {
            Ok(i128::from(self.c_at(j).unwrap()))
        }
    }

    /// Invariants of a smooth hyperplane section `Y`.
    ///
    /// Below the middle degree the Betti numbers restrict injectively (weak
    /// Lefschetz) and agree; the new middle Betti number is `d_{b,c,n-1}`.
    /// A `j`-fold section of `Y` is a `(j+1)`-fold section of `X`, so
    /// `c̃_j = c_{j+1}`.
    pub fn descend(&self) -> Result<VarietyInvariants, VarietyError> {
        let n = self.n;
        if n < 2 {
            return Err(VarietyError::DimensionTooSmall(n));
        }
        let d = self.d_vector()?;
        let mut b: Vec<u64> = self.b[..n as usize - 2].to_vec();
        b.push(d.get(n - 1).unwrap());
        let c = self.c[1..].to_vec();
        VarietyInvariants::new(n - 1, b, c)
    }

    /// `C_{b,c,h} = ∏_{j=1..h} C_{d_{b,c,j}}` with certified scans over `ℓ ≠ p`.
    pub fn bound(&self, p: u64, h: u32, scan_depth: usize) -> Result<BoundReport, VarietyError> {
        self.bound_with(h, |d| c_d_certified(d, Some(p), scan_depth))
    }

    /// Like [`bound`](Self::bound) with a caller-supplied `C_d` source. The
    /// source must return stable results; unstable ones are rejected.
    pub fn bound_with(
        &self,
        h: u32,
        mut c_d: impl FnMut(u32) -> Result<CdResult, ScanError>,
    ) -> Result<BoundReport, VarietyError> {
        if h == 0 || h > self.n {
            return Err(VarietyError::IndexOutOfRange {
                index: h,
                n: self.n,
            });
        }
        let d_vector = self.d_vector()?;
        let mut memo: BTreeMap<u32, CdResult> = BTreeMap::new();
        let mut factors = Vec::with_capacity(h as usize);
        let mut certificates = Vec::with_capacity(h as usize);
        for &dj in &d_vector.entries()[..h as usize] {
            let dj = u32::try_from(dj).map_err(|_| NumError::TooLarge(dj.to_string()))?;
            if let std::collections::btree_map::Entry::Vacant(e) = memo.entry(dj) {
                let r = c_d(dj)?;
                if !r.is_stable() {
                    return Err(ScanError::Unstable {
                        d: dj,
                        p: r.certificate.excluded_p,
                        depth: r.certificate.primes_scanned,
                    }
                    .into());
                }
                e.insert(r);
            }
            let r = &memo[&dj];
            factors.push(r.value.clone());
            certificates.push(r.certificate.clone());
        }
        let product = factors.iter().product();
        Ok(BoundReport {
            d_vector,
            h,
            factors,
            product,
            certificates,
        })
    }
}

fn sign(i: u32) -> i128 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn p2() -> VarietyInvariants {
        VarietyInvariants::new(2, vec![0, 1], vec![2]).unwrap()
    }

    fn k3() -> VarietyInvariants {
        VarietyInvariants::new(2, vec![0, 22], vec![-4]).unwrap()
    }

    fn p3() -> VarietyInvariants {
        VarietyInvariants::new(3, vec![0, 1, 0], vec![3, 2]).unwrap()
    }

    #[test]
    fn shape_is_checked() {
        assert_eq!(
            VarietyInvariants::new(2, vec![0], vec![2]),
            Err(VarietyError::ShapeMismatch {
                n: 2,
                b_len: 1,
                c_len: 1
            })
        );
        assert_eq!(
            VarietyInvariants::new(0, vec![], vec![]),
            Err(VarietyError::ZeroDimension)
        );
        assert!(serde_json::from_str::<VarietyInvariants>(r#"{"n":2,"b":[0,1]}"#).is_err());
        let curve: VarietyInvariants = serde_json::from_str(r#"{"n":1,"b":[2]}"#).unwrap();
        assert_eq!(curve.c(), &[] as &[i64]);
    }

    #[test]
    fn d_vector_examples() {
        assert_eq!(p2().d_vector().unwrap().entries(), &[0, 1]);
        assert_eq!(k3().d_vector().unwrap().entries(), &[6, 22]);
        let curve = VarietyInvariants::new(1, vec![2], vec![]).unwrap();
        assert_eq!(curve.d_vector().unwrap().entries(), &[2]);
    }

    #[test]
    fn negative_betti_is_rejected() {
        let bad = VarietyInvariants::new(2, vec![0, 1], vec![5]).unwrap();
        assert_eq!(
            bad.d_vector(),
            Err(VarietyError::NegativeBetti { j: 1, value: -3 })
        );
        assert!(matches!(
            bad.bound(5, 2, 100),
            Err(VarietyError::NegativeBetti { .. })
        ));
        assert!(matches!(
            bad.descend(),
            Err(VarietyError::NegativeBetti { .. })
        ));
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(p2().euler_char_section(1), Ok(2));
        assert_eq!(p2().euler_char_section(0), Ok(3));
        assert_eq!(k3().euler_char_section(0), Ok(24));
        assert_eq!(
            p2().euler_char_section(2),
            Err(VarietyError::IndexOutOfRange { index: 2, n: 2 })
        );
        assert_eq!(p2().full_betti(), vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn descend_examples() {
        assert_eq!(
            p2().descend().unwrap(),
            VarietyInvariants::new(1, vec![0], vec![]).unwrap()
        );
        assert_eq!(
            k3().descend().unwrap(),
            VarietyInvariants::new(1, vec![6], vec![]).unwrap()
        );
        assert_eq!(p3().descend().unwrap(), p2());
        let curve = VarietyInvariants::new(1, vec![2], vec![]).unwrap();
        assert_eq!(curve.descend(), Err(VarietyError::DimensionTooSmall(1)));
    }

    #[test]
    fn bound_examples() {
        let r = p2().bound(5, 2, 100).unwrap();
        assert_eq!(r.product.value(), BigUint::from(2u32));
        assert_eq!(r.factors.len(), 2);

        let curve = VarietyInvariants::new(1, vec![2], vec![]).unwrap();
        assert_eq!(
            curve.bound(7, 1, 100).unwrap().product.value(),
            BigUint::from(48u32)
        );

        // P^3 has d-vector (0, 1, 0): every factor is C_0 or C_1 restricted to h = 1.
        assert!(p3().bound(5, 1, 100).unwrap().product.is_one());
        assert!(p2().bound(5, 3, 100).is_err());
    }

    #[test]
    fn bound_rejects_unstable_sources() {
        let err = p2()
            .bound_with(2, |d| crate::compat_bounds::c_d(d, None, 2))
            .unwrap_err();
        assert!(matches!(
            err,
            VarietyError::Scan(ScanError::Unstable { .. })
        ));
    }
}
