//! Betti numbers and section invariants `c_i(X, L)` for projective spaces,
//! smooth hypersurfaces and complete intersections, polarized by `O(1)`.
//!
//! All Chern data of these families are polynomials in the restricted
//! hyperplane class `h`, so the cohomology ring is modelled as `Q[h]/(h^{n+1})`
//! and the pushforward to a point sends `h^n` to `deg X`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::variety_bounds::{VarietyError, VarietyInvariants};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChernError {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("index {i} out of range 1..={max}")]
    IndexOutOfRange { i: u32, max: i64 },
    #[error("constant term {0} is not invertible")]
    NotInvertible(String),
    #[error("expected an integer invariant, got {0}")]
    NonInteger(String),
    #[error(transparent)]
    Variety(#[from] VarietyError),
}

/// A polynomial in `h` truncated above degree `N`, with exact rational
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigRational>,
}

impl TruncSeries {
    pub fn one(truncation: usize) -> Self {
        Self::constant(BigRational::one(), truncation)
    }

    pub fn constant(c: BigRational, truncation: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); truncation + 1];
        coeffs[0] = c;
        TruncSeries { coeffs }
    }

    /// `1 + a·h`.
    pub fn linear(a: i64, truncation: usize) -> Self {
        let mut s = Self::one(truncation);
        if truncation >= 1 {
            s.coeffs[1] = BigRational::from_integer(a.into());
        }
        s
    }

    pub fn from_integers(coeffs: &[i64], truncation: usize) -> Self {
        let mut s = Self::constant(BigRational::zero(), truncation);
        for (slot, &c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = BigRational::from_integer(c.into());
        }
        s
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Multiplication by `h^k`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.truncation();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k <= n {
                coeffs[i + k] = c.clone();
            }
        }
        TruncSeries { coeffs }
    }

    /// Multiplicative inverse; exists iff the constant term is nonzero.
    pub fn inverse(&self) -> Result<Self, ChernError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(ChernError::NotInvertible(a0.to_string()));
        }
        let n = self.truncation();
        let mut inv = vec![BigRational::zero(); n + 1];
        inv[0] = a0.recip();
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                acc += &self.coeffs[i] * &inv[k - i];
            }
            inv[k] = -acc * &inv[0];
        }
        Ok(TruncSeries { coeffs: inv })
    }

    pub fn pow(&self, k: i64) -> Result<Self, ChernError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::one(self.truncation());
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;

    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.truncation().min(rhs.truncation());
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        TruncSeries { coeffs }
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c}h"),
                _ => format!("{c}h^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A smooth member of a standard family, polarized by `O(1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    ProjectiveSpace { n: u32 },
    Hypersurface { n: u32, degree: u32 },
    CompleteIntersection { n: u32, degrees: Vec<u32> },
}

impl FamilySpec {
    pub fn validate(&self) -> Result<(), ChernError> {
        if self.dim() == 0 {
            return Err(ChernError::InvalidFamily(
                "dimension must be at least 1".into(),
            ));
        }
        if self.degrees().contains(&0) {
            return Err(ChernError::InvalidFamily(
                "degrees must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> u32 {
        match self {
            FamilySpec::ProjectiveSpace { n }
            | FamilySpec::Hypersurface { n, .. }
            | FamilySpec::CompleteIntersection { n, .. } => *n,
        }
    }

    /// Degrees of the defining equations (empty for projective space).
    pub fn degrees(&self) -> Vec<u32> {
        match self {
            FamilySpec::ProjectiveSpace { .. } => vec![],
            FamilySpec::Hypersurface { degree, .. } => vec![*degree],
            FamilySpec::CompleteIntersection { degrees, .. } => degrees.clone(),
        }
    }

    pub fn ambient_dim(&self) -> u32 {
        self.dim() + self.degrees().len() as u32
    }

    /// `deg X`, the product of the equation degrees.
    pub fn degree(&self) -> BigInt {
        self.degrees().iter().map(|&d| BigInt::from(d)).product()
    }

    /// The family of a smooth hyperplane section: same equation degrees one
    /// dimension down.
    pub fn hyperplane_section(&self) -> Result<FamilySpec, ChernError> {
        let n = self.dim();
        if n < 2 {
            return Err(ChernError::InvalidFamily(
                "a curve has no positive-dimensional hyperplane section".into(),
            ));
        }
        Ok(match self {
            FamilySpec::ProjectiveSpace { .. } => FamilySpec::ProjectiveSpace { n: n - 1 },
            FamilySpec::Hypersurface { degree, .. } => FamilySpec::Hypersurface {
                n: n - 1,
                degree: *degree,
            },
            FamilySpec::CompleteIntersection { degrees, .. } => FamilySpec::CompleteIntersection {
                n: n - 1,
                degrees: degrees.clone(),
            },
        })
    }
}

/// Total Chern class of the tangent sheaf, `(1+h)^{N+1} / ∏ (1 + δ_k h)`
/// truncated at `h^{dim X}`.
pub fn chern_total_dual_cotangent(spec: &FamilySpec) -> Result<TruncSeries, ChernError> {
    spec.validate()?;
    let n = spec.dim() as usize;
    let mut total = TruncSeries::linear(1, n).pow(i64::from(spec.ambient_dim()) + 1)?;
    for delta in spec.degrees() {
        total = &total * &TruncSeries::linear(i64::from(delta), n).inverse()?;
    }
    Ok(total)
}

// f_*(s) = deg X · (coefficient of h^n).
fn push_forward(spec: &FamilySpec, s: &TruncSeries) -> Result<BigInt, ChernError> {
    let top = s.coeff(spec.dim() as usize) * BigRational::from_integer(spec.degree());
    if !top.is_integer() {
        return Err(ChernError::NonInteger(top.to_string()));
    }
    Ok(top.to_integer())
}

/// `c_i(X, L) = f_*(c(T_X) · c(L)^{-i} · c_1(L)^i)` for `1 ≤ i ≤ n-1`.
pub fn c_invariant(spec: &FamilySpec, i: u32) -> Result<i64, ChernError> {
    spec.validate()?;
    let n = spec.dim();
    if i == 0 || i >= n {
        return Err(ChernError::IndexOutOfRange {
            i,
            max: i64::from(n) - 1,
        });
    }
    let tangent = chern_total_dual_cotangent(spec)?;
    let twist = TruncSeries::linear(1, n as usize).pow(-i64::from(i))?;
    let integrand = (&tangent * &twist).shift(i as usize);
    to_i64(push_forward(spec, &integrand)?)
}

/// `χ(X) = f_*(c_n(T_X))`.
pub fn euler_characteristic(spec: &FamilySpec) -> Result<i64, ChernError> {
    let tangent = chern_total_dual_cotangent(spec)?;
    to_i64(push_forward(spec, &tangent)?)
}

/// `b_1..b_n`: projective-space values below the middle (weak Lefschetz),
/// middle value recovered from the Euler characteristic.
pub fn betti_vector(spec: &FamilySpec) -> Result<Vec<u64>, ChernError> {
    spec.validate()?;
    let n = spec.dim();
    let chi = i128::from(euler_characteristic(spec)?);
    let lower = |i: u32| u64::from(i.is_multiple_of(2));
    let outside_middle: i128 = (0..=2 * n)
        .filter(|&i| i != n)
        .map(|i| {
            let b = i128::from(lower(if i > n { 2 * n - i } else { i }));
            if i % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .sum();
    let middle_sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let middle = middle_sign * (chi - outside_middle);
    let middle = u64::try_from(middle).map_err(|_| ChernError::NonInteger(middle.to_string()))?;
    let mut b: Vec<u64> = (1..n).map(lower).collect();
    b.push(middle);
    Ok(b)
}

/// `(n, b, c)` for the family, ready for the bound computation.
pub fn invariants_of(spec: &FamilySpec) -> Result<VarietyInvariants, ChernError> {
    let n = spec.dim();
    let b = betti_vector(spec)?;
    let c = (1..n)
        .map(|i| c_invariant(spec, i))
        .collect::<Result<Vec<_>, _>>()?;
    let inv = VarietyInvariants::new(n, b, c)?;
    inv.d_vector()?;
    Ok(inv)
}

fn to_i64(x: BigInt) -> Result<i64, ChernError> {
    x.to_i64()
        .ok_or_else(|| ChernError::NonInteger(format!("{x} (out of i64 range)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyper(n: u32, degree: u32) -> FamilySpec {
        FamilySpec::Hypersurface { n, degree }
    }

    fn ints(s: &TruncSeries) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| c.to_integer().to_i64().unwrap())
            .collect()
    }

    #[test]
    fn tangent_classes() {
        let p2 = chern_total_dual_cotangent(&FamilySpec::ProjectiveSpace { n: 2 }).unwrap();
        assert_eq!(ints(&p2), vec![1, 3, 3]);
        assert_eq!(
            ints(&chern_total_dual_cotangent(&hyper(2, 4)).unwrap()),
            vec![1, 0, 6]
        );
        assert_eq!(
            ints(&chern_total_dual_cotangent(&hyper(2, 2)).unwrap()),
            vec![1, 2, 2]
        );
    }

    #[test]
    fn c_invariant_examples() {
        for n in 2..=6 {
            for i in 1..n {
                let c = c_invariant(&FamilySpec::ProjectiveSpace { n }, i).unwrap();
                assert_eq!(c, i64::from(n + 1 - i));
            }
        }
        assert_eq!(c_invariant(&hyper(2, 4), 1), Ok(-4));
        assert_eq!(c_invariant(&hyper(2, 2), 1), Ok(2));
        assert!(matches!(
            c_invariant(&hyper(2, 4), 2),
            Err(ChernError::IndexOutOfRange { i: 2, .. })
        ));
    }

    #[test]
    fn betti_examples() {
        assert_eq!(
            betti_vector(&FamilySpec::ProjectiveSpace { n: 3 }).unwrap(),
            vec![0, 1, 0]
        );
        assert_eq!(betti_vector(&hyper(2, 4)).unwrap(), vec![0, 22]);
        assert_eq!(betti_vector(&hyper(2, 3)).unwrap(), vec![0, 7]);
        assert_eq!(euler_characteristic(&hyper(2, 4)), Ok(24));
    }

    #[test]
    fn invariants_examples() {
        let inv = invariants_of(&FamilySpec::ProjectiveSpace { n: 2 }).unwrap();
        assert_eq!((inv.dim(), inv.b(), inv.c()), (2, &[0, 1][..], &[2][..]));
        let inv = invariants_of(&hyper(2, 4)).unwrap();
        assert_eq!((inv.b(), inv.c()), (&[0, 22][..], &[-4][..]));
        let inv = invariants_of(&FamilySpec::ProjectiveSpace { n: 1 }).unwrap();
        assert_eq!((inv.dim(), inv.b(), inv.c()), (1, &[0][..], &[][..]));
    }

    #[test]
    fn plane_curves_match_genus_formula() {
        for delta in 1..=12i64 {
            let genus = (delta - 1) * (delta - 2) / 2;
            assert_eq!(
                betti_vector(&hyper(1, delta as u32)).unwrap(),
                vec![(2 * genus) as u64]
            );
        }
    }

    #[test]
    fn invalid_families() {
        assert!(invariants_of(&FamilySpec::ProjectiveSpace { n: 0 }).is_err());
        assert!(invariants_of(&hyper(2, 0)).is_err());
        assert!(hyper(1, 3).hyperplane_section().is_err());
    }

    #[test]
    fn series_inversion_is_exact() {
        for delta in 0..=20 {
            for n in 0..=10 {
                let s = TruncSeries::linear(delta, n);
                assert_eq!(&s * &s.inverse().unwrap(), TruncSeries::one(n));
            }
        }
        assert!(TruncSeries::from_integers(&[0, 1], 3).inverse().is_err());
    }

    #[test]
    fn family_json_shape() {
        let json = serde_json::to_string(&hyper(2, 4)).unwrap();
        assert_eq!(json, r#"{"kind":"hypersurface","n":2,"degree":4}"#);
        let ci: FamilySpec =
            serde_json::from_str(r#"{"kind":"complete_intersection","n":1,"degrees":[2,2]}"#)
                .unwrap();
        assert_eq!(ci.ambient_dim(), 3);
    }
}
