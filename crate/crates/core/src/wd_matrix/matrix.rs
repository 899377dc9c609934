use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::WdError;

/// A square matrix with exact rational entries, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<String>>", into = "Vec<Vec<String>>")]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational, WdError> {
    BigRational::from_str(s.trim()).map_err(|_| WdError::Parse(format!("bad rational {s:?}")))
}

pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, WdError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(WdError::Empty);
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(WdError::NotSquare);
        }
        Ok(RationalMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, WdError> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.as_ref()
                        .iter()
                        .map(|&x| BigRational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, BigRational::one())
    }

    pub fn zero(dim: usize) -> Self {
        RationalMatrix {
            dim,
            entries: vec![BigRational::zero(); dim * dim],
        }
    }

    pub fn scalar(dim: usize, c: BigRational) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = c.clone();
        }
        m
    }

    pub fn diagonal(values: &[BigRational]) -> Self {
        let mut m = Self::zero(values.len());
        for (i, v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigRational>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn trace(&self) -> BigRational {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        self.pow_big(&BigUint::from(k))
    }

    pub fn pow_big(&self, k: &BigUint) -> Self {
        let mut acc = Self::identity(self.dim);
        for bit in (0..k.bits()).rev() {
            acc = &acc * &acc;
            if k.bit(bit) {
                acc = &acc * self;
            }
        }
        acc
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        (self * other) == (other * self)
    }

    /// Gauss-Jordan inverse, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col).recip();
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let f = a.get(r, col).clone();
                    a.sub_row_multiple(r, col, &f);
                    inv.sub_row_multiple(r, col, &f);
                }
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.dim;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a.get(col, col).clone();
            det *= &p;
            for r in col + 1..n {
                if !a.get(r, col).is_zero() {
                    let f = a.get(r, col) / &p;
                    a.sub_row_multiple(r, col, &f);
                }
            }
        }
        det
    }

    /// Monic characteristic polynomial `det(xI - M)`, ascending coefficients,
    /// via Faddeev-LeVerrier.
    pub fn char_poly(&self) -> Vec<BigRational> {
        let n = self.dim;
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut m = Self::zero(n);
        for k in 1..=n {
            m = &(self * &m) + &Self::scalar(n, coeffs[n - k + 1].clone());
            let t = (self * &m).trace();
            coeffs[n - k] = -t / BigRational::from_integer(BigInt::from(k));
        }
        coeffs
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.dim {
            self.entries.swap(a * self.dim + j, b * self.dim + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &BigRational) {
        for j in 0..self.dim {
            self.entries[r * self.dim + j] *= c;
        }
    }

    // row[r] -= f * row[src]
    fn sub_row_multiple(&mut self, r: usize, src: usize, f: &BigRational) {
        for j in 0..self.dim {
            let delta = f * &self.entries[src * self.dim + j];
            self.entries[r * self.dim + j] -= delta;
        }
    }
}

impl TryFrom<Vec<Vec<String>>> for RationalMatrix {
    type Error = WdError;

    fn try_from(rows: Vec<Vec<String>>) -> Result<Self, WdError> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        RationalMatrix::from_rows(parsed)
    }
}

impl From<RationalMatrix> for Vec<Vec<String>> {
    fn from(m: RationalMatrix) -> Self {
        m.entries
            .chunks(m.dim)
            .map(|r| r.iter().map(format_rational).collect())
            .collect()
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;

    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = RationalMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;

    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        RationalMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;

    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        RationalMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &RationalMatrix {
    type Output = RationalMatrix;

    fn neg(self) -> RationalMatrix {
        RationalMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_integers(rows).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert_eq!(RationalMatrix::from_rows(vec![]), Err(WdError::Empty));
        assert_eq!(
            RationalMatrix::from_integers(&[vec![1, 2], vec![3]]),
            Err(WdError::NotSquare)
        );
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.determinant(), BigRational::one());
        assert!((&a * &a.inverse().unwrap()).is_identity());
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert!(m(&[&[0, 1], &[1, 0]]).determinant() == BigRational::from_integer((-1).into()));
    }

    #[test]
    fn characteristic_polynomial() {
        // [[2,1],[0,3]] -> (x-2)(x-3) = 6 - 5x + x²
        let cp = m(&[&[2, 1], &[0, 3]]).char_poly();
        let ints: Vec<BigRational> = [6, -5, 1]
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        assert_eq!(cp, ints);
    }

    #[test]
    fn json_round_trip() {
        let mut a = m(&[&[1, -1], &[0, 1]]);
        a.set(0, 1, parse_rational("-1/2").unwrap());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"[["1","-1/2"],["0","1"]]"#);
        assert_eq!(serde_json::from_str::<RationalMatrix>(&json).unwrap(), a);
        assert!(serde_json::from_str::<RationalMatrix>(r#"[["1/0"]]"#).is_err());
        assert!(serde_json::from_str::<RationalMatrix>(r#"[["x"]]"#).is_err());
    }

    #[test]
    fn powers() {
        let rot = m(&[&[0, -1], &[1, 0]]);
        assert!(rot.pow(4).is_identity());
        assert!(!rot.pow(2).is_identity());
        assert!(rot.pow(0).is_identity());
    }
}
