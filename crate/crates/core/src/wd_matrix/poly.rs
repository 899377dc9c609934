//! Dense univariate polynomials over `Q`, ascending coefficients, no trailing
//! zeros. Just enough to take the squarefree part of a characteristic
//! polynomial and evaluate it at a matrix.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RationalMatrix;

pub type Poly = Vec<BigRational>;

pub fn normalize(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn derivative(p: &[BigRational]) -> Poly {
    normalize(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer(k.into()))
            .collect(),
    )
}

/// Quotient and remainder of `a / b`; `b` must be nonzero.
pub fn div_rem(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let b = normalize(b.to_vec());
    let lead = b.last().expect("division by the zero polynomial").clone();
    let mut rem = normalize(a.to_vec());
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let f = rem.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            rem[shift + i] -= &f * c;
        }
        quot[shift] = f;
        rem = normalize(rem);
    }
    (normalize(quot), rem)
}

fn monic(p: Poly) -> Poly {
    match p.last() {
        Some(lead) if !lead.is_one() => {
            let lead = lead.clone();
            p.into_iter().map(|c| c / &lead).collect()
        }
        _ => p,
    }
}

/// Monic greatest common divisor.
pub fn gcd(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut a = normalize(a.to_vec());
    let mut b = normalize(b.to_vec());
    while !b.is_empty() {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// `p / gcd(p, p')`: same roots as `p`, each with multiplicity one.
pub fn squarefree_part(p: &[BigRational]) -> Poly {
    let g = gcd(p, &derivative(p));
    monic(div_rem(p, &g).0)
}

/// Horner evaluation `p(M)`.
pub fn eval_matrix(p: &[BigRational], m: &RationalMatrix) -> RationalMatrix {
    let mut acc = RationalMatrix::zero(m.dim());
    for c in p.iter().rev() {
        acc = &(&acc * m) + &RationalMatrix::scalar(m.dim(), c.clone());
    }
    acc
}
