//! Exact matrix model of a single monodromy operator `ρ(s)` on `V`.
//!
//! Provides the unipotence test, the Jordan-Chevalley split `M = S·U`, the
//! quasi-unipotence test, the trace criterion (for quasi-unipotent `M`,
//! `Tr M = dim V` iff `M` is unipotent), and the Weil-Deligne pair
//! `(r, N)` with `M = r·exp(τN)`.
//!
//! The ℓ-adic lattice arguments are not modelled; everything here is the
//! algebra over `Q`.

mod matrix;
pub mod poly;

pub use matrix::{format_rational, parse_rational, RationalMatrix};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numtheory::phi_inverse_set;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WdError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is singular")]
    SingularInput,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("tau must be nonzero")]
    ZeroTau,
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("Newton iteration did not converge within {0} steps")]
    NewtonDidNotConverge(usize),
    #[error("{0}")]
    Parse(String),
}

/// `M = S·U = U·S` with `S` semisimple and `U` unipotent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanChevalley {
    pub semisimple: RationalMatrix,
    pub unipotent: RationalMatrix,
}

/// `(r, N, τ)`: finite-order `r`, nilpotent `N` commuting with it, and the
/// scalar `τ` with `M = r·exp(τN)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WDPair {
    pub r: RationalMatrix,
    #[serde(rename = "n")]
    pub nilpotent: RationalMatrix,
    #[serde(with = "rational_string")]
    pub tau: BigRational,
}

impl WDPair {
    /// `r·exp(τN)`.
    pub fn reconstruct(&self) -> RationalMatrix {
        let exp = nilpotent_exp(&self.nilpotent.scale(&self.tau)).expect("N is nilpotent");
        &self.r * &exp
    }
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub fn is_nilpotent(n: &RationalMatrix) -> bool {
    n.pow(n.dim() as u64).is_zero()
}

/// `(M - I)^d = 0`.
pub fn is_unipotent(m: &RationalMatrix) -> bool {
    is_nilpotent(&(m - &RationalMatrix::identity(m.dim())))
}

/// Newton iteration `S ← S - g(S)·g'(S)^{-1}` from `S = M`, with `g` the
/// squarefree part of the characteristic polynomial. Converges
/// quadratically, so `dim` steps always suffice.
pub fn jordan_chevalley(m: &RationalMatrix) -> Result<JordanChevalley, WdError> {
    if m.determinant().is_zero() {
        return Err(WdError::SingularInput);
    }
    let g = poly::squarefree_part(&m.char_poly());
    let g_prime = poly::derivative(&g);
    let cap = m.dim();
    let mut s = m.clone();
    let mut steps = 0;
    loop {
        let gs = poly::eval_matrix(&g, &s);
        if gs.is_zero() {
            break;
        }
        if steps == cap {
            return Err(WdError::NewtonDidNotConverge(cap));
        }
        let dg = poly::eval_matrix(&g_prime, &s)
            .inverse()
            .ok_or(WdError::NewtonDidNotConverge(steps))?;
        s = &s - &(&gs * &dg);
        steps += 1;
    }
    // S has the eigenvalues of M, so it is invertible.
    let unipotent = &s.inverse().expect("S is invertible") * m;
    Ok(JordanChevalley {
        semisimple: s,
        unipotent,
    })
}

/// `lcm{ i : φ(i) ≤ d }`: every finite-order rational `d × d` matrix has
/// order dividing this.
pub fn root_of_unity_exponent(d: usize) -> BigUint {
    phi_inverse_set(d as u64)
        .expect("d >= 1")
        .into_iter()
        .fold(BigUint::one(), |acc, i| acc.lcm(&BigUint::from(i)))
}

// Necessary conditions for every eigenvalue to be a root of unity: monic
// integral characteristic polynomial with constant term ±1 and
// |c_k| ≤ C(d, k). Screens out inputs whose powers would blow up.
fn char_poly_admissible(m: &RationalMatrix) -> bool {
    let cp = m.char_poly();
    let d = m.dim();
    if cp.iter().any(|c| !c.is_integer()) {
        return false;
    }
    if cp[0].numer().magnitude() != &BigUint::one() {
        return false;
    }
    let mut binom = BigUint::one();
    for (k, c) in cp.iter().enumerate() {
        if c.numer().magnitude() > &binom {
            return false;
        }
        binom = binom * BigUint::from(d - k) / BigUint::from(k + 1);
    }
    true
}

/// `true` iff the semisimple part has finite order (every eigenvalue of `M`
/// is a root of unity).
pub fn is_quasi_unipotent(m: &RationalMatrix) -> Result<bool, WdError> {
    let jc = jordan_chevalley(m)?;
    if !char_poly_admissible(m) {
        return Ok(false);
    }
    Ok(jc
        .semisimple
        .pow_big(&root_of_unity_exponent(m.dim()))
        .is_identity())
}

/// Exact multiplicative order of the semisimple part, `None` if infinite.
pub fn semisimple_order(m: &RationalMatrix) -> Result<Option<BigUint>, WdError> {
    if !is_quasi_unipotent(m)? {
        return Ok(None);
    }
    let s = jordan_chevalley(m)?.semisimple;
    let mut order = root_of_unity_exponent(m.dim());
    let primes: Vec<u64> = phi_inverse_set(m.dim() as u64)
        .expect("d >= 1")
        .into_iter()
        .filter(|&i| crate::numtheory::is_prime(i))
        .collect();
    for q in primes {
        let q = BigUint::from(q);
        while (&order % &q).is_zero() && s.pow_big(&(&order / &q)).is_identity() {
            order /= &q;
        }
    }
    Ok(Some(order))
}

/// For quasi-unipotent `M`: `Tr M = d`, which coincides with `M` unipotent.
pub fn trace_criterion(m: &RationalMatrix) -> Result<bool, WdError> {
    if !is_quasi_unipotent(m)? {
        return Err(WdError::PreconditionViolated(
            "trace criterion needs a quasi-unipotent matrix".into(),
        ));
    }
    Ok(m.trace() == BigRational::from_integer(m.dim().into()))
}

/// `log U = Σ_{k=1}^{d-1} (-1)^{k+1} (U - I)^k / k`, a finite sum.
pub fn nilpotent_log(u: &RationalMatrix) -> Result<RationalMatrix, WdError> {
    let x = u - &RationalMatrix::identity(u.dim());
    if !is_nilpotent(&x) {
        return Err(WdError::NotUnipotent);
    }
    let mut out = RationalMatrix::zero(u.dim());
    let mut power = x.clone();
    for k in 1..u.dim() {
        let mut coeff = BigRational::new(1.into(), k.into());
        if k % 2 == 0 {
            coeff = -coeff;
        }
        out = &out + &power.scale(&coeff);
        power = &power * &x;
    }
    Ok(out)
}

/// `exp N = Σ_{k=0}^{d-1} N^k / k!`, a finite sum.
pub fn nilpotent_exp(n: &RationalMatrix) -> Result<RationalMatrix, WdError> {
    if !is_nilpotent(n) {
        return Err(WdError::NotNilpotent);
    }
    let mut out = RationalMatrix::identity(n.dim());
    let mut term = RationalMatrix::identity(n.dim());
    for k in 1..n.dim() {
        term = (&term * n).scale(&BigRational::new(1.into(), k.into()));
        out = &out + &term;
    }
    Ok(out)
}

/// `r = S`, `N = τ^{-1}·log U` for `M = S·U`.
pub fn wd_pair(m: &RationalMatrix, tau: &BigRational) -> Result<WDPair, WdError> {
    if tau.is_zero() {
        return Err(WdError::ZeroTau);
    }
    if !is_quasi_unipotent(m)? {
        return Err(WdError::PreconditionViolated(
            "Weil-Deligne pair needs a quasi-unipotent matrix".into(),
        ));
    }
    let jc = jordan_chevalley(m)?;
    let nilpotent = nilpotent_log(&jc.unipotent)?.scale(&tau.recip());
    Ok(WDPair {
        r: jc.semisimple,
        nilpotent,
        tau: tau.clone(),
    })
}
