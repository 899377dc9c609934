use super::primes::factorize_u64;
use super::NumError;

/// Euler's totient, the number of units modulo `i`.
pub fn euler_phi(i: u64) -> Result<u64, NumError> {
    let factors = factorize_u64(i)?;
    Ok(factors
        .iter()
        .map(|(&p, &e)| (p - 1) * p.pow(e - 1))
        .product())
}

/// Upper end of the search range for [`phi_inverse_set`].
///
/// `φ(i) ≥ √(i/2)` for every `i ≥ 1`, so `φ(i) ≤ d` forces `i ≤ 2d²`.
pub fn phi_inverse_bound(d: u64) -> u64 {
    2 * d * d
}

/// All `i ≥ 1` with `φ(i) ≤ d`, sorted ascending.
///
/// These are exactly the possible orders of a root of unity that can be an
/// eigenvalue of a rational `d × d` matrix, since such an eigenvalue has a
/// minimal polynomial `Φ_i` of degree `φ(i)`.
pub fn phi_inverse_set(d: u64) -> Result<Vec<u64>, NumError> {
    if d == 0 {
        return Err(NumError::Zero);
    }
    let mut out = Vec::new();
    for i in 1..=phi_inverse_bound(d) {
        if euler_phi(i)? <= d {
            out.push(i);
        }
    }
    Ok(out)
}
