//! Test-only oracles. Nothing here calls into the code paths it checks.
#![allow(dead_code)]

use monobound::chern_invariants::{betti_vector, FamilySpec};
use monobound::wd_matrix::RationalMatrix;
use num_rational::BigRational;
use rand::Rng;

/// Number of invertible `d × d` matrices over `Z/mZ`, by enumerating all
/// `m^{d²}` matrices and testing the determinant for a unit.
pub fn brute_force_gl_count(m: u64, d: usize) -> u64 {
    if d == 0 {
        return 1;
    }
    let cells = d * d;
    let total = m.pow(cells as u32);
    let perms = permutations(d);
    let mut entries = vec![0u64; cells];
    let mut count = 0;
    for idx in 0..total {
        let mut x = idx;
        for e in entries.iter_mut() {
            *e = x % m;
            x /= m;
        }
        let det = leibniz_det_mod(&entries, d, m, &perms);
        if num_integer::gcd(det, m) == 1 {
            count += 1;
        }
    }
    count
}

fn permutations(d: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out.into_iter()
        .map(|p| {
            let inversions = (0..d)
                .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            (p, inversions % 2 == 1)
        })
        .collect()
}

fn leibniz_det_mod(a: &[u64], d: usize, m: u64, perms: &[(Vec<usize>, bool)]) -> u64 {
    let mut acc = 0u64;
    for (p, odd) in perms {
        let term = (0..d).fold(1u64, |t, i| t * a[i * d + p[i]] % m);
        acc = if *odd {
            (acc + m - term) % m
        } else {
            (acc + term) % m
        };
    }
    acc
}

/// Minkowski-type closed form for `gcd_{ℓ≠p} C_{ℓ,d}`: exponent of odd `q` is
/// `Σ_{k≥0} ⌊d / ((q-1)q^k)⌋`; exponent of 2 is `d + ⌊d/2⌋ + Σ_{k≥1} ⌊d/2^k⌋`.
pub fn closed_form_c_d(d: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for q in 2..=d + 1 {
        if !(2..q).all(|r| q % r != 0) {
            continue;
        }
        let e = if q == 2 {
            let mut e = d + d / 2;
            let mut pk = 2;
            while pk <= d {
                e += d / pk;
                pk *= 2;
            }
            e
        } else {
            let mut e = 0;
            let mut denom = q - 1;
            while denom <= d {
                e += d / denom;
                denom *= q;
            }
            e
        };
        if e > 0 {
            out.push((q, e));
        }
    }
    out
}

fn brute_phi(i: u64) -> u64 {
    (1..=i).filter(|&k| num_integer::gcd(k, i) == 1).count() as u64
}

/// Integer coefficients of the cyclotomic polynomial `Φ_i`, ascending.
pub fn cyclotomic(i: u64) -> Vec<i64> {
    // x^i - 1 divided by Φ_j for every proper divisor j.
    let mut num = vec![0i64; i as usize + 1];
    num[0] = -1;
    num[i as usize] = 1;
    for j in (1..i).filter(|j| i.is_multiple_of(*j)) {
        num = exact_div(&num, &cyclotomic(j));
    }
    num
}

fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![0i64; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = rem[k + db] / b[db];
        q[k] = c;
        for (t, &bc) in b.iter().enumerate() {
            rem[k + t] -= c * bc;
        }
    }
    assert!(rem.iter().all(|&x| x == 0), "inexact division");
    q
}

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn companion(poly: &[i64]) -> Vec<Vec<i64>> {
    let k = poly.len() - 1;
    let mut c = vec![vec![0i64; k]; k];
    for i in 1..k {
        c[i][i - 1] = 1;
    }
    for i in 0..k {
        c[i][k - 1] = -poly[i];
    }
    c
}

/// A generated quasi-unipotent matrix `M = P·S₀·U₀·P⁻¹` together with its
/// known semisimple and unipotent parts.
pub struct QuasiUnipotentCase {
    pub m: RationalMatrix,
    pub semisimple: RationalMatrix,
    pub unipotent: RationalMatrix,
    /// Order of the semisimple part, the lcm of the chosen root-of-unity orders.
    pub order: u64,
}

/// Builds `S₀ = ⊕ (I_m ⊗ C_i)` from companion matrices of cyclotomic
/// polynomials and `N₀ = ⊕ (J ⊗ I_k)` with `J` strictly upper triangular,
/// so `S₀` and `U₀ = I + N₀` commute by construction, then conjugates by a
/// random integer matrix.
pub fn random_quasi_unipotent<R: Rng>(rng: &mut R, d: usize) -> QuasiUnipotentCase {
    let orders: Vec<u64> = (1..=2 * (d as u64) * (d as u64))
        .filter(|&i| brute_phi(i) <= d as u64)
        .collect();
    let force_unipotent = rng.gen_bool(0.35);
    let mut s0 = vec![vec![0i64; d]; d];
    let mut n0 = vec![vec![0i64; d]; d];
    let mut offset = 0;
    let mut order = 1u64;
    while offset < d {
        let remaining = d - offset;
        let choices: Vec<u64> = orders
            .iter()
            .copied()
            .filter(|&i| brute_phi(i) as usize <= remaining)
            .collect();
        let i = if force_unipotent {
            1
        } else {
            choices[rng.gen_range(0..choices.len())]
        };
        order = num_integer::lcm(order, i);
        let c = companion(&cyclotomic(i));
        let k = c.len();
        let mult = rng.gen_range(1..=remaining / k);
        for b in 0..mult {
            for r in 0..k {
                for col in 0..k {
                    s0[offset + b * k + r][offset + b * k + col] = c[r][col];
                }
            }
        }
        // J ⊗ I_k with J strictly upper triangular.
        for b1 in 0..mult {
            for b2 in b1 + 1..mult {
                let j = rng.gen_range(-2..=2);
                for r in 0..k {
                    n0[offset + b1 * k + r][offset + b2 * k + r] = j;
                }
            }
        }
        offset += mult * k;
    }
    let s0 = RationalMatrix::from_integers(&s0).unwrap();
    let n0 = RationalMatrix::from_integers(&n0).unwrap();
    let u0 = &RationalMatrix::identity(d) + &n0;
    let p = loop {
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let p = RationalMatrix::from_integers(&rows).unwrap();
        if let Some(inv) = p.inverse() {
            break (p, inv);
        }
    };
    let conj = |x: &RationalMatrix| &(&p.0 * x) * &p.1;
    let semisimple = conj(&s0);
    let unipotent = conj(&u0);
    QuasiUnipotentCase {
        m: &semisimple * &unipotent,
        semisimple,
        unipotent,
        order,
    }
}

/// `true` when `target` lies in the span of `basis` (all as flat vectors).
pub fn in_span(basis: &[Vec<BigRational>], target: &[BigRational]) -> bool {
    use num_traits::Zero;
    let rank = |cols: &[Vec<BigRational>]| -> usize {
        if cols.is_empty() {
            return 0;
        }
        let rows = cols[0].len();
        let mut a: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        let ncols = cols.len();
        let mut rank = 0;
        for col in 0..ncols {
            let Some(piv) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, piv);
            for r in 0..rows {
                if r != rank && !a[r][col].is_zero() {
                    let f = &a[r][col] / &a[rank][col];
                    let pivot_row = a[rank].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    };
    let mut with = basis.to_vec();
    with.push(target.to_vec());
    rank(basis) == rank(&with)
}

/// Projective spaces up to dimension 6, hypersurfaces up to dimension 4 and
/// degree 6, and codimension-two complete intersections up to dimension 4.
pub fn families() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push(FamilySpec::ProjectiveSpace { n });
    }
    for n in 1..=4 {
        for degree in 1..=6 {
            out.push(FamilySpec::Hypersurface { n, degree });
        }
    }
    for n in 1..=4 {
        for a in 1..=4 {
            for b in a..=4 {
                out.push(FamilySpec::CompleteIntersection {
                    n,
                    degrees: vec![a, b],
                });
            }
        }
    }
    out
}

/// Σ (-1)^i b_i over the full Betti vector.
pub fn signed_betti_sum(spec: &FamilySpec) -> i64 {
    let b = betti_vector(spec).unwrap();
    let n = spec.dim() as usize;
    (0..=2 * n)
        .map(|i| {
            let k = if i > n { 2 * n - i } else { i };
            let bi = if k == 0 { 1 } else { b[k - 1] as i64 };
            if i % 2 == 0 {
                bi
            } else {
                -bi
            }
        })
        .sum()
}
