//! Fraction-free elimination: determinants and ranks.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{IntMatrix, LinalgError};
use crate::nt::is_prime_u64;

/// Largest prime below 2^61, used for the rank fast path.
const RANK_PRIME: u64 = (1 << 61) - 1;

/// One Bareiss step on rows `from..rows` and columns `col+1..cols`, pivoting
/// on `(pivot_row, col)`.
fn bareiss_step(a: &mut IntMatrix, pivot_row: usize, col: usize, prev: &BigInt) {
    let pivot = a[(pivot_row, col)].clone();
    let cols = a.cols();
    let pivot_tail: Vec<BigInt> = a.row(pivot_row)[col + 1..].to_vec();
    for i in pivot_row + 1..a.rows() {
        let lead = std::mem::take(&mut a[(i, col)]);
        for (j, pj) in (col + 1..cols).zip(&pivot_tail) {
            let cell = &mut a[(i, j)];
            let mut v = &*cell * &pivot;
            if !lead.is_zero() {
                v -= &lead * pj;
            }
            if !prev.is_one() {
                v /= prev;
            }
            *cell = v;
        }
    }
}

/// Exact determinant by Bareiss elimination.
pub fn det(m: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[(i, k)].is_zero()) else {
            return Ok(BigInt::zero());
        };
        if p != k {
            a.swap_rows(p, k);
            negate = !negate;
        }
        if k + 1 < n {
            bareiss_step(&mut a, k, k, &prev);
            prev = a[(k, k)].clone();
        }
    }
    let d = a[(n - 1, n - 1)].clone();
    Ok(if negate { -d } else { d })
}

/// `(det M, D M^{-1})` by fraction-free Gauss–Jordan elimination on
/// `[M | I]`, where `D = ±det M`; `None` if `M` is singular.
///
/// Every intermediate entry is a minor of the augmented matrix, so all
/// divisions are exact.
pub fn scaled_inverse(m: &IntMatrix) -> Result<Option<(BigInt, IntMatrix)>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let w = 2 * n;
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(None);
        };
        a.swap(p, k);
        let pivot_row = a[k].clone();
        let pivot = &pivot_row[k];
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let lead = std::mem::take(&mut row[k]);
            for j in (k + 1)..w {
                let mut v = &row[j] * pivot;
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    v -= &lead * &pivot_row[j];
                }
                if !prev.is_one() {
                    v /= &prev;
                }
                row[j] = v;
            }
        }
        prev = pivot.clone();
    }
    let d = prev;
    let inv = IntMatrix::from_fn(n, n, |i, j| a[i][n + j].clone());
    Ok(Some((d, inv)))
}

/// Rank over the rationals.
///
/// A rank modulo a large fixed prime never exceeds the rational rank, so a
/// full mod-p rank is returned directly; otherwise fraction-free row echelon
/// elimination decides.
pub fn rank_exact(m: &IntMatrix) -> usize {
    let full = m.rows().min(m.cols());
    if full == 0 {
        return 0;
    }
    if rank_mod_prime(m, RANK_PRIME) == full {
        return full;
    }
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(p) = (r..a.rows()).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        bareiss_step(&mut a, r, c, &prev);
        prev = a[(r, c)].clone();
        r += 1;
    }
    r
}

/// Rank over `F_p`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize, LinalgError> {
    if !is_prime_u64(p) {
        return Err(LinalgError::NotPrime(p));
    }
    Ok(rank_mod_prime(m, p))
}

pub(crate) fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r.is_negative() { r + p } else { r };
    r.to_u64().expect("residue fits u64")
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod_prime(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn rank_mod_prime(m: &IntMatrix, p: u64) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<u64>> = (0..rows).map(|i| m.row(i).iter().map(|x| reduce_mod(x, p)).collect()).collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(piv, r);
        let inv = inv_mod_prime(a[r][c], p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest {
            if row[c] == 0 {
                continue;
            }
            let f = mul_mod(row[c], inv, p);
            for (x, &y) in row[c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                *x = (*x + p - mul_mod(f, y, p)) % p;
            }
        }
        r += 1;
    }
    r
}
