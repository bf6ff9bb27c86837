//! Smith normal form over the integers and over `Z/p^k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{det, scaled_inverse, IntMatrix};

/// `U·M·V = diag(invariants)` with `U`, `V` unimodular (when requested).
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    /// `d_1 | d_2 | ... | d_r` followed by zeros; length `min(rows, cols)`.
    pub invariants: Vec<BigInt>,
    pub rank: usize,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
}

impl SmithDecomposition {
    /// Largest nonzero invariant factor, or zero for the zero matrix.
    pub fn last_invariant(&self) -> BigInt {
        if self.rank == 0 {
            BigInt::zero()
        } else {
            self.invariants[self.rank - 1].clone()
        }
    }
}

/// `(|det M|, d_n(M))` for a square nonsingular `M`, `None` otherwise.
///
/// The last invariant factor is `|det M|` divided by the gcd of the
/// `(n-1)`-minors, which are the entries of the adjugate.
pub fn largest_invariant(m: &IntMatrix) -> Option<(BigInt, BigInt)> {
    let (d, scaled) = scaled_inverse(m).ok()??;
    let d = d.abs();
    let g = (0..scaled.rows()).flat_map(|i| scaled.row(i).to_vec()).fold(d.clone(), |g, x| g.gcd(&x));
    let dn = &d / &g;
    Some((d, dn))
}

struct Reducer<'a> {
    a: &'a mut IntMatrix,
    u: Option<&'a mut IntMatrix>,
    v: Option<&'a mut IntMatrix>,
    modulus: Option<BigInt>,
}

impl Reducer<'_> {
    fn reduce(&self, x: &mut BigInt) {
        if let Some(m) = &self.modulus {
            let mut r = x.mod_floor(m);
            if &r + &r > *m {
                r -= m;
            }
            *x = r;
        }
    }

    /// `row[i] -= q * row[t]`
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        let cols = self.a.cols();
        for j in 0..cols {
            let s = q * &self.a[(t, j)];
            if s.is_zero() {
                continue;
            }
            let mut x = &self.a[(i, j)] - s;
            self.reduce(&mut x);
            self.a[(i, j)] = x;
        }
        if let Some(u) = self.u.as_deref_mut() {
            for j in 0..u.cols() {
                let s = q * &u[(t, j)];
                u[(i, j)] -= s;
            }
        }
    }

    /// `col[j] -= q * col[t]`
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        let rows = self.a.rows();
        for i in 0..rows {
            let s = q * &self.a[(i, t)];
            if s.is_zero() {
                continue;
            }
            let mut x = &self.a[(i, j)] - s;
            self.reduce(&mut x);
            self.a[(i, j)] = x;
        }
        if let Some(v) = self.v.as_deref_mut() {
            for i in 0..v.rows() {
                let s = q * &v[(i, t)];
                v[(i, j)] -= s;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap_rows(i, k);
        if let Some(u) = self.u.as_deref_mut() {
            u.swap_rows(i, k);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        self.a.swap_cols(j, k);
        if let Some(v) = self.v.as_deref_mut() {
            v.swap_cols(j, k);
        }
    }

    fn negate_row(&mut self, t: usize) {
        for j in 0..self.a.cols() {
            let x = -std::mem::take(&mut self.a[(t, j)]);
            self.a[(t, j)] = x;
        }
        if let Some(u) = self.u.as_deref_mut() {
            for j in 0..u.cols() {
                let x = -std::mem::take(&mut u[(t, j)]);
                u[(t, j)] = x;
            }
        }
    }

    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, _, b)| x.abs() < *b) {
                    let mag = x.abs();
                    let unit = mag.is_one();
                    best = Some((i, j, mag));
                    if unit {
                        break;
                    }
                }
            }
            if best.as_ref().is_some_and(|(_, _, b)| b.is_one()) {
                break;
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Diagonalizes `a` in place; returns the number of nonzero pivots.
    fn run(&mut self) -> usize {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        let mut t = 0;
        while t < rows.min(cols) {
            let Some((pi, pj)) = self.min_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if self.a[(i, t)].is_zero() {
                        continue;
                    }
                    let q = &self.a[(i, t)] / &self.a[(t, t)];
                    self.row_sub(i, t, &q);
                    clean &= self.a[(i, t)].is_zero();
                }
                for j in t + 1..cols {
                    if self.a[(t, j)].is_zero() {
                        continue;
                    }
                    let q = &self.a[(t, j)] / &self.a[(t, t)];
                    self.col_sub(j, t, &q);
                    clean &= self.a[(t, j)].is_zero();
                }
                if !clean {
                    // A smaller remainder is now in row or column t.
                    let (pi, pj) = self.min_pivot_cross(t);
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                let pivot = self.a[(t, t)].clone();
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&pivot)));
                match bad {
                    Some(i) => {
                        let one = -BigInt::one();
                        self.row_sub(t, i, &one);
                    }
                    None => break,
                }
            }
            if self.a[(t, t)].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }

    /// Smallest nonzero entry in row `t` or column `t` (the pivot included).
    fn min_pivot_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t, self.a[(t, t)].abs());
        for i in t + 1..self.a.rows() {
            let x = self.a[(i, t)].abs();
            if !x.is_zero() && x < best.2 {
                best = (i, t, x);
            }
        }
        for j in t + 1..self.a.cols() {
            let x = self.a[(t, j)].abs();
            if !x.is_zero() && x < best.2 {
                best = (t, j, x);
            }
        }
        (best.0, best.1)
    }
}

/// Smith normal form of an integer matrix.
///
/// Pivots on the entry of least absolute value. With `transforms` the
/// unimodular `U` and `V` are accumulated. Without them, a nonsingular square
/// input is reduced modulo its determinant `D`: the column lattice of `M`
/// contains `D·Z^n`, so entries may be reduced mod `D` freely and the
/// invariant factors are recovered as `gcd(pivot, D)`.
pub fn smith_normal_form(m: &IntMatrix, transforms: bool) -> SmithDecomposition {
    let mut a = m.clone();
    if !transforms && m.is_square() && m.rows() > 0 {
        let d = det(m).expect("square").abs();
        if !d.is_zero() {
            let n = m.rows();
            for x in a.data_mut() {
                *x = x.mod_floor(&d);
            }
            let pivots = Reducer { a: &mut a, u: None, v: None, modulus: Some(d.clone()) }.run();
            let invariants: Vec<BigInt> =
                (0..n).map(|t| if t < pivots { a[(t, t)].gcd(&d) } else { d.clone() }).collect();
            debug_assert_eq!(invariants.iter().product::<BigInt>(), d);
            return SmithDecomposition { invariants, rank: n, u: None, v: None };
        }
    }
    let (mut u, mut v) = if transforms {
        (Some(IntMatrix::identity(m.rows())), Some(IntMatrix::identity(m.cols())))
    } else {
        (None, None)
    };
    let rank = Reducer { a: &mut a, u: u.as_mut(), v: v.as_mut(), modulus: None }.run();
    let invariants =
        (0..m.rows().min(m.cols())).map(|t| if t < rank { a[(t, t)].clone() } else { BigInt::zero() }).collect();
    SmithDecomposition { invariants, rank, u, v }
}

/// `ord_p(x)` for nonzero `x`, by repeated exact division.
pub fn ord_p(x: &BigInt, p: &BigInt) -> u32 {
    assert!(!x.is_zero(), "ord_p of zero");
    let mut x = x.abs();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        x = q;
        k += 1;
    }
}

/// Smith form over the local ring `Z/p^k`.
#[derive(Clone, Debug)]
pub struct LocalSmith {
    pub modulus: BigInt,
    /// `ord_p` of each diagonal entry, capped at `k` (entries that vanish
    /// modulo `p^k`). Nondecreasing.
    pub valuations: Vec<u32>,
    /// Column transform, invertible modulo `p^k`, entries in `[0, p^k)`.
    pub v: Option<IntMatrix>,
}

/// Diagonalizes `m` over `Z/p^k` as `U·M·V ≡ diag(u_i p^{a_i})` with units
/// `u_i`. The valuations `a_i` equal `min(k, ord_p(d_i))` for the integer
/// invariant factors `d_i` of `M`.
pub fn local_smith(m: &IntMatrix, p: &BigInt, k: u32, want_v: bool) -> LocalSmith {
    let q = num_traits::pow(p.clone(), k as usize);
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    for x in a.data_mut() {
        *x = x.mod_floor(&q);
    }
    let mut v = want_v.then(|| IntMatrix::identity(cols));
    let val = |x: &BigInt| -> u32 {
        if x.is_zero() {
            return k;
        }
        ord_p(x, p).min(k)
    };
    let mut valuations = vec![k; rows.min(cols)];
    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, u32)> = None;
        'scan: for i in t..rows {
            for j in t..cols {
                let e = val(&a[(i, j)]);
                if e < k && best.is_none_or(|b| e < b.2) {
                    best = Some((i, j, e));
                    if e == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj, e)) = best else {
            break;
        };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }
        let pe = num_traits::pow(p.clone(), e as usize);
        let unit = &a[(t, t)] / &pe;
        let inv = unit.modinv(&q).expect("unit modulo p^k");
        for i in t + 1..rows {
            if a[(i, t)].is_zero() {
                continue;
            }
            let f = (&a[(i, t)] / &pe * &inv).mod_floor(&q);
            for j in t..cols {
                let s = &f * &a[(t, j)];
                a[(i, j)] = (&a[(i, j)] - s).mod_floor(&q);
            }
        }
        for j in t + 1..cols {
            if a[(t, j)].is_zero() {
                continue;
            }
            let f = (&a[(t, j)] / &pe * &inv).mod_floor(&q);
            for i in 0..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let s = &f * &a[(i, t)];
                a[(i, j)] = (&a[(i, j)] - s).mod_floor(&q);
            }
            if let Some(v) = v.as_mut() {
                for i in 0..cols {
                    let s = &f * &v[(i, t)];
                    v[(i, j)] = (&v[(i, j)] - s).mod_floor(&q);
                }
            }
        }
        valuations[t] = e;
    }
    LocalSmith { modulus: q, valuations, v }
}
