//! Dense polynomials over a prime field `F_p` and the p-main polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::{char_poly, inv_mod_prime, mul_mod, reduce_mod, IntMatrix, IntPoly};
use crate::nt::is_prime_u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the zero polynomial has no square-free part")]
    ZeroPolynomial,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Polynomial over `F_p`, coefficients ascending, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    /// Reduces `coeffs` modulo `p`. `p` is assumed prime.
    pub fn new(p: u64, coeffs: impl IntoIterator<Item = u64>) -> Self {
        let mut f = FpPoly { p, coeffs: coeffs.into_iter().map(|c| c % p).collect() };
        f.normalize();
        f
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64))
    }

    /// Reduces an integer polynomial modulo `p`.
    pub fn from_int_poly(p: u64, f: &IntPoly) -> Self {
        Self::new(p, f.coeffs().iter().map(|c| reduce_mod(c, p)))
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, [1])
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn monic(&self) -> FpPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => {
                let inv = inv_mod_prime(lc, self.p);
                FpPoly::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)))
            }
        }
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        FpPoly::new(p, self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)))
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        assert_eq!(self.p, other.p, "modulus mismatch");
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        FpPoly::new(p, out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert_eq!(self.p, d.p, "modulus mismatch");
        let p = self.p;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod_prime(*d.coeffs.last().unwrap(), p);
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + dd], inv, p);
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mul_mod(c, dc, p)) % p;
            }
        }
        r.truncate(dd);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    /// `f(x) = g(x^p)` implies `f = h^p` with `h(x) = g(x)` over `F_p`.
    fn pth_root(&self) -> FpPoly {
        let p = self.p as usize;
        debug_assert!(self.coeffs.iter().enumerate().all(|(i, &c)| c == 0 || i % p == 0));
        FpPoly::new(self.p, self.coeffs.iter().step_by(p).copied())
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self, self.p)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".into(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Monic gcd by Euclid's algorithm; `gcd(0, 0) = 0`.
pub fn fp_gcd(a: &FpPoly, b: &FpPoly) -> Result<FpPoly, FpError> {
    if a.p != b.p {
        return Err(FpError::ModulusMismatch(a.p, b.p));
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.div_rem(&b).1;
        a = b;
        b = r;
    }
    Ok(a.monic())
}

/// Product of the distinct monic irreducible factors of `f`.
pub fn squarefree_part(f: &FpPoly) -> Result<FpPoly, FpError> {
    if f.is_zero() {
        return Err(FpError::ZeroPolynomial);
    }
    Ok(sfp(&f.monic()))
}

fn sfp(f: &FpPoly) -> FpPoly {
    let p = f.p;
    if f.degree() == Some(0) {
        return FpPoly::one(p);
    }
    let df = f.derivative();
    if df.is_zero() {
        return sfp(&f.pth_root());
    }
    let mut g = fp_gcd(f, &df).expect("same modulus");
    // h collects every irreducible factor whose multiplicity is prime to p.
    let h = f.div_rem(&g).0;
    loop {
        let c = fp_gcd(&g, &h).expect("same modulus");
        if c.degree() == Some(0) {
            break;
        }
        g = g.div_rem(&c).0;
    }
    // What remains of g is a p-th power.
    if g.degree() == Some(0) {
        h
    } else {
        h.mul(&sfp(&g.pth_root()))
    }
}

/// The p-main polynomial `M_p(G; x)`, coefficients in `{0, ..., p-1}`.
///
/// For odd `p` this is `χ(A) / sfp(gcd(χ(A), χ(A+J)))` over `F_p`. For
/// `p = 2` it is `ψ` built from the even-indexed coefficients `c_2, c_4, ...`
/// of `χ(x) = x^n + c_1 x^{n-1} + ... + c_n`, multiplied by `x` when `n` is
/// odd. Both annihilate `e` modulo `p`; that is checked before returning.
pub fn compute_mp(g: &Graph, p: u64) -> Result<FpPoly, FpError> {
    let a = g.adjacency_matrix();
    let chi = char_poly(&a).expect("square");
    compute_mp_with(g, p, &chi)
}

/// As [`compute_mp`], reusing an already computed `χ(A)`.
pub fn compute_mp_with(g: &Graph, p: u64, chi: &IntPoly) -> Result<FpPoly, FpError> {
    if !is_prime_u64(p) {
        return Err(FpError::NotPrime(p));
    }
    let n = g.order();
    let mp = if p == 2 {
        let k = n / 2;
        // c_{2j} is the coefficient of x^{n-2j}.
        let mut coeffs = vec![0u64; k + 1];
        for j in 0..=k {
            coeffs[k - j] = reduce_mod(&chi.coeff(n - 2 * j), 2);
        }
        if n % 2 == 1 {
            coeffs.insert(0, 0);
        }
        FpPoly::new(2, coeffs)
    } else {
        let a = g.adjacency_matrix();
        let aj = IntMatrix::from_fn(n, n, |i, j| &a[(i, j)] + 1);
        let chi_p = FpPoly::from_int_poly(p, chi);
        let chi_j = FpPoly::from_int_poly(p, &char_poly(&aj).expect("square"));
        let s = squarefree_part(&fp_gcd(&chi_p, &chi_j)?)?;
        let (q, r) = chi_p.div_rem(&s);
        if !r.is_zero() {
            return Err(FpError::Inconsistent(format!("sfp does not divide χ modulo {p}")));
        }
        q
    };
    let v = apply_to_ones(g, &mp);
    if v.iter().any(|x| reduce_mod(x, p) != 0) {
        return Err(FpError::Inconsistent(format!("M_{p}(A)e is not zero modulo {p}")));
    }
    Ok(mp)
}

/// `f(A)e` over the integers, with `f`'s coefficients read as `0..p-1`.
pub fn apply_to_ones(g: &Graph, f: &FpPoly) -> Vec<BigInt> {
    let n = g.order();
    let mut acc = vec![BigInt::zero(); n];
    for &c in f.coeffs.iter().rev() {
        acc = g.mul_vec(&acc);
        if c != 0 {
            for x in acc.iter_mut() {
                *x += c;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[i64]) -> FpPoly {
        FpPoly::from_i64(p, c)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(fp_gcd(&fp(5, &[-1, 0, 1]), &fp(5, &[-1, 1])).unwrap(), fp(5, &[4, 1]));
        assert_eq!(fp_gcd(&fp(5, &[2, 0, 2]), &FpPoly::zero(5)).unwrap(), fp(5, &[1, 0, 1]));
        assert_eq!(fp_gcd(&fp(2, &[1, 0, 1]), &fp(2, &[0, 1, 1])).unwrap(), fp(2, &[1, 1]));
        assert_eq!(fp_gcd(&fp(2, &[1]), &fp(3, &[1])), Err(FpError::ModulusMismatch(2, 3)));
    }

    #[test]
    fn squarefree_examples() {
        // (x-1)^2 (x-2) over F_7
        let f = fp(7, &[-1, 1]).mul(&fp(7, &[-1, 1])).mul(&fp(7, &[-2, 1]));
        assert_eq!(squarefree_part(&f).unwrap(), fp(7, &[-1, 1]).mul(&fp(7, &[-2, 1])));
        assert_eq!(squarefree_part(&fp(3, &[0, 0, 1])).unwrap(), fp(3, &[0, 1]));
        // (x+1)^3 = x^3 + 1 over F_3 has zero derivative.
        assert_eq!(squarefree_part(&fp(3, &[1, 0, 0, 1])).unwrap(), fp(3, &[1, 1]));
        // x^2 (x+1)^3 (x+2)^6 over F_3 mixes both branches.
        let cube = fp(3, &[1, 1]).mul(&fp(3, &[1, 1])).mul(&fp(3, &[1, 1]));
        let mut f = fp(3, &[0, 0, 1]).mul(&cube);
        for _ in 0..6 {
            f = f.mul(&fp(3, &[2, 1]));
        }
        let expect = fp(3, &[0, 1]).mul(&fp(3, &[1, 1])).mul(&fp(3, &[2, 1]));
        assert_eq!(squarefree_part(&f).unwrap(), expect);
        assert_eq!(squarefree_part(&FpPoly::zero(3)), Err(FpError::ZeroPolynomial));
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = fp(11, &[3, 1, 4, 1, 5, 9, 2, 6]);
        let b = fp(11, &[2, 7, 1]);
        let (q, r) = a.div_rem(&b);
        let back = q.mul(&b);
        let sum: Vec<u64> =
            (0..8).map(|i| (back.coeffs().get(i).unwrap_or(&0) + r.coeffs().get(i).unwrap_or(&0)) % 11).collect();
        assert_eq!(FpPoly::new(11, sum), a);
        assert!(r.degree().is_none_or(|d| d < 2));
    }

    #[test]
    fn mp_degrees_for_two() {
        for n in 2..=7 {
            let g = crate::graph::random_gnp_half(n, 7).unwrap();
            let m2 = compute_mp(&g, 2).unwrap();
            assert_eq!(m2.degree(), Some(n.div_ceil(2)));
        }
        let k3 = Graph::complete(3).unwrap();
        assert!(compute_mp(&k3, 3).is_ok());
        assert_eq!(compute_mp(&k3, 4), Err(FpError::NotPrime(4)));
    }
}
