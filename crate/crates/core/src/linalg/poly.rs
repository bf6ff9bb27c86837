//! Dense integer polynomials, characteristic polynomials and resultants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{det, IntMatrix, LinalgError};

/// Integer polynomial, coefficients in ascending degree order with no
/// trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct IntPoly {
    #[serde(serialize_with = "crate::serde_big::big_vec")]
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> IntPoly {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn scale(&self, k: &BigInt) -> IntPoly {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    fn div_exact(&self, k: &BigInt) -> IntPoly {
        Self::new(self.coeffs.iter().map(|c| c / k).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `f(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &IntMatrix) -> IntMatrix {
        let n = m.rows();
        let mut acc = IntMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }

    /// `lc(b)^(deg a - deg b + 1) · a mod b`.
    fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree().expect("nonzero divisor");
        let lb = b.leading().unwrap();
        let Some(da) = self.degree() else {
            return IntPoly::zero();
        };
        if da < db {
            return self.clone();
        }
        let mut e = da - db + 1;
        let mut r = self.coeffs.clone();
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let lr = r.last().unwrap().clone();
            for c in r.iter_mut() {
                *c *= lb;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[shift + i] -= &lr * bc;
            }
            e -= 1;
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPoly::new(r).scale(&num_traits::pow(lb.clone(), e))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `det(xI - M)` by the Faddeev–LeVerrier recurrence; every division is exact.
pub fn char_poly(m: &IntMatrix) -> Result<IntPoly, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    // am holds M·M_k, where M_1 = I and M_{k+1} = M·M_k + c_{n-k} I.
    let mut am = m.clone();
    for k in 1..=n {
        let trace: BigInt = (0..n).map(|i| am[(i, i)].clone()).sum();
        let ck = -trace / BigInt::from(k);
        if k < n {
            for i in 0..n {
                am[(i, i)] += &ck;
            }
            am = m.mul(&am);
        }
        c[n - k] = ck;
    }
    Ok(IntPoly::new(c))
}

/// Resultant by the subresultant pseudo-remainder sequence.
pub fn resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return BigInt::zero();
    };
    if db == 0 {
        return num_traits::pow(b.coeffs[0].clone(), da);
    }
    if da == 0 {
        return num_traits::pow(a.coeffs[0].clone(), db);
    }
    let (ca, cb) = (a.content(), b.content());
    let mut a = a.div_exact(&ca);
    let mut b = b.div_exact(&cb);
    let t = num_traits::pow(ca, db) * num_traits::pow(cb, da);
    let mut s = BigInt::one();
    if da < db {
        std::mem::swap(&mut a, &mut b);
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        if r.is_zero() {
            return BigInt::zero();
        }
        b = r.div_exact(&(&g * num_traits::pow(h.clone(), delta)));
        g = a.leading().unwrap().clone();
        h = if delta == 0 { h } else { num_traits::pow(g.clone(), delta) / num_traits::pow(h, delta - 1) };
        if b.degree() == Some(0) {
            break;
        }
    }
    let da = a.degree().unwrap();
    let lb = b.leading().unwrap().clone();
    let h = if da == 0 { h } else { num_traits::pow(lb, da) / num_traits::pow(h, da - 1) };
    s * t * h
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn sylvester_resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    let (Some(m), Some(n)) = (a.degree(), b.degree()) else {
        return BigInt::zero();
    };
    if m + n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut s = IntMatrix::zeros(size, size);
    for r in 0..n {
        for (k, c) in a.coeffs.iter().rev().enumerate() {
            s[(r, r + k)] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in b.coeffs.iter().rev().enumerate() {
            s[(n + r, r + k)] = c.clone();
        }
    }
    det(&s).expect("square")
}

/// `(-1)^(n(n-1)/2) · Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPoly) -> Result<BigInt, LinalgError> {
    let n = f.degree().ok_or(LinalgError::ZeroPolynomial)?;
    if n == 0 {
        return Err(LinalgError::ConstantPolynomial);
    }
    let r = resultant(f, &f.derivative()) / f.leading().unwrap();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
}
