//! The master system: linear congruences modulo each `p^t`, the Chinese
//! remainder combination, and integral lifting to perfect representatives.
//!
//! A solution `x` satisfies `(W^(p))^T x ≡ 0 (mod p^t)` for every potential
//! prime, `e^T x = L`, `x^T x = L^2` and `x^T A x = 0`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::level::{LevelBound, PotentialPrime};
use crate::linalg::{local_smith, IntMatrix};
use crate::serde_big;

/// Largest supported level bound. Solution entries are bounded by `L` in
/// absolute value, so `L < 2^50` keeps every inner product well inside `i128`.
pub const MAX_LEVEL_BITS: u64 = 50;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverError {
    /// A count exceeded the cap; `prime` is absent for the CRT product.
    #[error("complexity cap {cap} exceeded: {count} candidates{}", prime.map(|p| format!(" modulo powers of {p}")).unwrap_or_default())]
    Overflow {
        prime: Option<u64>,
        #[serde(serialize_with = "serde_big::big")]
        count: BigInt,
        cap: u64,
    },
    #[error("moduli {a} and {b} are not coprime")]
    NotCoprime { a: String, b: String },
    #[error("level bound {0} is too large for exact search")]
    LevelTooLarge(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// A vector of residues modulo `modulus`, entries in `0..modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueVector {
    pub modulus: BigInt,
    pub entries: Vec<BigInt>,
}

impl ResidueVector {
    pub fn new(modulus: BigInt, entries: impl IntoIterator<Item = BigInt>) -> Self {
        let entries = entries.into_iter().map(|x| x.mod_floor(&modulus)).collect();
        ResidueVector { modulus, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

/// An integral solution of the master system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SolutionVector(pub Vec<i64>);

impl SolutionVector {
    pub fn dot(&self, other: &SolutionVector) -> i128 {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a as i128 * b as i128).sum()
    }

    /// `A x` for the graph's adjacency matrix.
    pub fn apply(&self, g: &Graph) -> Vec<i64> {
        (0..g.order()).map(|i| g.neighbors(i).map(|j| self.0[j]).sum()).collect()
    }

    /// `x^T A x`.
    pub fn quadratic(&self, g: &Graph) -> i128 {
        dot_i64(&self.0, &self.apply(g))
    }
}

fn dot_i64(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// All `ξ (mod p^t)` with `Wp^T ξ ≡ 0`, `ξ^T ξ ≡ 0` and `ξ^T A ξ ≡ 0`.
///
/// The linear solutions are `V y` where `U Wp^T V` is the Smith form modulo
/// `p^t` and `y_i = k_i p^{t - a_i}` with `k_i < p^{a_i}`. They are
/// enumerated with `k` in lexicographic order (first coordinate most
/// significant), then filtered by the two quadratic congruences. Fails with
/// [`SolverError::Overflow`] if the linear count exceeds `cap`.
pub fn solve_prime_system(
    wp: &IntMatrix,
    g: &Graph,
    p: u64,
    t: u32,
    cap: u64,
) -> Result<Vec<ResidueVector>, SolverError> {
    Ok(solve_prime_system_counted(wp, g, p, t, cap)?.0)
}

/// As [`solve_prime_system`], also returning `log_p` of the linear count.
pub fn solve_prime_system_counted(
    wp: &IntMatrix,
    g: &Graph,
    p: u64,
    t: u32,
    cap: u64,
) -> Result<(Vec<ResidueVector>, u32), SolverError> {
    let modulus = num_traits::pow(BigInt::from(p), t as usize);
    let q = modulus
        .to_i64()
        .filter(|&q| q < 1 << MAX_LEVEL_BITS)
        .ok_or_else(|| SolverError::LevelTooLarge(modulus.to_string()))?;
    let n = g.order();
    let ls = local_smith(&wp.transpose(), &BigInt::from(p), t, true);
    let v = ls.v.expect("requested V");
    let log_count: u32 = ls.valuations.iter().sum();
    let count = num_traits::pow(BigInt::from(p), log_count as usize);
    if count > BigInt::from(cap) {
        return Err(SolverError::Overflow { prime: Some(p), count, cap });
    }
    // Generators p^{t-a_i} V e_i and their orders p^{a_i}.
    let mut gens: Vec<(Vec<i64>, i64)> = Vec::new();
    for (i, &a) in ls.valuations.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let step = BigInt::from(p).pow(t - a);
        let col: Vec<i64> =
            (0..n).map(|r| (&v[(r, i)] * &step).mod_floor(&modulus).to_i64().expect("below q")).collect();
        gens.push((col, (p as i64).pow(a)));
    }
    let mut out = Vec::new();
    let mut k = vec![0i64; gens.len()];
    let mut x = vec![0i64; n];
    loop {
        if quadratic_ok(&x, g, q) {
            out.push(ResidueVector { modulus: modulus.clone(), entries: x.iter().map(|&y| BigInt::from(y)).collect() });
        }
        // Odometer increment, last coordinate fastest.
        let mut pos = gens.len();
        loop {
            if pos == 0 {
                return Ok((out, log_count));
            }
            pos -= 1;
            let (col, order) = &gens[pos];
            k[pos] += 1;
            if k[pos] < *order {
                for (xi, c) in x.iter_mut().zip(col) {
                    *xi = (*xi + c) % q;
                }
                break;
            }
            // order * col ≡ 0, so one more step returns this coordinate to zero.
            k[pos] = 0;
            for (xi, c) in x.iter_mut().zip(col) {
                *xi = (*xi + c) % q;
            }
        }
    }
}

fn quadratic_ok(x: &[i64], g: &Graph, q: i64) -> bool {
    let q = q as i128;
    let norm: i128 = x.iter().map(|&a| a as i128 * a as i128 % q).sum();
    if norm % q != 0 {
        return false;
    }
    let ax: Vec<i64> =
        (0..g.order()).map(|i| (g.neighbors(i).map(|j| x[j] as i128).sum::<i128>() % q) as i64).collect();
    let quad: i128 = x.iter().zip(&ax).map(|(&a, &b)| a as i128 * b as i128 % q).sum();
    quad % q == 0
}

/// Entrywise Chinese remainder combination of residue vectors with pairwise
/// coprime moduli.
pub fn crt_combine(parts: &[ResidueVector]) -> Result<ResidueVector, SolverError> {
    let Some(first) = parts.first() else {
        return Err(SolverError::Inconsistent("no residue vectors to combine".into()));
    };
    let mut acc = first.clone();
    for part in &parts[1..] {
        let (m1, m2) = (&acc.modulus, &part.modulus);
        if !m1.gcd(m2).is_one() {
            return Err(SolverError::NotCoprime { a: m1.to_string(), b: m2.to_string() });
        }
        let m = m1 * m2;
        // c1 ≡ 1 (mod m1), c1 ≡ 0 (mod m2), and symmetrically for c2.
        let c1 = m2 * m2.modinv(m1).unwrap_or_default();
        let c2 = m1 * m1.modinv(m2).unwrap_or_default();
        let entries = acc.entries.iter().zip(&part.entries).map(|(a, b)| a * &c1 + b * &c2);
        acc = ResidueVector::new(m, entries.collect::<Vec<_>>());
    }
    Ok(acc)
}

/// Every perfect `L`-representative `w` of `eta` with `w^T A w = 0`.
///
/// The zero class gives the trivial solutions `L e^(k)`. Otherwise every
/// perfect representative differs from the shortest representative `u` in at
/// most three nonzero positions, each moved by `L` towards the opposite sign.
pub fn perfect_representatives(eta: &[i64], g: &Graph, l: i64) -> Vec<SolutionVector> {
    let n = eta.len();
    if l == 1 || eta.iter().all(|&x| x.rem_euclid(l) == 0) {
        return (0..n)
            .map(|k| {
                let mut x = vec![0; n];
                x[k] = l;
                SolutionVector(x)
            })
            .collect();
    }
    let u: Vec<i64> = eta
        .iter()
        .map(|&x| {
            let r = x.rem_euclid(l);
            if 2 * r > l {
                r - l
            } else {
                r
            }
        })
        .collect();
    let l2 = l as i128 * l as i128;
    let norm: i128 = u.iter().map(|&x| x as i128 * x as i128).sum();
    let sum: i128 = u.iter().map(|&x| x as i128).sum();
    if norm > l2 || (sum - l as i128).abs() > 3 * l as i128 {
        return Vec::new();
    }
    // e^T w = L forces (L - e^T u) / L = (#negatives moved) - (#positives moved).
    if (l as i128 - sum) % l as i128 != 0 {
        return Vec::new();
    }
    let balance = ((l as i128 - sum) / l as i128) as i32;
    if balance.abs() > 3 {
        return Vec::new();
    }
    // Moving u_i changes the squared norm by L^2 - 2L|u_i|.
    let support: Vec<usize> = (0..n).filter(|&i| u[i] != 0).collect();
    let gain = |i: usize| l2 - 2 * l as i128 * u[i].unsigned_abs() as i128;
    let sign = |i: usize| if u[i] > 0 { -1 } else { 1 };
    let target = l2 - norm;
    let mut out = Vec::new();
    let mut emit = |moved: &[usize]| {
        let mut w = u.clone();
        for &i in moved {
            w[i] += if u[i] > 0 { -l } else { l };
        }
        let w = SolutionVector(w);
        if w.quadratic(g) == 0 {
            out.push(w);
        }
    };
    let q = support.len();
    if balance == 0 && target == 0 {
        emit(&[]);
    }
    for a in 0..q {
        let (i, gi, si) = (support[a], gain(support[a]), sign(support[a]));
        if si == balance && gi == target {
            emit(&[i]);
        }
        for b in a + 1..q {
            let (j, gj, sj) = (support[b], gain(support[b]), sign(support[b]));
            if si + sj == balance && gi + gj == target {
                emit(&[i, j]);
            }
            if (si + sj - balance).abs() > 1 {
                continue;
            }
            for &k in &support[b + 1..] {
                if si + sj + sign(k) == balance && gi + gj + gain(k) == target {
                    emit(&[i, j, k]);
                }
            }
        }
    }
    out
}

/// Solves the master system for `G` at level bound `lb`.
///
/// Trivial solutions `L e^(k)` come first in vertex order, followed by the
/// nontrivial ones in ascending order. Every solution is re-verified against
/// all constraints before returning.
pub fn solve_master(g: &Graph, lb: &LevelBound, cap: u64) -> Result<Vec<SolutionVector>, SolverError> {
    Ok(solve_master_traced(g, lb, cap)?.solutions)
}

/// Intermediate counts from [`solve_master_traced`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct SolverTrace {
    /// Per potential prime: `(p, linear count exponent, filtered count)`.
    pub step1: Vec<(u64, u32, usize)>,
    /// `|Π_1 × ... × Π_s|`.
    pub product: u64,
    pub l: i64,
    pub solutions: Vec<SolutionVector>,
}

pub fn solve_master_traced(g: &Graph, lb: &LevelBound, cap: u64) -> Result<SolverTrace, SolverError> {
    let n = g.order();
    if lb.l.bits() > MAX_LEVEL_BITS {
        return Err(SolverError::LevelTooLarge(lb.l.to_string()));
    }
    let l = lb.l.to_i64().expect("checked size");
    if l == 1 {
        let solutions = perfect_representatives(&vec![0; n], g, 1);
        return Ok(SolverTrace { step1: Vec::new(), product: 1, l, solutions });
    }
    let mut step1 = Vec::new();
    let mut sets: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut product = BigInt::one();
    for pp in &lb.primes {
        let (set, log_count) = solve_prime_system_counted(&pp.matrix, g, pp.p, pp.t, cap)?;
        if log_count != pp.det_ord {
            return Err(SolverError::Inconsistent(format!(
                "linear solutions modulo {}^{} number {}^{log_count}, expected {}^{}",
                pp.p, pp.t, pp.p, pp.p, pp.det_ord
            )));
        }
        step1.push((pp.p, log_count, set.len()));
        product *= set.len();
        if product > BigInt::from(cap) {
            return Err(SolverError::Overflow { prime: None, count: product, cap });
        }
        sets.push(set.into_iter().map(|r| r.entries.iter().map(|x| x.to_i64().unwrap()).collect()).collect());
    }
    let product = product.to_u64().expect("below cap");
    // eta = sum c_i xi_i (mod L) with c_i ≡ δ_ij (mod p_j^{t_j}).
    let coeffs: Vec<i64> = lb
        .primes
        .iter()
        .map(|pp| {
            let m = BigInt::from(pp.p).pow(pp.t);
            let rest = &lb.l / &m;
            (&rest * rest.modinv(&m).expect("coprime")).mod_floor(&lb.l).to_i64().unwrap()
        })
        .collect();
    let radices: Vec<usize> = sets.iter().map(Vec::len).collect();
    let found: Vec<Vec<SolutionVector>> = (0..product as usize)
        .into_par_iter()
        .map(|mut idx| {
            let mut eta = vec![0i128; n];
            for s in (0..sets.len()).rev() {
                let xi = &sets[s][idx % radices[s]];
                idx /= radices[s];
                for (e, &x) in eta.iter_mut().zip(xi) {
                    *e += coeffs[s] as i128 * x as i128;
                }
            }
            let eta: Vec<i64> = eta.iter().map(|&e| e.rem_euclid(l as i128) as i64).collect();
            if eta.iter().all(|&x| x == 0) {
                Vec::new()
            } else {
                perfect_representatives(&eta, g, l)
            }
        })
        .collect();
    let nontrivial: BTreeSet<SolutionVector> = found.into_iter().flatten().collect();
    let mut solutions = perfect_representatives(&vec![0; n], g, l);
    solutions.extend(nontrivial);
    for x in &solutions {
        verify_solution(x, g, lb)?;
    }
    Ok(SolverTrace { step1, product, l, solutions })
}

/// Checks every constraint of the master system for `x`.
pub fn verify_solution(x: &SolutionVector, g: &Graph, lb: &LevelBound) -> Result<(), SolverError> {
    let l = lb.l.to_i64().ok_or_else(|| SolverError::LevelTooLarge(lb.l.to_string()))?;
    let bad = |what: &str| Err(SolverError::Inconsistent(format!("solution {:?} violates {what}", x.0)));
    if x.0.iter().map(|&v| v as i128).sum::<i128>() != l as i128 {
        return bad("e^T x = L");
    }
    if x.dot(x) != l as i128 * l as i128 {
        return bad("x^T x = L^2");
    }
    if x.quadratic(g) != 0 {
        return bad("x^T A x = 0");
    }
    for pp in &lb.primes {
        if !congruence_holds(pp, x) {
            return bad(&format!("the congruence modulo {}^{}", pp.p, pp.t));
        }
    }
    Ok(())
}

fn congruence_holds(pp: &PotentialPrime, x: &SolutionVector) -> bool {
    let m = BigInt::from(pp.p).pow(pp.t);
    let xb: Vec<BigInt> = x.0.iter().map(|&v| BigInt::from(v)).collect();
    pp.matrix.transpose().mul_vec(&xb).iter().all(|r| (r % &m).is_zero())
}
