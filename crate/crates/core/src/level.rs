//! Potential primes and the level bound `L`.
//!
//! Every rational regular orthogonal `Q` relating `G` to a generalized
//! cospectral mate has a level dividing `L = prod p^t`. Candidates are 2 and
//! the odd primes `p | gcd(Δ, d)` with `p^2 | Δ`; each exponent is
//! `t = ord_p(d_n(W^(p)))`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fp::{compute_mp_with, FpPoly};
use crate::graph::Graph;
use crate::linalg::{char_poly, discriminant, largest_invariant, ord_p, IntMatrix, IntPoly};
use crate::nt::{factor, DEFAULT_RHO_BUDGET};
use crate::serde_big;
use crate::walk::{modified_walk_matrix_with, Controllability, WalkData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("graph is neither controllable nor almost controllable")]
    Unsupported,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Why a candidate prime was ruled out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EliminationRule {
    /// `p` does not divide `d`, so the walk matrix is invertible modulo `p`.
    CoprimeToWalkDeterminant,
    /// `p | gcd(Δ, d)` but `p^2` does not divide `Δ`.
    DiscriminantNotSquareDivisible,
    /// `ord_p(d_n(W^(p))) = 0`.
    ZeroExponent,
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminatedPrime {
    #[serde(serialize_with = "serde_big::big")]
    pub p: BigInt,
    pub rule: EliminationRule,
}

/// A prime that survives elimination.
#[derive(Clone, Debug, Serialize)]
pub struct PotentialPrime {
    pub p: u64,
    /// `ord_p(d_n(W^(p)))`, at least 1.
    pub t: u32,
    /// `d_n(W^(p))`.
    #[serde(serialize_with = "serde_big::big")]
    pub dn: BigInt,
    /// `ord_p(det W^(p))`; the linear congruence has `p^det_ord` solutions.
    pub det_ord: u32,
    /// `M_p`, the p-main polynomial.
    #[serde(skip)]
    pub mp: FpPoly,
    /// `W^(p)`, or `W_0^(p)` for almost controllable graphs.
    #[serde(skip)]
    pub matrix: IntMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelBound {
    /// Potential primes, ascending.
    pub primes: Vec<PotentialPrime>,
    /// `prod p^t`.
    #[serde(serialize_with = "serde_big::big")]
    pub l: BigInt,
    pub eliminated: Vec<EliminatedPrime>,
    /// `d_n(W)` or `d_n(W_0)`.
    #[serde(serialize_with = "serde_big::big")]
    pub d: BigInt,
    #[serde(serialize_with = "serde_big::big")]
    pub discriminant: BigInt,
    /// `gcd(Δ, d)`.
    #[serde(serialize_with = "serde_big::big")]
    pub delta_gcd: BigInt,
    /// True if some prime could not be handled exactly. The listed factors
    /// are then only a partial picture and no verdict may rest on `l`.
    pub incomplete_factorization: bool,
    /// Composite cofactors of `gcd(Δ, d)` left unsplit, and candidate primes
    /// too large for the modular machinery.
    #[serde(serialize_with = "serde_big::big_vec")]
    pub unresolved: Vec<BigInt>,
}

impl LevelBound {
    /// True when no prime survives, so `Q` must be a permutation matrix.
    pub fn is_trivial(&self) -> bool {
        self.primes.is_empty() && !self.incomplete_factorization
    }
}

pub fn compute_level_bound(g: &Graph, wd: &WalkData) -> Result<LevelBound, LevelError> {
    let chi = char_poly(&g.adjacency_matrix()).expect("square");
    compute_level_bound_with(g, wd, &chi, DEFAULT_RHO_BUDGET)
}

/// As [`compute_level_bound`], with `χ(A)` supplied and an explicit
/// Pollard–Brent budget.
pub fn compute_level_bound_with(
    g: &Graph,
    wd: &WalkData,
    chi: &IntPoly,
    rho_budget: u64,
) -> Result<LevelBound, LevelError> {
    if wd.class == Controllability::Unsupported {
        return Err(LevelError::Unsupported);
    }
    let base = wd.base.as_ref().expect("supported class has a base matrix");
    let (_, d) =
        largest_invariant(base).ok_or_else(|| LevelError::Inconsistent("base walk matrix is singular".into()))?;
    let disc = discriminant(chi).map_err(|e| LevelError::Inconsistent(e.to_string()))?;
    let delta_gcd = disc.gcd(&d);
    let fact = factor(&delta_gcd, rho_budget);

    let mut candidates: Vec<BigInt> = vec![BigInt::from(2)];
    let mut eliminated = Vec::new();
    for (p, _) in &fact.primes {
        if p == &BigInt::from(2) {
            continue;
        }
        if (&disc % (p * p)).is_zero() {
            candidates.push(p.clone());
        } else {
            eliminated.push(EliminatedPrime { p: p.clone(), rule: EliminationRule::DiscriminantNotSquareDivisible });
        }
    }

    let mut unresolved = fact.unfactored.clone();
    let mut primes = Vec::new();
    for p in candidates {
        if !(&d % &p).is_zero() {
            eliminated.push(EliminatedPrime { p, rule: EliminationRule::CoprimeToWalkDeterminant });
            continue;
        }
        let Some(p_small) = p.to_u64() else {
            unresolved.push(p);
            continue;
        };
        let mp = compute_mp_with(g, p_small, chi).map_err(|e| LevelError::Inconsistent(e.to_string()))?;
        let matrix =
            modified_walk_matrix_with(wd, g, p_small, 0, &mp).map_err(|e| LevelError::Inconsistent(e.to_string()))?;
        let (det_abs, dn) =
            largest_invariant(&matrix).ok_or_else(|| LevelError::Inconsistent(format!("W^({p}) is singular")))?;
        let t = ord_p(&dn, &p);
        if t > ord_p(&d, &p) {
            return Err(LevelError::Inconsistent(format!(
                "ord_{p} d_n(W^({p})) = {t} exceeds ord_{p} d = {}",
                ord_p(&d, &p)
            )));
        }
        if t == 0 {
            eliminated.push(EliminatedPrime { p, rule: EliminationRule::ZeroExponent });
            continue;
        }
        // The invariant factors multiply to |det|.
        let det_ord = ord_p(&det_abs, &p);
        primes.push(PotentialPrime { p: p_small, t, dn, det_ord, mp, matrix });
    }
    primes.sort_by_key(|pp| pp.p);
    eliminated.sort_by(|a, b| a.p.cmp(&b.p));
    unresolved.sort();
    let l = primes.iter().fold(BigInt::one(), |acc, pp| acc * num_traits::pow(BigInt::from(pp.p), pp.t as usize));
    Ok(LevelBound {
        primes,
        l,
        eliminated,
        d,
        discriminant: disc,
        delta_gcd,
        incomplete_factorization: !unresolved.is_empty(),
        unresolved,
    })
}
