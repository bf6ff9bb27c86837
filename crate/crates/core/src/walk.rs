//! Walk matrices, controllability and the modified walk matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fp::{apply_to_ones, FpPoly};
use crate::graph::Graph;
use crate::linalg::{det, rank_exact, rank_mod_p, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("graph is neither controllable nor almost controllable")]
    Unsupported,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Controllability {
    /// `rank W = n`.
    Controllable,
    /// `rank W = n - 1`.
    AlmostControllable,
    /// `rank W <= n - 2`; outside the scope of the method.
    Unsupported,
}

impl Controllability {
    pub fn as_str(self) -> &'static str {
        match self {
            Controllability::Controllable => "controllable",
            Controllability::AlmostControllable => "almost_controllable",
            Controllability::Unsupported => "unsupported",
        }
    }
}

/// The walk matrix of a graph and what is derived from it.
#[derive(Clone, Debug)]
pub struct WalkData {
    /// `W = [e, Ae, ..., A^{n-1} e]`.
    pub w: IntMatrix,
    pub class: Controllability,
    pub rank: usize,
    /// Cofactors of the last column of `W`; present iff almost controllable.
    pub xi: Option<Vec<BigInt>>,
    /// `W` itself when controllable, `W_0` when almost controllable.
    pub base: Option<IntMatrix>,
}

/// `2^{floor(n/2) - 1}` for `n >= 2`.
pub fn xi_scale(n: usize) -> BigInt {
    BigInt::one() << (n / 2).saturating_sub(1)
}

/// The first `count` Krylov vectors `e, Ae, ..., A^{count-1} e`.
fn krylov(g: &Graph, start: Vec<BigInt>, count: usize) -> Vec<Vec<BigInt>> {
    let mut cols = Vec::with_capacity(count);
    let mut v = start;
    for k in 0..count {
        if k > 0 {
            v = g.mul_vec(&v);
        }
        cols.push(v.clone());
    }
    cols
}

pub fn build_walk_data(g: &Graph) -> Result<WalkData, WalkError> {
    let n = g.order();
    let w = IntMatrix::from_columns(&krylov(g, vec![BigInt::one(); n], n));
    let rank = rank_exact(&w);
    let class = match n - rank {
        0 => Controllability::Controllable,
        1 => Controllability::AlmostControllable,
        _ => Controllability::Unsupported,
    };
    let (xi, base) = match class {
        Controllability::Controllable => (None, Some(w.clone())),
        Controllability::AlmostControllable => {
            let xi: Vec<BigInt> = (0..n)
                .map(|i| {
                    let m = det(&w.minor(i, n - 1)).expect("square");
                    if (i + n - 1) % 2 == 1 {
                        -m
                    } else {
                        m
                    }
                })
                .collect();
            if xi.iter().all(Zero::is_zero) {
                return Err(WalkError::Inconsistent("cofactor vector vanishes".into()));
            }
            if !w.transpose().mul_vec(&xi).iter().all(Zero::is_zero) {
                return Err(WalkError::Inconsistent("cofactor vector is not a left null vector of W".into()));
            }
            let scale = xi_scale(n);
            if xi.iter().any(|x| !x.is_multiple_of(&scale)) {
                return Err(WalkError::Inconsistent(format!("cofactors are not all divisible by {scale}")));
            }
            let base = w_delta_from(&w, &xi, 0);
            (Some(xi), Some(base))
        }
        Controllability::Unsupported => (None, None),
    };
    Ok(WalkData { w, class, rank, xi, base })
}

fn w_delta_from(w: &IntMatrix, xi: &[BigInt], delta: u8) -> IntMatrix {
    let n = w.rows();
    let scale = xi_scale(n);
    IntMatrix::from_fn(n, n, |i, j| {
        if j + 1 < n {
            w[(i, j)].clone()
        } else {
            let v = &xi[i] / &scale;
            if delta == 1 {
                -v
            } else {
                v
            }
        }
    })
}

impl WalkData {
    /// `W_delta = [e, ..., A^{n-2} e, (-1)^delta xi / 2^{floor(n/2)-1}]`.
    pub fn w_delta(&self, delta: u8) -> Option<IntMatrix> {
        self.xi.as_ref().map(|xi| w_delta_from(&self.w, xi, delta))
    }
}

/// The modified walk matrix `W^(p)` (controllable) or `W_delta^(p)` (almost
/// controllable), given `M_p` for the graph.
///
/// With `s = deg M_p` the Krylov columns from index `s` on are replaced by
/// `A^k M_p(A) e / p`. In the almost controllable case the last column is
/// `(-1)^delta xi / lcm(2^{floor(n/2)-1}, p^{n-1-s})`, and the matrix is
/// `W_delta` itself when `s = n - 1`.
pub fn modified_walk_matrix_with(
    wd: &WalkData,
    g: &Graph,
    p: u64,
    delta: u8,
    mp: &FpPoly,
) -> Result<IntMatrix, WalkError> {
    let n = g.order();
    let base = match wd.class {
        Controllability::Controllable => wd.w.clone(),
        Controllability::AlmostControllable => wd.w_delta(delta).expect("almost controllable has xi"),
        Controllability::Unsupported => return Err(WalkError::Unsupported),
    };
    let rank_p = rank_mod_p(&base, p).map_err(|e| WalkError::Precondition(e.to_string()))?;
    if rank_p == n {
        return Err(WalkError::Precondition(format!("walk matrix has full rank modulo {p}")));
    }
    let s = mp.degree().ok_or_else(|| WalkError::Inconsistent("M_p is zero".into()))?;
    let almost = wd.class == Controllability::AlmostControllable;
    let reduced = if almost { n - 1 } else { n };
    if s >= reduced {
        if almost && s == n - 1 {
            return Ok(base);
        }
        return Err(WalkError::Precondition(format!("deg M_{p} = {s} leaves no column to reduce")));
    }
    let pb = BigInt::from(p);
    let v = apply_to_ones(g, mp);
    if v.iter().any(|x| !x.is_multiple_of(&pb)) {
        return Err(WalkError::Inconsistent(format!("M_{p}(A)e is not divisible by {p}")));
    }
    let v: Vec<BigInt> = v.iter().map(|x| x / &pb).collect();
    let mut columns: Vec<Vec<BigInt>> = (0..s).map(|j| wd.w.column(j)).collect();
    columns.extend(krylov(g, v, reduced - s));
    if almost {
        let xi = wd.xi.as_ref().expect("almost controllable has xi");
        let divisor = xi_scale(n).lcm(&num_traits::pow(pb, n - 1 - s));
        let mut last = Vec::with_capacity(n);
        for x in xi {
            if !x.is_multiple_of(&divisor) {
                return Err(WalkError::Inconsistent(format!("xi is not divisible by {divisor}")));
            }
            let q = x / &divisor;
            last.push(if delta == 1 { -q } else { q });
        }
        columns.push(last);
    }
    Ok(IntMatrix::from_columns(&columns))
}

/// As [`modified_walk_matrix_with`], computing `M_p` first.
pub fn modified_walk_matrix(wd: &WalkData, g: &Graph, p: u64, delta: u8) -> Result<IntMatrix, WalkError> {
    let mp = crate::fp::compute_mp(g, p).map_err(|e| WalkError::Inconsistent(e.to_string()))?;
    modified_walk_matrix_with(wd, g, p, delta, &mp)
}
