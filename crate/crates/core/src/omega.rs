//! The compatibility graph Ω(G), its order-n cliques, and the mates they
//! encode.

use std::cell::OnceCell;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::congruence::SolutionVector;
use crate::graph::{canonical_form, emit_graph6, is_asymmetric, CanonicalLabel, Graph};
use crate::linalg::{char_poly, IntPoly};
use crate::serde_big;
use crate::walk::Controllability;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmegaError {
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Solutions as vertices; `ξ ~ η` iff `ξ^T η = 0` and `ξ^T A η ∈ {0, L^2}`.
#[derive(Clone, Debug)]
pub struct OmegaGraph {
    pub vertices: Vec<SolutionVector>,
    /// Adjacency bitsets, `words` u64 per vertex.
    adj: Vec<u64>,
    words: usize,
    pub l: i64,
}

impl OmegaGraph {
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn is_complete(&self) -> bool {
        let v = self.order();
        self.edge_count() == v * (v.saturating_sub(1)) / 2
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }
}

pub fn build_omega(solutions: &[SolutionVector], g: &Graph, l: i64) -> OmegaGraph {
    let v = solutions.len();
    let words = v.div_ceil(64).max(1);
    let images: Vec<Vec<i64>> = solutions.iter().map(|x| x.apply(g)).collect();
    let l2 = l as i128 * l as i128;
    let mut adj = vec![0u64; v * words];
    for i in 0..v {
        for j in i + 1..v {
            if solutions[i].dot(&solutions[j]) != 0 {
                continue;
            }
            let q: i128 = solutions[i].0.iter().zip(&images[j]).map(|(&a, &b)| a as i128 * b as i128).sum();
            if q == 0 || q == l2 {
                adj[i * words + j / 64] |= 1 << (j % 64);
                adj[j * words + i / 64] |= 1 << (i % 64);
            }
        }
    }
    OmegaGraph { vertices: solutions.to_vec(), adj, words, l }
}

/// All cliques of exactly `n` vertices, each sorted, in lexicographic order.
///
/// Bron–Kerbosch with Tomita pivoting over bitsets. No clique of Ω exceeds
/// `n` vertices (members are pairwise orthogonal), so every `n`-clique is
/// maximal and branches that cannot reach `n` are cut.
pub fn enumerate_n_cliques(omega: &OmegaGraph, n: usize) -> Vec<Vec<usize>> {
    let v = omega.order();
    let words = omega.words;
    let mut out = Vec::new();
    if v < n {
        return out;
    }
    if omega.is_complete() {
        if v == n {
            out.push((0..v).collect());
        }
        // A complete Ω on more than n vertices is impossible by orthogonality.
        return out;
    }
    let mut p = vec![0u64; words];
    for i in 0..v {
        p[i / 64] |= 1 << (i % 64);
    }
    let x = vec![0u64; words];
    let mut r = Vec::with_capacity(n);
    bron_kerbosch(omega, n, &mut r, p, x, &mut out);
    out.sort();
    out
}

fn count(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn members(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + b)
        })
    })
}

fn bron_kerbosch(
    omega: &OmegaGraph,
    n: usize,
    r: &mut Vec<usize>,
    mut p: Vec<u64>,
    mut x: Vec<u64>,
    out: &mut Vec<Vec<usize>>,
) {
    let pc = count(&p);
    if r.len() + pc < n {
        return;
    }
    if pc == 0 {
        if count(&x) == 0 && r.len() == n {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
        }
        return;
    }
    if r.len() == n {
        return;
    }
    // Pivot: the vertex of P ∪ X with most neighbours in P.
    let pivot = members(&p)
        .chain(members(&x))
        .max_by_key(|&u| omega.row(u).iter().zip(&p).map(|(a, b)| (a & b).count_ones()).sum::<u32>())
        .expect("P nonempty");
    let candidates: Vec<usize> = members(&p).filter(|&u| omega.row(pivot)[u / 64] >> (u % 64) & 1 == 0).collect();
    for u in candidates {
        let nu = omega.row(u);
        let p2: Vec<u64> = p.iter().zip(nu).map(|(a, b)| a & b).collect();
        let x2: Vec<u64> = x.iter().zip(nu).map(|(a, b)| a & b).collect();
        r.push(u);
        bron_kerbosch(omega, n, r, p2, x2, out);
        r.pop();
        p[u / 64] &= !(1 << (u % 64));
        x[u / 64] |= 1 << (u % 64);
        if r.len() + count(&p) < n {
            return;
        }
    }
}

/// One clique turned into `Q` and the mate `Q^T A Q`.
#[derive(Clone, Debug, Serialize)]
pub struct MateReport {
    /// Vertex indices into Ω, ascending.
    pub clique: Vec<usize>,
    /// `L Q`, stored by column (column `k` is the `k`-th clique vertex).
    pub q_times_l: Vec<Vec<i64>>,
    #[serde(serialize_with = "graph_as_graph6")]
    pub mate: Graph,
    pub is_original: bool,
    pub asymmetric: bool,
    /// Number of order-n cliques that produce this unlabeled graph.
    pub preimages: usize,
    #[serde(skip)]
    pub label: CanonicalLabel,
}

fn graph_as_graph6<S: serde::Serializer>(g: &Graph, s: S) -> Result<S::Ok, S::Error> {
    match emit_graph6(g) {
        Ok(text) => s.serialize_str(&text),
        Err(_) => s.serialize_str(&g.to_adjacency_text()),
    }
}

/// Assembles `X = L Q` from a clique and verifies `X^T X = L^2 I`,
/// `e^T X = L e^T` and `X^T A X = L^2 B` with `B` a graph adjacency matrix,
/// then checks that `B` is generalized cospectral with `A`.
pub fn clique_to_mate(clique: &[usize], omega: &OmegaGraph, g: &Graph) -> Result<MateReport, OmegaError> {
    clique_to_mate_with(clique, omega, g, &Reference::new(g))
}

/// What every mate is compared against, computed once per graph.
struct Reference {
    label: CanonicalLabel,
    spectra: OnceCell<(IntPoly, IntPoly)>,
}

impl Reference {
    fn new(g: &Graph) -> Self {
        Reference { label: canonical_form(g), spectra: OnceCell::new() }
    }
}

/// Characteristic polynomials of `A` and of the complement.
fn spectra(g: &Graph) -> (IntPoly, IntPoly) {
    (char_poly(&g.adjacency_matrix()).expect("square"), char_poly(&g.complement().adjacency_matrix()).expect("square"))
}

fn clique_to_mate_with(
    clique: &[usize],
    omega: &OmegaGraph,
    g: &Graph,
    reference: &Reference,
) -> Result<MateReport, OmegaError> {
    let n = g.order();
    let l = omega.l;
    let l2 = l as i128 * l as i128;
    let bad = |what: String| Err(OmegaError::Inconsistent(format!("clique {clique:?}: {what}")));
    if clique.len() != n {
        return bad(format!("has {} vertices, expected {n}", clique.len()));
    }
    let cols: Vec<&SolutionVector> = clique.iter().map(|&i| &omega.vertices[i]).collect();
    let images: Vec<Vec<i64>> = cols.iter().map(|x| x.apply(g)).collect();
    let mut mate = Graph::empty(n).expect("same order as g");
    for a in 0..n {
        if cols[a].0.iter().map(|&v| v as i128).sum::<i128>() != l as i128 {
            return bad(format!("column {a} does not sum to L"));
        }
        for b in a..n {
            let gram = cols[a].dot(cols[b]);
            if gram != if a == b { l2 } else { 0 } {
                return bad(format!("X^T X differs from L^2 I at ({a},{b})"));
            }
            let q: i128 = cols[a].0.iter().zip(&images[b]).map(|(&x, &y)| x as i128 * y as i128).sum();
            match (a == b, q) {
                (_, 0) => {}
                (false, q) if q == l2 => mate.add_edge(a, b),
                _ => return bad(format!("X^T A X / L^2 is not a 0/1 matrix with zero diagonal at ({a},{b})")),
            }
        }
    }
    let label = canonical_form(&mate);
    let is_original = label == reference.label;
    // An isomorphic copy of G is cospectral with it trivially.
    if !is_original && spectra(&mate) != *reference.spectra.get_or_init(|| spectra(g)) {
        return bad("mate is not generalized cospectral".into());
    }
    Ok(MateReport {
        clique: clique.to_vec(),
        q_times_l: cols.iter().map(|x| x.0.clone()).collect(),
        is_original,
        asymmetric: is_asymmetric(&mate),
        preimages: 1,
        mate,
        label,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VerdictStatus {
    #[serde(rename = "DGS")]
    Dgs,
    #[serde(rename = "NonDGS")]
    NonDgs,
    Undecided,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Dgs => "DGS",
            VerdictStatus::NonDgs => "NonDGS",
            VerdictStatus::Undecided => "Undecided",
        }
    }

    /// The process exit status the command line reports.
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictStatus::Dgs => 0,
            VerdictStatus::NonDgs => 1,
            VerdictStatus::Undecided => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// One report per unlabeled mate, `G` itself excluded.
    pub mates: Vec<MateReport>,
    /// Present iff undecided.
    pub reason: Option<UndecidedReason>,
    /// Preimage count of `G`'s own class.
    pub original_preimages: usize,
    pub stats: VerdictStats,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerdictStats {
    #[serde(serialize_with = "serde_big::big_opt")]
    pub l: Option<BigInt>,
    pub omega_vertices: usize,
    pub omega_edges: usize,
    pub clique_count: usize,
}

/// Why no verdict was reached: a stable `code` plus a human-readable detail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UndecidedReason {
    pub code: &'static str,
    pub detail: String,
}

impl std::fmt::Display for UndecidedReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl Verdict {
    pub fn undecided(code: &'static str, detail: impl Into<String>, stats: VerdictStats) -> Self {
        Verdict {
            status: VerdictStatus::Undecided,
            mates: Vec::new(),
            reason: Some(UndecidedReason { code, detail: detail.into() }),
            original_preimages: 0,
            stats,
        }
    }

    /// The verdict for a trivial level bound: `Q` is a permutation matrix.
    pub fn trivial(n: usize) -> Self {
        Verdict {
            status: VerdictStatus::Dgs,
            mates: Vec::new(),
            reason: None,
            original_preimages: 1,
            stats: VerdictStats {
                l: Some(BigInt::from(1)),
                omega_vertices: n,
                omega_edges: n * n.saturating_sub(1) / 2,
                clique_count: 1,
            },
        }
    }
}

/// Maps cliques to unlabeled graphs and decides DGS.
///
/// A controllable graph is DGS iff there is exactly one clique, and then every
/// class has one preimage. For an almost controllable graph symmetric classes
/// have one preimage and asymmetric ones two, so `G` is DGS iff the count is at
/// most 1 (symmetric `G`) or 2 (asymmetric `G`).
pub fn render_verdict(
    g: &Graph,
    class: Controllability,
    omega: &OmegaGraph,
    cliques: &[Vec<usize>],
) -> Result<Verdict, OmegaError> {
    let reference = Reference::new(g);
    let mut classes: BTreeMap<CanonicalLabel, MateReport> = BTreeMap::new();
    for c in cliques {
        let report = clique_to_mate_with(c, omega, g, &reference)?;
        classes.entry(report.label.clone()).and_modify(|r| r.preimages += 1).or_insert(report);
    }
    let bad = |what: String| Err(OmegaError::Inconsistent(what));
    let trivial: Vec<usize> = (0..g.order()).collect();
    if !cliques.contains(&trivial) {
        return bad("the trivial clique is missing".into());
    }
    let mut original_preimages = 0;
    let mut mates = Vec::new();
    for (_, r) in classes {
        let expected = match class {
            Controllability::AlmostControllable if r.asymmetric => 2,
            _ => 1,
        };
        if r.preimages != expected {
            return bad(format!("a mate class has {} preimages, expected {expected}", r.preimages));
        }
        if r.is_original {
            original_preimages = r.preimages;
        } else {
            mates.push(r);
        }
    }
    let threshold = match class {
        Controllability::AlmostControllable if is_asymmetric(g) => 2,
        _ => 1,
    };
    let dgs = mates.is_empty();
    if dgs != (cliques.len() <= threshold) {
        return bad(format!("{} cliques disagree with {} mates", cliques.len(), mates.len()));
    }
    Ok(Verdict {
        status: if dgs { VerdictStatus::Dgs } else { VerdictStatus::NonDgs },
        mates,
        reason: None,
        original_preimages,
        stats: VerdictStats {
            l: Some(BigInt::from(omega.l)),
            omega_vertices: omega.order(),
            omega_edges: omega.edge_count(),
            clique_count: cliques.len(),
        },
    })
}
