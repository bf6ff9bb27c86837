//! Acceptance suite: one PASS or FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use specmate::congruence::SolutionVector;
use specmate::graph::{canonical_form, is_asymmetric, random_gnp_half};
use specmate::level::LevelBound;
use specmate::linalg::{
    char_poly, det, discriminant, ord_p, smith_normal_form, sylvester_resultant, IntMatrix, IntPoly,
};
use specmate::pipeline::AnalysisReport;
use specmate::walk::build_walk_data;
use specmate::{analyze, batch, AnalyzeOptions, BatchOptions, Controllability, Graph, VerdictStatus};

mod common;
use common::{graph, vectors};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("golden example 1 (13 vertices, controllable)", example1),
        ("golden example 2 (9 vertices, almost controllable)", example2),
        ("all 1044 graphs on 7 vertices match a brute-force oracle", seven_vertex_oracle),
        ("random batches reproduce the simulation fractions", batches),
        ("pipeline property suites", properties),
        ("exact linear algebra properties", linalg_properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {name} [{detail}; {secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} [{why}; {secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn level(r: &AnalysisReport) -> Result<&LevelBound, String> {
    r.level.as_ref().ok_or_else(|| "no level bound in report".to_string())
}

fn example1() -> Outcome {
    let g = graph("example1.adj");
    let start = Instant::now();
    let r = analyze(&g, &AnalyzeOptions::default());
    let elapsed = start.elapsed().as_secs_f64();
    let wd = build_walk_data(&g).unwrap();
    let snf = smith_normal_form(&wd.w, false);
    let mut want: Vec<BigInt> = [1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 8].iter().map(|&x| BigInt::from(x)).collect();
    want.push("967498002648".parse().unwrap());
    ensure!(snf.invariants == want, "SNF of W is {:?}", snf.invariants);
    let lb = level(&r)?;
    ensure!(
        lb.discriminant.to_string() == "2049840225216075785191098057600067625877504",
        "discriminant {}",
        lb.discriminant
    );
    ensure!(lb.delta_gcd == BigInt::from(72), "gcd {}", lb.delta_gcd);
    let dns: Vec<(u64, String)> = r.primes.iter().map(|p| (p.p, p.dn.to_string())).collect();
    ensure!(
        dns == vec![(2, "483749001324".into()), (3, "322499334216".into())],
        "modified walk matrix invariants {dns:?}"
    );
    for pp in &lb.primes {
        let inv = smith_normal_form(&pp.matrix, false).invariants;
        let ones = inv.iter().filter(|x| x.is_one()).count();
        let expected_ones = if pp.p == 2 { 11 } else { 7 };
        ensure!(ones == expected_ones, "W^({}) has {ones} unit invariants", pp.p);
    }
    ensure!(lb.l == BigInt::from(12), "L = {}", lb.l);
    ensure!(r.solution_count == Some(23), "{:?} solutions", r.solution_count);
    let got: BTreeSet<Vec<i64>> = r.solutions[13..].iter().map(|x| x.0.clone()).collect();
    let want: BTreeSet<Vec<i64>> = vectors("example1_nontrivial.txt", 1).into_iter().collect();
    ensure!(got == want, "nontrivial solutions differ from the fixture");
    ensure!(r.clique_count == Some(3), "{:?} cliques", r.clique_count);
    ensure!(r.status() == VerdictStatus::NonDgs, "verdict {:?}", r.status());
    let mates: BTreeSet<_> = r.verdict.mates.iter().map(|m| m.label.clone()).collect();
    let fixtures: BTreeSet<_> =
        ["example1_mate1.adj", "example1_mate2.adj"].iter().map(|f| canonical_form(&graph(f))).collect();
    ensure!(mates == fixtures, "mates differ from the fixture mates");
    ensure!(elapsed < 1.0, "took {elapsed:.2}s");
    Ok(format!("L = 12, 23 solutions, 3 cliques, 2 mates in {:.0} ms", elapsed * 1e3))
}

fn example2() -> Outcome {
    let g = graph("example2.adj");
    let start = Instant::now();
    let r = analyze(&g, &AnalyzeOptions::default());
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(r.controllability == Controllability::AlmostControllable, "class {:?}", r.controllability);
    ensure!(is_asymmetric(&g), "graph is not asymmetric");
    ensure!(level(&r)?.l == BigInt::from(128), "L = {}", level(&r)?.l);
    let got: BTreeSet<Vec<i64>> = r.solutions.iter().map(|x| x.0.clone()).collect();
    let want: BTreeSet<Vec<i64>> = vectors("example2_omega.txt", 16).into_iter().collect();
    ensure!(r.solutions.len() == 37 && got == want, "{} solutions, set matches: {}", r.solutions.len(), got == want);
    ensure!(r.clique_count == Some(8), "{:?} cliques", r.clique_count);
    ensure!(r.status() == VerdictStatus::NonDgs, "verdict {:?}", r.status());
    ensure!(r.verdict.mates.len() == 4, "{} mates", r.verdict.mates.len());
    let mut split: Vec<(usize, bool)> = r.verdict.mates.iter().map(|m| (m.preimages, m.asymmetric)).collect();
    split.push((r.verdict.original_preimages, true));
    split.sort_unstable();
    let expected = vec![(1, false), (1, false), (2, true), (2, true), (2, true)];
    ensure!(split == expected, "preimages {split:?}");
    ensure!(elapsed < 1.0, "took {elapsed:.2}s");
    Ok(format!("L = 128, 37 solutions, 8 cliques, preimages 2+2+2+1+1 in {:.0} ms", elapsed * 1e3))
}

/// Brute force over vertex permutations; graphs are upper-triangle bitmasks.
struct SmallGraphs {
    n: usize,
    /// For each permutation, the image of every edge index.
    edge_maps: Vec<Vec<u8>>,
}

impl SmallGraphs {
    fn new(n: usize) -> Self {
        let mut perms = vec![vec![]];
        for k in 0..n {
            perms = perms
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..=k).map(move |pos| {
                        let mut q = p.clone();
                        q.insert(pos, k);
                        q
                    })
                })
                .collect();
        }
        let edge_maps = perms
            .iter()
            .map(|p| {
                let mut map = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
                        map.push(Self::index(n, a, b) as u8);
                    }
                }
                map
            })
            .collect();
        SmallGraphs { n, edge_maps }
    }

    fn index(n: usize, i: usize, j: usize) -> usize {
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    fn canonical(&self, mask: u32) -> u32 {
        self.edge_maps
            .iter()
            .map(|map| {
                map.iter().enumerate().filter(|&(e, _)| mask >> e & 1 == 1).fold(0u32, |acc, (_, &to)| acc | 1 << to)
            })
            .min()
            .unwrap()
    }

    fn to_graph(&self, mask: u32) -> Graph {
        let mut edges = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if mask >> Self::index(self.n, i, j) & 1 == 1 {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(self.n, &edges).unwrap()
    }

    fn of_graph(&self, g: &Graph) -> u32 {
        let mut mask = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if g.has_edge(i, j) {
                    mask |= 1 << Self::index(self.n, i, j);
                }
            }
        }
        mask
    }
}

/// All unlabeled graphs on `n` vertices by one-vertex extension of those on `n - 1`.
fn all_graphs(n: usize) -> (SmallGraphs, Vec<u32>) {
    let mut prev = vec![0u32];
    let mut sg = SmallGraphs::new(1);
    for k in 2..=n {
        let lower = sg;
        sg = SmallGraphs::new(k);
        let mut next = BTreeSet::new();
        for &mask in &prev {
            let base = lower.to_graph(mask);
            let extended: Vec<u32> = (0u32..1 << (k - 1))
                .into_par_iter()
                .map(|nbrs| {
                    let mut m = 0u32;
                    for i in 0..k - 1 {
                        for j in i + 1..k - 1 {
                            if base.has_edge(i, j) {
                                m |= 1 << SmallGraphs::index(k, i, j);
                            }
                        }
                        if nbrs >> i & 1 == 1 {
                            m |= 1 << SmallGraphs::index(k, i, k - 1);
                        }
                    }
                    sg.canonical(m)
                })
                .collect();
            next.extend(extended);
        }
        prev = next.into_iter().collect();
    }
    (sg, prev)
}

/// `det(kI - A)` by i128 fraction-free elimination.
fn small_det(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let (mut prev, mut sign) = (1i128, 1i128);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else { return 0 };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Values of the characteristic polynomials of `G` and its complement at
/// `0..=n`, which determine both polynomials.
fn spectrum_key(g: &Graph) -> Vec<i128> {
    let n = g.order();
    let mut key = Vec::new();
    for h in [g.clone(), g.complement()] {
        for k in 0..=n as i128 {
            let m = (0..n)
                .map(|i| (0..n).map(|j| if i == j { k } else { -(h.has_edge(i, j) as i128) }).collect())
                .collect();
            key.push(small_det(m));
        }
    }
    key
}

fn seven_vertex_oracle() -> Outcome {
    let (sg, reps) = all_graphs(7);
    ensure!(reps.len() == 1044, "{} unlabeled graphs", reps.len());
    let mut classes: BTreeMap<Vec<i128>, Vec<u32>> = BTreeMap::new();
    for &m in &reps {
        classes.entry(spectrum_key(&sg.to_graph(m))).or_default().push(m);
    }
    let reports: Vec<(u32, AnalysisReport)> =
        reps.par_iter().map(|&m| (m, analyze(&sg.to_graph(m), &AnalyzeOptions::default()))).collect();
    let (mut supported, mut non_dgs) = (0, 0);
    for (m, r) in &reports {
        if r.controllability == Controllability::Unsupported {
            continue;
        }
        supported += 1;
        ensure!(r.status() != VerdictStatus::Undecided, "{} undecided: {:?}", r.graph6, r.verdict.reason);
        let key = spectrum_key(&sg.to_graph(*m));
        let expected: BTreeSet<u32> = classes[&key].iter().copied().filter(|x| x != m).collect();
        let got: BTreeSet<u32> = r.verdict.mates.iter().map(|x| sg.canonical(sg.of_graph(&x.mate))).collect();
        ensure!(got == expected, "{}: mates {got:?}, oracle {expected:?}", r.graph6);
        ensure!(
            (r.status() == VerdictStatus::Dgs) == expected.is_empty(),
            "{}: verdict {:?} against {} oracle mates",
            r.graph6,
            r.status(),
            expected.len()
        );
        non_dgs += (!expected.is_empty()) as usize;
    }
    Ok(format!("{supported} supported graphs, {non_dgs} with mates, 0 undecided"))
}

fn fraction(x: usize, of: usize) -> f64 {
    x as f64 / of as f64
}

fn batches() -> Outcome {
    let run = |n, count| batch(&BatchOptions { n, count, seed: 2024, analyze: AnalyzeOptions::default(), jobs: None });
    let b10 = run(10, 1000);
    let (dgs, non) = (fraction(b10.dgs, 1000), fraction(b10.non_dgs, 1000));
    ensure!((dgs - 0.7977).abs() <= 0.04, "n = 10 DGS fraction {dgs}");
    ensure!((non - 0.1875).abs() <= 0.04, "n = 10 NonDGS fraction {non}");
    let b20 = run(20, 300);
    let dgs20 = fraction(b20.dgs, 300);
    ensure!((dgs20 - 0.9839).abs() <= 0.03, "n = 20 DGS fraction {dgs20}");
    let b30 = run(30, 200);
    ensure!(b30.non_dgs <= 1, "n = 30 has {} NonDGS graphs", b30.non_dgs);
    Ok(format!(
        "n=10 DGS {dgs:.3} NonDGS {non:.3} (discarded {}); n=20 DGS {dgs20:.3}; n=30 NonDGS {}",
        b10.discarded, b30.non_dgs
    ))
}

/// Independent re-check of one report.
fn check_report(r: &AnalysisReport) -> Result<(), String> {
    let g = &r.graph;
    let Some(lb) = r.level.as_ref() else { return Ok(()) };
    for pp in &lb.primes {
        let p = BigInt::from(pp.p);
        ensure!(pp.t <= ord_p(&lb.d, &p), "{}: ord_{} bound violated", r.graph6, pp.p);
    }
    for s in &r.primes {
        if let Some(log) = s.linear_log_count {
            let pp = lb.primes.iter().find(|x| x.p == s.p).unwrap();
            ensure!(log == pp.det_ord, "{}: linear count {}^{log}, expected exponent {}", r.graph6, s.p, pp.det_ord);
        }
    }
    if r.solutions.is_empty() {
        return Ok(());
    }
    let l = lb.l.clone();
    for x in &r.solutions {
        let xb: Vec<BigInt> = x.0.iter().map(|&v| BigInt::from(v)).collect();
        ensure!(xb.iter().sum::<BigInt>() == l, "{}: e^T x != L", r.graph6);
        ensure!(x.dot(x) == (l.clone() * &l).try_into().unwrap_or(-1i128), "{}: x^T x != L^2", r.graph6);
        ensure!(x.quadratic(g) == 0, "{}: x^T A x != 0", r.graph6);
        for pp in &lb.primes {
            let q = BigInt::from(pp.p).pow(pp.t);
            let ok = pp.matrix.transpose().mul_vec(&xb).iter().all(|v| v.is_multiple_of(&q));
            ensure!(ok, "{}: linear congruence modulo {q} fails", r.graph6);
        }
    }
    let trivial: Vec<SolutionVector> = (0..g.order())
        .map(|k| {
            let mut v = vec![0i64; g.order()];
            v[k] = l.clone().try_into().unwrap();
            SolutionVector(v)
        })
        .collect();
    ensure!(r.solutions[..g.order()] == trivial[..], "{}: trivial solutions missing", r.graph6);
    if r.status() != VerdictStatus::Undecided {
        ensure!(r.verdict.original_preimages >= 1, "{}: trivial clique missing", r.graph6);
    }
    let key = spectrum_key(g);
    for m in &r.verdict.mates {
        ensure!(spectrum_key(&m.mate) == key, "{}: mate is not generalized cospectral", r.graph6);
        ensure!(canonical_form(&m.mate) != canonical_form(g), "{}: mate isomorphic to G", r.graph6);
    }
    Ok(())
}

/// Fifty supported graphs: the two examples and random graphs of orders 8 to 16.
fn regression_corpus() -> Vec<Graph> {
    let mut corpus = vec![graph("example1.adj"), graph("example2.adj")];
    let mut seed = 7000;
    while corpus.len() < 50 {
        let n = 8 + (seed as usize % 9);
        let g = random_gnp_half(n, seed).unwrap();
        seed += 1;
        if build_walk_data(&g).unwrap().class != Controllability::Unsupported {
            corpus.push(g);
        }
    }
    corpus
}

fn properties() -> Outcome {
    let mut graphs = regression_corpus();
    for seed in 0..300u64 {
        graphs.push(random_gnp_half(6 + (seed as usize % 9), 90_000 + seed).unwrap());
    }
    let reports: Vec<AnalysisReport> = graphs.par_iter().map(|g| analyze(g, &AnalyzeOptions::default())).collect();
    for r in &reports {
        check_report(r)?;
        if let Some(reason) = &r.verdict.reason {
            ensure!(reason.code != "inconsistent", "{}: {reason}", r.graph6);
        }
    }
    let mates: usize = reports.iter().map(|r| r.verdict.mates.len()).sum();

    // Raising the cap never loses a verdict.
    let caps = [1u64 << 2, 1 << 6, 1 << 10, 1 << 16];
    let corpus = regression_corpus();
    let mut undecided_counts = Vec::new();
    let mut previous: Vec<Option<VerdictStatus>> = vec![None; corpus.len()];
    for &cap in &caps {
        let statuses: Vec<VerdictStatus> =
            corpus.par_iter().map(|g| analyze(g, &AnalyzeOptions::with_cap(cap)).status()).collect();
        for (i, s) in statuses.iter().enumerate() {
            if let Some(prev) = previous[i] {
                if prev != VerdictStatus::Undecided {
                    ensure!(*s == prev, "corpus graph {i}: {prev:?} at a lower cap, {s:?} at cap {cap}");
                }
            }
            previous[i] = Some(*s);
        }
        undecided_counts.push(statuses.iter().filter(|&&s| s == VerdictStatus::Undecided).count());
    }
    ensure!(undecided_counts.windows(2).all(|w| w[1] <= w[0]), "undecided counts {undecided_counts:?}");
    Ok(format!(
        "{} reports re-verified, {mates} mates checked; undecided by cap {caps:?}: {undecided_counts:?}",
        reports.len()
    ))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from((rng.next_u64() % (2 * bound as u64 + 1)) as i64 - bound))
}

fn linalg_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let rows = 1 + (rng.next_u64() % 5) as usize;
        let cols = 1 + (rng.next_u64() % 5) as usize;
        let m = random_matrix(&mut rng, rows, cols, 9);
        let s = smith_normal_form(&m, true);
        let (u, v) = (s.u.as_ref().unwrap(), s.v.as_ref().unwrap());
        let d = IntMatrix::from_fn(rows, cols, |i, j| if i == j { s.invariants[i].clone() } else { BigInt::zero() });
        ensure!(u.mul(&m).mul(v) == d, "SNF trial {trial}: U M V != diag");
        ensure!(
            det(u).unwrap().magnitude().is_one() && det(v).unwrap().magnitude().is_one(),
            "trial {trial}: not unimodular"
        );
        let nonzero = &s.invariants[..s.rank];
        ensure!(nonzero.iter().all(|x| x > &BigInt::zero()), "trial {trial}: nonpositive invariant");
        ensure!(nonzero.windows(2).all(|w| w[1].is_multiple_of(&w[0])), "trial {trial}: divisibility chain broken");
        ensure!(s.invariants[s.rank..].iter().all(Zero::is_zero), "trial {trial}: trailing invariants nonzero");
    }
    for trial in 0..200 {
        let n = 1 + (rng.next_u64() % 8) as usize;
        let m = random_matrix(&mut rng, n, n, 5);
        let chi = char_poly(&m).unwrap();
        ensure!(chi.eval_matrix(&m).is_zero(), "Cayley-Hamilton trial {trial} fails");
    }
    for trial in 0..200 {
        let deg = 2 + (rng.next_u64() % 7) as usize;
        let mut c: Vec<i64> = (0..deg).map(|_| (rng.next_u64() % 21) as i64 - 10).collect();
        c.push(1);
        let f = IntPoly::from_i64(&c);
        let sign = if (deg * (deg - 1) / 2) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        let expected = sign * sylvester_resultant(&f, &f.derivative());
        ensure!(discriminant(&f).unwrap() == expected, "discriminant trial {trial} disagrees with Sylvester");
    }
    Ok("1000 SNF, 200 Cayley-Hamilton, 200 discriminant checks".into())
}
