//! End-to-end analysis of one graph, and batches of random graphs.

use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::congruence::{solve_master_traced, SolutionVector, SolverError};
use crate::graph::{emit_graph6, random_gnp_half, Graph};
use crate::level::{compute_level_bound_with, LevelBound, LevelError};
use crate::linalg::char_poly;
use crate::nt::DEFAULT_RHO_BUDGET;
use crate::omega::{build_omega, enumerate_n_cliques, render_verdict, Verdict, VerdictStats, VerdictStatus};
use crate::serde_big;
use crate::walk::{build_walk_data, Controllability};
use crate::DEFAULT_CAP;

/// Bumped whenever a serialized field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    /// Bound on every Step-1 solution count and on the size of their product.
    pub cap: u64,
    /// Pollard–Brent iteration budget per composite cofactor.
    pub rho_budget: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { cap: DEFAULT_CAP, rho_budget: DEFAULT_RHO_BUDGET }
    }
}

impl AnalyzeOptions {
    pub fn with_cap(cap: u64) -> Self {
        AnalyzeOptions { cap, ..Self::default() }
    }
}

/// Wall-clock milliseconds per stage.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Timings {
    pub walk: f64,
    pub level: f64,
    pub solve: f64,
    pub omega: f64,
    pub cliques: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeSummary {
    pub p: u64,
    pub t: u32,
    /// `d_n(W^(p))`.
    #[serde(serialize_with = "serde_big::big")]
    pub dn: BigInt,
    /// Solutions of the linear system modulo `p^t`, as a power of `p`.
    pub linear_log_count: Option<u32>,
    /// Residues surviving the quadratic filters.
    pub filtered_count: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub graph6: String,
    pub order: usize,
    pub controllability: Controllability,
    pub walk_rank: usize,
    /// `d_n(W)`, or `d_n(W_0)` when almost controllable.
    #[serde(serialize_with = "serde_big::big_opt")]
    pub walk_dn: Option<BigInt>,
    #[serde(serialize_with = "serde_big::big_opt")]
    pub delta_gcd: Option<BigInt>,
    pub primes: Vec<PrimeSummary>,
    pub level: Option<LevelBound>,
    pub solution_count: Option<usize>,
    pub solutions: Vec<SolutionVector>,
    pub omega_size: Option<(usize, usize)>,
    pub clique_count: Option<usize>,
    pub verdict: Verdict,
    pub timings: Timings,
    #[serde(skip)]
    pub graph: Graph,
}

impl AnalysisReport {
    pub fn status(&self) -> VerdictStatus {
        self.verdict.status
    }

    /// True when Ω is the complete graph on the trivial solutions.
    pub fn omega_is_complete(&self) -> bool {
        self.omega_size.is_some_and(|(v, e)| v == self.order && e == v * v.saturating_sub(1) / 2)
    }

    /// Zeroes every timing so the report depends on the input alone.
    pub fn strip_timings(&mut self) {
        self.timings = Timings::default();
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs the whole method on `g`. Never fails: every obstacle becomes an
/// undecided verdict with a stable reason code.
pub fn analyze(g: &Graph, opts: &AnalyzeOptions) -> AnalysisReport {
    let total = Instant::now();
    let n = g.order();
    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        graph6: emit_graph6(g).unwrap_or_default(),
        order: n,
        controllability: Controllability::Unsupported,
        walk_rank: 0,
        walk_dn: None,
        delta_gcd: None,
        primes: Vec::new(),
        level: None,
        solution_count: None,
        solutions: Vec::new(),
        omega_size: None,
        clique_count: None,
        verdict: Verdict::undecided("pending", "", VerdictStats::default()),
        timings: Timings::default(),
        graph: g.clone(),
    };
    run(g, opts, &mut report);
    report.timings.total = millis(total);
    report
}

fn run(g: &Graph, opts: &AnalyzeOptions, report: &mut AnalysisReport) {
    let n = g.order();
    let stage = Instant::now();
    let wd = match build_walk_data(g) {
        Ok(wd) => wd,
        Err(e) => {
            report.verdict = Verdict::undecided("inconsistent", e.to_string(), VerdictStats::default());
            return;
        }
    };
    report.timings.walk = millis(stage);
    report.controllability = wd.class;
    report.walk_rank = wd.rank;
    if wd.class == Controllability::Unsupported {
        report.verdict =
            Verdict::undecided("unsupported_rank", format!("rank W = {} <= n - 2", wd.rank), VerdictStats::default());
        return;
    }

    let stage = Instant::now();
    let chi = char_poly(&g.adjacency_matrix()).expect("square");
    let lb = match compute_level_bound_with(g, &wd, &chi, opts.rho_budget) {
        Ok(lb) => lb,
        Err(LevelError::Unsupported) => unreachable!("class checked above"),
        Err(e) => {
            report.verdict = Verdict::undecided("inconsistent", e.to_string(), VerdictStats::default());
            return;
        }
    };
    report.timings.level = millis(stage);
    report.walk_dn = Some(lb.d.clone());
    report.delta_gcd = Some(lb.delta_gcd.clone());
    report.primes = lb
        .primes
        .iter()
        .map(|pp| PrimeSummary { p: pp.p, t: pp.t, dn: pp.dn.clone(), linear_log_count: None, filtered_count: None })
        .collect();
    let stats = VerdictStats { l: Some(lb.l.clone()), ..VerdictStats::default() };
    if lb.incomplete_factorization {
        let listed: Vec<String> = lb.unresolved.iter().map(ToString::to_string).collect();
        report.verdict =
            Verdict::undecided("incomplete_factorization", format!("could not resolve {}", listed.join(", ")), stats);
        report.level = Some(lb);
        return;
    }
    if lb.is_trivial() {
        report.verdict = Verdict::trivial(n);
        report.solution_count = Some(n);
        report.omega_size = Some((n, n * n.saturating_sub(1) / 2));
        report.clique_count = Some(1);
        report.level = Some(lb);
        return;
    }

    let stage = Instant::now();
    let trace = solve_master_traced(g, &lb, opts.cap);
    report.timings.solve = millis(stage);
    let trace = match trace {
        Ok(t) => t,
        Err(e) => {
            let code = match e {
                SolverError::Overflow { .. } => "cap_exceeded",
                SolverError::LevelTooLarge(_) => "level_too_large",
                SolverError::NotCoprime { .. } | SolverError::Inconsistent(_) => "inconsistent",
            };
            report.verdict = Verdict::undecided(code, e.to_string(), stats);
            report.level = Some(lb);
            return;
        }
    };
    for (summary, &(_, log_count, filtered)) in report.primes.iter_mut().zip(&trace.step1) {
        summary.linear_log_count = Some(log_count);
        summary.filtered_count = Some(filtered);
    }
    report.solution_count = Some(trace.solutions.len());
    let l = trace.l;

    let stage = Instant::now();
    let omega = build_omega(&trace.solutions, g, l);
    report.timings.omega = millis(stage);
    report.omega_size = Some((omega.order(), omega.edge_count()));
    report.solutions = trace.solutions;

    let stage = Instant::now();
    let cliques = enumerate_n_cliques(&omega, n);
    report.clique_count = Some(cliques.len());
    report.verdict = match render_verdict(g, wd.class, &omega, &cliques) {
        Ok(v) => v,
        Err(e) => Verdict::undecided(
            "inconsistent",
            e.to_string(),
            VerdictStats {
                omega_vertices: omega.order(),
                omega_edges: omega.edge_count(),
                clique_count: cliques.len(),
                ..stats
            },
        ),
    };
    report.timings.cliques = millis(stage);
    report.level = Some(lb);
}

#[derive(Clone, Copy, Debug)]
pub struct BatchOptions {
    pub n: usize,
    /// Supported graphs to analyze; unsupported draws do not count.
    pub count: usize,
    pub seed: u64,
    pub analyze: AnalyzeOptions,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchRow {
    pub index: usize,
    pub seed: u64,
    pub graph6: String,
    pub controllability: Controllability,
    #[serde(rename = "L", serialize_with = "serde_big::big_opt")]
    pub l: Option<BigInt>,
    pub omega_vertices: Option<usize>,
    pub clique_count: Option<usize>,
    pub verdict: VerdictStatus,
    pub millis: f64,
}

impl BatchRow {
    fn from_report(index: usize, seed: u64, r: &AnalysisReport) -> Self {
        BatchRow {
            index,
            seed,
            graph6: r.graph6.clone(),
            controllability: r.controllability,
            l: r.level.as_ref().map(|lb| lb.l.clone()),
            omega_vertices: r.omega_size.map(|(v, _)| v),
            clique_count: r.clique_count,
            verdict: r.status(),
            millis: r.timings.total,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub schema_version: u32,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub cap: u64,
    /// Draws with `rank W <= n - 2`, skipped.
    pub discarded: usize,
    pub dgs: usize,
    /// DGS graphs whose Ω is `K_n`.
    pub dgs_omega_complete: usize,
    pub non_dgs: usize,
    pub undecided: usize,
    #[serde(skip)]
    pub rows: Vec<BatchRow>,
}

/// Draws `G(n, 1/2)` graphs with seeds `seed, seed + 1, ...`, keeps the first
/// `count` supported ones and analyzes them. Rows come back in draw order
/// whatever the thread count.
pub fn batch(opts: &BatchOptions) -> BatchSummary {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().expect("thread pool");
    pool.install(|| batch_in_pool(opts))
}

fn batch_in_pool(opts: &BatchOptions) -> BatchSummary {
    let mut rows = Vec::with_capacity(opts.count);
    let mut reports = Vec::with_capacity(opts.count);
    let mut discarded = 0;
    let mut next_draw = 0u64;
    while rows.len() < opts.count {
        // Overdraw a little: unsupported graphs are rare but not absent.
        let want = opts.count - rows.len();
        let chunk = (want + want / 8 + 4) as u64;
        let draws: Vec<(u64, Graph)> = (next_draw..next_draw + chunk)
            .map(|k| {
                let seed = opts.seed.wrapping_add(k);
                (seed, random_gnp_half(opts.n, seed).expect("order checked by caller"))
            })
            .collect();
        next_draw += chunk;
        let analyzed: Vec<(u64, AnalysisReport)> =
            draws.into_par_iter().map(|(seed, g)| (seed, analyze(&g, &opts.analyze))).collect();
        for (seed, r) in analyzed {
            if rows.len() == opts.count {
                break;
            }
            if r.controllability == Controllability::Unsupported {
                discarded += 1;
                continue;
            }
            rows.push(BatchRow::from_report(rows.len(), seed, &r));
            reports.push(r);
        }
    }
    let tally = |s: VerdictStatus| reports.iter().filter(|r| r.status() == s).count();
    BatchSummary {
        schema_version: SCHEMA_VERSION,
        n: opts.n,
        count: opts.count,
        seed: opts.seed,
        cap: opts.analyze.cap,
        discarded,
        dgs: tally(VerdictStatus::Dgs),
        dgs_omega_complete: reports
            .iter()
            .filter(|r| r.status() == VerdictStatus::Dgs && r.omega_is_complete())
            .count(),
        non_dgs: tally(VerdictStatus::NonDgs),
        undecided: tally(VerdictStatus::Undecided),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsupported_and_trivial() {
        let e3 = Graph::empty(3).unwrap();
        let r = analyze(&e3, &AnalyzeOptions::default());
        assert_eq!(r.status(), VerdictStatus::Undecided);
        assert_eq!(r.verdict.reason.as_ref().unwrap().code, "unsupported_rank");
        let k1 = Graph::empty(1).unwrap();
        let r = analyze(&k1, &AnalyzeOptions::default());
        assert_eq!(r.status(), VerdictStatus::Dgs);
        assert!(r.omega_is_complete());
    }

    #[test]
    fn k2_is_dgs() {
        let r = analyze(&Graph::complete(2).unwrap(), &AnalyzeOptions::default());
        assert_eq!(r.controllability, Controllability::AlmostControllable);
        assert_eq!(r.status(), VerdictStatus::Dgs);
    }

    #[test]
    fn batch_is_thread_count_independent() {
        let mk = |jobs| BatchOptions { n: 8, count: 12, seed: 5, analyze: AnalyzeOptions::default(), jobs: Some(jobs) };
        let a = batch(&mk(1));
        let b = batch(&mk(4));
        let key = |s: &BatchSummary| s.rows.iter().map(|r| (r.seed, r.graph6.clone(), r.verdict)).collect::<Vec<_>>();
        assert_eq!(key(&a), key(&b));
        assert_eq!(a.rows.len(), 12);
        assert_eq!(a.dgs + a.non_dgs + a.undecided, 12);
    }
}
