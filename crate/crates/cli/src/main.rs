//! `specmate`: decide generalized spectral determination and list cospectral mates.
//!
//! Exit status: 0 DGS, 1 not DGS, 2 undecided, 64 bad input or usage.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specmate::graph::{emit_graph6, parse_graph6};
use specmate::pipeline::{AnalysisReport, BatchSummary};
use specmate::{analyze, batch, AnalyzeOptions, BatchOptions, Graph, VerdictStatus, DEFAULT_CAP};

const EXIT_USAGE: u8 = 64;
const MAX_CAP: u64 = 1 << 32;

#[derive(Parser)]
#[command(name = "specmate", version, about = "Generalized spectral characterization of graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one graph and print the report.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cap: Cap,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print one graph6 line per generalized cospectral mate.
    Mates {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cap: Cap,
        /// Write the mates here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze random G(n, 1/2) graphs and tally the verdicts.
    Batch {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=62))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        cap: Cap,
        /// Per-graph rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Summary as JSON; printed to standard output when absent.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
        jobs: Option<u64>,
        /// Write zero for every timing so output is reproducible byte for byte.
        #[arg(long)]
        no_timings: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Graph in graph6 format.
    #[arg(long)]
    graph6: Option<String>,
    /// Adjacency matrix file: the vertex count, then n rows of 0/1 entries.
    #[arg(long)]
    adj: Option<PathBuf>,
}

#[derive(Args)]
struct Cap {
    /// Limit on Step-1 solution counts and their product.
    #[arg(long, env = "SPECMATE_CAP", default_value_t = DEFAULT_CAP,
          value_parser = clap::value_parser!(u64).range(1..=MAX_CAP))]
    cap: u64,
}

impl Input {
    fn load(&self) -> Result<Graph, String> {
        if let Some(text) = &self.graph6 {
            return parse_graph6(text.trim()).map_err(|e| format!("invalid graph6 {text:?}: {e}"));
        }
        let path = self.adj.as_ref().expect("clap enforces one input");
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Graph::parse_adjacency_text(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("specmate: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn exit_for(status: VerdictStatus) -> ExitCode {
    ExitCode::from(status.exit_code() as u8)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze { input, cap, json } => {
            let g = input.load()?;
            let report = analyze(&g, &AnalyzeOptions::with_cap(cap.cap));
            let mut out = io::stdout().lock();
            if json {
                serde_json::to_writer_pretty(&mut out, &report).map_err(|e| e.to_string())?;
                writeln!(out).map_err(|e| e.to_string())?;
            } else {
                write_human(&mut out, &report).map_err(|e| e.to_string())?;
            }
            Ok(exit_for(report.status()))
        }
        Command::Mates { input, cap, out } => {
            let g = input.load()?;
            let report = analyze(&g, &AnalyzeOptions::with_cap(cap.cap));
            let mut lines = String::new();
            for m in &report.verdict.mates {
                lines.push_str(&emit_graph6(&m.mate).map_err(|e| e.to_string())?);
                lines.push('\n');
            }
            match out {
                Some(path) => write_file(&path, lines.as_bytes())?,
                None => io::stdout().write_all(lines.as_bytes()).map_err(|e| e.to_string())?,
            }
            if let Some(reason) = &report.verdict.reason {
                eprintln!("undecided: {reason}");
            }
            Ok(exit_for(report.status()))
        }
        Command::Batch { n, count, seed, cap, csv, json, jobs, no_timings } => {
            let opts = BatchOptions {
                n: n as usize,
                count: count as usize,
                seed,
                analyze: AnalyzeOptions::with_cap(cap.cap),
                jobs: jobs.map(|j| j as usize),
            };
            let mut summary = batch(&opts);
            if no_timings {
                summary.rows.iter_mut().for_each(|r| r.millis = 0.0);
            }
            if let Some(path) = csv {
                write_file(&path, &batch_csv(&summary)?)?;
            }
            let text = serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())? + "\n";
            match json {
                Some(path) => write_file(&path, text.as_bytes())?,
                None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), String> {
    fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn batch_csv(summary: &BatchSummary) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "index",
        "seed",
        "graph6",
        "controllability",
        "L",
        "omega_vertices",
        "clique_count",
        "verdict",
        "millis",
    ])
    .map_err(|e| e.to_string())?;
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &summary.rows {
        w.write_record([
            r.index.to_string(),
            r.seed.to_string(),
            r.graph6.clone(),
            r.controllability.as_str().to_string(),
            r.l.as_ref().map(ToString::to_string).unwrap_or_default(),
            opt(r.omega_vertices),
            opt(r.clique_count),
            r.verdict.as_str().to_string(),
            format!("{:.3}", r.millis),
        ])
        .map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

fn write_human(out: &mut impl Write, r: &AnalysisReport) -> io::Result<()> {
    writeln!(out, "graph6:           {}", r.graph6)?;
    writeln!(out, "order:            {}", r.order)?;
    writeln!(out, "controllability:  {} (rank W = {})", r.controllability.as_str(), r.walk_rank)?;
    if let Some(d) = &r.walk_dn {
        writeln!(out, "d_n(W):           {d}")?;
    }
    if let Some(g) = &r.delta_gcd {
        writeln!(out, "gcd(disc, d_n):   {g}")?;
    }
    if let Some(lb) = &r.level {
        let factors: Vec<String> = r.primes.iter().map(|p| format!("{}^{}", p.p, p.t)).collect();
        let factors = if factors.is_empty() { String::new() } else { format!(" = {}", factors.join(" * ")) };
        writeln!(out, "level bound L:    {}{factors}", lb.l)?;
    }
    for p in &r.primes {
        writeln!(out, "  p = {}: d_n(W^(p)) = {}", p.p, p.dn)?;
    }
    if let Some(c) = r.solution_count {
        writeln!(out, "solutions:        {c}")?;
    }
    if let Some((v, e)) = r.omega_size {
        writeln!(out, "omega:            {v} vertices, {e} edges")?;
    }
    if let Some(c) = r.clique_count {
        writeln!(out, "cliques:          {c}")?;
    }
    write!(out, "verdict:          {}", r.status().as_str())?;
    match &r.verdict.reason {
        Some(reason) => writeln!(out, " ({reason})")?,
        None if r.status() == VerdictStatus::NonDgs => writeln!(out, " ({} mates)", r.verdict.mates.len())?,
        None => writeln!(out)?,
    }
    for m in &r.verdict.mates {
        let kind = if m.asymmetric { "asymmetric" } else { "symmetric" };
        writeln!(out, "  mate {}  {kind}, {} clique(s)", emit_graph6(&m.mate).unwrap_or_default(), m.preimages)?;
    }
    let t = &r.timings;
    writeln!(
        out,
        "timings (ms):     walk {:.2}, level {:.2}, solve {:.2}, omega {:.2}, cliques {:.2}, total {:.2}",
        t.walk, t.level, t.solve, t.omega, t.cliques, t.total
    )
}
