//! Inputs shared by the benchmarks in `benches/`.

use specmate::graph::random_gnp_half;
use specmate::Graph;

/// The 13-vertex controllable example with two cospectral mates.
pub fn example1() -> Graph {
    Graph::parse_adjacency_text(include_str!("../../core/tests/data/example1.adj")).expect("fixture parses")
}

/// The 9-vertex almost controllable example.
pub fn example2() -> Graph {
    Graph::parse_adjacency_text(include_str!("../../core/tests/data/example2.adj")).expect("fixture parses")
}

/// A fixed `G(n, 1/2)` draw.
pub fn random(n: usize, seed: u64) -> Graph {
    random_gnp_half(n, seed).expect("order in range")
}
