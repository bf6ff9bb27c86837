//! Fixture loading shared by the integration tests.
#![allow(dead_code)]

use specmate::Graph;

pub fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn graph(name: &str) -> Graph {
    Graph::parse_adjacency_text(&data(name)).unwrap()
}

/// Whitespace-separated integer rows, `#` comments skipped, each entry scaled.
pub fn vectors(name: &str, scale: i64) -> Vec<Vec<i64>> {
    data(name)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse::<i64>().unwrap() * scale).collect())
        .collect()
}
