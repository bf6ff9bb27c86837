//! Randomized properties over generated graphs and matrices.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use specmate::congruence::{crt_combine, ResidueVector};
use specmate::graph::{canonical_form, emit_graph6, parse_graph6};
use specmate::linalg::{largest_invariant, smith_normal_form, IntMatrix};
use specmate::{analyze, AnalyzeOptions, Graph, VerdictStatus};

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn arb_graph_and_perm(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.order();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph6_round_trips(g in arb_graph(20)) {
        let text = emit_graph6(&g).unwrap();
        prop_assert_eq!(parse_graph6(&text).unwrap(), g);
    }

    #[test]
    fn relabeling_preserves_the_analysis((g, perm) in arb_graph_and_perm(10)) {
        let h = g.permuted(&perm);
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        let (a, b) = (analyze(&g, &AnalyzeOptions::default()), analyze(&h, &AnalyzeOptions::default()));
        prop_assert_eq!(a.status(), b.status());
        prop_assert_eq!(a.controllability, b.controllability);
        prop_assert_eq!(a.level.as_ref().map(|l| &l.l), b.level.as_ref().map(|l| &l.l));
        let classes = |r: &specmate::AnalysisReport| -> BTreeSet<_> {
            r.verdict.mates.iter().map(|m| m.label.clone()).collect()
        };
        prop_assert_eq!(classes(&a), classes(&b));
    }

    #[test]
    fn complements_share_decidability(g in arb_graph(9)) {
        // The generalized spectrum of G determines that of its complement.
        let (a, b) = (analyze(&g, &AnalyzeOptions::default()), analyze(&g.complement(), &AnalyzeOptions::default()));
        if a.status() != VerdictStatus::Undecided && b.status() != VerdictStatus::Undecided {
            prop_assert_eq!(a.status(), b.status());
            prop_assert_eq!(a.verdict.mates.len(), b.verdict.mates.len());
        }
    }

    #[test]
    fn largest_invariant_agrees_with_smith(rows in proptest::collection::vec(proptest::collection::vec(-20i64..=20, 5), 5)) {
        let m = IntMatrix::from_rows(&rows);
        let snf = smith_normal_form(&m, false);
        match largest_invariant(&m) {
            Some((_, dn)) => prop_assert_eq!(dn, snf.last_invariant()),
            None => prop_assert!(snf.rank < 5),
        }
    }

    #[test]
    fn crt_reconstructs(x in -1_000_000i64..1_000_000) {
        let moduli = [8i64, 9, 25, 7];
        let parts: Vec<ResidueVector> = moduli
            .iter()
            .map(|&m| ResidueVector::new(BigInt::from(m), [BigInt::from(x)]))
            .collect();
        let combined = crt_combine(&parts).unwrap();
        prop_assert_eq!(combined.modulus.clone(), BigInt::from(12600));
        prop_assert_eq!(combined.entries[0].clone(), BigInt::from(x).mod_floor(&BigInt::from(12600)));
    }
}
