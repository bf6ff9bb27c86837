//! Canonical labeling by individualization and refinement.
//!
//! The search tree is the usual one: refine an ordered partition to an
//! equitable one, branch on the vertices of the first smallest non-singleton
//! cell, and take the lexicographically largest relabeled adjacency among the
//! leaves. Two leaves yielding the same relabeled graph give an automorphism;
//! those are kept and used to skip children lying in one orbit of the
//! automorphisms that fix the current branch point-wise.

use super::Graph;

/// A byte string equal for two graphs iff they are isomorphic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalLabel(pub Vec<u8>);

impl CanonicalLabel {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

type Partition = Vec<Vec<usize>>;

fn mask_of(cell: &[usize]) -> u64 {
    cell.iter().fold(0u64, |m, &v| m | 1 << v)
}

/// Splits cells by neighbour counts into each splitter cell until stable.
fn refine(g: &Graph, cells: &mut Partition) {
    let mut s = 0;
    while s < cells.len() {
        let splitter = mask_of(&cells[s]);
        let mut split_any = false;
        let mut next: Partition = Vec::with_capacity(cells.len());
        for cell in cells.iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(u32, usize)> = cell.iter().map(|&v| ((g.row(v) & splitter).count_ones(), v)).collect();
            keyed.sort_unstable();
            let first = keyed[0].0;
            if keyed.iter().all(|&(k, _)| k == first) {
                next.push(cell.clone());
                continue;
            }
            split_any = true;
            let mut current = vec![keyed[0].1];
            for w in keyed.windows(2) {
                if w[1].0 != w[0].0 {
                    next.push(std::mem::take(&mut current));
                }
                current.push(w[1].1);
            }
            next.push(current);
        }
        *cells = next;
        if split_any {
            s = 0;
        } else {
            s += 1;
        }
    }
}

struct Leaf {
    image: Vec<u64>,
    order: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'a> {
    g: &'a Graph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl<'a> Search<'a> {
    fn relabeled(&self, order: &[usize]) -> Vec<u64> {
        let n = order.len();
        let mut pos = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        order
            .iter()
            .map(|&v| {
                let mut row = 0u64;
                for w in self.g.neighbors(v) {
                    // Column k of the canonical row is stored at bit (63 - k) so
                    // that integer comparison matches lexicographic order.
                    row |= 1u64 << (63 - pos[w]);
                }
                row
            })
            .collect()
    }

    fn record_automorphism(&mut self, from: &[usize], to: &[usize]) {
        let mut perm = vec![0usize; from.len()];
        for (k, &v) in from.iter().enumerate() {
            perm[v] = to[k];
        }
        if perm.iter().enumerate().any(|(i, &p)| i != p) {
            self.generators.push(perm);
        }
    }

    /// Returns the depth to unwind to when this leaf is automorphic to the
    /// first or best leaf: everything below that ancestor on the current path
    /// is an image of an explored subtree.
    fn leaf(&mut self, cells: &Partition, path: &[usize]) -> Option<usize> {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let image = self.relabeled(&order);
        let Some(first) = &self.first else {
            let leaf = Leaf { image, order, path: path.to_vec() };
            self.best = Some(Leaf { image: leaf.image.clone(), order: leaf.order.clone(), path: leaf.path.clone() });
            self.first = Some(leaf);
            return None;
        };
        if image == first.image {
            let (from, depth) = (first.order.clone(), common_prefix(&first.path, path));
            self.record_automorphism(&from, &order);
            return Some(depth);
        }
        let best = self.best.as_ref().expect("best is set with first");
        match image.cmp(&best.image) {
            std::cmp::Ordering::Greater => {
                self.best = Some(Leaf { image, order, path: path.to_vec() });
                None
            }
            std::cmp::Ordering::Equal => {
                let (from, depth) = (best.order.clone(), common_prefix(&best.path, path));
                self.record_automorphism(&from, &order);
                Some(depth)
            }
            std::cmp::Ordering::Less => None,
        }
    }

    /// Orbit representatives under generators that fix every vertex of `fixed`.
    fn orbit_roots(&self, fixed: &[usize]) -> Vec<usize> {
        let n = self.g.order();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for gen in &self.generators {
            if fixed.iter().any(|&v| gen[v] != v) {
                continue;
            }
            for (i, &j) in gen.iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).map(|x| find(&mut parent, x)).collect()
    }

    fn run(&mut self, cells: Partition, fixed: &mut Vec<usize>) -> Option<usize> {
        let Some(target) =
            cells.iter().enumerate().filter(|(_, c)| c.len() > 1).min_by_key(|(i, c)| (c.len(), *i)).map(|(i, _)| i)
        else {
            return self.leaf(&cells, fixed);
        };
        let depth = fixed.len();
        let mut tried_roots: Vec<usize> = Vec::new();
        for &v in &cells[target] {
            let roots = self.orbit_roots(fixed);
            if tried_roots.iter().any(|&u| roots[u] == roots[v]) {
                continue;
            }
            tried_roots.push(v);
            let mut child: Partition = Vec::with_capacity(cells.len() + 1);
            child.extend(cells[..target].iter().cloned());
            child.push(vec![v]);
            child.push(cells[target].iter().copied().filter(|&w| w != v).collect());
            child.extend(cells[target + 1..].iter().cloned());
            refine(self.g, &mut child);
            fixed.push(v);
            let jump = self.run(child, fixed);
            fixed.pop();
            if let Some(to) = jump {
                if to < depth {
                    return Some(to);
                }
            }
        }
        None
    }
}

fn search(g: &Graph) -> Search<'_> {
    let mut cells: Partition = vec![(0..g.order()).collect()];
    refine(g, &mut cells);
    let mut s = Search { g, first: None, best: None, generators: Vec::new() };
    s.run(cells, &mut Vec::new());
    s
}

pub fn canonical_form(g: &Graph) -> CanonicalLabel {
    let s = search(g);
    let rows = s.best.expect("search always reaches a leaf").image;
    let mut bytes = Vec::with_capacity(1 + 8 * rows.len());
    bytes.push(g.order() as u8);
    for r in rows {
        bytes.extend_from_slice(&r.to_be_bytes());
    }
    CanonicalLabel(bytes)
}

/// Generators (not necessarily a minimal set) of the automorphism group;
/// empty iff the group is trivial.
pub fn automorphism_generators(g: &Graph) -> Vec<Vec<usize>> {
    search(g).generators
}

pub fn is_asymmetric(g: &Graph) -> bool {
    automorphism_generators(g).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_gnp_half;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if prefix.len() == used.len() {
                out.push(prefix.clone());
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    prefix.push(v);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    fn all_graphs(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        (0u32..(1 << pairs.len()))
            .map(|mask| {
                let edges: Vec<_> =
                    pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
                Graph::from_edges(n, &edges).unwrap()
            })
            .collect()
    }

    #[test]
    fn path_relabelings_agree() {
        let a = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges(3, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_ne!(canonical_form(&a), canonical_form(&Graph::complete(3).unwrap()));
    }

    #[test]
    fn brute_force_asymmetry_small_orders() {
        // K1 only has the identity; every graph on 2..=5 vertices has a
        // non-trivial automorphism.
        assert!(is_asymmetric(&Graph::empty(1).unwrap()));
        assert!(!is_asymmetric(&Graph::complete(3).unwrap()));
        for n in 2..=5 {
            let perms = permutations(n);
            for g in all_graphs(n) {
                let brute = perms.iter().skip(1).any(|p| g.permuted(p) == g);
                assert!(brute, "brute force found no automorphism");
                assert_eq!(is_asymmetric(&g), !brute);
            }
        }
    }

    #[test]
    fn asymmetric_six_vertex_graphs_exist() {
        // Smallest nontrivial asymmetric graphs live on six vertices.
        let perms = permutations(6);
        let mut found = 0;
        for g in all_graphs(6) {
            let brute = perms.iter().skip(1).any(|p| g.permuted(p) == g);
            assert_eq!(is_asymmetric(&g), !brute);
            found += (!brute) as usize;
        }
        assert!(found > 0);
    }

    #[test]
    fn canonical_matches_brute_force_isomorphism_on_five_vertices() {
        let perms = permutations(5);
        let graphs = all_graphs(5);
        let brute_key =
            |g: &Graph| perms.iter().map(|p| crate::graph::emit_graph6(&g.permuted(p)).unwrap()).min().unwrap();
        let mut classes = std::collections::HashMap::new();
        for g in &graphs {
            let c = canonical_form(g);
            let b = brute_key(g);
            let prev = classes.entry(c).or_insert_with(|| b.clone());
            assert_eq!(*prev, b);
        }
        // 34 isomorphism classes of graphs on five vertices.
        assert_eq!(classes.len(), 34);
    }

    #[test]
    fn highly_symmetric_graphs_terminate() {
        for n in [1usize, 2, 17, 40, 64] {
            let e = Graph::empty(n).unwrap();
            let k = Graph::complete(n).unwrap();
            assert_ne!(canonical_form(&e) == canonical_form(&k), n > 1);
        }
        // Disjoint union of triangles on 30 vertices.
        let mut edges = Vec::new();
        for b in 0..10 {
            edges.extend([(3 * b, 3 * b + 1), (3 * b + 1, 3 * b + 2), (3 * b, 3 * b + 2)]);
        }
        let g = Graph::from_edges(30, &edges).unwrap();
        let perm: Vec<usize> = (0..30).map(|i| (i * 7) % 30).collect();
        assert_eq!(canonical_form(&g), canonical_form(&g.permuted(&perm)));
    }

    #[test]
    fn random_relabelings_agree() {
        for seed in 0..30u64 {
            let g = random_gnp_half(12 + (seed as usize % 20), seed).unwrap();
            let n = g.order();
            let perm: Vec<usize> = (0..n).map(|i| (i * 5 + 3) % n).collect();
            if (0..n).map(|i| (i * 5 + 3) % n).collect::<std::collections::HashSet<_>>().len() != n {
                continue;
            }
            assert_eq!(canonical_form(&g), canonical_form(&g.permuted(&perm)));
        }
    }
}
