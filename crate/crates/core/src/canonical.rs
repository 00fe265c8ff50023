//! Canonical labelling, isomorphism and automorphism counts.
//!
//! Vertex colours are refined to an equitable partition using in- and
//! out-neighbour multiplicities; non-singleton cells are then individualised
//! one vertex at a time. Every leaf of the search tree is a labelling; the
//! lexicographically least multiplicity matrix among the leaves is the
//! canonical form and the number of leaves reaching it is the number of
//! vertex permutations preserving the multiplicity matrix. No automorphism
//! pruning is done: the graphs handled here have at most a dozen vertices.

use std::fmt;

use num::{BigUint, One};

use crate::graph::{Digraph, GraphLike};

/// Byte string identifying an isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        if !s.len().is_multiple_of(2) {
            return None;
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
            .collect::<Option<Vec<u8>>>()
            .map(CanonicalKey)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Result of canonicalising one graph.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<usize>,
    /// Number of vertex permutations preserving the multiplicity matrix
    /// (and fixing the distinguished vertex, if any).
    pub vertex_automorphisms: u64,
}

pub fn canonical_form<G: GraphLike>(g: &G) -> CanonicalForm {
    let d = g.digraph();
    let n = d.vertex_count();
    let adj = d.adjacency_matrix();
    let mut col: Vec<usize> = {
        let deg = d.degree_table();
        let sig: Vec<(bool, usize, usize, usize)> = (0..n)
            .map(|v| (g.is_ordinary(v), adj[v][v] as usize, deg[v].0, deg[v].1))
            .collect();
        rank(&sig)
    };
    refine(&adj, &mut col);
    let mut best: Option<Vec<u8>> = None;
    let mut best_label = Vec::new();
    let mut count = 0u64;
    search(&adj, col, &mut best, &mut best_label, &mut count);
    let mut key = vec![u8::from(G::POINTED), n as u8];
    key.extend(best.expect("search reaches at least one leaf"));
    CanonicalForm {
        key: CanonicalKey(key),
        labeling: best_label,
        vertex_automorphisms: count,
    }
}

pub fn canonical_key<G: GraphLike>(g: &G) -> CanonicalKey {
    canonical_form(g).key
}

/// The canonical representative of `g`'s isomorphism class.
pub fn canonical_graph<G: GraphLike>(g: &G) -> G {
    let cf = canonical_form(g);
    G::from_digraph(g.digraph().permuted(&cf.labeling)).expect("relabelling keeps vertex 0 fixed")
}

/// Canonical representative together with its key.
pub fn canonicalize<G: GraphLike>(g: &G) -> (CanonicalKey, G) {
    let cf = canonical_form(g);
    let c = G::from_digraph(g.digraph().permuted(&cf.labeling)).expect("vertex 0 stays fixed");
    (cf.key, c)
}

pub fn are_isomorphic<G: GraphLike>(a: &G, b: &G) -> bool {
    a.digraph().vertex_count() == b.digraph().vertex_count()
        && a.digraph().edge_count() == b.digraph().edge_count()
        && canonical_key(a) == canonical_key(b)
}

/// `|Aut(G)|`: vertex permutations preserving multiplicities, times the
/// permutations of each bundle of parallel edges (loops included).
pub fn aut_order<G: GraphLike>(g: &G) -> BigUint {
    let cf = canonical_form(g);
    BigUint::from(cf.vertex_automorphisms) * edge_permutation_factor(g.digraph())
}

/// `Π_{(u,v)} m(u,v)!` over ordered pairs.
pub fn edge_permutation_factor(d: &Digraph) -> BigUint {
    let mut acc = BigUint::one();
    for row in d.adjacency_matrix() {
        for m in row {
            for k in 2..=m {
                acc *= BigUint::from(k);
            }
        }
    }
    acc
}

fn rank<T: Ord + Clone>(sig: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = sig.to_vec();
    distinct.sort();
    distinct.dedup();
    sig.iter()
        .map(|s| distinct.binary_search(s).expect("present"))
        .collect()
}

/// Colour, out-neighbour colours and in-neighbour colours of a vertex.
type Signature = (usize, Vec<(usize, u32)>, Vec<(usize, u32)>);

/// Refines `col` until equitable with respect to edge multiplicities.
fn refine(adj: &[Vec<u32>], col: &mut Vec<usize>) {
    let n = adj.len();
    let mut cells = col.iter().copied().max().map_or(0, |m| m + 1);
    loop {
        let sig: Vec<Signature> = (0..n)
            .map(|v| {
                let mut outs: Vec<(usize, u32)> =
                    (0..n).filter(|&w| adj[v][w] > 0).map(|w| (col[w], adj[v][w])).collect();
                let mut ins: Vec<(usize, u32)> =
                    (0..n).filter(|&w| adj[w][v] > 0).map(|w| (col[w], adj[w][v])).collect();
                outs.sort_unstable();
                ins.sort_unstable();
                (col[v], outs, ins)
            })
            .collect();
        let next = rank(&sig);
        let next_cells = next.iter().copied().max().map_or(0, |m| m + 1);
        *col = next;
        if next_cells == cells {
            return;
        }
        cells = next_cells;
    }
}

fn search(adj: &[Vec<u32>], col: Vec<usize>, best: &mut Option<Vec<u8>>, best_label: &mut Vec<usize>, count: &mut u64) {
    let n = adj.len();
    let cells = col.iter().copied().max().map_or(0, |m| m + 1);
    if cells == n {
        let mut enc = vec![0u8; n * n];
        for u in 0..n {
            for v in 0..n {
                enc[col[u] * n + col[v]] = adj[u][v] as u8;
            }
        }
        match best {
            Some(b) if enc > *b => {}
            Some(b) if enc == *b => *count += 1,
            _ => {
                *best = Some(enc);
                *best_label = col;
                *count = 1;
            }
        }
        return;
    }
    // first non-singleton cell
    let mut size = vec![0usize; cells];
    for &c in &col {
        size[c] += 1;
    }
    let target = (0..cells).find(|&c| size[c] > 1).expect("partition not discrete");
    for x in (0..n).filter(|&v| col[v] == target) {
        let sig: Vec<(usize, bool)> = (0..n).map(|v| (col[v], v != x)).collect();
        let mut next = rank(&sig);
        refine(adj, &mut next);
        search(adj, next, best, best_label, count);
    }
}

#[cfg(test)]
pub(crate) mod brute {
    use super::*;

    /// Counts multiplicity-preserving vertex permutations by enumeration.
    pub fn vertex_automorphisms<G: GraphLike>(g: &G) -> u64 {
        let adj = g.digraph().adjacency_matrix();
        let n = adj.len();
        let start = usize::from(G::POINTED).min(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut count = 0;
        permute(&mut perm, start, &mut |p| {
            if (0..n).all(|u| (0..n).all(|v| adj[u][v] == adj[p[u]][p[v]])) {
                count += 1;
            }
        });
        count
    }

    pub fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k >= p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PointedGraph;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn l2() -> Digraph {
        Digraph::new(1, vec![(0, 0), (0, 0)]).unwrap()
    }
    fn h3() -> Digraph {
        Digraph::new(2, vec![(1, 0), (1, 0), (0, 1)]).unwrap()
    }
    fn ns() -> Digraph {
        Digraph::new(2, vec![(0, 0), (1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn keys_are_deterministic_and_relabel_invariant() {
        assert_eq!(canonical_key(&h3()), canonical_key(&h3()));
        let swapped = h3().permuted(&[1, 0]);
        assert_eq!(canonical_key(&h3()), canonical_key(&swapped));
        assert_ne!(canonical_key(&l2()), canonical_key(&ns()));
        let a = Digraph::new(2, vec![(0, 1), (0, 1), (1, 0)]).unwrap();
        assert!(are_isomorphic(&a, &h3()));
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(aut_order(&l2()), BigUint::from(2u32));
        assert_eq!(aut_order(&h3()), BigUint::from(2u32));
        let p1 = PointedGraph::from_edges(1, vec![(0, 0)]).unwrap();
        assert_eq!(aut_order(&p1), BigUint::from(1u32));
        // two disjoint copies of L2: swap vertices (2) and both loop pairs (2·2)
        let two = l2().disjoint_union(&l2());
        assert_eq!(aut_order(&two), BigUint::from(8u32));
    }

    #[test]
    fn pointed_keys_fix_the_distinguished_vertex() {
        // • -> v versus v -> •  are different pointed graphs
        let a = PointedGraph::from_edges(2, vec![(0, 1), (1, 1), (1, 1)]).unwrap();
        let b = PointedGraph::from_edges(2, vec![(1, 0), (1, 1), (1, 1)]).unwrap();
        assert!(!are_isomorphic(&a, &b));
        // as plain graphs they are mirror images, still not isomorphic
        // but swapping labels of the plain graph is an isomorphism
        assert!(are_isomorphic(a.graph(), &a.graph().permuted(&[1, 0])));
        let c = canonical_graph(&a);
        assert_eq!(c.degrees(0).unwrap(), (0, 1));
    }

    #[test]
    fn hex_round_trip() {
        let k = canonical_key(&h3());
        assert_eq!(CanonicalKey::from_hex(&k.to_hex()), Some(k));
    }

    fn random_graph(rng: &mut ChaCha8Rng) -> Digraph {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(0..=10);
        let edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        Digraph::new(n, edges).unwrap()
    }

    #[test]
    fn relabelling_invariance_and_brute_force_automorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..200 {
            let g = random_graph(&mut rng);
            let key = canonical_key(&g);
            let n = g.vertex_count();
            for _ in 0..20 {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let h = g.permuted(&perm);
                assert_eq!(canonical_key(&h), key, "{g} vs {h}");
            }
            assert_eq!(
                canonical_form(&g).vertex_automorphisms,
                brute::vertex_automorphisms(&g),
                "{g}"
            );
            let p = PointedGraph::new(g.clone()).unwrap();
            assert_eq!(
                canonical_form(&p).vertex_automorphisms,
                brute::vertex_automorphisms(&p),
                "{p}"
            );
            let pk = canonical_key(&p);
            for _ in 0..5 {
                let mut perm: Vec<usize> = (0..n).collect();
                perm[1..].shuffle(&mut rng);
                let q = PointedGraph::new(g.permuted(&perm)).unwrap();
                assert_eq!(canonical_key(&q), pk);
            }
        }
    }

    #[test]
    fn canonical_graph_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_graph(&mut rng);
            let c = canonical_graph(&g);
            assert_eq!(canonical_graph(&c), c);
            assert!(are_isomorphic(&g, &c));
        }
    }
}
