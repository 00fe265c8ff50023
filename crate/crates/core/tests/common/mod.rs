//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use num::BigUint;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use weylgraph::enumerate::{enumerate_graphs, EnumOptions, Limits};
use weylgraph::graph::{Digraph, GraphLike};
use weylgraph::stabilize::stabilize;

/// Every semistable graph of weight one or two.
pub fn all_semistable<G: GraphLike>() -> Vec<G> {
    let l = Limits::default();
    (1..=2)
        .flat_map(|k| enumerate_graphs::<G>(k, EnumOptions::default(), &l).unwrap())
        .collect()
}

pub fn stabilizable<G: GraphLike>() -> Vec<G> {
    all_semistable::<G>()
        .into_iter()
        .filter(|g| stabilize(g).unwrap().stabilizable)
        .collect()
}

/// Contracts uniformly random contractible edges until none remain.
pub fn random_order_terminal<G: GraphLike>(g: &G, rng: &mut ChaCha8Rng) -> G {
    let mut cur = g.clone();
    loop {
        let edges = cur.contractible_edges().unwrap();
        let Some(&e) = edges.choose(rng) else { return cur };
        cur = cur.contract_edge(e).unwrap();
    }
}

/// Subdivides edge `e` by a fresh pass-through vertex.
pub fn subdivide<G: GraphLike>(g: &G, e: usize) -> G {
    let d = g.digraph();
    let x = d.vertex_count();
    let mut edges = d.edges().to_vec();
    let (t, h) = edges.remove(e);
    edges.push((t, x));
    edges.push((x, h));
    G::from_digraph(Digraph::new(x + 1, edges).unwrap()).unwrap()
}

/// Vertex permutations preserving the multiplicity matrix, times the
/// orderings of parallel edges.
pub fn brute_force_aut(d: &Digraph, pointed: bool) -> BigUint {
    let n = d.vertex_count();
    let m = d.adjacency_matrix();
    let mut count = 0u64;
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, usize::from(pointed && n > 0), &mut |p| {
        if (0..n).all(|u| (0..n).all(|v| m[p[u]][p[v]] == m[u][v])) {
            count += 1;
        }
    });
    let mut edge_factor = BigUint::from(1u32);
    for row in &m {
        for &k in row {
            for i in 2..=k {
                edge_factor *= i;
            }
        }
    }
    edge_factor * count
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k + 1 >= p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Calls `f` on every multiplicity matrix on `n` vertices with at most
/// `max_e` edges.
pub fn for_each_digraph(n: usize, max_e: u32, f: &mut impl FnMut(&Digraph)) {
    fn go(cells: &mut Vec<u32>, left: u32, n: usize, f: &mut impl FnMut(&Digraph)) {
        if cells.len() == n * n {
            let m: Vec<Vec<u32>> = cells.chunks(n).map(<[u32]>::to_vec).collect();
            f(&Digraph::from_multiplicities(&m));
            return;
        }
        for k in 0..=left {
            cells.push(k);
            go(cells, left - k, n, f);
            cells.pop();
        }
    }
    go(&mut Vec::new(), max_e, n, f);
}

/// `Σ_L (-1)^{p(L)}` over the linear subgraphs of `d`.
pub fn signed_linear_subgraph_count(d: &Digraph) -> i64 {
    d.linear_subgraph_profile()
        .iter()
        .enumerate()
        .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}
