//! Directed multigraphs and pointed graphs.
//!
//! A [`Digraph`] is a finite directed multigraph with loops and parallel
//! edges. A [`PointedGraph`] additionally marks vertex `0` as the
//! distinguished vertex, which carries the function slot of a differential
//! operator and is exempt from all (semi)stability conditions.
//!
//! Edges are kept sorted lexicographically by `(tail, head)`, so two graphs
//! with the same vertex count and the same edge multiset compare equal.
//! An [`EdgeRef`] indexes this sorted order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub type Vertex = usize;

/// Index into the sorted edge list of a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Digraph {
    vertex_count: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl Digraph {
    pub fn new(vertex_count: usize, mut edges: Vec<(Vertex, Vertex)>) -> Result<Self> {
        for &(t, h) in &edges {
            if t >= vertex_count || h >= vertex_count {
                return domain(format!("edge {t}->{h} out of range for {vertex_count} vertices"));
            }
        }
        edges.sort_unstable();
        Ok(Digraph { vertex_count, edges })
    }

    /// Builds a graph from a square multiplicity matrix, `m[u][v]` edges `u -> v`.
    pub fn from_multiplicities(m: &[Vec<u32>]) -> Self {
        let n = m.len();
        let mut edges = Vec::new();
        for (u, row) in m.iter().enumerate() {
            for (v, &k) in row.iter().enumerate() {
                for _ in 0..k {
                    edges.push((u, v));
                }
            }
        }
        Digraph { vertex_count: n, edges }
    }

    pub fn empty(vertex_count: usize) -> Self {
        Digraph {
            vertex_count,
            edges: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeRef) -> Result<(Vertex, Vertex)> {
        self.edges
            .get(e.0)
            .copied()
            .ok_or_else(|| Error::Domain(format!("edge index {} out of range", e.0)))
    }

    /// `(indegree, outdegree)`; a loop adds one to each.
    pub fn degrees(&self, v: Vertex) -> Result<(usize, usize)> {
        if v >= self.vertex_count {
            return domain(format!("vertex {v} out of range"));
        }
        Ok(self.degrees_unchecked(v))
    }

    pub(crate) fn degrees_unchecked(&self, v: Vertex) -> (usize, usize) {
        let mut indeg = 0;
        let mut outdeg = 0;
        for &(t, h) in &self.edges {
            if t == v {
                outdeg += 1;
            }
            if h == v {
                indeg += 1;
            }
        }
        (indeg, outdeg)
    }

    /// All `(indegree, outdegree)` pairs at once.
    pub fn degree_table(&self) -> Vec<(usize, usize)> {
        let mut d = vec![(0, 0); self.vertex_count];
        for &(t, h) in &self.edges {
            d[t].1 += 1;
            d[h].0 += 1;
        }
        d
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count;
        let mut a = vec![vec![0u32; n]; n];
        for &(t, h) in &self.edges {
            a[t][h] += 1;
        }
        a
    }

    pub fn loop_count(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|&&(t, h)| t == v && h == v).count()
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[Vertex]) -> Digraph {
        debug_assert_eq!(perm.len(), self.vertex_count);
        let mut edges: Vec<_> = self.edges.iter().map(|&(t, h)| (perm[t], perm[h])).collect();
        edges.sort_unstable();
        Digraph {
            vertex_count: self.vertex_count,
            edges,
        }
    }

    /// Disjoint union; the vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Digraph) -> Digraph {
        let off = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(t, h)| (t + off, h + off)));
        edges.sort_unstable();
        Digraph {
            vertex_count: off + other.vertex_count,
            edges,
        }
    }

    /// The subgraph induced on `keep` (in the given order), edges restricted.
    pub fn induced(&self, keep: &[Vertex]) -> Digraph {
        let mut map = vec![usize::MAX; self.vertex_count];
        for (i, &v) in keep.iter().enumerate() {
            map[v] = i;
        }
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(t, h)| map[t] != usize::MAX && map[h] != usize::MAX)
            .map(|&(t, h)| (map[t], map[h]))
            .collect();
        edges.sort_unstable();
        Digraph {
            vertex_count: keep.len(),
            edges,
        }
    }

    /// Removes vertex `v` and its incident edges; higher ids shift down by one.
    pub fn remove_vertex(&self, v: Vertex) -> Digraph {
        let keep: Vec<_> = (0..self.vertex_count).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    /// Transitive reachability, `r[u][v]` iff a directed path (possibly empty) joins them.
    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count;
        let mut r = vec![vec![false; n]; n];
        for (v, row) in r.iter_mut().enumerate() {
            row[v] = true;
        }
        for &(t, h) in &self.edges {
            r[t][h] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        r
    }

    /// Strongly connected components, each sorted, ordered by least vertex.
    pub fn scc(&self) -> Vec<Vec<Vertex>> {
        let n = self.vertex_count;
        let r = self.reachability();
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<Vertex>> = Vec::new();
        for v in 0..n {
            if comp[v] != usize::MAX {
                continue;
            }
            let id = out.len();
            let members: Vec<_> = (v..n).filter(|&u| r[v][u] && r[u][v]).collect();
            for &u in &members {
                comp[u] = id;
            }
            out.push(members);
        }
        out
    }

    /// Graph of SCCs; edges between distinct components keep their multiplicity.
    pub fn condensation(&self) -> Digraph {
        let comps = self.scc();
        let mut id = vec![0; self.vertex_count];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                id[v] = c;
            }
        }
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(t, h)| id[t] != id[h])
            .map(|&(t, h)| (id[t], id[h]))
            .collect();
        edges.sort_unstable();
        Digraph {
            vertex_count: comps.len(),
            edges,
        }
    }

    /// A graph with at most one SCC. The empty graph counts as strong.
    pub fn is_strong(&self) -> bool {
        self.scc().len() <= 1
    }

    pub fn is_balanced(&self) -> bool {
        self.degree_table().iter().all(|&(i, o)| i == o)
    }

    /// Every edge subset in which each touched vertex has exactly one incoming
    /// and one outgoing edge, i.e. a disjoint union of directed cycles.
    pub fn linear_subgraphs(&self) -> Vec<LinearSubgraph> {
        let n = self.vertex_count;
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &(t, _)) in self.edges.iter().enumerate() {
            out_edges[t].push(i);
        }
        let mut result = Vec::new();
        let mut chosen: Vec<Option<usize>> = vec![None; n];
        let mut head_used = vec![false; n];
        self.linear_rec(0, &out_edges, &mut chosen, &mut head_used, &mut result);
        result
    }

    fn linear_rec(
        &self,
        v: usize,
        out_edges: &[Vec<usize>],
        chosen: &mut Vec<Option<usize>>,
        head_used: &mut Vec<bool>,
        result: &mut Vec<LinearSubgraph>,
    ) {
        let n = self.vertex_count;
        if v == n {
            // The chosen successor map must be a permutation of the used set.
            let used_tail: Vec<bool> = chosen.iter().map(Option::is_some).collect();
            if used_tail != *head_used {
                return;
            }
            let mut succ = vec![usize::MAX; n];
            let mut edges = Vec::new();
            for (t, c) in chosen.iter().enumerate() {
                if let Some(e) = *c {
                    succ[t] = self.edges[e].1;
                    edges.push(EdgeRef(e));
                }
            }
            let mut seen = vec![false; n];
            let mut components = 0;
            for s in 0..n {
                if succ[s] == usize::MAX || seen[s] {
                    continue;
                }
                components += 1;
                let mut x = s;
                while !seen[x] {
                    seen[x] = true;
                    x = succ[x];
                }
            }
            edges.sort();
            result.push(LinearSubgraph { edges, components });
            return;
        }
        chosen[v] = None;
        self.linear_rec(v + 1, out_edges, chosen, head_used, result);
        for &e in &out_edges[v] {
            let h = self.edges[e].1;
            if head_used[h] {
                continue;
            }
            head_used[h] = true;
            chosen[v] = Some(e);
            self.linear_rec(v + 1, out_edges, chosen, head_used, result);
            chosen[v] = None;
            head_used[h] = false;
        }
    }

    /// Number of linear subgraphs with `p` components, indexed by `p`.
    pub fn linear_subgraph_profile(&self) -> Vec<u64> {
        let mut prof = vec![0u64; self.vertex_count + 1];
        for l in self.linear_subgraphs() {
            prof[l.components] += 1;
        }
        while prof.len() > 1 && *prof.last().unwrap() == 0 {
            prof.pop();
        }
        prof
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g {};", self.vertex_count)?;
        write_edges(f, &self.edges)
    }
}

fn write_edges(f: &mut fmt::Formatter<'_>, edges: &[(Vertex, Vertex)]) -> fmt::Result {
    for (i, (t, h)) in edges.iter().enumerate() {
        let sep = if i == 0 { " " } else { ", " };
        write!(f, "{sep}{t}->{h}")?;
    }
    Ok(())
}

/// A union of disjoint directed cycles inside a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSubgraph {
    pub edges: Vec<EdgeRef>,
    /// Number of cycles, `p(L)`.
    pub components: usize,
}

/// A digraph whose vertex `0` is the distinguished vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointedGraph {
    graph: Digraph,
}

impl PointedGraph {
    pub fn new(graph: Digraph) -> Result<Self> {
        if graph.vertex_count() == 0 {
            return domain("a pointed graph needs its distinguished vertex");
        }
        Ok(PointedGraph { graph })
    }

    /// The distinguished vertex with no edges.
    pub fn point() -> Self {
        PointedGraph {
            graph: Digraph::empty(1),
        }
    }

    pub fn from_edges(vertex_count: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self> {
        Self::new(Digraph::new(vertex_count, edges)?)
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn ordinary_count(&self) -> usize {
        self.graph.vertex_count() - 1
    }

    /// `Γ₋`: the graph with the distinguished vertex and its edges removed.
    pub fn without_distinguished(&self) -> Digraph {
        self.graph.remove_vertex(0)
    }
}

impl fmt::Display for PointedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p {};", self.graph.vertex_count)?;
        write_edges(f, &self.graph.edges)
    }
}

/// Behaviour shared by plain and pointed graphs.
///
/// The only difference between the two kinds is that a pointed graph has a
/// distinguished vertex `0` that is never tested for (semi)stability and
/// never satisfies a contractibility condition on its own.
pub trait GraphLike: Clone + fmt::Debug + fmt::Display + Eq + std::hash::Hash + Send + Sync {
    const POINTED: bool;

    fn digraph(&self) -> &Digraph;

    /// Wraps a raw digraph as this kind. Pointed graphs need at least one vertex.
    fn from_digraph(d: Digraph) -> Result<Self>;

    fn distinguished(&self) -> Option<Vertex> {
        if Self::POINTED {
            Some(0)
        } else {
            None
        }
    }

    fn is_ordinary(&self, v: Vertex) -> bool {
        !(Self::POINTED && v == 0)
    }

    fn ordinary_vertices(&self) -> std::ops::Range<usize> {
        let start = usize::from(Self::POINTED);
        start..self.digraph().vertex_count()
    }

    fn ordinary_vertex_count(&self) -> usize {
        self.digraph().vertex_count() - usize::from(Self::POINTED)
    }

    fn degrees(&self, v: Vertex) -> Result<(usize, usize)> {
        self.digraph().degrees(v)
    }

    /// `|E| - |V|`, counting ordinary vertices only.
    fn weight(&self) -> i64 {
        self.digraph().edge_count() as i64 - self.ordinary_vertex_count() as i64
    }

    fn is_semistable(&self) -> bool {
        let d = self.digraph().degree_table();
        self.ordinary_vertices().all(|v| is_semistable_degree(d[v]))
    }

    fn is_stable(&self) -> bool {
        let d = self.digraph().degree_table();
        self.ordinary_vertices().all(|v| d[v].0 >= 2 && d[v].1 >= 2)
    }

    fn is_strong(&self) -> bool {
        self.digraph().is_strong()
    }

    fn is_balanced(&self) -> bool {
        self.digraph().is_balanced()
    }

    /// Non-loop edges `u -> v` with `deg⁺(u) = 1` or `deg⁻(v) = 1`, where the
    /// firing endpoint must be ordinary.
    fn contractible_edges(&self) -> Result<Vec<EdgeRef>> {
        if !self.is_semistable() {
            return domain(format!("{self} is not semistable"));
        }
        Ok(self.contractible_edges_unchecked())
    }

    #[doc(hidden)]
    fn contractible_edges_unchecked(&self) -> Vec<EdgeRef> {
        let g = self.digraph();
        let d = g.degree_table();
        g.edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(u, v))| {
                u != v && ((self.is_ordinary(u) && d[u].1 == 1) || (self.is_ordinary(v) && d[v].0 == 1))
            })
            .map(|(i, _)| EdgeRef(i))
            .collect()
    }

    /// Merges the endpoints of a contractible edge and drops the edge.
    fn contract_edge(&self, e: EdgeRef) -> Result<Self> {
        if !self.contractible_edges()?.contains(&e) {
            return domain(format!("edge {} of {self} is not contractible", e.0));
        }
        Ok(self.contract_unchecked(e))
    }

    #[doc(hidden)]
    fn contract_unchecked(&self, e: EdgeRef) -> Self {
        let g = self.digraph();
        let (u, v) = g.edges()[e.0];
        let (keep, gone) = (u.min(v), u.max(v));
        let relabel = |x: Vertex| -> Vertex {
            let x = if x == gone { keep } else { x };
            if x > gone {
                x - 1
            } else {
                x
            }
        };
        let edges: Vec<_> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != e.0)
            .map(|(_, &(t, h))| (relabel(t), relabel(h)))
            .collect();
        let d = Digraph::new(g.vertex_count() - 1, edges).expect("relabelled edges stay in range");
        Self::from_digraph(d).expect("contraction keeps the distinguished vertex")
    }
}

pub(crate) fn is_semistable_degree((i, o): (usize, usize)) -> bool {
    i >= 1 && o >= 1 && i + o >= 3
}

impl GraphLike for Digraph {
    const POINTED: bool = false;

    fn digraph(&self) -> &Digraph {
        self
    }

    fn from_digraph(d: Digraph) -> Result<Self> {
        Ok(d)
    }
}

impl GraphLike for PointedGraph {
    const POINTED: bool = true;

    fn digraph(&self) -> &Digraph {
        &self.graph
    }

    fn from_digraph(d: Digraph) -> Result<Self> {
        PointedGraph::new(d)
    }
}

/// `det(M)` of a small integer matrix by fraction-free elimination.
/// The empty matrix has determinant one.
pub fn integer_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// `det(I - A(G))` of the adjacency matrix.
pub fn det_identity_minus_adjacency(g: &Digraph) -> i64 {
    let a = g.adjacency_matrix();
    let m: Vec<Vec<i64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &x)| i64::from(i == j) - x as i64)
                .collect()
        })
        .collect();
    integer_det(&m)
}

/// `det(A(G) - I)`, equal to `(-1)^{|V|} det(I - A(G))`.
pub fn det_adjacency_minus_identity(g: &Digraph) -> i64 {
    let s = if g.vertex_count().is_multiple_of(2) { 1 } else { -1 };
    s * det_identity_minus_adjacency(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2() -> Digraph {
        Digraph::new(1, vec![(0, 0), (0, 0)]).unwrap()
    }
    fn ns() -> Digraph {
        Digraph::new(2, vec![(0, 0), (1, 1), (0, 1)]).unwrap()
    }
    fn h3() -> Digraph {
        Digraph::new(2, vec![(1, 0), (1, 0), (0, 1)]).unwrap()
    }

    #[test]
    fn degrees_count_loops_once_each_way() {
        assert_eq!(l2().degrees(0).unwrap(), (2, 2));
        assert_eq!(ns().degrees(0).unwrap(), (1, 2));
        assert_eq!(PointedGraph::point().degrees(0).unwrap(), (0, 0));
        assert!(l2().degrees(3).is_err());
    }

    #[test]
    fn stability_predicates() {
        assert!(l2().is_stable());
        assert!(ns().is_semistable());
        assert!(!ns().is_stable());
        assert!(!Digraph::empty(1).is_semistable());
        // the distinguished vertex is exempt
        assert!(PointedGraph::point().is_stable());
    }

    #[test]
    fn weights() {
        assert_eq!(l2().weight(), 1);
        assert_eq!(h3().weight(), 1);
        let p1 = PointedGraph::from_edges(1, vec![(0, 0)]).unwrap();
        assert_eq!(p1.weight(), 1);
        assert_eq!(Digraph::empty(3).weight(), -3);
    }

    #[test]
    fn contractibility() {
        let h = h3();
        // sorted edges: 0->1, 1->0, 1->0
        assert_eq!(h.contractible_edges().unwrap(), vec![EdgeRef(0)]);
        assert!(ns().contractible_edges().unwrap().is_empty());
        assert!(l2().contractible_edges().unwrap().is_empty());
        assert!(Digraph::empty(1).contractible_edges().is_err());
        let c = h.contract_edge(EdgeRef(0)).unwrap();
        assert_eq!(c, l2());
        assert_eq!(c.weight(), 1);
        assert!(h.contract_edge(EdgeRef(1)).is_err());
    }

    #[test]
    fn pointed_contractibility_needs_ordinary_endpoint() {
        // • -> v, v -> • twice: v has indegree 1 so •->v contracts.
        let g = PointedGraph::from_edges(2, vec![(0, 1), (1, 0), (1, 0)]).unwrap();
        assert_eq!(g.contractible_edges().unwrap(), vec![EdgeRef(0)]);
        let c = g.contract_edge(EdgeRef(0)).unwrap();
        assert_eq!(c, PointedGraph::from_edges(1, vec![(0, 0), (0, 0)]).unwrap());
        // • -> v with a loop at v: v has indegree 2, • never fires.
        let g = PointedGraph::from_edges(2, vec![(0, 1), (1, 1)]).unwrap();
        assert!(g.contractible_edges().unwrap().is_empty());
    }

    #[test]
    fn strong_components() {
        assert_eq!(ns().scc(), vec![vec![0], vec![1]]);
        assert!(!ns().is_strong());
        assert!(h3().is_strong());
        assert!(Digraph::empty(1).is_strong());
        let c = ns().condensation();
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c.edges(), &[(0, 1)]);
    }

    #[test]
    fn balance() {
        assert!(l2().is_balanced());
        assert!(!h3().is_balanced());
        assert!(!ns().is_balanced());
    }

    #[test]
    fn adjacency_and_linear_subgraphs() {
        assert_eq!(l2().adjacency_matrix(), vec![vec![2]]);
        let ls = l2().linear_subgraphs();
        let mut p: Vec<_> = ls.iter().map(|l| l.components).collect();
        p.sort();
        assert_eq!(p, vec![0, 1, 1]);
        assert_eq!(Digraph::empty(1).linear_subgraphs().len(), 1);
        assert_eq!(h3().adjacency_matrix(), vec![vec![0, 1], vec![2, 0]]);
        let ls = h3().linear_subgraphs();
        assert_eq!(ls.len(), 3);
        assert_eq!(h3().linear_subgraph_profile(), vec![1, 2]);
    }

    #[test]
    fn determinants() {
        assert_eq!(det_identity_minus_adjacency(&l2()), -1);
        assert_eq!(det_identity_minus_adjacency(&h3()), -1);
        assert_eq!(det_identity_minus_adjacency(&Digraph::empty(1)), 1);
        assert_eq!(det_identity_minus_adjacency(&Digraph::empty(0)), 1);
        assert_eq!(det_adjacency_minus_identity(&l2()), 1);
        assert_eq!(integer_det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(integer_det(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]), 18);
    }

    #[test]
    fn out_of_range_edges_rejected() {
        assert!(Digraph::new(1, vec![(0, 1)]).is_err());
        assert!(PointedGraph::new(Digraph::empty(0)).is_err());
    }
}
