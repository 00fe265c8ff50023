//! Covariant differential operators in the stable pointed-graph basis.
//!
//! An [`OperatorSum`] stores a coefficient function `c` on stable pointed
//! graphs and stands for the operator
//! `Σ_Z c(Z^s) (-1)^{|V(Z)|} / |Aut Z| · Z` over stabilizable semistable
//! pointed graphs `Z`, where `|V|` counts ordinary vertices. Composition is
//! computed directly in this basis by summing over generalized stabilizable
//! (GS) pointed subgraphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigRational, One, Zero};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::canonical::{canonical_key, CanonicalKey};
use crate::enumerate::{enumerate_graphs, stabilization_fibers, EnumOptions, Limits};
use crate::error::{domain, Error, Result};
use crate::graph::{det_identity_minus_adjacency, GraphLike, PointedGraph};
use crate::stabilize::{gs_stable_graph, is_gs};
use crate::sum::GraphSum;
use crate::weyl::aut_rational;

fn sign(exp: usize) -> BigRational {
    if exp.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// A covariant operator given by its coefficients on stable pointed graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorSum {
    coeffs: GraphSum<PointedGraph>,
}

impl OperatorSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// The identity operator: the bare distinguished vertex with `c = 1`.
    pub fn identity() -> Self {
        OperatorSum {
            coeffs: GraphSum::singleton(&PointedGraph::point(), BigRational::one()),
        }
    }

    /// Wraps a coefficient table; every key must be a stable pointed graph.
    pub fn from_coefficients(coeffs: GraphSum<PointedGraph>) -> Result<Self> {
        if let Some(g) = coeffs.graphs().find(|g| !g.is_stable()) {
            return domain(format!("operator coefficients must sit on stable graphs, got {g}"));
        }
        Ok(OperatorSum { coeffs })
    }

    pub fn coefficients(&self) -> &GraphSum<PointedGraph> {
        &self.coeffs
    }

    pub fn coeff(&self, g: &PointedGraph) -> BigRational {
        self.coeffs.coeff(g)
    }

    pub fn coeff_by_key(&self, k: &CanonicalKey) -> BigRational {
        self.coeffs.coeff_by_key(k)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Distinct weights present.
    pub fn weights(&self) -> BTreeSet<usize> {
        self.coeffs.graphs().map(|g| g.weight() as usize).collect()
    }

    pub fn is_strong(&self) -> bool {
        self.coeffs.graphs().all(GraphLike::is_strong)
    }

    /// The operator as an explicit sum over stabilizable semistable pointed
    /// graphs, with coefficients `c(Z^s) (-1)^{|V(Z)|} / |Aut Z|`.
    pub fn expand(&self, limits: &Limits) -> Result<GraphSum<PointedGraph>> {
        let opts = if self.is_strong() {
            EnumOptions::strong()
        } else {
            EnumOptions::default()
        };
        let mut out = GraphSum::new();
        for w in self.weights() {
            for (key, fiber) in stabilization_fibers::<PointedGraph>(w, opts, limits)? {
                let c = self.coeff_by_key(&key);
                if c.is_zero() {
                    continue;
                }
                for z in &fiber.members {
                    let x = &c * sign(z.ordinary_vertex_count()) / aut_rational(z);
                    out.add_term(z, x);
                }
            }
        }
        Ok(out)
    }

    /// Reads the stable-basis coefficients off an expanded operator,
    /// checking that the expansion is exactly of the form [`Self::expand`]
    /// produces.
    pub fn from_expanded(sum: &GraphSum<PointedGraph>, limits: &Limits) -> Result<Self> {
        let mut coeffs = GraphSum::new();
        for g in sum.graphs().filter(|g| g.is_stable()) {
            let c = sum.coeff(g) * sign(g.ordinary_vertex_count()) * aut_rational(g);
            coeffs.add_term(g, c);
        }
        let op = OperatorSum { coeffs };
        if &op.expand(limits)? != sum {
            return domain("sum is not a covariant combination of stabilization fibers");
        }
        Ok(op)
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.coeffs.fmt(f)
    }
}

/// A labelled pointed subgraph `Γ = (S, F)` of `Z` with the quotient `Z/Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphSplit {
    /// Vertices of `Z` in `Γ`, starting with the distinguished vertex.
    pub vertices: Vec<usize>,
    /// Indices into `Z.edges()` of the edges of `Γ`.
    pub edges: Vec<usize>,
    pub sub: PointedGraph,
    pub quotient: PointedGraph,
}

/// `Γ = (S, F)` and `Z/Γ` for a vertex subset `S ∋ •` and an edge subset `F`
/// supported on `S`. In the quotient `S` becomes the new distinguished vertex
/// and every edge outside `F` is kept, so edges inside `S` not in `F` become
/// loops at `•`.
pub fn split(z: &PointedGraph, vertices: &[usize], edges: &[usize]) -> Result<SubgraphSplit> {
    let d = z.graph();
    let n = d.vertex_count();
    if vertices.first() != Some(&0) {
        return domain("subgraph must contain the distinguished vertex first");
    }
    let mut in_s = vec![false; n];
    for &v in vertices {
        if v >= n || in_s[v] {
            return domain(format!("bad vertex subset {vertices:?}"));
        }
        in_s[v] = true;
    }
    let mut sub_index = vec![usize::MAX; n];
    for (i, &v) in vertices.iter().enumerate() {
        sub_index[v] = i;
    }
    let mut quo_index = vec![0; n];
    let mut next = 1;
    for v in 0..n {
        if !in_s[v] {
            quo_index[v] = next;
            next += 1;
        }
    }
    let mut in_f = vec![false; d.edge_count()];
    let mut sub_edges = Vec::with_capacity(edges.len());
    for &e in edges {
        let Some(&(t, h)) = d.edges().get(e) else {
            return domain(format!("edge index {e} out of range"));
        };
        if !in_s[t] || !in_s[h] || in_f[e] {
            return domain(format!("edge {e} is not supported on the vertex subset"));
        }
        in_f[e] = true;
        sub_edges.push((sub_index[t], sub_index[h]));
    }
    let quo_edges = d
        .edges()
        .iter()
        .enumerate()
        .filter(|(e, _)| !in_f[*e])
        .map(|(_, &(t, h))| (quo_index[t], quo_index[h]))
        .collect();
    Ok(SubgraphSplit {
        vertices: vertices.to_vec(),
        edges: edges.to_vec(),
        sub: PointedGraph::from_edges(vertices.len(), sub_edges)?,
        quotient: PointedGraph::from_edges(next, quo_edges)?,
    })
}

const MAX_SUBSET_BITS: usize = 24;

fn for_each_split(z: &PointedGraph, mut visit: impl FnMut(SubgraphSplit)) -> Result<()> {
    let d = z.graph();
    let n = d.vertex_count();
    let m = d.edge_count();
    if n - 1 + m > MAX_SUBSET_BITS {
        return Err(Error::Capacity {
            what: "vertices + edges for subgraph enumeration",
            requested: n - 1 + m,
            limit: MAX_SUBSET_BITS,
        });
    }
    for vmask in 0u32..(1 << (n - 1)) {
        let vertices: Vec<usize> = std::iter::once(0)
            .chain((1..n).filter(|v| vmask >> (v - 1) & 1 == 1))
            .collect();
        let mut inside = vec![false; n];
        for &v in &vertices {
            inside[v] = true;
        }
        let supported: Vec<usize> = (0..m)
            .filter(|&e| {
                let (t, h) = d.edges()[e];
                inside[t] && inside[h]
            })
            .collect();
        for emask in 0u32..(1 << supported.len()) {
            let edges: Vec<usize> = supported
                .iter()
                .enumerate()
                .filter(|(i, _)| emask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            visit(split(z, &vertices, &edges)?);
        }
    }
    Ok(())
}

/// All labelled GS pointed subgraphs `Γ` of a GS pointed graph `Z` whose
/// quotient `Z/Γ` is also GS.
pub fn gs_subgraphs(z: &PointedGraph) -> Result<Vec<SubgraphSplit>> {
    if !is_gs(z) {
        return domain(format!("{z} is not generalized stabilizable"));
    }
    let mut out = Vec::new();
    for_each_split(z, |s| {
        if is_gs(&s.sub) && is_gs(&s.quotient) {
            out.push(s);
        }
    })?;
    Ok(out)
}

/// The strong pointed subgraphs of a strong pointed graph.
pub fn strong_subgraphs(z: &PointedGraph) -> Result<Vec<SubgraphSplit>> {
    if !z.is_strong() {
        return domain(format!("{z} is not strong"));
    }
    let mut out = Vec::new();
    for_each_split(z, |s| {
        if s.sub.is_strong() && is_gs(&s.sub) && is_gs(&s.quotient) {
            out.push(s);
        }
    })?;
    Ok(out)
}

/// Sign attached to each subgraph term of the composition sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CompositionSign {
    /// `c(Z) = Σ_Γ c₁((Z/Γ)^s) c₂(Γ^s)`; agrees with composing the operators.
    #[default]
    Plain,
    /// Each term weighted by `(-1)^{|V((Z/Γ)^s)| + |V(Γ^s)| + |V(Z)|}`.
    VertexParity,
}

/// `op1 ∘ op2` in the stable basis.
///
/// With `strong_only` the target graphs and subgraphs are restricted to
/// strong ones, which is exact when both inputs are supported on strong
/// graphs.
pub fn compose(op1: &OperatorSum, op2: &OperatorSum, strong_only: bool, limits: &Limits) -> Result<OperatorSum> {
    compose_with(op1, op2, strong_only, CompositionSign::Plain, limits)
}

pub fn compose_with(
    op1: &OperatorSum,
    op2: &OperatorSum,
    strong_only: bool,
    rule: CompositionSign,
    limits: &Limits,
) -> Result<OperatorSum> {
    if strong_only && !(op1.is_strong() && op2.is_strong()) {
        return domain("strong composition needs operators supported on strong graphs");
    }
    let mut targets = BTreeSet::new();
    for a in op1.weights() {
        for b in op2.weights() {
            targets.insert(a + b);
        }
    }
    let mut opts = EnumOptions::stable();
    if strong_only {
        opts = opts.with_strong();
    }
    let mut zs: Vec<PointedGraph> = Vec::new();
    for w in targets {
        zs.extend(enumerate_graphs::<PointedGraph>(w, opts, limits)?);
    }
    let c1: BTreeMap<CanonicalKey, BigRational> = op1.coeffs.iter().map(|(k, _, c)| (k.clone(), c.clone())).collect();
    let c2: BTreeMap<CanonicalKey, BigRational> = op2.coeffs.iter().map(|(k, _, c)| (k.clone(), c.clone())).collect();
    let w1 = op1.weights();
    let w2 = op2.weights();

    let coefficient = |z: &PointedGraph| -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for_each_split(z, |s| {
            if strong_only && !s.sub.is_strong() {
                return;
            }
            // cheap weight filter before stabilizing
            let (ws, wq) = (s.sub.weight(), s.quotient.weight());
            if ws < 0 || wq < 0 || !w2.contains(&(ws as usize)) || !w1.contains(&(wq as usize)) {
                return;
            }
            let (Some(gs), Some(qs)) = (gs_stable_graph(&s.sub), gs_stable_graph(&s.quotient)) else {
                return;
            };
            let (Some(a), Some(b)) = (c1.get(&canonical_key(&qs)), c2.get(&canonical_key(&gs))) else {
                return;
            };
            let mut term = a * b;
            if rule == CompositionSign::VertexParity {
                term *= sign(qs.ordinary_vertex_count() + gs.ordinary_vertex_count() + z.ordinary_vertex_count());
            }
            acc += term;
        })?;
        Ok(acc)
    };

    #[cfg(feature = "parallel")]
    let coeffs: Vec<Result<BigRational>> = zs.par_iter().map(coefficient).collect();
    #[cfg(not(feature = "parallel"))]
    let coeffs: Vec<Result<BigRational>> = zs.iter().map(coefficient).collect();

    let mut out = GraphSum::new();
    for (z, c) in zs.iter().zip(coeffs) {
        out.add_term(z, c?);
    }
    Ok(OperatorSum { coeffs: out })
}

fn det_a_minus_i_pointed(g: &PointedGraph) -> BigRational {
    let minus = g.without_distinguished();
    sign(minus.vertex_count()) * int(det_identity_minus_adjacency(&minus))
}

fn det_family(k: usize, opts: EnumOptions, limits: &Limits) -> Result<GraphSum<PointedGraph>> {
    let mut out = GraphSum::new();
    for g in enumerate_graphs::<PointedGraph>(k, opts, limits)? {
        let c = det_a_minus_i_pointed(&g) / aut_rational(&g);
        out.add_term(&g, c);
    }
    Ok(out)
}

/// `R_k = Σ det(A(Γ₋) - I) / |Aut Γ| · Γ` over semistable pointed graphs of
/// weight `k`.
pub fn r_k(k: usize, limits: &Limits) -> Result<GraphSum<PointedGraph>> {
    det_family(k, EnumOptions::default(), limits)
}

/// `Q_k`: as [`r_k`] but over strong graphs only.
pub fn q_k(k: usize, limits: &Limits) -> Result<GraphSum<PointedGraph>> {
    det_family(k, EnumOptions::strong(), limits)
}

/// `Q_k` restricted to balanced strong graphs.
pub fn q_k_balanced(k: usize, limits: &Limits) -> Result<GraphSum<PointedGraph>> {
    det_family(k, EnumOptions::strong().with_balanced(), limits)
}

fn det_operator(k: usize, opts: EnumOptions, limits: &Limits) -> Result<OperatorSum> {
    let mut coeffs = GraphSum::new();
    for g in enumerate_graphs::<PointedGraph>(k, opts.with_stable(), limits)? {
        coeffs.add_term(&g, int(det_identity_minus_adjacency(&g.without_distinguished())));
    }
    Ok(OperatorSum { coeffs })
}

/// `R_k` in the stable basis: `c(Γ) = det(I - A(Γ₋))`.
pub fn r_k_operator(k: usize, limits: &Limits) -> Result<OperatorSum> {
    det_operator(k, EnumOptions::default(), limits)
}

/// `Q_k` in the stable basis.
pub fn q_k_operator(k: usize, limits: &Limits) -> Result<OperatorSum> {
    det_operator(k, EnumOptions::strong(), limits)
}

/// Balanced `Q_k` for each requested odd `k`.
pub fn englis_generators(ks: &[usize], limits: &Limits) -> Result<Vec<GraphSum<PointedGraph>>> {
    ks.iter()
        .map(|&k| {
            if k % 2 == 0 {
                return domain(format!("generators have odd weight, got {k}"));
            }
            q_k_balanced(k, limits)
        })
        .collect()
}

/// `Σ c · D(Γ)` is the same operator as [`OperatorSum::expand`]; this
/// variant goes through the explicit expansion of each stable graph.
pub fn expand_via_d(op: &OperatorSum, limits: &Limits) -> Result<GraphSum<PointedGraph>> {
    let mut out = GraphSum::new();
    for (_, g, c) in op.coeffs.iter() {
        let x = c * sign(g.ordinary_vertex_count()) / aut_rational(g);
        out += &crate::weyl::d_expand_pointed(g, limits)?.scaled(&x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> PointedGraph {
        PointedGraph::from_edges(1, vec![(0, 0)]).unwrap()
    }

    #[test]
    fn p1_has_two_splits() {
        let s = gs_subgraphs(&p1()).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().any(|x| x.sub == PointedGraph::point() && x.quotient == p1()));
        assert!(s.iter().any(|x| x.sub == p1() && x.quotient == PointedGraph::point()));
    }

    #[test]
    fn small_families() {
        let l = Limits::default();
        let q1 = q_k(1, &l).unwrap();
        assert_eq!(q1.len(), 1);
        assert_eq!(q1.coeff(&p1()), BigRational::one());
        let r0 = r_k(0, &l).unwrap();
        assert_eq!(r0.len(), 1);
        assert_eq!(r0.coeff(&PointedGraph::point()), BigRational::one());
        assert_eq!(q_k_balanced(1, &l).unwrap().len(), 1);
    }

    #[test]
    fn unit_law() {
        let l = Limits::default();
        let q2 = q_k_operator(2, &l).unwrap();
        let id = OperatorSum::identity();
        assert_eq!(compose(&id, &q2, true, &l).unwrap(), q2);
        assert_eq!(compose(&q2, &id, false, &l).unwrap(), q2);
    }

    #[test]
    fn expansion_matches_det_family() {
        let l = Limits::default();
        for k in 0..=2 {
            let e = q_k_operator(k, &l).unwrap().expand(&l).unwrap();
            assert_eq!(e, q_k(k, &l).unwrap(), "Q_{k}");
            let r = r_k_operator(k, &l).unwrap();
            assert_eq!(r.expand(&l).unwrap(), r_k(k, &l).unwrap(), "R_{k}");
            assert_eq!(expand_via_d(&r, &l).unwrap(), r_k(k, &l).unwrap());
            assert_eq!(OperatorSum::from_expanded(&r_k(k, &l).unwrap(), &l).unwrap(), r);
        }
    }
}
