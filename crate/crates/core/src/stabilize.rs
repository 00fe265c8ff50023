//! Stabilization by contraction and the generalized-stabilizable layer.

use crate::canonical::canonical_graph;
use crate::error::{domain, Result};
use crate::graph::{is_semistable_degree, Digraph, EdgeRef, GraphLike};

#[derive(Clone, Debug)]
pub struct StabilizationResult<G> {
    pub stabilizable: bool,
    /// Canonical stable graph, present iff `stabilizable`.
    pub stable_graph: Option<G>,
    /// Graph reached when no contractible edge is left.
    pub terminal: G,
    /// Edge choices, each relative to the graph at that step.
    pub contraction_trace: Vec<EdgeRef>,
}

/// Contracts the lowest contractible edge until none remain.
pub fn stabilize<G: GraphLike>(g: &G) -> Result<StabilizationResult<G>> {
    if !g.is_semistable() {
        return domain(format!("{g} is not semistable"));
    }
    Ok(stabilize_unchecked(g))
}

pub(crate) fn stabilize_unchecked<G: GraphLike>(g: &G) -> StabilizationResult<G> {
    let mut cur = g.clone();
    let mut trace = Vec::new();
    while let Some(&e) = cur.contractible_edges_unchecked().first() {
        cur = cur.contract_unchecked(e);
        trace.push(e);
    }
    let stabilizable = cur.is_stable();
    StabilizationResult {
        stabilizable,
        stable_graph: stabilizable.then(|| canonical_graph(&cur)),
        terminal: cur,
        contraction_trace: trace,
    }
}

pub fn is_stabilizable<G: GraphLike>(g: &G) -> Result<bool> {
    Ok(stabilize(g)?.stabilizable)
}

/// Suppresses every loop-free ordinary vertex of in- and outdegree one,
/// splicing its two edges into one.
pub fn semistabilization<G: GraphLike>(g: &G) -> Result<G> {
    let mut d: Digraph = g.digraph().clone();
    loop {
        let deg = d.degree_table();
        let mut pass = None;
        for v in usize::from(G::POINTED)..d.vertex_count() {
            if deg[v] == (1, 1) && d.loop_count(v) == 0 {
                pass = Some(v);
                break;
            }
            if !is_semistable_degree(deg[v]) {
                return domain(format!(
                    "vertex {v} of {d} is neither semistable nor a pass-through vertex"
                ));
            }
        }
        let Some(x) = pass else { break };
        let inn = d.edges().iter().find(|e| e.1 == x).expect("indegree 1").0;
        let out = d.edges().iter().find(|e| e.0 == x).expect("outdegree 1").1;
        let shift = |v: usize| if v > x { v - 1 } else { v };
        let mut edges: Vec<_> = d
            .edges()
            .iter()
            .filter(|&&(t, h)| t != x && h != x)
            .map(|&(t, h)| (shift(t), shift(h)))
            .collect();
        edges.push((shift(inn), shift(out)));
        d = Digraph::new(d.vertex_count() - 1, edges)?;
    }
    G::from_digraph(d)
}

/// Whether `g` is an edge subdivision of a stabilizable semistable graph.
pub fn is_gs<G: GraphLike>(g: &G) -> bool {
    matches!(semistabilization(g), Ok(ss) if stabilize_unchecked(&ss).stabilizable)
}

/// Stabilization of the semistabilization.
pub fn gs_stabilize<G: GraphLike>(g: &G) -> Result<StabilizationResult<G>> {
    stabilize(&semistabilization(g)?)
}

/// The canonical stabilization of a GS graph, or `None` when `g` is not GS.
pub fn gs_stable_graph<G: GraphLike>(g: &G) -> Option<G> {
    let ss = semistabilization(g).ok()?;
    stabilize_unchecked(&ss).stable_graph
}
