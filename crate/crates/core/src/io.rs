//! Text and JSON formats for graphs and graph sums.
//!
//! Text form: `g <n>; t->h, t->h, ...` for plain graphs and `p <n>; ...` for
//! pointed graphs (vertex 0 distinguished). The edge list may be empty.
//! JSON form: `{"pointed": bool, "vertices": n, "edges": [[t, h], ...]}`.

use std::fmt;
use std::str::FromStr;

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalKey;
use crate::error::{Error, Result};
use crate::graph::{Digraph, GraphLike, PointedGraph};
use crate::star::{StarSeries, StarType};
use crate::sum::GraphSum;

/// A graph of either kind, as read from user input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyGraph {
    Plain(Digraph),
    Pointed(PointedGraph),
}

impl AnyGraph {
    pub fn is_pointed(&self) -> bool {
        matches!(self, AnyGraph::Pointed(_))
    }

    pub fn digraph(&self) -> &Digraph {
        match self {
            AnyGraph::Plain(g) => g,
            AnyGraph::Pointed(p) => p.graph(),
        }
    }

    pub fn into_plain(self) -> Result<Digraph> {
        match self {
            AnyGraph::Plain(g) => Ok(g),
            AnyGraph::Pointed(p) => Err(Error::Parse(format!("expected a plain graph, got {p}"))),
        }
    }

    pub fn into_pointed(self) -> Result<PointedGraph> {
        match self {
            AnyGraph::Pointed(p) => Ok(p),
            AnyGraph::Plain(g) => Err(Error::Parse(format!("expected a pointed graph, got {g}"))),
        }
    }
}

impl fmt::Display for AnyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyGraph::Plain(g) => g.fmt(f),
            AnyGraph::Pointed(p) => p.fmt(f),
        }
    }
}

impl FromStr for AnyGraph {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_graph(s)
    }
}

fn perr<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

/// Parses the text form, or the JSON form when the input starts with `{`.
pub fn parse_graph(s: &str) -> Result<AnyGraph> {
    let s = s.trim();
    if s.starts_with('{') {
        let j: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        return j.into_graph();
    }
    let (head, rest) = s.split_once(';').unwrap_or((s, ""));
    let mut words = head.split_whitespace();
    let kind = words.next().unwrap_or("");
    let n: usize = match words.next().map(str::parse) {
        Some(Ok(n)) => n,
        _ => return perr(format!("expected `g <n>;` or `p <n>;` in {s:?}")),
    };
    if words.next().is_some() {
        return perr(format!("unexpected text before `;` in {s:?}"));
    }
    let mut edges = Vec::new();
    for item in rest.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let Some((t, h)) = item.split_once("->") else {
            return perr(format!("malformed edge {item:?}"));
        };
        let t: usize = t
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad tail in {item:?}")))?;
        let h: usize = h
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad head in {item:?}")))?;
        edges.push((t, h));
    }
    let d = Digraph::new(n, edges).map_err(|e| Error::Parse(e.to_string()))?;
    match kind {
        "g" => Ok(AnyGraph::Plain(d)),
        "p" => Ok(AnyGraph::Pointed(
            PointedGraph::new(d).map_err(|e| Error::Parse(e.to_string()))?,
        )),
        _ => perr(format!("unknown graph kind {kind:?}; use `g` or `p`")),
    }
}

/// Serialized graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub pointed: bool,
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphJson {
    pub fn from_graph<G: GraphLike>(g: &G) -> Self {
        GraphJson {
            pointed: G::POINTED,
            vertices: g.digraph().vertex_count(),
            edges: g.digraph().edges().iter().map(|&(t, h)| [t, h]).collect(),
        }
    }

    pub fn into_graph(self) -> Result<AnyGraph> {
        let d = Digraph::new(self.vertices, self.edges.iter().map(|e| (e[0], e[1])).collect())
            .map_err(|e| Error::Parse(e.to_string()))?;
        if self.pointed {
            Ok(AnyGraph::Pointed(
                PointedGraph::new(d).map_err(|e| Error::Parse(e.to_string()))?,
            ))
        } else {
            Ok(AnyGraph::Plain(d))
        }
    }

    pub fn into_kind<G: GraphLike>(self) -> Result<G> {
        if self.pointed != G::POINTED {
            return perr(format!(
                "graph kind mismatch: expected {}, got {}",
                kind_name(G::POINTED),
                kind_name(self.pointed)
            ));
        }
        let d = Digraph::new(self.vertices, self.edges.iter().map(|e| (e[0], e[1])).collect())
            .map_err(|e| Error::Parse(e.to_string()))?;
        G::from_digraph(d).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn kind_name(pointed: bool) -> &'static str {
    if pointed {
        "pointed"
    } else {
        "plain"
    }
}

/// One term of a serialized graph sum. `coeff` is `"p/q"` or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub key: String,
    pub graph: GraphJson,
    pub coeff: String,
}

pub fn sum_to_json<G: GraphLike>(s: &GraphSum<G>) -> Vec<TermJson> {
    s.iter()
        .map(|(k, g, c)| TermJson {
            key: k.to_hex(),
            graph: GraphJson::from_graph(g),
            coeff: c.to_string(),
        })
        .collect()
}

/// Reads a graph sum; keys are recomputed from the graphs and a stale key
/// is rejected.
pub fn sum_from_json<G: GraphLike>(terms: &[TermJson]) -> Result<GraphSum<G>> {
    let mut s = GraphSum::new();
    for t in terms {
        let g: G = t.graph.clone().into_kind()?;
        let c = parse_rational(&t.coeff)?;
        let key = crate::canonical::canonical_key(&g);
        if !t.key.is_empty() && CanonicalKey::from_hex(&t.key).as_ref() != Some(&key) {
            return perr(format!("key {} does not match graph {g}", t.key));
        }
        s.add_term(&g, c);
    }
    Ok(s)
}

pub fn parse_sum<G: GraphLike>(json: &str) -> Result<GraphSum<G>> {
    let terms: Vec<TermJson> = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    sum_from_json(&terms)
}

pub fn sum_to_string<G: GraphLike>(s: &GraphSum<G>) -> String {
    serde_json::to_string_pretty(&sum_to_json(s)).expect("serializable")
}

/// Serialized star product: one graph-sum array per order of `ν`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarSeriesJson {
    /// `"anti-wick"` or `"wick"`.
    pub kind: String,
    pub orders: Vec<Vec<TermJson>>,
}

pub fn star_to_json(s: &StarSeries) -> StarSeriesJson {
    StarSeriesJson {
        kind: match s.kind {
            StarType::AntiWick => "anti-wick",
            StarType::Wick => "wick",
        }
        .to_string(),
        orders: s.orders.iter().map(sum_to_json).collect(),
    }
}

pub fn star_from_json(j: &StarSeriesJson) -> Result<StarSeries> {
    let kind = match j.kind.as_str() {
        "anti-wick" => StarType::AntiWick,
        "wick" => StarType::Wick,
        other => return perr(format!("unknown star product kind {other:?}")),
    };
    if j.orders.is_empty() {
        return perr("a star series needs at least order 0");
    }
    let orders = j.orders.iter().map(|o| sum_from_json(o)).collect::<Result<_>>()?;
    Ok(StarSeries { kind, orders })
}

/// Parses `p/q`, an integer, or a plain decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Ok(r);
    }
    if let Some((int, frac)) = s.split_once('.') {
        if !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit()) {
            let digits = format!("{int}{frac}");
            if let Ok(n) = num::BigInt::from_str(&digits) {
                let d = num::BigInt::from(10u32).pow(frac.len() as u32);
                return Ok(BigRational::new(n, d));
            }
        }
    }
    perr(format!("not a rational number: {s:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_series_round_trip() {
        let l = crate::enumerate::Limits::default();
        let s = crate::star::star_coefficients(&crate::weyl::WeylFunctionSpec::berezin(), 2, &l).unwrap();
        let j = serde_json::to_string(&star_to_json(&s)).unwrap();
        let back: StarSeriesJson = serde_json::from_str(&j).unwrap();
        assert_eq!(star_from_json(&back).unwrap(), s);
    }

    #[test]
    fn text_round_trip() {
        for s in ["g 1; 0->0, 0->0", "p 1; 0->0", "p 1;", "g 2; 0->1, 1->0, 1->0"] {
            let g = parse_graph(s).unwrap();
            assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
        }
        assert_eq!(
            parse_graph("g 2;1->0 ,0 -> 1").unwrap(),
            AnyGraph::Plain(Digraph::new(2, vec![(0, 1), (1, 0)]).unwrap())
        );
    }

    #[test]
    fn malformed_inputs() {
        for s in ["x 1;", "g;", "g 1; 0->1", "g 1; 0-0", "p 0;", "g 1 2; 0->0"] {
            assert!(matches!(parse_graph(s), Err(Error::Parse(_))), "{s}");
        }
    }

    #[test]
    fn json_kind_mismatch() {
        let j = GraphJson::from_graph(&PointedGraph::point());
        assert!(j.clone().into_kind::<Digraph>().is_err());
        assert_eq!(j.into_kind::<PointedGraph>().unwrap(), PointedGraph::point());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), parse_rational("0.5").unwrap());
        assert_eq!(parse_rational("-3").unwrap().to_string(), "-3");
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn sum_round_trip() {
        let mut s = GraphSum::new();
        s.add_term(
            &Digraph::new(1, vec![(0, 0), (0, 0)]).unwrap(),
            parse_rational("-1/2").unwrap(),
        );
        let back: GraphSum<Digraph> = parse_sum(&sum_to_string(&s)).unwrap();
        assert_eq!(back, s);
        assert!(parse_sum::<PointedGraph>(&sum_to_string(&s)).is_err());
    }
}
