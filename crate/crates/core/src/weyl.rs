//! Weyl functions, the fiber-constancy criterion and expansions between the
//! stable and semistable graph bases.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};

use crate::canonical::{aut_order, canonical_key, CanonicalKey};
use crate::enumerate::{contractible_trees, stabilization_fibers, DecoratedTree, EnumOptions, Limits};
use crate::error::{domain, Error, Result};
use crate::graph::{det_identity_minus_adjacency, Digraph, GraphLike, PointedGraph};
use crate::io::{parse_graph, parse_rational};
use crate::sum::GraphSum;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn sign(exp: usize) -> BigRational {
    if exp.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

pub(crate) fn aut_rational<G: GraphLike>(g: &G) -> BigRational {
    BigRational::from_integer(BigInt::from(aut_order(g)))
}

/// A coefficient rule on graphs together with its value on the one-loop
/// vertex `⟲`.
///
/// Builtin rules are evaluated on the graph itself for plain graphs and on
/// `Γ₋` (the distinguished vertex removed) for pointed graphs. Tables and
/// indicators are keyed by canonical key of the graph as given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeylFunctionSpec {
    Constant(BigRational),
    /// `β_C(H) = Σ_L C^{p(L)}`.
    Beta(BigRational),
    /// `det(I - A(H))`.
    DetIMinusA,
    /// `det(A(H) - I)`, the Berezin choice.
    DetAMinusI,
    /// `Σ_L (-1)^{|V| + p(L)} C^{p(L)}`; equals `det(A - I)` at `C = 1`.
    HC(BigRational),
    /// `Σ_L (-1)^{|V|+1+p(L)} C^{p(L)} / |Aut G|`.
    HCDisplayed(BigRational),
    /// One on the given isomorphism class, zero elsewhere.
    Indicator(CanonicalKey),
    Table {
        values: BTreeMap<CanonicalKey, BigRational>,
        cycle_value: BigRational,
    },
}

impl WeylFunctionSpec {
    pub fn berezin() -> Self {
        WeylFunctionSpec::DetAMinusI
    }

    pub fn constant(c: i64) -> Self {
        WeylFunctionSpec::Constant(rat(c))
    }

    pub fn indicator<G: GraphLike>(g: &G) -> Self {
        WeylFunctionSpec::Indicator(canonical_key(g))
    }

    /// Value on a plain or pointed graph.
    pub fn value_on<G: GraphLike>(&self, g: &G) -> Result<BigRational> {
        match self {
            WeylFunctionSpec::Indicator(k) => Ok(if canonical_key(g) == *k {
                BigRational::one()
            } else {
                BigRational::zero()
            }),
            WeylFunctionSpec::Table { values, .. } => values
                .get(&canonical_key(g))
                .cloned()
                .ok_or_else(|| Error::Domain(format!("coefficient table has no entry for {g}"))),
            _ => {
                let d = if G::POINTED {
                    g.digraph().remove_vertex(0)
                } else {
                    g.digraph().clone()
                };
                Ok(self.formula(&d))
            }
        }
    }

    fn formula(&self, d: &Digraph) -> BigRational {
        match self {
            WeylFunctionSpec::Constant(c) => c.clone(),
            WeylFunctionSpec::Beta(c) => beta(d, c),
            WeylFunctionSpec::DetIMinusA => det_weyl(d),
            WeylFunctionSpec::DetAMinusI => sign(d.vertex_count()) * det_weyl(d),
            WeylFunctionSpec::HC(c) => h_c_normalized(d, c),
            WeylFunctionSpec::HCDisplayed(c) => h_c_literal(d, c),
            WeylFunctionSpec::Indicator(_) | WeylFunctionSpec::Table { .. } => {
                unreachable!("handled by value_on")
            }
        }
    }

    /// `h(⟲)`, the value on a single vertex with one loop.
    pub fn cycle_value(&self) -> BigRational {
        let lp = Digraph::new(1, vec![(0, 0)]).expect("valid");
        match self {
            WeylFunctionSpec::Table { cycle_value, .. } => cycle_value.clone(),
            WeylFunctionSpec::Indicator(k) => {
                if canonical_key(&lp) == *k {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            _ => self.formula(&lp),
        }
    }
}

impl fmt::Display for WeylFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeylFunctionSpec::Constant(c) => write!(f, "const:{c}"),
            WeylFunctionSpec::Beta(c) => write!(f, "beta:{c}"),
            WeylFunctionSpec::DetIMinusA => write!(f, "det-i-minus-a"),
            WeylFunctionSpec::DetAMinusI => write!(f, "berezin"),
            WeylFunctionSpec::HC(c) => write!(f, "hc:{c}"),
            WeylFunctionSpec::HCDisplayed(c) => write!(f, "hc-displayed:{c}"),
            WeylFunctionSpec::Indicator(k) => write!(f, "indicator:{k}"),
            WeylFunctionSpec::Table { values, .. } => write!(f, "table[{} entries]", values.len()),
        }
    }
}

impl FromStr for WeylFunctionSpec {
    type Err = Error;

    /// `const:<q>`, `beta:<q>`, `det-i-minus-a` (or `det`), `berezin` (or
    /// `det-a-minus-i`), `hc:<q>`, `hc-displayed:<q>`, `indicator:<graph or hex key>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        let need = |arg: Option<&str>| -> Result<BigRational> {
            parse_rational(arg.ok_or_else(|| Error::Parse(format!("{name} needs an argument")))?)
        };
        Ok(match name.trim() {
            "const" | "constant" => WeylFunctionSpec::Constant(need(arg)?),
            "beta" => WeylFunctionSpec::Beta(need(arg)?),
            "det" | "det-i-minus-a" => WeylFunctionSpec::DetIMinusA,
            "berezin" | "det-a-minus-i" => WeylFunctionSpec::DetAMinusI,
            "hc" => WeylFunctionSpec::HC(need(arg)?),
            "hc-displayed" => WeylFunctionSpec::HCDisplayed(need(arg)?),
            "indicator" => {
                let arg = arg.ok_or_else(|| Error::Parse("indicator needs a graph".into()))?;
                if let Some(k) = CanonicalKey::from_hex(arg.trim()) {
                    return Ok(WeylFunctionSpec::Indicator(k));
                }
                let g = parse_graph(arg)?;
                WeylFunctionSpec::Indicator(match g {
                    crate::io::AnyGraph::Plain(d) => canonical_key(&d),
                    crate::io::AnyGraph::Pointed(p) => canonical_key(&p),
                })
            }
            other => return Err(Error::Parse(format!("unknown function spec {other:?}"))),
        })
    }
}

/// `β_C(H) = Σ_{L ∈ 𝓛(H)} C^{p(L)}`.
pub fn beta(h: &Digraph, c: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut pow = BigRational::one();
    for (p, &n) in h.linear_subgraph_profile().iter().enumerate() {
        if p > 0 {
            pow *= c;
        }
        acc += &pow * rat(n as i64);
    }
    acc
}

/// `det(I - A(H))`.
pub fn det_weyl(h: &Digraph) -> BigRational {
    rat(det_identity_minus_adjacency(h))
}

/// `Σ_{L ∈ 𝓛(H)} (-1)^{p(L)}`, which equals `det(I - A(H))`.
pub fn det_weyl_via_linear_subgraphs(h: &Digraph) -> BigInt {
    h.linear_subgraph_profile()
        .iter()
        .enumerate()
        .map(|(p, &n)| if p % 2 == 0 { BigInt::from(n) } else { -BigInt::from(n) })
        .sum()
}

fn h_c_normalized(g: &Digraph, c: &BigRational) -> BigRational {
    sign(g.vertex_count()) * beta(g, &-c)
}

fn h_c_literal(g: &Digraph, c: &BigRational) -> BigRational {
    -sign(g.vertex_count()) * beta(g, &-c) / aut_rational(g)
}

/// `h_C(G) = Σ_L (-1)^{|V|+1+p(L)} C^{p(L)} / |Aut G|` on a stable graph.
pub fn h_c_value(g: &Digraph, c: &BigRational) -> Result<BigRational> {
    if !g.is_stable() {
        return domain(format!("{g} is not stable"));
    }
    Ok(h_c_literal(g, c))
}

/// Two graphs in one stabilization fiber on which a coefficient rule differs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberViolation<G> {
    pub first: G,
    pub second: G,
    pub first_value: BigRational,
    pub second_value: BigRational,
}

#[derive(Clone, Debug)]
pub struct WeylReport<G> {
    pub fibers_checked: usize,
    pub violation: Option<FiberViolation<G>>,
}

impl<G> WeylReport<G> {
    pub fn is_weyl(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks that `c` is constant on every stabilization fiber of weight `k`.
pub fn is_weyl_function<G: GraphLike>(c: &WeylFunctionSpec, k: usize, limits: &Limits) -> Result<WeylReport<G>> {
    let fibers = stabilization_fibers::<G>(k, EnumOptions::default(), limits)?;
    let mut report = WeylReport {
        fibers_checked: fibers.len(),
        violation: None,
    };
    for fiber in fibers.values() {
        let mut iter = fiber.members.iter();
        let Some(first) = iter.next() else { continue };
        let v0 = c.value_on(first)?;
        for h in iter {
            let v = c.value_on(h)?;
            if v != v0 {
                report.violation = Some(FiberViolation {
                    first: first.clone(),
                    second: h.clone(),
                    first_value: v0,
                    second_value: v,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// `D(G) = Σ_H (-1)^{|V(H)|-|V(G)|} |Aut G| / |Aut H| · H` over the
/// stabilization fiber of a stable graph.
pub fn d_expand<G: GraphLike>(g: &G, limits: &Limits) -> Result<GraphSum<G>> {
    if !g.is_stable() {
        return domain(format!("{g} is not stable"));
    }
    let w = g.weight();
    if w < 0 {
        return domain(format!("{g} has negative weight"));
    }
    let fibers = stabilization_fibers::<G>(w as usize, EnumOptions::default(), limits)?;
    let key = canonical_key(g);
    let fiber = fibers
        .get(&key)
        .ok_or_else(|| Error::Domain(format!("{g} has no stabilization fiber")))?;
    let aut_g = aut_rational(g);
    let vg = g.ordinary_vertex_count();
    let mut sum = GraphSum::new();
    for h in &fiber.members {
        let c = sign(h.ordinary_vertex_count() + vg) * &aut_g / aut_rational(h);
        sum.add_term(h, c);
    }
    Ok(sum)
}

pub fn d_expand_pointed(g: &PointedGraph, limits: &Limits) -> Result<GraphSum<PointedGraph>> {
    d_expand(g, limits)
}

/// Result of [`build_invariant`].
#[derive(Clone, Debug)]
pub struct Invariant<G> {
    /// `Σ_H c(H) (-1)^{|V(H)|} / |Aut H| · H` over stabilizable semistable `H`.
    pub sum: GraphSum<G>,
    /// Whether `sum` equals `Σ_G c(G) (-1)^{|V(G)|} / |Aut G| · D(G)` over
    /// stable `G`, which holds exactly when `c` is fiber-constant.
    pub matches_stable_expansion: bool,
}

pub fn build_invariant<G: GraphLike>(c: &WeylFunctionSpec, k: usize, limits: &Limits) -> Result<Invariant<G>> {
    let fibers = stabilization_fibers::<G>(k, EnumOptions::default(), limits)?;
    let mut sum = GraphSum::new();
    let mut via_stable = GraphSum::new();
    for fiber in fibers.values() {
        for h in &fiber.members {
            let coeff = c.value_on(h)? * sign(h.ordinary_vertex_count()) / aut_rational(h);
            sum.add_term(h, coeff);
        }
        let s = &fiber.stable;
        let coeff = c.value_on(s)? * sign(s.ordinary_vertex_count()) / aut_rational(s);
        via_stable += &d_expand(s, limits)?.scaled(&coeff);
    }
    let matches_stable_expansion = sum == via_stable;
    Ok(Invariant {
        sum,
        matches_stable_expansion,
    })
}

/// The signed contractible trees expressing a covariant tensor:
/// sign `(-1)^{|V(T)|+1}` for plain trees and `(-1)^{|V|}` (ordinary
/// vertices) for pointed ones.
pub fn tensor_expansion(k: usize, m: usize, pointed: bool, limits: &Limits) -> Result<Vec<(DecoratedTree, i8)>> {
    let trees = contractible_trees(k, m, pointed, limits)?;
    Ok(trees
        .into_iter()
        .flatten()
        .map(|t| {
            let exp = if pointed {
                t.ordinary_count()
            } else {
                t.vertex_count() + 1
            };
            let s = if exp % 2 == 0 { 1 } else { -1 };
            (t, s)
        })
        .collect())
}
