//! Star products with separation of variables in graph form.
//!
//! For a function `h` on strong stable graphs and the one-loop vertex `⟲`,
//! the order-`j` bidifferential operator is
//! `C_j = Σ_Γ Π_{G ∈ SCC(Γ₋)} α_h(G) / |Aut Γ| · Γ^op` over strong semistable
//! pointed graphs of weight `j`. In `Γ^op(f₁, f₂)` the incoming edges at the
//! distinguished vertex differentiate `f₁` antiholomorphically and the
//! outgoing ones differentiate `f₂` holomorphically.

use std::fmt;

use num::complex::Complex64;
use num::{BigRational, One, Zero};

use crate::enumerate::{enumerate_graphs, EnumOptions, Limits};
use crate::error::{domain, Error, Result};
use crate::graph::{Digraph, GraphLike, PointedGraph};
use crate::jets::{
    bidiff_sum_jet, builtin_context, evaluate_bidiff_sum, evaluate_graph_jet, relative_diff, JetContext, Model,
    TaylorJet, TestFunction,
};
use crate::stabilize::gs_stable_graph;
use crate::sum::GraphSum;
use crate::weyl::{aut_rational, WeylFunctionSpec};

fn sign(exp: usize) -> BigRational {
    if exp.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// `α_h` on a strong digraph.
pub fn alpha(h: &WeylFunctionSpec, g: &Digraph) -> Result<BigRational> {
    if !g.is_strong() || g.vertex_count() == 0 {
        return domain(format!("{g} is not strong"));
    }
    let n = g.vertex_count();
    if n == 1 && g.edge_count() == 0 {
        return Ok(-BigRational::one());
    }
    if g.degree_table().iter().all(|&d| d == (1, 1)) {
        return Ok(sign(n + 1) * h.cycle_value());
    }
    let s = gs_stable_graph(g).ok_or_else(|| Error::Domain(format!("{g} is not generalized stabilizable")))?;
    Ok(sign(n - s.vertex_count()) * h.value_on(&s)?)
}

/// `Π_{G ∈ SCC(Γ₋)} α_h(G)`.
pub fn scc_product(h: &WeylFunctionSpec, g: &PointedGraph) -> Result<BigRational> {
    let minus = g.without_distinguished();
    let mut acc = BigRational::one();
    for comp in minus.scc() {
        acc *= alpha(h, &minus.induced(&comp))?;
    }
    Ok(acc)
}

/// Argument order used when evaluating the terms of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StarType {
    /// `f₁ ⋆ f₂ = Σ ν^j C_j` with terms `Γ^op(f₁, f₂)`.
    #[default]
    AntiWick,
    /// Terms `Γ(f₁, f₂) = Γ^op(f₂, f₁)`.
    Wick,
}

/// The bidifferential operators `C_0, …, C_N` of a star product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarSeries {
    pub kind: StarType,
    pub orders: Vec<GraphSum<PointedGraph>>,
}

impl StarSeries {
    pub fn max_order(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn order(&self, j: usize) -> &GraphSum<PointedGraph> {
        &self.orders[j]
    }

    /// `C_j(f₁, f₂)` as a jet.
    pub fn apply_jet(&self, j: usize, ctx: &JetContext, f1: &TaylorJet, f2: &TaylorJet) -> Result<TaylorJet> {
        match self.kind {
            StarType::AntiWick => bidiff_sum_jet(&self.orders[j], ctx, f1, f2),
            StarType::Wick => bidiff_sum_jet(&self.orders[j], ctx, f2, f1),
        }
    }

    /// `C_j(f₁, f₂)` at the base point.
    pub fn apply(&self, j: usize, ctx: &JetContext, f1: &TaylorJet, f2: &TaylorJet) -> Result<Complex64> {
        match self.kind {
            StarType::AntiWick => evaluate_bidiff_sum(&self.orders[j], ctx, f1, f2),
            StarType::Wick => evaluate_bidiff_sum(&self.orders[j], ctx, f2, f1),
        }
    }
}

impl fmt::Display for StarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.orders.iter().enumerate() {
            writeln!(f, "# order {j} ({} terms)", c.len())?;
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn strong_pointed(j: usize, limits: &Limits) -> Result<Vec<PointedGraph>> {
    enumerate_graphs(j, EnumOptions::strong(), limits)
}

/// The anti-Wick star product attached to `h`, through order `n`.
pub fn star_coefficients(h: &WeylFunctionSpec, n: usize, limits: &Limits) -> Result<StarSeries> {
    let mut orders = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut s = GraphSum::new();
        for g in strong_pointed(j, limits)? {
            let c = scc_product(h, &g)? / aut_rational(&g);
            s.add_term(&g, c);
        }
        orders.push(s);
    }
    Ok(StarSeries {
        kind: StarType::AntiWick,
        orders,
    })
}

/// The star product of `h_C` in its normalized form (`hc:C`).
pub fn star_h_c(c: &BigRational, n: usize, limits: &Limits) -> Result<StarSeries> {
    star_coefficients(&WeylFunctionSpec::HC(c.clone()), n, limits)
}

/// Graphs admitted by the Wick-type dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WickIndexSet {
    /// Strong semistable pointed graphs whose `Γ₋` has only single-vertex
    /// and cycle components.
    #[default]
    Strong,
    /// The same condition on all semistable pointed graphs.
    Semistable,
}

fn is_cycle_or_point(g: &Digraph) -> bool {
    (g.vertex_count() == 1 && g.edge_count() == 0) || g.degree_table().iter().all(|&d| d == (1, 1))
}

/// The Wick-type dual of the `h_C` star product:
/// `Σ (-1)^{|E|} C^{ℓ(Γ)} / |Aut Γ| · Γ(f₁, f₂)`, `ℓ` counting the cycle
/// components of `Γ₋`.
pub fn wick_dual_h_c(c: &BigRational, n: usize, index: WickIndexSet, limits: &Limits) -> Result<StarSeries> {
    let opts = match index {
        WickIndexSet::Strong => EnumOptions::strong(),
        WickIndexSet::Semistable => EnumOptions::default(),
    };
    let mut orders = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut s = GraphSum::new();
        'graphs: for g in enumerate_graphs::<PointedGraph>(j, opts, limits)? {
            let minus = g.without_distinguished();
            let mut cycles = 0;
            for comp in minus.scc() {
                let sub = minus.induced(&comp);
                if !is_cycle_or_point(&sub) {
                    continue 'graphs;
                }
                if sub.edge_count() > 0 {
                    cycles += 1;
                }
            }
            let mut coeff = sign(g.digraph().edge_count()) / aut_rational(&g);
            for _ in 0..cycles {
                coeff *= c;
            }
            s.add_term(&g, coeff);
        }
        orders.push(s);
    }
    Ok(StarSeries {
        kind: StarType::Wick,
        orders,
    })
}

/// The parts of the Karabegov form
/// `ν⁻¹ω₋₁ + ricci_coefficient · Ric - i∂∂̄ Σ_j ν^j potentials[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KarabegovForm {
    /// `-h(⟲)`.
    pub ricci_coefficient: BigRational,
    /// `potentials[j] = Σ α_h(G) / |Aut G| · G` over strong semistable plain
    /// graphs of weight `j`; entry 0 is empty.
    pub potentials: Vec<GraphSum<Digraph>>,
}

pub fn karabegov_form(h: &WeylFunctionSpec, n: usize, limits: &Limits) -> Result<KarabegovForm> {
    let mut potentials = vec![GraphSum::new()];
    for j in 1..=n {
        let mut s = GraphSum::new();
        for g in enumerate_graphs::<Digraph>(j, EnumOptions::strong(), limits)? {
            let c = alpha(h, &g)? / aut_rational(&g);
            s.add_term(&g, c);
        }
        potentials.push(s);
    }
    Ok(KarabegovForm {
        ricci_coefficient: -h.cycle_value(),
        potentials,
    })
}

/// Outcome of [`check_axioms`].
#[derive(Clone, Debug)]
pub struct AxiomReport {
    /// `C_0` is the bare distinguished vertex with coefficient one.
    pub c0_is_product: bool,
    /// `C_1(f₁, f₂) - C_1(f₂, f₁)` is the Poisson-bracket graph
    /// `P1^op(f₁, f₂) - P1^op(f₂, f₁)`.
    pub c1_is_poisson: bool,
    /// Every term of weight at least one has both in- and outgoing edges at
    /// the distinguished vertex.
    pub separation_of_variables: bool,
    /// Relative size of the order-`j` associator at the base point.
    pub associator: Vec<f64>,
}

impl AxiomReport {
    pub fn max_associator(&self) -> f64 {
        self.associator.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        self.c0_is_product && self.c1_is_poisson && self.separation_of_variables && self.max_associator() <= tolerance
    }
}

fn p1() -> PointedGraph {
    PointedGraph::from_edges(1, vec![(0, 0)]).expect("valid")
}

fn c1_is_poisson(series: &StarSeries) -> bool {
    let Some(c1) = series.orders.get(1) else {
        return true;
    };
    // A term whose Γ^op is symmetric under f₁ ↔ f₂ drops out of the
    // antisymmetrization; at weight one only P1 (a loop at •) is strong,
    // and for non-strong index sets any extra term breaks the identity.
    let expect = match series.kind {
        StarType::AntiWick => BigRational::one(),
        StarType::Wick => -BigRational::one(),
    };
    c1.len() == 1 && c1.coeff(&p1()) == expect
}

/// Checks the star-product axioms through order `n`; associativity is
/// tested numerically with three seeded random functions on `model`.
pub fn check_axioms(series: &StarSeries, n: usize, model: Model, seed: u64) -> Result<AxiomReport> {
    if n > series.max_order() {
        return domain(format!("series has order {}, asked for {n}", series.max_order()));
    }
    let c0_is_product =
        series.orders[0].len() == 1 && series.orders[0].coeff(&PointedGraph::point()) == BigRational::one();
    let separation_of_variables = series.orders.iter().skip(1).all(|c| {
        c.graphs().all(|g| {
            let (i, o) = g.digraph().degree_table()[0];
            i >= 1 && o >= 1
        })
    });
    let order = crate::jets::DEFAULT_ORDER;
    let ctx = builtin_context(model, 0, order)?;
    let f: Vec<TaylorJet> = (0..3)
        .map(|i| ctx.function(&TestFunction::random(model, order, seed + i)))
        .collect();
    // left[j] = C_j(f₁, f₂), right[j] = C_j(f₂, f₃)
    let mut left = Vec::new();
    let mut right = Vec::new();
    for j in 0..=n {
        left.push(series.apply_jet(j, &ctx, &f[0], &f[1])?);
        right.push(series.apply_jet(j, &ctx, &f[1], &f[2])?);
    }
    let mut associator = Vec::new();
    for total in 0..=n {
        let mut a = Complex64::zero();
        let mut b = Complex64::zero();
        for i in 0..=total {
            let j = total - i;
            a += series.apply(i, &ctx, &left[j], &f[2])?;
            b += series.apply(i, &ctx, &f[0], &right[j])?;
        }
        associator.push(relative_diff(a, b));
    }
    Ok(AxiomReport {
        c0_is_product,
        c1_is_poisson: c1_is_poisson(series),
        separation_of_variables,
        associator,
    })
}

/// Residuals of `u^k ⋆ z^l - z^l ⋆ u^k - δ^{kl}` by order of `ν`.
#[derive(Clone, Debug)]
pub struct KarabegovReport {
    /// `residuals[j][k][l]` is the `ν^j` coefficient at the base point.
    pub residuals: Vec<Vec<Vec<Complex64>>>,
}

impl KarabegovReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .flatten()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Builds `u^k = ν⁻¹∂_kΦ - h(⟲)∂_k log det g + Σ_{j≥1} ν^j Σ_G (-α_h(G)/|Aut G|) ∂_k G`
/// and checks `u^k ⋆ z^l - z^l ⋆ u^k = δ^{kl}` through order `ν^n`.
pub fn karabegov_check(h: &WeylFunctionSpec, n: usize, model: Model, limits: &Limits) -> Result<KarabegovReport> {
    if n > 2 {
        return domain("Karabegov check is implemented through order ν²");
    }
    let series = star_coefficients(h, n + 1, limits)?;
    let form = karabegov_form(h, n.saturating_sub(1), limits)?;
    karabegov_relation(&series, &form, n, model)
}

/// The residuals of the `u^k` relation for a given series and form; the
/// series must reach order `n + 1` and the form weight `n - 1`.
pub fn karabegov_relation(
    series: &StarSeries,
    form: &KarabegovForm,
    n: usize,
    model: Model,
) -> Result<KarabegovReport> {
    if series.kind != StarType::AntiWick || series.max_order() < n + 1 || form.potentials.len() < n {
        return domain("series or form too short for the requested order");
    }
    let ctx = builtin_context(model, 0, crate::jets::DEFAULT_ORDER)?;
    let dim = ctx.dim();
    let ricci = num::ToPrimitive::to_f64(&form.ricci_coefficient).expect("finite");
    let log_det = ctx.log_det_metric();
    let potential_jets: Vec<TaylorJet> = form
        .potentials
        .iter()
        .skip(1)
        .take(n.saturating_sub(1))
        .map(|s| -> Result<TaylorJet> {
            let mut acc = TaylorJet::zero(ctx.space(), ctx.order() as i32);
            for (_, g, c) in s.iter() {
                let x = num::ToPrimitive::to_f64(c).expect("finite");
                acc = &acc + &evaluate_graph_jet(g, &ctx)?.scale(Complex64::new(-x, 0.0));
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut residuals = vec![vec![vec![Complex64::zero(); dim]; dim]; n + 1];
    for k in 0..dim {
        // u[j + 1] is the ν^j part, j ≥ -1
        let mut u = vec![
            ctx.potential().derivative(k),
            log_det.derivative(k).scale(Complex64::new(ricci, 0.0)),
        ];
        for p in &potential_jets {
            u.push(p.derivative(k));
        }
        for l in 0..dim {
            let z = ctx.function(&TestFunction::coordinate(model, l));
            for (order, row) in residuals.iter_mut().enumerate() {
                let mut acc = Complex64::zero();
                for i in 1..=order + 1 {
                    let j = order + 1 - i; // index of ν^{order - i}
                    if j < u.len() {
                        acc += series.apply(i, &ctx, &u[j], &z)?;
                    }
                }
                if order == 0 && k == l {
                    acc -= Complex64::new(1.0, 0.0);
                }
                row[k][l] = acc;
            }
        }
    }
    Ok(KarabegovReport { residuals })
}
