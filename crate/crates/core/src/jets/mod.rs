//! Numeric evaluation of graphs on model Kähler manifolds.
//!
//! Coordinates `z` and `z̄` are polarized into independent variables
//! `z_1..z_n, w_1..w_n`, so a potential `Φ(z, w)` and test functions are
//! [`TaylorJet`]s in `2n` variables about a base point. A plain graph is
//! evaluated by the contraction dictionary: a vertex with `p` outgoing and `q`
//! incoming edges carries `∂_z^p ∂_w^q Φ`, and an edge `u -> v` contracts the
//! tail's holomorphic index `k` with the head's antiholomorphic index `l`
//! through `g^{k l̄}`, where `Σ_l g^{k l̄} g_{m l̄} = δ^k_m`.
//!
//! On a pointed graph the distinguished vertex carries derivatives of a
//! function: `∂^{out} ∂̄^{in} f` for an operator, or `∂̄^{in} f₁ · ∂^{out} f₂`
//! for the bidifferential operator `Γ^op(f₁, f₂)`.

mod taylor;

pub use taylor::{invert_matrix, Exponents, MonomialSpace, TaylorJet, MAX_VARS};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num::complex::Complex64;
use num::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::graph::{Digraph, GraphLike, PointedGraph};
use crate::sum::GraphSum;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 10;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Built-in model manifolds, each with two charts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// `|z|²` on `C`; the second chart is the identity.
    Flat,
    /// `|z₁|² + |z₂|²` on `C²`; the second chart is the identity.
    Flat2d,
    /// `log(1 + |z|²)`; second chart `z = 1/ζ`.
    FubiniStudy1d,
    /// `-log(1 - |z|²)`; second chart a disc automorphism.
    Hyperbolic1d,
    /// `log(1 + |z₁|² + |z₂|²)`; second chart `(z₁, z₂) = (1/ζ₁, ζ₂/ζ₁)`.
    FubiniStudy2d,
}

const MOBIUS_A: Complex64 = Complex64::new(0.4, -0.1);

impl Model {
    pub const ALL: [Model; 5] = [
        Model::Flat,
        Model::Flat2d,
        Model::FubiniStudy1d,
        Model::Hyperbolic1d,
        Model::FubiniStudy2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Flat => "flat",
            Model::Flat2d => "flat_2d",
            Model::FubiniStudy1d => "fubini_study_1d",
            Model::Hyperbolic1d => "hyperbolic_1d",
            Model::FubiniStudy2d => "fubini_study_2d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Model::Flat2d | Model::FubiniStudy2d => 2,
            _ => 1,
        }
    }

    /// Pinned generic base point in chart 0.
    pub fn base_point(self) -> Vec<Complex64> {
        match self.dim() {
            1 => vec![c(0.3, 0.2)],
            _ => vec![c(0.3, 0.2), c(-0.1, 0.25)],
        }
    }

    /// The potential in chart-0 coordinates.
    fn potential(self, z: &[TaylorJet], w: &[TaylorJet]) -> TaylorJet {
        let zw = |i: usize| &z[i] * &w[i];
        match self {
            Model::Flat => zw(0),
            Model::Flat2d => &zw(0) + &zw(1),
            Model::FubiniStudy1d => zw(0).add_const(c(1.0, 0.0)).ln(),
            Model::Hyperbolic1d => -&(-&zw(0)).add_const(c(1.0, 0.0)).ln(),
            Model::FubiniStudy2d => (&zw(0) + &zw(1)).add_const(c(1.0, 0.0)).ln(),
        }
    }

    /// Chart-1 coordinates to chart-0 coordinates. With `conj`, the map with
    /// conjugated coefficients (acting on the antiholomorphic variables).
    fn transition(self, t: &[TaylorJet], conj: bool) -> Vec<TaylorJet> {
        match self {
            Model::Flat | Model::Flat2d => t.to_vec(),
            Model::FubiniStudy1d => vec![t[0].recip()],
            Model::Hyperbolic1d => {
                let a = if conj { MOBIUS_A.conj() } else { MOBIUS_A };
                // (t + a) / (1 + ā t)
                let num = t[0].add_const(a);
                let den = t[0].scale(a.conj()).add_const(c(1.0, 0.0));
                vec![&num * &den.recip()]
            }
            Model::FubiniStudy2d => {
                let inv = t[0].recip();
                vec![inv.clone(), &t[1] * &inv]
            }
        }
    }

    /// Chart-1 coordinates of a chart-0 point.
    fn inverse_transition(self, p: &[Complex64]) -> Vec<Complex64> {
        match self {
            Model::Flat | Model::Flat2d => p.to_vec(),
            Model::FubiniStudy1d => vec![p[0].inv()],
            Model::Hyperbolic1d => vec![(p[0] - MOBIUS_A) / (c(1.0, 0.0) - MOBIUS_A.conj() * p[0])],
            Model::FubiniStudy2d => vec![p[0].inv(), p[1] / p[0]],
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown metric {s:?}")))
    }
}

/// A function given in chart-0 coordinates as a polynomial in
/// `z - z₀` and `w - z̄₀`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    terms: Vec<(Exponents, Complex64)>,
    center: Vec<Complex64>,
}

impl TestFunction {
    /// Random coefficients in the unit square, damped by `1/|e|!`.
    pub fn random(model: Model, degree: usize, seed: u64) -> Self {
        let n = model.dim();
        let sp = MonomialSpace::get(2 * n, degree);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probe = TaylorJet::zero(&sp, degree as i32);
        let mut terms = Vec::new();
        for e in monomials(&sp, &probe) {
            let d: usize = e.iter().map(|&x| x as usize).sum();
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            terms.push((e, z / taylor::factorial(d)));
        }
        TestFunction {
            terms,
            center: model.base_point(),
        }
    }

    /// The holomorphic coordinate function `z_i`.
    pub fn coordinate(model: Model, i: usize) -> Self {
        let mut e = [0u8; MAX_VARS];
        e[i] = 1;
        let center = model.base_point();
        TestFunction {
            terms: vec![([0; MAX_VARS], center[i]), (e, c(1.0, 0.0))],
            center,
        }
    }

    fn evaluate(&self, z: &[TaylorJet], w: &[TaylorJet]) -> TaylorJet {
        let n = z.len();
        let sp = z[0].space().clone();
        let order = z[0].order();
        let shifted: Vec<TaylorJet> = (0..n)
            .map(|i| z[i].add_const(-self.center[i]))
            .chain((0..n).map(|i| w[i].add_const(-self.center[i].conj())))
            .collect();
        let mut powers: Vec<Vec<TaylorJet>> = shifted
            .iter()
            .map(|x| vec![TaylorJet::constant(&sp, order, c(1.0, 0.0)), x.clone()])
            .collect();
        let mut acc = TaylorJet::zero(&sp, order);
        for (e, coef) in &self.terms {
            let mut term = TaylorJet::constant(&sp, order, *coef);
            for v in 0..2 * n {
                let k = e[v] as usize;
                while powers[v].len() <= k {
                    let next = &powers[v][powers[v].len() - 1] * &shifted[v];
                    powers[v].push(next);
                }
                if k > 0 {
                    term = &term * &powers[v][k];
                }
            }
            acc = &acc + &term;
        }
        acc
    }
}

fn monomials(sp: &Arc<MonomialSpace>, probe: &TaylorJet) -> Vec<Exponents> {
    // enumerate exponent vectors in the space's order
    let nv = sp.nvars();
    let mut out = Vec::new();
    for d in 0..=probe.order().max(0) as usize {
        let mut cur = [0u8; MAX_VARS];
        fn rec(nv: usize, v: usize, left: usize, cur: &mut Exponents, out: &mut Vec<Exponents>) {
            if v + 1 == nv {
                cur[v] = left as u8;
                out.push(*cur);
                cur[v] = 0;
                return;
            }
            for x in (0..=left).rev() {
                cur[v] = x as u8;
                rec(nv, v + 1, left - x, cur, out);
            }
            cur[v] = 0;
        }
        rec(nv, 0, d, &mut cur, &mut out);
    }
    out
}

/// Potential, metric and inverse metric jets in one chart of a model.
pub struct JetContext {
    model: Model,
    chart: u8,
    n: usize,
    order: usize,
    space: Arc<MonomialSpace>,
    /// Chart-0 coordinates as jets in this chart's variables.
    z: Vec<TaylorJet>,
    w: Vec<TaylorJet>,
    phi: TaylorJet,
    ginv: Vec<Vec<TaylorJet>>,
    ginv_values: Vec<Vec<Complex64>>,
    cache: Mutex<HashMap<Exponents, Arc<TaylorJet>>>,
}

impl fmt::Debug for JetContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetContext")
            .field("model", &self.model)
            .field("chart", &self.chart)
            .field("order", &self.order)
            .finish()
    }
}

/// Builds the jets of `model` in `chart` (0 or 1) truncated at `order`.
pub fn builtin_context(model: Model, chart: u8, order: usize) -> Result<JetContext> {
    if order > MAX_ORDER {
        return domain(format!("truncation order {order} exceeds {MAX_ORDER}"));
    }
    if order < 2 {
        return domain("truncation order must be at least 2");
    }
    if chart > 1 {
        return domain(format!("chart must be 0 or 1, got {chart}"));
    }
    let n = model.dim();
    let space = MonomialSpace::get(2 * n, order);
    let o = order as i32;
    let p0 = model.base_point();
    let base = if chart == 0 { p0 } else { model.inverse_transition(&p0) };
    let t: Vec<TaylorJet> = (0..n).map(|i| TaylorJet::variable(&space, o, i, base[i])).collect();
    let s: Vec<TaylorJet> = (0..n)
        .map(|i| TaylorJet::variable(&space, o, n + i, base[i].conj()))
        .collect();
    let (z, w) = if chart == 0 {
        (t, s)
    } else {
        (model.transition(&t, false), model.transition(&s, true))
    };
    let phi = model.potential(&z, &w);
    // g_{k l̄} = ∂_{z_k} ∂_{w_l} Φ; ginv[k][l] = g^{k l̄} = (g⁻¹)[l][k]
    let g: Vec<Vec<TaylorJet>> = (0..n)
        .map(|k| (0..n).map(|l| phi.derivative(k).derivative(n + l)).collect())
        .collect();
    let inv = invert_matrix(&g).ok_or_else(|| Error::Domain("degenerate metric".into()))?;
    let ginv: Vec<Vec<TaylorJet>> = (0..n).map(|k| (0..n).map(|l| inv[l][k].clone()).collect()).collect();
    let ginv_values = ginv
        .iter()
        .map(|r| r.iter().map(|x| x.value().expect("nonempty")).collect())
        .collect();
    Ok(JetContext {
        model,
        chart,
        n,
        order,
        space,
        z,
        w,
        phi,
        ginv,
        ginv_values,
        cache: Mutex::new(HashMap::new()),
    })
}

impl JetContext {
    pub fn model(&self) -> Model {
        self.model
    }

    pub fn chart(&self) -> u8 {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn space(&self) -> &Arc<MonomialSpace> {
        &self.space
    }

    pub fn potential(&self) -> &TaylorJet {
        &self.phi
    }

    /// `g_{k l̄}` at the base point.
    pub fn metric_value(&self, k: usize, l: usize) -> Complex64 {
        self.phi_derivative_value(&exps(&[(k, 1), (self.n + l, 1)]))
            .expect("order at least 2")
    }

    /// `g^{k l̄}` at the base point.
    pub fn inverse_metric_value(&self, k: usize, l: usize) -> Complex64 {
        self.ginv_values[k][l]
    }

    pub fn inverse_metric(&self, k: usize, l: usize) -> &TaylorJet {
        &self.ginv[k][l]
    }

    /// `∂^e Φ` as a jet (cached).
    pub fn phi_derivative(&self, e: &Exponents) -> Arc<TaylorJet> {
        let mut cache = self.cache.lock().expect("poisoned");
        cache
            .entry(*e)
            .or_insert_with(|| Arc::new(self.phi.derivatives(e)))
            .clone()
    }

    pub fn phi_derivative_value(&self, e: &Exponents) -> Option<Complex64> {
        self.phi.derivative_value(e)
    }

    /// A test function expressed in this chart.
    pub fn function(&self, f: &TestFunction) -> TaylorJet {
        f.evaluate(&self.z, &self.w)
    }

    /// `log det g` as a jet.
    pub fn log_det_metric(&self) -> TaylorJet {
        let g: Vec<Vec<TaylorJet>> = (0..self.n)
            .map(|k| {
                (0..self.n)
                    .map(|l| (*self.phi_derivative(&exps(&[(k, 1), (self.n + l, 1)]))).clone())
                    .collect()
            })
            .collect();
        let det = if self.n == 1 {
            g[0][0].clone()
        } else {
            &(&g[0][0] * &g[1][1]) - &(&g[0][1] * &g[1][0])
        };
        det.ln()
    }
}

fn exps(pairs: &[(usize, u8)]) -> Exponents {
    let mut e = [0u8; MAX_VARS];
    for &(v, k) in pairs {
        e[v] += k;
    }
    e
}

/// What the distinguished vertex of a pointed graph carries.
#[derive(Clone, Copy)]
pub enum Slot<'a> {
    /// `∂^{out} ∂̄^{in} f`.
    Operator(&'a TaylorJet),
    /// `∂̄^{in} f₁ · ∂^{out} f₂`.
    Bidifferential(&'a TaylorJet, &'a TaylorJet),
}

/// Iterates over all index assignments of the edges, handing the per-vertex
/// exponent vectors and the per-edge `(k, l)` pairs to `visit`.
fn for_each_assignment(
    g: &Digraph,
    n: usize,
    mut visit: impl FnMut(&[Exponents], &[(usize, usize)]) -> Result<()>,
) -> Result<()> {
    let edges = g.edges();
    let m = edges.len();
    let total = n.checked_pow(2 * m as u32).ok_or(Error::Capacity {
        what: "index assignments",
        requested: usize::MAX,
        limit: 1 << 24,
    })?;
    if total > 1 << 24 {
        return Err(Error::Capacity {
            what: "index assignments",
            requested: total,
            limit: 1 << 24,
        });
    }
    let mut idx = vec![(0usize, 0usize); m];
    let mut ex = vec![[0u8; MAX_VARS]; g.vertex_count()];
    for a in 0..total {
        let mut r = a;
        for e in ex.iter_mut() {
            *e = [0; MAX_VARS];
        }
        for (i, &(t, h)) in edges.iter().enumerate() {
            let k = r % n;
            r /= n;
            let l = r % n;
            r /= n;
            idx[i] = (k, l);
            ex[t][k] += 1;
            ex[h][n + l] += 1;
        }
        visit(&ex, &idx)?;
    }
    Ok(())
}

fn check_ordinary(g: &Digraph, skip_first: bool) -> Result<()> {
    let deg = g.degree_table();
    for (v, &(i, o)) in deg.iter().enumerate().skip(usize::from(skip_first)) {
        if i == 0 || o == 0 {
            return domain(format!("vertex {v} of {g} needs in- and outdegree at least one"));
        }
    }
    Ok(())
}

fn max_vertex_degree(g: &Digraph) -> usize {
    g.degree_table().iter().map(|&(i, o)| i + o).max().unwrap_or(0)
}

fn slot_split(e: &Exponents, n: usize) -> (Exponents, Exponents) {
    let mut hol = [0u8; MAX_VARS];
    let mut anti = [0u8; MAX_VARS];
    hol[..n].copy_from_slice(&e[..n]);
    anti[n..2 * n].copy_from_slice(&e[n..2 * n]);
    (hol, anti)
}

impl JetContext {
    fn contract_value(&self, g: &Digraph, slot: Option<Slot<'_>>) -> Result<Complex64> {
        check_ordinary(g, slot.is_some())?;
        if max_vertex_degree(g) > self.order {
            return domain(format!("truncation order {} too small for {g}", self.order));
        }
        let n = self.n;
        let mut acc = Complex64::zero();
        for_each_assignment(g, n, |ex, idx| {
            let mut term = Complex64::new(1.0, 0.0);
            for &(k, l) in idx {
                term *= self.ginv_values[k][l];
            }
            for (v, e) in ex.iter().enumerate() {
                let f = match (v, slot) {
                    (0, Some(Slot::Operator(f))) => f.derivative_value(e),
                    (0, Some(Slot::Bidifferential(f1, f2))) => {
                        let (hol, anti) = slot_split(e, n);
                        match (f1.derivative_value(&anti), f2.derivative_value(&hol)) {
                            (Some(a), Some(b)) => Some(a * b),
                            _ => None,
                        }
                    }
                    _ => self.phi.derivative_value(e),
                };
                term *= f.ok_or_else(|| Error::Domain(format!("truncation order too small for {g}")))?;
            }
            acc += term;
            Ok(())
        })?;
        Ok(acc)
    }

    fn contract_jet(&self, g: &Digraph, slot: Option<Slot<'_>>) -> Result<TaylorJet> {
        check_ordinary(g, slot.is_some())?;
        let n = self.n;
        let mut acc: Option<TaylorJet> = None;
        let mut fcache: HashMap<(u8, Exponents), TaylorJet> = HashMap::new();
        for_each_assignment(g, n, |ex, idx| {
            let mut factors: Vec<TaylorJet> = Vec::with_capacity(idx.len() + ex.len());
            for &(k, l) in idx {
                factors.push(self.ginv[k][l].clone());
            }
            for (v, e) in ex.iter().enumerate() {
                match (v, slot) {
                    (0, Some(Slot::Operator(f))) => {
                        let j = fcache.entry((0, *e)).or_insert_with(|| f.derivatives(e));
                        factors.push(j.clone());
                    }
                    (0, Some(Slot::Bidifferential(f1, f2))) => {
                        let (hol, anti) = slot_split(e, n);
                        let a = fcache.entry((1, anti)).or_insert_with(|| f1.derivatives(&anti)).clone();
                        let b = fcache.entry((2, hol)).or_insert_with(|| f2.derivatives(&hol)).clone();
                        factors.push(&a * &b);
                    }
                    _ => factors.push((*self.phi_derivative(e)).clone()),
                }
            }
            // multiply low-order factors first to keep truncation tight
            factors.sort_by_key(TaylorJet::order);
            let mut term = TaylorJet::constant(&self.space, self.order as i32, Complex64::new(1.0, 0.0));
            for f in &factors {
                term = &term * f;
            }
            acc = Some(match acc.take() {
                None => term,
                Some(a) => &a + &term,
            });
            Ok(())
        })?;
        let out = acc.expect("at least one assignment");
        if out.order() < 0 {
            return domain(format!("truncation order {} too small for {g}", self.order));
        }
        Ok(out)
    }
}

fn coeff_f64(q: &num::BigRational) -> f64 {
    q.to_f64().expect("finite coefficient")
}

/// Value of a plain graph at the base point.
pub fn evaluate_graph(g: &Digraph, ctx: &JetContext) -> Result<Complex64> {
    ctx.contract_value(g, None)
}

/// A plain graph as a function near the base point.
pub fn evaluate_graph_jet(g: &Digraph, ctx: &JetContext) -> Result<TaylorJet> {
    ctx.contract_jet(g, None)
}

/// `Γ(f)` at the base point.
pub fn evaluate_pointed(g: &PointedGraph, ctx: &JetContext, f: &TaylorJet) -> Result<Complex64> {
    ctx.contract_value(g.graph(), Some(Slot::Operator(f)))
}

/// `Γ(f)` as a jet.
pub fn apply_pointed(g: &PointedGraph, ctx: &JetContext, f: &TaylorJet) -> Result<TaylorJet> {
    ctx.contract_jet(g.graph(), Some(Slot::Operator(f)))
}

/// `Γ^op(f₁, f₂)` at the base point.
pub fn evaluate_bidiff(g: &PointedGraph, ctx: &JetContext, f1: &TaylorJet, f2: &TaylorJet) -> Result<Complex64> {
    ctx.contract_value(g.graph(), Some(Slot::Bidifferential(f1, f2)))
}

/// `Γ^op(f₁, f₂)` as a jet.
pub fn bidiff_jet(g: &PointedGraph, ctx: &JetContext, f1: &TaylorJet, f2: &TaylorJet) -> Result<TaylorJet> {
    ctx.contract_jet(g.graph(), Some(Slot::Bidifferential(f1, f2)))
}

pub fn evaluate_sum(s: &GraphSum<Digraph>, ctx: &JetContext) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for (_, g, q) in s.iter() {
        acc += evaluate_graph(g, ctx)? * coeff_f64(q);
    }
    Ok(acc)
}

pub fn evaluate_sum_jet(s: &GraphSum<Digraph>, ctx: &JetContext) -> Result<TaylorJet> {
    let mut acc: Option<TaylorJet> = None;
    for (_, g, q) in s.iter() {
        let t = evaluate_graph_jet(g, ctx)?.scale(Complex64::new(coeff_f64(q), 0.0));
        acc = Some(acc.map_or(t.clone(), |a| &a + &t));
    }
    Ok(acc.unwrap_or_else(|| TaylorJet::zero(ctx.space(), ctx.order() as i32)))
}

/// `Σ c_Γ Γ(f)` at the base point.
pub fn evaluate_operator(s: &GraphSum<PointedGraph>, ctx: &JetContext, f: &TaylorJet) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for (_, g, q) in s.iter() {
        acc += evaluate_pointed(g, ctx, f)? * coeff_f64(q);
    }
    Ok(acc)
}

/// `Σ c_Γ Γ(f)` as a jet.
pub fn apply_operator(s: &GraphSum<PointedGraph>, ctx: &JetContext, f: &TaylorJet) -> Result<TaylorJet> {
    let mut acc = f.scale(Complex64::zero()).truncate(f.order());
    for (_, g, q) in s.iter() {
        let t = apply_pointed(g, ctx, f)?.scale(Complex64::new(coeff_f64(q), 0.0));
        acc = &acc + &t;
    }
    Ok(acc)
}

/// `Σ c_Γ Γ^op(f₁, f₂)` at the base point.
pub fn evaluate_bidiff_sum(
    s: &GraphSum<PointedGraph>,
    ctx: &JetContext,
    f1: &TaylorJet,
    f2: &TaylorJet,
) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for (_, g, q) in s.iter() {
        acc += evaluate_bidiff(g, ctx, f1, f2)? * coeff_f64(q);
    }
    Ok(acc)
}

/// `Σ c_Γ Γ^op(f₁, f₂)` as a jet.
pub fn bidiff_sum_jet(
    s: &GraphSum<PointedGraph>,
    ctx: &JetContext,
    f1: &TaylorJet,
    f2: &TaylorJet,
) -> Result<TaylorJet> {
    let mut acc: Option<TaylorJet> = None;
    for (_, g, q) in s.iter() {
        let t = bidiff_jet(g, ctx, f1, f2)?.scale(Complex64::new(coeff_f64(q), 0.0));
        acc = Some(acc.map_or(t.clone(), |a| &a + &t));
    }
    Ok(acc.unwrap_or_else(|| (f1 * f2).scale(Complex64::zero())))
}

/// Relative discrepancy `|a - b| / max(1, |a|, |b|)`.
pub fn relative_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Outcome of evaluating one sum in both charts of a model.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub chart0: Complex64,
    pub chart1: Complex64,
    pub relative_diff: f64,
    pub tolerance: f64,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.relative_diff <= self.tolerance
    }
}

/// Anything whose value at a point can be compared across charts.
pub trait ChartEvaluable {
    fn evaluate_in(&self, ctx: &JetContext, seed: u64) -> Result<Complex64>;
}

impl ChartEvaluable for GraphSum<Digraph> {
    fn evaluate_in(&self, ctx: &JetContext, _seed: u64) -> Result<Complex64> {
        evaluate_sum(self, ctx)
    }
}

impl ChartEvaluable for GraphSum<PointedGraph> {
    /// Applies the operator to a fixed random test function.
    fn evaluate_in(&self, ctx: &JetContext, seed: u64) -> Result<Complex64> {
        let f = TestFunction::random(ctx.model(), ctx.order(), seed);
        evaluate_operator(self, ctx, &ctx.function(&f))
    }
}

/// Evaluates at corresponding points of the two charts of `model`.
pub fn invariance_test<S: ChartEvaluable>(
    sum: &S,
    model: Model,
    order: usize,
    tolerance: f64,
) -> Result<InvarianceReport> {
    let c0 = builtin_context(model, 0, order)?;
    let c1 = builtin_context(model, 1, order)?;
    let seed = 0x5eed;
    let a = sum.evaluate_in(&c0, seed)?;
    let b = sum.evaluate_in(&c1, seed)?;
    Ok(InvarianceReport {
        chart0: a,
        chart1: b,
        relative_diff: relative_diff(a, b),
        tolerance,
    })
}

/// Comparison of `op1(op2(f))` with a claimed composite applied to `f`.
#[derive(Clone, Debug)]
pub struct ComposeReport {
    pub sequential: Complex64,
    pub composite: Complex64,
    pub relative_diff: f64,
}

pub fn compose_oracle(
    op1: &GraphSum<PointedGraph>,
    op2: &GraphSum<PointedGraph>,
    composite: &GraphSum<PointedGraph>,
    ctx: &JetContext,
    f: &TaylorJet,
) -> Result<ComposeReport> {
    let inner = apply_operator(op2, ctx, f)?;
    let sequential = evaluate_operator(op1, ctx, &inner)?;
    let composite = evaluate_operator(composite, ctx, f)?;
    Ok(ComposeReport {
        sequential,
        composite,
        relative_diff: relative_diff(sequential, composite),
    })
}

/// Convenience: the weight of a graph kind is irrelevant here, but sums of
/// mixed kinds cannot be evaluated together.
pub fn require_pointed<G: GraphLike>() -> Result<()> {
    if G::POINTED {
        Ok(())
    } else {
        domain("expected pointed graphs")
    }
}
