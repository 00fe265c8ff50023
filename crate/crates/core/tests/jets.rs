//! Numeric checks of graph evaluation on the model manifolds.

#![allow(clippy::needless_range_loop)]

use num::complex::Complex64;
use num::Zero;
use weylgraph::enumerate::{DecoratedTree, Limits};
use weylgraph::graph::{Digraph, PointedGraph};
use weylgraph::jets::{
    builtin_context, evaluate_graph, evaluate_pointed, relative_diff, JetContext, Model, TaylorJet, TestFunction,
    MAX_VARS,
};
use weylgraph::weyl::tensor_expansion;

/// Component `(a, b̄)` of `Σ sign · T` with a fixed labelled index tuple.
fn tree_component(
    trees: &[(DecoratedTree, i8)],
    ctx: &JetContext,
    f: Option<&TaylorJet>,
    a: &[usize],
    b: &[usize],
) -> Complex64 {
    let n = ctx.dim();
    let mut total = Complex64::zero();
    for (t, sign) in trees {
        let edges = t.tree.edges();
        let nv = t.vertex_count();
        let mut acc = Complex64::zero();
        for code in 0..n.pow(2 * edges.len() as u32) {
            let mut r = code;
            let mut ex = vec![[0u8; MAX_VARS]; nv];
            let mut term = Complex64::new(1.0, 0.0);
            for &(u, v) in edges {
                let (k, l) = (r % n, (r / n) % n);
                r /= n * n;
                ex[u][k] += 1;
                ex[v][n + l] += 1;
                term *= ctx.inverse_metric_value(k, l);
            }
            for v in 0..nv {
                for &lab in &t.out_legs[v] {
                    ex[v][a[lab]] += 1;
                }
                for &lab in &t.in_legs[v] {
                    ex[v][n + b[lab]] += 1;
                }
                term *= match (v, f) {
                    (0, Some(f)) if t.pointed => f.derivative_value(&ex[v]).unwrap(),
                    _ => ctx.phi_derivative_value(&ex[v]).unwrap(),
                };
            }
            acc += term;
        }
        total += acc * f64::from(*sign);
    }
    total
}

/// `J[a][A] = ∂z_a/∂ζ_A` at the chart-1 base point.
fn jacobian(model: Model, c1: &JetContext) -> Vec<Vec<Complex64>> {
    let n = model.dim();
    (0..n)
        .map(|a| {
            let za = c1.function(&TestFunction::coordinate(model, a));
            (0..n)
                .map(|big| {
                    let mut e = [0u8; MAX_VARS];
                    e[big] = 1;
                    za.derivative_value(&e).unwrap()
                })
                .collect()
        })
        .collect()
}

fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    (0..n.pow(len as u32))
        .map(|mut c| {
            (0..len)
                .map(|_| {
                    let x = c % n;
                    c /= n;
                    x
                })
                .collect()
        })
        .collect()
}

/// Checks that the signed tree sum transforms as a `(k, m)` tensor.
fn check_covariance(model: Model, k: usize, m: usize, pointed: bool) -> f64 {
    let order = k + m + 2;
    let trees = tensor_expansion(k, m, pointed, &Limits::default()).unwrap();
    let c0 = builtin_context(model, 0, order).unwrap();
    let c1 = builtin_context(model, 1, order).unwrap();
    let tf = TestFunction::random(model, order, 11);
    let (f0, f1) = (c0.function(&tf), c1.function(&tf));
    let j = jacobian(model, &c1);
    let n = model.dim();
    let big_a = vec![n - 1; k];
    let big_b = vec![0; m];
    let lhs = tree_component(&trees, &c1, Some(&f1), &big_a, &big_b);
    let mut rhs = Complex64::zero();
    for a in tuples(n, k) {
        for b in tuples(n, m) {
            let mut w = Complex64::new(1.0, 0.0);
            for (x, y) in a.iter().zip(&big_a) {
                w *= j[*x][*y];
            }
            for (x, y) in b.iter().zip(&big_b) {
                w *= j[*x][*y].conj();
            }
            rhs += w * tree_component(&trees, &c0, Some(&f0), &a, &b);
        }
    }
    relative_diff(lhs, rhs)
}

#[test]
fn plain_tree_sums_are_tensors_in_one_dimension() {
    for (k, m) in [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2), (4, 4), (5, 3)] {
        for model in [Model::FubiniStudy1d, Model::Hyperbolic1d] {
            let d = check_covariance(model, k, m, false);
            assert!(d < 1e-9, "{model} ({k},{m}): {d:e}");
        }
    }
}

#[test]
fn plain_tree_sums_are_tensors_in_two_dimensions() {
    for (k, m) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let d = check_covariance(Model::FubiniStudy2d, k, m, false);
        assert!(d < 1e-9, "({k},{m}): {d:e}");
    }
}

#[test]
fn pointed_tree_sums_are_tensors() {
    for (k, m) in [(1, 0), (0, 1), (1, 1), (2, 1), (2, 2), (3, 2)] {
        let d = check_covariance(Model::FubiniStudy2d, k, m, true);
        assert!(d < 1e-9, "({k},{m}): {d:e}");
    }
    for (k, m) in [(3, 3), (4, 2)] {
        let d = check_covariance(Model::Hyperbolic1d, k, m, true);
        assert!(d < 1e-9, "({k},{m}): {d:e}");
    }
}

#[test]
fn dropping_one_tree_breaks_covariance() {
    // the check is sensitive to a single missing tree
    let model = Model::FubiniStudy1d;
    let mut trees = tensor_expansion(4, 4, false, &Limits::default()).unwrap();
    trees.pop();
    let c0 = builtin_context(model, 0, 10).unwrap();
    let c1 = builtin_context(model, 1, 10).unwrap();
    let j = jacobian(model, &c1)[0][0];
    let lhs = tree_component(&trees, &c1, None, &[0; 4], &[0; 4]);
    let rhs = tree_component(&trees, &c0, None, &[0; 4], &[0; 4]) * j.powi(4) * j.conj().powi(4);
    assert!(relative_diff(lhs, rhs) > 1e-6);
}

#[test]
fn hermitian_graphs_are_real_on_real_potentials() {
    // reversing every edge conjugates the value
    let ctx = builtin_context(Model::FubiniStudy2d, 0, 8).unwrap();
    let g = Digraph::new(2, vec![(0, 1), (0, 1), (1, 0), (0, 0)]).unwrap();
    let rev = Digraph::new(2, g.edges().iter().map(|&(u, v)| (v, u)).collect()).unwrap();
    let a = evaluate_graph(&g, &ctx).unwrap();
    let b = evaluate_graph(&rev, &ctx).unwrap();
    assert!(relative_diff(a, b.conj()) < 1e-12);
    let l2 = Digraph::new(1, vec![(0, 0), (0, 0)]).unwrap();
    assert!(evaluate_graph(&l2, &ctx).unwrap().im.abs() < 1e-12);
}

#[test]
fn laplacian_of_coordinate_functions() {
    // Δ z_i = g^{k l̄} ∂_k ∂_{l̄} z_i = 0 for holomorphic input
    let ctx = builtin_context(Model::FubiniStudy2d, 0, 6).unwrap();
    let p1 = PointedGraph::from_edges(1, vec![(0, 0)]).unwrap();
    for i in 0..2 {
        let f = ctx.function(&TestFunction::coordinate(Model::FubiniStudy2d, i));
        assert!(evaluate_pointed(&p1, &ctx, &f).unwrap().norm() < 1e-13);
    }
}

mod invariance {
    use weylgraph::enumerate::Limits;
    use weylgraph::graph::{Digraph, PointedGraph};
    use weylgraph::jets::{invariance_test, Model};
    use weylgraph::opalg::{q_k_operator, r_k_operator};
    use weylgraph::weyl::{build_invariant, is_weyl_function, WeylFunctionSpec};

    fn h3() -> Digraph {
        Digraph::new(2, vec![(1, 0), (1, 0), (0, 1)]).unwrap()
    }

    #[test]
    fn weyl_invariants_agree_across_charts() {
        let l = Limits::default();
        for spec in ["const:1", "beta:3/2", "det"] {
            let c: WeylFunctionSpec = spec.parse().unwrap();
            for k in 1..=2 {
                assert!(is_weyl_function::<Digraph>(&c, k, &l).unwrap().is_weyl());
                let inv = build_invariant::<Digraph>(&c, k, &l).unwrap();
                for model in [Model::FubiniStudy1d, Model::Hyperbolic1d, Model::FubiniStudy2d] {
                    let r = invariance_test(&inv.sum, model, 10, 1e-9).unwrap();
                    assert!(r.passed(), "{spec} weight {k} on {model}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn non_weyl_combinations_change_with_the_chart() {
        let l = Limits::default();
        let bad = build_invariant::<Digraph>(&WeylFunctionSpec::indicator(&h3()), 1, &l).unwrap();
        let r = invariance_test(&bad.sum, Model::FubiniStudy1d, 10, 1e-9).unwrap();
        assert!(r.relative_diff > 1e-3, "{r:?}");
        let berezin = build_invariant::<Digraph>(&WeylFunctionSpec::berezin(), 1, &l).unwrap();
        assert!(
            invariance_test(&berezin.sum, Model::FubiniStudy1d, 10, 1e-9)
                .unwrap()
                .relative_diff
                > 1e-3
        );
    }

    #[test]
    fn flat_charts_match_exactly() {
        let l = Limits::default();
        let bad = build_invariant::<Digraph>(&WeylFunctionSpec::indicator(&h3()), 1, &l).unwrap();
        let r = invariance_test(&bad.sum, Model::Flat2d, 6, 0.0).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn covariant_operators_agree_across_charts() {
        let l = Limits::default();
        for k in 1..=2 {
            for op in [q_k_operator(k, &l).unwrap(), r_k_operator(k, &l).unwrap()] {
                let sum = op.expand(&l).unwrap();
                for model in [Model::FubiniStudy1d, Model::FubiniStudy2d] {
                    let r = invariance_test(&sum, model, 10, 1e-9).unwrap();
                    assert!(r.passed(), "weight {k} on {model}: {r:?}");
                }
            }
        }
        // a single non-stable pointed graph is not covariant
        let mut s = weylgraph::sum::GraphSum::new();
        s.add_term(
            &PointedGraph::from_edges(2, vec![(0, 1), (1, 0), (1, 1)]).unwrap(),
            num::BigRational::from_integer(1.into()),
        );
        assert!(
            invariance_test(&s, Model::FubiniStudy1d, 10, 1e-9)
                .unwrap()
                .relative_diff
                > 1e-3
        );
    }
}
