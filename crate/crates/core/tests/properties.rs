//! Structural properties of stabilization, canonical forms and automorphisms.

mod common;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylgraph::canonical::{are_isomorphic, aut_order, canonical_key};
use weylgraph::enumerate::{enumerate_graphs, EnumOptions, Limits};
use weylgraph::graph::{det_identity_minus_adjacency, Digraph, GraphLike, PointedGraph};
use weylgraph::jets::{builtin_context, evaluate_graph, evaluate_pointed, relative_diff, Model, TestFunction};
use weylgraph::stabilize::{gs_stable_graph, is_gs, semistabilization, stabilize};

fn config(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn check_confluence<G: GraphLike>() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for g in all_semistable::<G>() {
        let reference = stabilize(&g).unwrap().terminal;
        for _ in 0..10 {
            assert!(are_isomorphic(&random_order_terminal(&g, &mut rng), &reference), "{g}");
        }
    }
}

#[test]
fn stabilization_is_confluent() {
    check_confluence::<Digraph>();
    check_confluence::<PointedGraph>();
}

fn check_contraction_keeps_semistability<G: GraphLike>() {
    // contractibility depends only on the endpoints, and contraction may
    // reorder the edge list, so edges are tracked by their endpoints
    let contractible_pairs = |h: &G| -> Vec<(usize, usize)> {
        let d = h.digraph();
        h.contractible_edges().unwrap().iter().map(|e| d.edges()[e.0]).collect()
    };
    for g in all_semistable::<G>() {
        let before = contractible_pairs(&g);
        for e in g.contractible_edges().unwrap() {
            let (u, v) = g.digraph().edges()[e.0];
            let (keep, gone) = (u.min(v), u.max(v));
            let relabel = |x: usize| {
                let x = if x == gone { keep } else { x };
                x - usize::from(x > gone)
            };
            let h = g.contract_edge(e).unwrap();
            assert!(h.is_semistable(), "{g} / {e:?}");
            let after = contractible_pairs(&h);
            for &(a, b) in g.digraph().edges() {
                if (a, b) == (u, v) || (a, b) == (v, u) {
                    continue;
                }
                let was = before.contains(&(a, b));
                let is = after.contains(&(relabel(a), relabel(b)));
                assert_eq!(was, is, "{g}: edge {a}->{b} after contracting {u}->{v}");
            }
        }
    }
}

#[test]
fn contraction_preserves_semistability_and_other_contractible_edges() {
    check_contraction_keeps_semistability::<Digraph>();
    check_contraction_keeps_semistability::<PointedGraph>();
}

fn check_strongness_under_stabilization<G: GraphLike>() {
    for g in all_semistable::<G>() {
        let r = stabilize(&g).unwrap();
        if g.is_strong() {
            assert!(r.stabilizable, "{g}");
        }
        if let Some(s) = &r.stable_graph {
            if s.is_strong() {
                assert!(g.is_strong(), "{g}");
            }
        }
    }
}

#[test]
fn strong_graphs_stabilize_and_strongness_lifts_from_the_stabilization() {
    check_strongness_under_stabilization::<Digraph>();
    check_strongness_under_stabilization::<PointedGraph>();
}

fn check_insertion<G: GraphLike>(g: &G, picks: &[usize]) -> G {
    let mut cur = g.clone();
    for &p in picks {
        cur = subdivide(&cur, p % cur.digraph().edge_count());
    }
    assert!(is_gs(&cur), "{cur}");
    let ss = semistabilization(&cur).unwrap();
    assert!(are_isomorphic(&ss, g));
    assert_eq!(ss.weight(), cur.weight());
    let expect = stabilize(g).unwrap().stable_graph.unwrap();
    assert!(are_isomorphic(&gs_stable_graph(&cur).unwrap(), &expect));
    cur
}

proptest! {
    #![proptest_config(config(50, 0x9a55))]

    #[test]
    fn pass_through_insertion_is_neutral(
        idx in 0usize..10_000,
        picks in prop::collection::vec(0usize..64, 1..=2),
    ) {
        let plain = stabilizable::<Digraph>();
        let g = &plain[idx % plain.len()];
        let sub = check_insertion(g, &picks);
        let ctx = builtin_context(Model::FubiniStudy2d, 0, 8).unwrap();
        let a = evaluate_graph(g, &ctx).unwrap();
        let b = evaluate_graph(&sub, &ctx).unwrap();
        prop_assert!(relative_diff(a, b) < 1e-10, "{} vs {}: {} {}", g, sub, a, b);

        let pointed = stabilizable::<PointedGraph>();
        let p = &pointed[idx % pointed.len()];
        if p.digraph().edge_count() > 0 {
            let sub = check_insertion(p, &picks);
            let f = ctx.function(&TestFunction::random(Model::FubiniStudy2d, 8, idx as u64));
            let a = evaluate_pointed(p, &ctx, &f).unwrap();
            let b = evaluate_pointed(&sub, &ctx, &f).unwrap();
            prop_assert!(relative_diff(a, b) < 1e-10, "{} vs {}", p, sub);
        }
    }
}

#[test]
fn loops_block_pass_through_suppression() {
    // a (1,1) vertex with a loop is a cycle component, not a subdivision
    let g = PointedGraph::from_edges(2, vec![(0, 0), (1, 1)]).unwrap();
    assert!(!is_gs(&g));
}

fn arb_digraph(max_v: usize, max_e: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_v).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_e).prop_map(move |e| Digraph::new(n, e).unwrap())
    })
}

fn arb_perm(n: usize, fix_first: bool) -> impl Strategy<Value = Vec<usize>> {
    let start = usize::from(fix_first).min(n);
    Just((start..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(move |tail| (0..start).chain(tail).collect())
}

proptest! {
    #![proptest_config(config(300, 0xa07))]

    #[test]
    fn canonical_keys_ignore_relabelling(
        (g, perm) in arb_digraph(6, 10).prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), arb_perm(n, false))
        })
    ) {
        let h = g.permuted(&perm);
        prop_assert_eq!(canonical_key(&g), canonical_key(&h));
    }

    #[test]
    fn pointed_keys_ignore_relabelling_of_ordinary_vertices(
        (g, perm) in arb_digraph(6, 10).prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), arb_perm(n, true))
        })
    ) {
        let a = PointedGraph::new(g.clone()).unwrap();
        let b = PointedGraph::new(g.permuted(&perm)).unwrap();
        prop_assert_eq!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn aut_order_matches_brute_force(g in arb_digraph(6, 9)) {
        prop_assert_eq!(aut_order(&g), brute_force_aut(&g, false));
        let p = PointedGraph::new(g.clone()).unwrap();
        prop_assert_eq!(aut_order(&p), brute_force_aut(&g, true));
    }

    #[test]
    fn keys_separate_graphs_with_different_degree_tables(a in arb_digraph(4, 6), b in arb_digraph(4, 6)) {
        let mut da = a.degree_table();
        let mut db = b.degree_table();
        da.sort();
        db.sort();
        if da != db {
            prop_assert_ne!(canonical_key(&a), canonical_key(&b));
        }
    }
}

#[test]
fn determinant_equals_signed_linear_subgraph_count() {
    let mut checked = 0usize;
    for n in 1..=4 {
        for_each_digraph(n, 6, &mut |d| {
            assert_eq!(det_identity_minus_adjacency(d), signed_linear_subgraph_count(d), "{d}");
            checked += 1;
        });
    }
    assert!(checked > 70_000);
}

#[test]
fn random_contraction_orders_on_larger_graphs() {
    // weight 3 sample, seeded
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let graphs = enumerate_graphs::<Digraph>(3, EnumOptions::default(), &Limits::default()).unwrap();
    for _ in 0..200 {
        let g = &graphs[rng.gen_range(0..graphs.len())];
        let reference = stabilize(g).unwrap().terminal;
        assert!(are_isomorphic(&random_order_terminal(g, &mut rng), &reference));
    }
}
