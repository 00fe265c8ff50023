use std::fmt::Write as _;
use std::path::Path;

use num::BigRational;
use serde_json::{json, Value};
use weylgraph::canonical::{aut_order, canonical_key};
use weylgraph::enumerate::{enumerate_graphs, tree_table_rows, EnumOptions, Limits};
use weylgraph::error::Error;
use weylgraph::graph::{Digraph, GraphLike, PointedGraph};
use weylgraph::io::{
    parse_graph, parse_rational, star_to_json, sum_from_json, sum_to_json, AnyGraph, GraphJson, TermJson,
};
use weylgraph::jets::{
    builtin_context, compose_oracle, evaluate_graph, evaluate_operator, evaluate_pointed, evaluate_sum,
    invariance_test, Model, TestFunction,
};
use weylgraph::opalg::{compose_with, q_k_balanced, q_k_operator, r_k_operator, CompositionSign, OperatorSum};
use weylgraph::stabilize::stabilize;
use weylgraph::star::{check_axioms, star_coefficients, wick_dual_h_c, StarSeries, WickIndexSet};
use weylgraph::sum::GraphSum;
use weylgraph::weyl::{build_invariant, d_expand, is_weyl_function, WeylFunctionSpec};

use crate::output::{complex, fmt_complex, pass_fail, CliError, Report};
use crate::{Cli, Command, Family, IndexArg, SignArg, VerifyKind};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<Report> {
    let limits = Limits {
        max_weight: cli.limits.max_weight,
        max_legs: cli.limits.max_legs,
    };
    match cli.command {
        Command::Enumerate {
            weight,
            stable,
            pointed,
            strong,
            balanced,
            stabilizable,
        } => {
            let opts = EnumOptions {
                stable,
                strong,
                balanced,
                stabilizable,
            };
            if pointed {
                enumerate::<PointedGraph>(weight, opts, &limits)
            } else {
                enumerate::<Digraph>(weight, opts, &limits)
            }
        }
        Command::Table { trees } => table(trees[0], trees[1], &limits),
        Command::Stabilize { graph } => match read_graph(&graph)? {
            AnyGraph::Plain(g) => stabilize_cmd(&g),
            AnyGraph::Pointed(g) => stabilize_cmd(&g),
        },
        Command::Aut { graph } => match read_graph(&graph)? {
            AnyGraph::Plain(g) => aut(&g),
            AnyGraph::Pointed(g) => aut(&g),
        },
        Command::WeylCheck {
            weight,
            function,
            pointed,
        } => {
            let spec: WeylFunctionSpec = function.parse()?;
            if pointed {
                weyl_check::<PointedGraph>(&spec, weight, &limits)
            } else {
                weyl_check::<Digraph>(&spec, weight, &limits)
            }
        }
        Command::DExpand { graph } => match read_graph(&graph)? {
            AnyGraph::Plain(g) => Ok(sum_report(&d_expand(&g, &limits)?)),
            AnyGraph::Pointed(g) => Ok(sum_report(&d_expand(&g, &limits)?)),
        },
        Command::Compose {
            op1,
            op2,
            strong,
            sign,
            expanded,
        } => {
            let a = read_operator(&op1)?;
            let b = read_operator(&op2)?;
            let rule = match sign {
                SignArg::Plain => CompositionSign::Plain,
                SignArg::VertexParity => CompositionSign::VertexParity,
            };
            let c = compose_with(&a, &b, strong, rule, &limits)?;
            operator_report(&c, expanded, &limits)
        }
        Command::Op {
            family,
            k,
            balanced,
            expanded,
        } => match (family, balanced) {
            (Family::Qk, true) => Ok(sum_report(&q_k_balanced(k, &limits)?)),
            (Family::Rk, true) => Err(CliError::Core(Error::Domain("--balanced applies to Qk only".into()))),
            (Family::Qk, false) => operator_report(&q_k_operator(k, &limits)?, expanded, &limits),
            (Family::Rk, false) => operator_report(&r_k_operator(k, &limits)?, expanded, &limits),
        },
        Command::Star {
            h,
            order,
            wick_dual,
            wick_index,
        } => {
            let s = build_series(&h, order, wick_dual.as_deref(), wick_index, &limits)?;
            Ok(Report::new(
                s.to_string(),
                serde_json::to_value(star_to_json(&s)).expect("serializable"),
            ))
        }
        Command::StarCheck {
            h,
            order,
            metric,
            tol,
            seed,
            wick_dual,
        } => {
            let model: Model = metric.parse()?;
            let s = build_series(&h, order, wick_dual.as_deref(), IndexArg::Strong, &limits)?;
            star_check(&s, order, model, tol, seed)
        }
        Command::Eval {
            target,
            metric,
            chart,
            order,
            seed,
        } => eval(&target, metric.parse()?, chart, order, seed),
        Command::Verify {
            what,
            metric,
            tol,
            h,
            order,
            function,
            weight,
            left,
            right,
            seed,
        } => {
            let model: Model = metric.parse()?;
            match what {
                VerifyKind::Invariance => verify_invariance(&function.parse()?, weight, model, tol, &limits),
                VerifyKind::Associativity => {
                    let s = star_coefficients(&h.parse()?, order, &limits)?;
                    star_check(&s, order, model, tol, seed)
                }
                VerifyKind::Compose => verify_compose(left, right, model, tol, seed, &limits),
            }
        }
    }
}

fn read_graph(arg: &str) -> Result<AnyGraph> {
    let p = Path::new(arg);
    if p.is_file() {
        let s = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{arg}: {e}")))?;
        return Ok(parse_graph(&s)?);
    }
    Ok(parse_graph(arg)?)
}

fn read_terms(path: &str) -> Result<Vec<TermJson>> {
    let s = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    serde_json::from_str(&s).map_err(|e| CliError::Core(Error::Parse(format!("{path}: {e}"))))
}

fn read_operator(path: &str) -> Result<OperatorSum> {
    let sum = sum_from_json::<PointedGraph>(&read_terms(path)?)?;
    Ok(OperatorSum::from_coefficients(sum)?)
}

fn graph_json<G: GraphLike>(g: &G) -> Value {
    serde_json::to_value(GraphJson::from_graph(g)).expect("serializable")
}

fn sum_report<G: GraphLike>(s: &GraphSum<G>) -> Report {
    Report::new(
        s.to_string(),
        serde_json::to_value(sum_to_json(s)).expect("serializable"),
    )
}

fn operator_report(op: &OperatorSum, expanded: bool, limits: &Limits) -> Result<Report> {
    if expanded {
        Ok(sum_report(&op.expand(limits)?))
    } else {
        Ok(sum_report(op.coefficients()))
    }
}

fn enumerate<G: GraphLike>(k: usize, opts: EnumOptions, limits: &Limits) -> Result<Report> {
    let graphs: Vec<G> = enumerate_graphs(k, opts, limits)?;
    let mut text = String::new();
    let mut list = Vec::new();
    for g in &graphs {
        let key = canonical_key(g).to_hex();
        let _ = writeln!(text, "{key}\t{g}");
        list.push(json!({ "key": key, "graph": graph_json(g) }));
    }
    let _ = write!(text, "# {} graphs", graphs.len());
    Ok(Report::new(text, Value::Array(list)))
}

fn table(kmax: usize, mmax: usize, limits: &Limits) -> Result<Report> {
    let rows = tree_table_rows(kmax, mmax, limits)?;
    let width = rows.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
    let mut text = String::from("(k,m)");
    for n in 1..=width {
        let _ = write!(text, "\tn={n}");
    }
    let mut list = Vec::new();
    for ((k, m), counts) in &rows {
        let _ = write!(text, "\n({k},{m})");
        for c in counts {
            let _ = write!(text, "\t{c}");
        }
        list.push(json!({ "k": k, "m": m, "counts": counts }));
    }
    Ok(Report::new(text, Value::Array(list)))
}

fn stabilize_cmd<G: GraphLike>(g: &G) -> Result<Report> {
    let r = stabilize(g)?;
    let trace: Vec<usize> = r.contraction_trace.iter().map(|e| e.0).collect();
    let mut text = format!("input\t{g}\ntrace\t{trace:?}\nterminal\t{}\n", r.terminal);
    match &r.stable_graph {
        Some(s) => {
            let _ = write!(text, "stable\t{s}\nkey\t{}", canonical_key(s).to_hex());
        }
        None => text.push_str("not stabilizable"),
    }
    let json = json!({
        "input": graph_json(g),
        "stabilizable": r.stabilizable,
        "trace": trace,
        "terminal": graph_json(&r.terminal),
        "stable": r.stable_graph.as_ref().map(graph_json),
        "key": r.stable_graph.as_ref().map(|s| canonical_key(s).to_hex()),
    });
    Ok(Report::new(text, json))
}

fn aut<G: GraphLike>(g: &G) -> Result<Report> {
    let order = aut_order(g).to_string();
    let key = canonical_key(g).to_hex();
    Ok(Report::new(
        format!("graph\t{g}\naut\t{order}\nkey\t{key}"),
        json!({ "graph": graph_json(g), "aut_order": order, "key": key }),
    ))
}

fn weyl_check<G: GraphLike>(spec: &WeylFunctionSpec, k: usize, limits: &Limits) -> Result<Report> {
    let r = is_weyl_function::<G>(spec, k, limits)?;
    let ok = r.is_weyl();
    let mut text = format!("{}: {spec} on {} fibers of weight {k}", pass_fail(ok), r.fibers_checked);
    let witness = r.violation.as_ref().map(|w| {
        let _ = write!(
            text,
            "\nwitness\t{} -> {}\n\t{} -> {}",
            w.first, w.first_value, w.second, w.second_value
        );
        json!({
            "first": graph_json(&w.first),
            "first_value": w.first_value.to_string(),
            "second": graph_json(&w.second),
            "second_value": w.second_value.to_string(),
        })
    });
    let json = json!({
        "function": spec.to_string(),
        "weight": k,
        "fibers_checked": r.fibers_checked,
        "is_weyl": ok,
        "witness": witness,
    });
    Ok(Report::verdict(text, json, ok))
}

fn build_series(h: &str, order: usize, wick: Option<&str>, index: IndexArg, limits: &Limits) -> Result<StarSeries> {
    Ok(match wick {
        Some(c) => {
            let c: BigRational = parse_rational(c)?;
            let index = match index {
                IndexArg::Strong => WickIndexSet::Strong,
                IndexArg::Semistable => WickIndexSet::Semistable,
            };
            wick_dual_h_c(&c, order, index, limits)?
        }
        None => star_coefficients(&h.parse()?, order, limits)?,
    })
}

fn star_check(s: &StarSeries, order: usize, model: Model, tol: f64, seed: u64) -> Result<Report> {
    let r = check_axioms(s, order, model, seed)?;
    let ok = r.passed(tol);
    let mut text = format!(
        "{}: order {order} on {model}\nC0 is the product\t{}\nC1 antisymmetrizes to the Poisson bracket\t{}\nseparation of variables\t{}",
        pass_fail(ok),
        r.c0_is_product,
        r.c1_is_poisson,
        r.separation_of_variables
    );
    for (j, a) in r.associator.iter().enumerate() {
        let _ = write!(text, "\nassociator nu^{j}\t{a:.3e}");
    }
    let json = json!({
        "metric": model.name(),
        "order": order,
        "tolerance": tol,
        "c0_is_product": r.c0_is_product,
        "c1_is_poisson": r.c1_is_poisson,
        "separation_of_variables": r.separation_of_variables,
        "associator": r.associator,
        "passed": ok,
    });
    Ok(Report::verdict(text, json, ok))
}

fn eval(target: &str, model: Model, chart: u8, order: usize, seed: u64) -> Result<Report> {
    let ctx = builtin_context(model, chart, order)?;
    let f = || ctx.function(&TestFunction::random(model, order, seed));
    let value = if Path::new(target).is_file() && !target.trim_start().starts_with('{') {
        let terms = read_terms(target)?;
        if terms.first().is_some_and(|t| t.graph.pointed) {
            evaluate_operator(&sum_from_json::<PointedGraph>(&terms)?, &ctx, &f())?
        } else {
            evaluate_sum(&sum_from_json::<Digraph>(&terms)?, &ctx)?
        }
    } else {
        match read_graph(target)? {
            AnyGraph::Plain(g) => evaluate_graph(&g, &ctx)?,
            AnyGraph::Pointed(g) => evaluate_pointed(&g, &ctx, &f())?,
        }
    };
    Ok(Report::new(
        format!("{model} chart {chart}: {}", fmt_complex(value)),
        json!({ "metric": model.name(), "chart": chart, "order": order, "value": complex(value) }),
    ))
}

fn verify_invariance(spec: &WeylFunctionSpec, k: usize, model: Model, tol: f64, limits: &Limits) -> Result<Report> {
    let inv = build_invariant::<Digraph>(spec, k, limits)?;
    let r = invariance_test(&inv.sum, model, weylgraph::jets::DEFAULT_ORDER, tol)?;
    let ok = r.passed();
    Ok(Report::verdict(
        format!(
            "{}: {spec} weight {k} on {model}\nchart 0\t{}\nchart 1\t{}\nrelative difference\t{:.3e}",
            pass_fail(ok),
            fmt_complex(r.chart0),
            fmt_complex(r.chart1),
            r.relative_diff
        ),
        json!({
            "check": "invariance",
            "metric": model.name(),
            "tolerance": tol,
            "chart0": complex(r.chart0),
            "chart1": complex(r.chart1),
            "relative_diff": r.relative_diff,
            "passed": ok,
        }),
        ok,
    ))
}

fn verify_compose(left: usize, right: usize, model: Model, tol: f64, seed: u64, limits: &Limits) -> Result<Report> {
    let a = q_k_operator(left, limits)?;
    let b = q_k_operator(right, limits)?;
    let ab = compose_with(&a, &b, true, CompositionSign::Plain, limits)?;
    let order = weylgraph::jets::DEFAULT_ORDER;
    let ctx = builtin_context(model, 0, order)?;
    let f = ctx.function(&TestFunction::random(model, order, seed));
    let r = compose_oracle(&a.expand(limits)?, &b.expand(limits)?, &ab.expand(limits)?, &ctx, &f)?;
    let ok = r.relative_diff <= tol;
    Ok(Report::verdict(
        format!(
            "{}: Q{left} o Q{right} on {model}\nsequential\t{}\ncomposite\t{}\nrelative difference\t{:.3e}",
            pass_fail(ok),
            fmt_complex(r.sequential),
            fmt_complex(r.composite),
            r.relative_diff
        ),
        json!({
            "check": "compose",
            "metric": model.name(),
            "tolerance": tol,
            "sequential": complex(r.sequential),
            "composite": complex(r.composite),
            "relative_diff": r.relative_diff,
            "passed": ok,
        }),
        ok,
    ))
}
