//! `weylgraph` command-line interface.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 capacity limit exceeded.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::{CliError, Report};

#[derive(Parser, Debug)]
#[command(
    name = "weylgraph",
    version,
    about = "Graph calculus for Weyl invariants and star products"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct LimitArgs {
    /// Largest graph weight the enumerators accept.
    #[arg(long, global = true, default_value_t = 4)]
    max_weight: usize,
    /// Largest `k + m` for decorated trees.
    #[arg(long, global = true, default_value_t = 10)]
    max_legs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List semistable graphs of a given weight up to isomorphism.
    Enumerate {
        #[arg(long)]
        weight: usize,
        #[arg(long)]
        stable: bool,
        #[arg(long)]
        pointed: bool,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        balanced: bool,
        /// Keep only stabilizable graphs.
        #[arg(long)]
        stabilizable: bool,
    },
    /// Counts of contractible semistable trees `t_{k,m}(n)`.
    Table {
        #[arg(long, num_args = 2, value_names = ["KMAX", "MMAX"], required = true)]
        trees: Vec<usize>,
    },
    /// Stabilize a semistable graph, printing the contraction trace.
    Stabilize { graph: String },
    /// Automorphism group order and canonical key.
    Aut { graph: String },
    /// Check that a coefficient function is constant on stabilization fibers.
    WeylCheck {
        #[arg(long)]
        weight: usize,
        #[arg(long)]
        function: String,
        #[arg(long)]
        pointed: bool,
    },
    /// Expand a stable graph over its stabilization fiber.
    DExpand { graph: String },
    /// Compose two operators given in the stable basis.
    Compose {
        op1: String,
        op2: String,
        /// Use strong subgraphs only.
        #[arg(long)]
        strong: bool,
        #[arg(long, value_enum, default_value_t = SignArg::Plain)]
        sign: SignArg,
        /// Print the semistable expansion instead of stable coefficients.
        #[arg(long)]
        expanded: bool,
    },
    /// Build an operator family.
    Op {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        k: usize,
        /// Balanced graphs only, as a semistable expansion.
        #[arg(long)]
        balanced: bool,
        #[arg(long)]
        expanded: bool,
    },
    /// Star-product coefficients `C_0 … C_N`.
    Star {
        #[arg(long, default_value = "berezin")]
        h: String,
        #[arg(long)]
        order: usize,
        /// Build the Wick-type dual of the `h_C` product with this `C`.
        #[arg(long, value_name = "C")]
        wick_dual: Option<String>,
        #[arg(long, value_enum, default_value_t = IndexArg::Strong)]
        wick_index: IndexArg,
    },
    /// Check the star-product axioms numerically.
    StarCheck {
        #[arg(long, default_value = "berezin")]
        h: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "fubini_study_1d")]
        metric: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_name = "C")]
        wick_dual: Option<String>,
    },
    /// Evaluate a graph or an operator file at the base point of a model.
    Eval {
        /// Graph in text or JSON form, or a path to a graph-sum JSON file.
        target: String,
        #[arg(long, default_value = "fubini_study_1d")]
        metric: String,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        chart: u8,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Seed of the random test function for pointed graphs.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Numeric verification against the jet oracle.
    Verify {
        #[arg(value_enum)]
        what: VerifyKind,
        #[arg(long, default_value = "fubini_study_1d")]
        metric: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Star function for `associativity`.
        #[arg(long, default_value = "berezin")]
        h: String,
        /// Star order for `associativity`.
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Coefficient function for `invariance`.
        #[arg(long, default_value = "const:1")]
        function: String,
        /// Weight for `invariance`.
        #[arg(long, default_value_t = 1)]
        weight: usize,
        /// Left and right `Q_k` weights for `compose`.
        #[arg(long, default_value_t = 1)]
        left: usize,
        #[arg(long, default_value_t = 2)]
        right: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SignArg {
    Plain,
    VertexParity,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum IndexArg {
    Strong,
    Semistable,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    #[value(name = "Qk", alias = "qk", alias = "q")]
    Qk,
    #[value(name = "Rk", alias = "rk", alias = "r")]
    Rk,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifyKind {
    Invariance,
    Associativity,
    Compose,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.json;
    match commands::run(cli) {
        Ok(report) => emit(&report, json),
        Err(e) => {
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code() })
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(report: &Report, json: bool) -> ExitCode {
    let body = if json {
        serde_json::to_string_pretty(&report.json).expect("serializable")
    } else {
        report.text.trim_end().to_string()
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = writeln!(std::io::stdout().lock(), "{body}");
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

impl From<weylgraph::error::Error> for CliError {
    fn from(e: weylgraph::error::Error) -> Self {
        CliError::Core(e)
    }
}
