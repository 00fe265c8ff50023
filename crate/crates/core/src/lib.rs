//! Graph calculus for invariant polynomials, covariant differential
//! operators and star products on Kähler manifolds.
//!
//! Directed multigraphs encode contractions of derivatives of the Kähler
//! potential: a vertex with `p` outgoing and `q` incoming half-edges stands
//! for `∂^p ∂̄^q Φ`, and an edge `u -> v` contracts an unbarred index at `u`
//! with a barred index at `v` through the inverse metric. Pointed graphs
//! carry a distinguished vertex holding the argument of an operator.

#![allow(clippy::needless_range_loop)]

pub mod canonical;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod io;
pub mod jets;
pub mod opalg;
pub mod stabilize;
pub mod star;
pub mod sum;
pub mod weyl;

pub use error::{Error, Result};
