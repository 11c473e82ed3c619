//! Symbolic kernel for the generalized Curry-Howard-Lambek correspondence:
//! freely presented generalized categories, ideal cartesian closed
//! categories with decidable equality, a generalized typed lambda calculus,
//! abstraction elimination, and the mutually inverse translations between
//! the two worlds.
//!
//! The crate is `no_std` (alloc only); IO, parsing, and the CLI live in the
//! companion `gtt-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod expr;
pub mod gencat;
pub mod dedsys;
pub mod iccc;
pub mod poly;
pub mod lam;
pub mod correspond;
pub mod rng;

#[cfg(feature = "oracle")]
pub mod oracle;

pub use error::{Error, Result};
pub use expr::{Expr, ExprId, NameId, RawExpr, Theory, World};
pub use lam::{LambdaCalculus, Term, TermId, Var};
