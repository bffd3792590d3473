//! crkit: exact computer algebra for CR geometry of real algebraic sets.
//!
//! Everything symbolic runs over Gaussian rationals; numeric routines are
//! confined to `flows` and to randomized rank estimation, and every
//! randomized answer is labelled as such in the reports.

// Elimination-style code indexes rows and columns directly; iterator
// rewrites of those loops read worse, not better.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod gauss;
pub mod vars;
pub mod poly;
pub mod parse;
pub mod ratfn;
pub mod matrix;
pub mod ideal;
pub mod manifold;
pub mod corpus;
pub mod cr_fields;
pub mod segre;
pub mod flows;
pub mod transcendence;
pub mod spec_io;
pub mod cli;

pub use error::{CrError, Result};
