//! Finite subtraction Menger algebras.
//!
//! A Menger algebra of rank `n` is a carrier with one `(n+1)`-ary
//! superposition operation `x[y1..yn]` that is superassociative; a
//! subtraction Menger algebra additionally carries a binary subtraction
//! and a zero element compatible with superposition. The concrete model
//! is a set of partial n-place functions on a finite base set, closed
//! under composition and set-theoretic difference.
//!
//! This crate works entirely with finite operation tables and decides
//! every law by exhaustive enumeration:
//!
//! * [`kernel`] — carriers, operation tables, and checkers for every
//!   axiom and derived identity, with violation witnesses;
//! * [`terms`] — unary polynomials over a carrier and the finite monoid
//!   of translation functions they induce, computed by fixpoint closure;
//! * [`pfunc`] — partial n-place functions, Menger composition, graph
//!   difference, closure of generator sets, and concretization into
//!   abstract operation tables;
//! * [`order`] — the induced order, meets, segment joins, filters,
//!   and the determining-pair machinery built from maximal filters;
//! * [`reprs`] — representations by partial n-place functions: simplest
//!   representations, sums, and the full construction that turns any
//!   verified algebra into an isomorphic algebra of functions.

pub mod kernel;
pub mod order;
pub mod pfunc;
pub mod report;
pub mod reprs;
pub mod terms;

mod bits;
mod tuples;

pub use kernel::{FiniteMengerAlgebra, SubtractionMengerAlgebra, VerifiedAlgebra};
pub use report::{CheckConfig, CheckReport, Witness};
