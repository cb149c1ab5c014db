//! Computational toolkit for Sobolev spaces `W^{k,p}` with `0 < p < 1`.
//!
//! Elements of `W^{k,p}` are fundamental sequences of compactly supported
//! splines. The crate evaluates their quasi-norms, implements the canonical
//! maps (limit, termwise derivative, retraction, section of the derivative)
//! and the isomorphism `W^{k,p} ≅ L^p ⊕ W^{k-1,p}` at finite depth.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod piecewise_poly;
pub mod poly;
pub mod quasinorm;
pub mod report;
pub mod sequences;
pub mod suite;

pub use error::{Error, Result};
pub use piecewise_poly::{PiecewisePoly, SmoothnessOrder};
pub use quasinorm::{lp_quasinorm, quasi_distance, sobolev_quasinorm, NormResult, QuasiNormParams};
