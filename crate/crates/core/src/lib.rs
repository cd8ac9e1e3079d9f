//! Exact moment computations, isotropic constants, first-order extremality
//! conditions, facet hinging derivatives, shaking and local ascent for
//! simplicial polytopes.

// `!(x > tol)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extremality;
pub mod fixtures;
pub mod hull;
pub mod isotropy;
pub mod json;
pub mod linalg;
pub mod optimize;
pub mod polytope;
pub mod sample;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use polytope::{Halfspace, MomentData, PolytopeH, PolytopeV, Simplex};
