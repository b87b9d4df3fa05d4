//! Exact polynomial expressions, maps between boxes, and jets at the origin.

mod jet;
mod map;
mod parse;
mod poly;

use thiserror::Error;

pub use jet::{jet_at_zero, multi_indices_up_to, Jet, JetData};
pub use map::{affine_f64, compose, maps_agree, projection, sample_grid, BoxDomain, SmoothMap, DEFAULT_STEP};
pub(crate) use map::stencil;
pub use parse::parse_expr;
pub use poly::{factorial_product, poly_det, Exponents, PolyExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("variable x{index} at {pos} is out of range for {num_vars} variables")]
    VarOutOfRange { index: usize, num_vars: usize, pos: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("point {point} lies outside the domain")]
    OutsideDomain { point: String },
    #[error("empty domain box")]
    EmptyDomain,
    #[error("the origin is outside the domain")]
    OriginOutsideDomain,
    #[error("black-box maps have no exact values")]
    BlackBoxNotExact,
    #[error("malformed JSON: {0}")]
    Json(String),
}
