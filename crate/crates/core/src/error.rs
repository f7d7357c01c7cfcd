use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SketchError>;

#[derive(Debug, Error)]
pub enum SketchError {
    #[error("query vector has length {got}, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid edge ({u}, {v}, {w}): {reason}")]
    InvalidEdge {
        u: usize,
        v: usize,
        w: f64,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has {n} vertices, exhaustive enumeration is limited to {limit}")]
    GraphTooLarge { n: usize, limit: usize },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("edge weights span [{min}, {max}], which is not within a factor of 2")]
    WeightSpread { min: f64, max: f64 },

    #[error("weight ratio {ratio:.3e} exceeds the bound {bound:.3e}")]
    WeightRatio { ratio: f64, bound: f64 },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("recursion depth {depth} exceeded the cap {cap}")]
    RecursionDepth { depth: usize, cap: usize },

    #[error("sparsifier verification failed: relative error {rel_err:.4} exceeds {eps}")]
    SparsifierVerification { rel_err: f64, eps: f64 },

    #[error("structural invariant violated: {0}")]
    Invariant(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed sketch file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
