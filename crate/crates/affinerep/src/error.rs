//! Error types shared across the crate.

use thiserror::Error;

/// Parse and serialization failures.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("not a rational number: {0:?}")]
    BadRational(String),
    #[error("zero cannot be raised to a negative power")]
    ZeroToNegativePower,
    #[error("malformed JSON value: {0}")]
    BadJson(String),
}

/// Errors from exact linear algebra.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entry ({row}, {col}) out of range for {rows}x{cols}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
}

/// Errors from finite Lie algebra construction.
#[derive(Debug, Error)]
pub enum LieError {
    #[error("unsupported series/rank: {0}")]
    Unsupported(String),
    #[error("elements belong to different algebras ({0} vs {1})")]
    AlgebraMismatch(String, String),
    #[error("weight is not dominant integral: {0}")]
    NotDominant(String),
    #[error("structural error: {0}")]
    Structural(String),
}

/// Errors from affine-algebra operations.
#[derive(Debug, Error)]
pub enum AffineError {
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("element does not lie in the positive part: {0}")]
    NotInPositivePart(String),
    #[error("invalid point configuration: {0}")]
    InvalidPoints(String),
    #[error("degree bound {bound} too small (need at least {need})")]
    DegreeBoundTooSmall { bound: usize, need: usize },
    #[error("zero polynomial has no ideal")]
    ZeroPolynomial,
}

/// Errors from module builders.
#[derive(Debug, Error)]
pub enum ModuleError {
    #[error("lengths of weights ({0}) and points ({1}) differ")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error("eta homomorphism must be nonzero here")]
    ZeroEta,
    #[error("generator windows are incompatible: {0}")]
    WindowMismatch(String),
    #[error("action undefined on {0} (truncation boundary)")]
    PartialAction(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

/// Errors from the analysis layer.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("module has partial action; analysis requires total operators")]
    PartialInput,
    #[error("input vectors must be linearly independent")]
    DependentVectors,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no solution within degree bound {0}")]
    DegreeBoundExceeded(usize),
    #[error("input error: {0}")]
    InputError(String),
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error("structural check failed: {0}")]
    CheckFailed(String),
}
