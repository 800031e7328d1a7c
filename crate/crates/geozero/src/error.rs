//! Error type shared by every module of the crate.

use thiserror::Error;

/// Coarse classification of failures, used by callers (e.g. a CLI) to map
/// errors onto exit statuses: input/validation problems versus breakdowns
/// inside the numerical pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// The input data violates a precondition (shape, finiteness, rank
    /// conditions, inconsistent selection, ...).
    Validation,
    /// A numerical step could not be completed (Schur convergence, spectra
    /// overlap, singular transform, unbounded simulation, ...).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("B does not have full column rank (rank {rank} < {cols})")]
    InputMatrixRankDeficient { rank: usize, cols: usize },

    #[error("[C D] does not have full row rank (rank {rank} < {rows})")]
    OutputMatrixRankDeficient { rank: usize, rows: usize },

    #[error("subspace is not contained in the claimed superspace (residual {residual:.3e})")]
    ContainmentViolated { residual: f64 },

    #[error("basis columns are not orthonormal (defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("matrix does not leave the subspace invariant (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("subspace is not controlled invariant / output-nulling (residual {residual:.3e})")]
    NotControlledInvariant { residual: f64 },

    #[error("real Schur iteration failed to converge")]
    SchurConvergence,

    #[error("Schur reordering swap failed (residual {residual:.3e})")]
    SchurSwapFailed { residual: f64 },

    #[error("Sylvester spectra are not disjoint: eigenvalue {re:.6}{im:+.6}i is shared within tolerance")]
    SpectraOverlap { re: f64, im: f64 },

    #[error("zero-dynamics eigenvalue {re:.3e}{im:+.3e}i lies within {margin:.1e} of the imaginary axis and cannot be classified")]
    AxisEigenvalue { re: f64, im: f64, margin: f64 },

    #[error("transformation matrix is singular or badly conditioned")]
    SingularTransform,

    #[error("matrix is singular: {context}")]
    SingularMatrix { context: &'static str },

    #[error("supplied {what} fails its defining identities (residual {residual:.3e}, allowed {allowed:.3e})")]
    SuppliedInputInvalid {
        what: &'static str,
        residual: f64,
        allowed: f64,
    },

    #[error("input selection is invalid: {0}")]
    InvalidSelection(String),

    #[error("simulation grew beyond the overflow guard at t = {t:.6} s (|x| > {bound:.1e})")]
    UnboundedResponse { t: f64, bound: f64 },

    #[error("response does not settle: tail variation {variation:.3e} exceeds 1% of the final value")]
    NonSettling { variation: f64 },

    #[error("final value is zero; overshoot is undefined")]
    ZeroFinalValue,

    #[error("invalid simulation grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Which broad category the failure belongs to.
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            DimensionMismatch { .. }
            | NonFinite { .. }
            | Validation(_)
            | InputMatrixRankDeficient { .. }
            | OutputMatrixRankDeficient { .. }
            | ContainmentViolated { .. }
            | NotOrthonormal { .. }
            | InvalidSelection(_)
            | SuppliedInputInvalid { .. }
            | InvalidGrid(_) => ErrorCategory::Validation,
            NotInvariant { .. }
            | NotControlledInvariant { .. }
            | SchurConvergence
            | SchurSwapFailed { .. }
            | SpectraOverlap { .. }
            | AxisEigenvalue { .. }
            | SingularTransform
            | SingularMatrix { .. }
            | UnboundedResponse { .. }
            | NonSettling { .. }
            | ZeroFinalValue => ErrorCategory::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
