use thiserror::Error;

use crate::solver::SolverResult;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the tensor, certificate and solver layers.
///
/// Every numeric variant names the operation that produced it so that the
/// command-line front end can report `op: message` without a backtrace.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: shape mismatch: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("{op}: non-finite value at flat index {index}")]
    NonFinite { op: &'static str, index: usize },

    #[error("{op}: index {index} out of range for bound {bound}")]
    IndexOutOfRange {
        op: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("{op}: dense materialization of {rows}x{cols} exceeds the cap of {cap} entries")]
    SizeOverflow {
        op: &'static str,
        rows: usize,
        cols: usize,
        cap: usize,
    },

    #[error("{op}: Fourier slices are not conjugate symmetric (imaginary residue {residue:e})")]
    SymmetryViolation { op: &'static str, residue: f64 },

    #[error("{op}: per-slice SVD did not converge")]
    ConvergenceFailure { op: &'static str },

    #[error("{op}: iteration did not converge after {iters} steps (last change {last:e})")]
    NonConvergence {
        op: &'static str,
        iters: usize,
        last: f64,
    },

    #[error("{op}: argument is not a projector (idempotence defect {defect:e})")]
    NotAProjector { op: &'static str, defect: f64 },

    #[error("{op}: tensor is zero")]
    ZeroTensor { op: &'static str },

    #[error("{op}: {detail}")]
    DomainError { op: &'static str, detail: String },

    #[error("{op}: requested tubal rank {rank} exceeds min(N1, N2) = {max}")]
    RankTooLarge {
        op: &'static str,
        rank: usize,
        max: usize,
    },

    #[error("{op}: infeasible sparse pattern: {detail}")]
    InfeasiblePattern { op: &'static str, detail: String },

    #[error("{op}: generated instance failed its post-check: {detail}")]
    GenerationCheck { op: &'static str, detail: String },

    #[error("rtpca: reached max iterations with relative residual {:e}", .0.primal_residual)]
    MaxItersExceeded(Box<SolverResult>),

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DomainError {
            op,
            detail: detail.into(),
        }
    }
}
