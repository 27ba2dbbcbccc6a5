use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("unsupported dimensions {dim_a}x{dim_b}: {reason}")]
    UnsupportedDimension {
        dim_a: usize,
        dim_b: usize,
        reason: &'static str,
    },

    #[error("spectral condition fails (margin {margin:.6e})")]
    SpectralCondition { margin: f64 },

    #[error("no admissible rotation found (minimum block gap {min_gap:.6e})")]
    NotAdmissible { min_gap: f64 },

    #[error("alignment infeasible: overlap mismatch {mismatch:.3e}")]
    AlignmentInfeasible { mismatch: f64 },

    #[error("contraction violation: operator norm {norm} exceeds 1")]
    ContractionViolation { norm: f64 },

    #[error("block inequality violated: |B|^2 - lmin(A) lmin(C) = {gap:.6e}")]
    LemmaInapplicable { gap: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
