use thiserror::Error;

/// Library-wide error type. Variants correspond to the failure modes of the
/// numerical pipeline; CLI exit codes are derived from [`Error::is_validation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("spectrum is not real: eigenvalue {value} has |Im| = {imag:.3e} > {bound:.3e}")]
    NotRealSpectrum { value: String, imag: f64, bound: f64 },

    #[error("rank decision ambiguous: singular value {sigma:.6e} within a factor 10 of cutoff {cutoff:.6e}")]
    RankAmbiguous { sigma: f64, cutoff: f64 },

    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch { context: String, expected: String, got: String },

    #[error("gauge element is numerically singular at vertex {vertex}")]
    SingularGauge { vertex: usize },

    #[error("representative failed its moment-equation certificate: residual {residual:.3e} > {bound:.3e}")]
    TemplateResidual { residual: f64, bound: f64 },

    #[error("balance flow stalled at residual {residual:.3e} without reaching {target:.3e}")]
    DivergingFlow { residual: f64, target: f64 },

    #[error("balancing did not converge: residual {residual:.3e} after {iterations} iterations")]
    BalanceFailure { residual: f64, iterations: usize },

    #[error("corrector stalled at a = {a}: residual {residual:.3e} above tolerance {tol:.3e}")]
    CorrectorStall { a: f64, residual: f64, tol: f64 },

    #[error("continuation step floor reached at a = {a}; partial path has {samples} samples")]
    StepFloorReached { a: f64, samples: usize },

    #[error("matrix is not in the requested Lie algebra: membership residual {residual:.3e}")]
    WrongAlgebra { residual: f64 },

    #[error("real form not supported for this operation: {form}")]
    UnsupportedForm { form: String },

    #[error("partition size mismatch: |lhs| = {lhs}, |rhs| = {rhs}")]
    SizeMismatch { lhs: usize, rhs: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("linear algebra backend error: {0}")]
    Backend(String),
}

impl Error {
    /// Input-validation failures (CLI exit code 4) as opposed to numerical
    /// failures (exit code 3).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonSquare { .. }
                | Error::NotRealSpectrum { .. }
                | Error::ShapeMismatch { .. }
                | Error::WrongAlgebra { .. }
                | Error::UnsupportedForm { .. }
                | Error::SizeMismatch { .. }
                | Error::Validation(_)
        )
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Backend(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
