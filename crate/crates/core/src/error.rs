use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("KMS symmetry violated at (nu, nu') = ({nu:.6}, {nu_prime:.6}) with residual {residual:.3e}")]
    KmsSymmetry { nu: f64, nu_prime: f64, residual: f64 },

    #[error("weighting function violates q(-nu) = conj(q(nu)) at nu = {nu:.6} (residual {residual:.3e})")]
    WeightSymmetry { nu: f64, residual: f64 },

    #[error("Kossakowski matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("omega quadrature too coarse: KMS residual {residual:.3e} exceeds {tolerance:.1e}")]
    Quadrature { residual: f64, tolerance: f64 },

    #[error("detailed balance violated: residual {residual:.3e} exceeds {tolerance:.1e}")]
    DetailedBalance { residual: f64, tolerance: f64 },

    #[error("no Kossakowski factor Q available for coupling {0}")]
    FactorizationUnavailable(usize),

    #[error("warm start has overlap {overlap:.3e} with the filtered subspace")]
    ColdStart { overlap: f64 },

    #[error("block norm {norm:.6} exceeds subnormalization budget {budget:.6}; rescale the factors")]
    Normalization { norm: f64, budget: f64 },

    #[error("block-encoding contract violated in {block}: residual {residual:.3e}")]
    Assembly { block: String, residual: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("accuracy failure: {what} (residual {residual:.3e})")]
    Accuracy { what: String, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
