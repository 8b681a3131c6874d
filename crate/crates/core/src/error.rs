use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Construction errors (`DependentBasis`, `BracketNotClosed`, ...) indicate
/// the input data does not satisfy the structural contract; numerical errors
/// (`NoConvergence`, `OptimizationStalled`) indicate an iteration failed to
/// reach its tolerance and report the last residual seen.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: asymmetry {asymmetry:.3e} exceeds tolerance {tol:.3e}")]
    NonSymmetric { asymmetry: f64, tol: f64 },

    #[error("linear program is unbounded: objective direction leaves the row space (residual {residual:.3e})")]
    Unbounded { residual: f64 },

    #[error("linear program is degenerate: constraint matrix is column-rank-deficient (rank {rank} < {cols})")]
    Degenerate { rank: usize, cols: usize },

    #[error("basis vectors are linearly dependent (rank {rank} < {expected})")]
    DependentBasis { rank: usize, expected: usize },

    #[error("bracket [X_{i}, X_{j}] leaves the span: residual {residual:.3e}")]
    BracketNotClosed { i: usize, j: usize, residual: f64 },

    #[error("basis span is not stable under matrix transpose (residual {residual:.3e})")]
    NotTransposeClosed { residual: f64 },

    #[error("the form is not positive definite (minimal eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("no positive-definite adapted inner product found: {reason}")]
    NoSolution { reason: String },

    #[error("subalgebra is not stable under the Cartan involution (residual {residual:.3e})")]
    NotThetaStable { residual: f64 },

    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("element is not a member of the required subspace (residual {residual:.3e})")]
    MembershipViolation { residual: f64 },

    #[error("evaluation on the given set does not separate the coefficient space (rank {rank} < {dim})")]
    StarViolated { rank: usize, dim: usize },

    #[error("projector has rank zero")]
    ZeroProjector,

    #[error("representation space has dimension zero")]
    ZeroRep,

    #[error("descent stalled at {at} points before reaching the budget")]
    OptimizationStalled { at: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal numerical check failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
