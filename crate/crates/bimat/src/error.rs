use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by bimatrix algebra, factorization and the solvers.
#[derive(Debug, Clone, Error)]
pub enum BimatError {
    /// Operand shapes do not conform.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix required to be invertible is singular or too ill-conditioned.
    #[error("singular matrix in {context}: condition estimate {cond:.3e}")]
    Singular { context: &'static str, cond: f64 },

    /// An iterative dense kernel (eigensolver, Schur) failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The pair (A, B) is not controllable; carries the rank defect.
    #[error("uncontrollable pair: controllability matrix rank {rank} < {expected}")]
    Uncontrollable { rank: usize, expected: usize },

    /// Coprimeness certification failed; carries the offending points.
    #[error("coprimeness certification failed at {} point(s)", failures.len())]
    NotCoprime { failures: Vec<Complex64> },

    /// The uniqueness condition of a Sylvester/Stein equation is violated.
    #[error("no unique solution: {condition} (margin {margin:.3e})")]
    NoUniqueSolution {
        condition: &'static str,
        margin: f64,
    },

    /// A non-homogeneous linear system is inconsistent.
    #[error("no solution: least-squares residual {residual:.3e}")]
    NoSolution { residual: f64 },

    /// A solver precondition (structure flags, certified factorization, ...) failed.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed user input (bad spectrum, singular mass matrix, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The randomized search for a nonsingular transformation failed.
    #[error(
        "no nonsingular solution found after {attempts} draws (best condition {best_cond:.3e})"
    )]
    SearchExhausted { attempts: usize, best_cond: f64 },
}

impl BimatError {
    pub fn dim(msg: impl Into<String>) -> Self {
        BimatError::Dimension(msg.into())
    }
}
