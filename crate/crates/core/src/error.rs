use thiserror::Error;

/// Errors raised by the decomposition library.
///
/// Variants that the CLI reports as structured refusals carry their
/// diagnostic payload as fields rather than as prose.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,

    #[error("polynomials are not coprime (reciprocal condition {rcond:e})")]
    NotCoprime { rcond: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("element is singular (reciprocal condition {rcond:e})")]
    Singular { rcond: f64 },

    #[error("square root requested at a zero root")]
    ZeroRoot,

    #[error("roots {first} and {second} coincide within tolerance")]
    RepeatedRoot { first: usize, second: usize },

    #[error(
        "element is not conjugate to its {target} in the algebra \
         (kernel dimension {kernel_dim}, {attempts} random combinations tried)"
    )]
    NotConjugateInAlgebra {
        target: &'static str,
        kernel_dim: usize,
        attempts: usize,
        /// `false` only when the kernel is trivial, which is a certain refusal.
        probabilistic: bool,
    },

    #[error("star map violates the {axiom} axiom (residual {residual:e})")]
    NotAnInvolution { axiom: &'static str, residual: f64 },

    #[error("star map does not preserve the algebra (residual {residual:e})")]
    AlgebraNotStable { residual: f64 },

    #[error("element does not lie in the algebra (residual {residual:e})")]
    NotInAlgebra { residual: f64 },

    #[error("precondition violated: {}", .0.join(", "))]
    PreconditionViolated(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZeroPoly => "DivisionByZeroPoly",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::NumericalBreakdown(_) => "NumericalBreakdown",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Singular { .. } => "Singular",
            Error::ZeroRoot => "ZeroRoot",
            Error::RepeatedRoot { .. } => "RepeatedRoot",
            Error::NotConjugateInAlgebra { .. } => "NotConjugateInAlgebra",
            Error::NotAnInvolution { .. } => "NotAnInvolution",
            Error::AlgebraNotStable { .. } => "AlgebraNotStable",
            Error::NotInAlgebra { .. } => "NotInAlgebra",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
