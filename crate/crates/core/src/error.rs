use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("form is not homogeneous of degree {expected} (found a term of degree {found})")]
    NotHomogeneous { expected: u32, found: u32 },
    #[error("form is identically zero")]
    ZeroForm,
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("a degree-{degree} form has {expected} coefficients, got {found}")]
    CoefficientCount { degree: u32, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GramError {
    #[error("matrix is not in the Gram family (residual {residual:e})")]
    NotInFamily { residual: f64 },
    #[error("matrix does not have rank 3 (fourth singular value {sigma4:e})")]
    RankMismatch { sigma4: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisFailure {
    #[error("curve is singular")]
    Singular,
    #[error("form is not non-negative")]
    NotNonnegative,
    #[error("non-negativity could not be decided")]
    NonnegativityIndeterminate,
}
