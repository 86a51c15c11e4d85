use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("value error: {0}")]
    Value(String),

    #[error("cut level must be nonnegative, got {0}")]
    NegativeCut(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("axiom `{axiom}` requires a domain centered at 0, got {domain}")]
    DomainKind { axiom: String, domain: String },

    #[error("sampler exhausted after {rejections} rejections ({accepted} samples accepted)")]
    SamplerExhausted { rejections: u64, accepted: u64 },

    #[error("singular vertex system for permutation {0:?}")]
    SingularSystem(Vec<usize>),

    #[error("sweep needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
