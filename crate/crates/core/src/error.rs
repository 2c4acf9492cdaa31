use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Shape mismatch or a dimension outside the supported range.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An operator failed the unitarity check.
    #[error("operator is not unitary: max deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    /// A matrix failed the density-matrix check.
    #[error("not a density matrix: {0}")]
    NotDensity(String),

    /// A quantity that must be real (or in range) picked up numerical garbage.
    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),

    /// A scalar argument is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A payoff table violates a named structural constraint.
    #[error("payoff constraint violated: {0}")]
    Constraint(String),

    /// Lookup of a catalog or gate name failed.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// A strategy profile does not fit the procedure it was applied to.
    #[error("invalid strategy profile: {0}")]
    Profile(String),

    /// Exhaustive search would exceed the configured budget.
    #[error("profile space of size {size} exceeds evaluation budget {budget}")]
    BudgetExceeded { size: u128, budget: u64 },

    /// Configuration rejected, with the offending field path.
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
