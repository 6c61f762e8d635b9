use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two boundaries that had to agree did not.
    #[error("{context}: expected {expected}, found {found}")]
    Boundary {
        context: String,
        expected: String,
        found: String,
    },

    #[error("enumeration of {count} maps exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("invalid object: {0}")]
    InvalidObject(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    /// A monoid or module failed its laws.
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    /// The partial Vermittler map is not defined on this pair.
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

impl Error {
    pub(crate) fn boundary(
        context: impl Into<String>,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::Boundary {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
