use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const GROWTH_DETECTED: i32 = 3;
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] rieszflow_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed field file: {0}")]
    Format(String),
}

impl LabError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    /// Parameter and config problems are validation errors; everything else is internal.
    pub fn exit_code(&self) -> i32 {
        use rieszflow_core::Error as E;
        match self {
            Self::Config(_) => exit::VALIDATION,
            Self::Model(
                E::InvalidGrid(_)
                | E::InvalidParameter { .. }
                | E::HorizonViolation { .. }
                | E::GridTooLarge { .. }
                | E::InsufficientDensity { .. }
                | E::HypothesisFailed { .. },
            ) => exit::VALIDATION,
            _ => exit::INTERNAL,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
