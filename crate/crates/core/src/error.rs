use std::io;

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum FaeError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("corruption error: {0}")]
    Corruption(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("series '{id}' too short: length {length} < window {window}")]
    TooShort {
        id: String,
        length: usize,
        window: usize,
    },
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl FaeError {
    /// Process exit code for this error family.
    ///
    /// | family                          | code |
    /// |---------------------------------|------|
    /// | config / invalid hyperparameter | 2    |
    /// | data / schema / shape / short   | 3    |
    /// | format / corruption             | 4    |
    /// | numeric / domain                | 5    |
    /// | io                              | 6    |
    pub fn exit_code(&self) -> i32 {
        match self {
            FaeError::Config(_) | FaeError::InvalidHyperparameter(_) => 2,
            FaeError::Data(_)
            | FaeError::Schema(_)
            | FaeError::Shape(_)
            | FaeError::TooShort { .. } => 3,
            FaeError::Format(_) | FaeError::Corruption(_) => 4,
            FaeError::Numeric(_) | FaeError::Domain(_) => 5,
            FaeError::Io(_) => 6,
        }
    }

    /// Short machine-readable family tag.
    pub fn kind(&self) -> &'static str {
        match self {
            FaeError::Shape(_) => "shape",
            FaeError::InvalidHyperparameter(_) => "hyperparameter",
            FaeError::Domain(_) => "domain",
            FaeError::Format(_) => "format",
            FaeError::Corruption(_) => "corruption",
            FaeError::Schema(_) => "schema",
            FaeError::Data(_) => "data",
            FaeError::Config(_) => "config",
            FaeError::Numeric(_) => "numeric",
            FaeError::TooShort { .. } => "too_short",
            FaeError::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, FaeError>;
