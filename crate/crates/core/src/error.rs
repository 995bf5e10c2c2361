use thiserror::Error;

use crate::hypoclasses::Hypothesis;

pub type Result<T> = std::result::Result<T, CertError>;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("capacity guard exceeded: {what} needs {needed}, guard is {guard}")]
    Capacity { what: String, needed: u128, guard: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("not certifiable: {reason}")]
    NotCertifiable {
        reason: String,
        witness: Option<Hypothesis>,
    },

    #[error("insufficient sample: scanned {chunks_scanned} chunks, {qualifying} qualified, {needed} needed")]
    InsufficientSample {
        chunks_scanned: usize,
        qualifying: usize,
        needed: usize,
    },

    #[error("no finite sample bound: {0}")]
    Unboundable(String),

    #[error("rejection sampler starved after {attempts} attempts")]
    Starvation { attempts: u64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CertError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        CertError::Input(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, needed: u128, guard: u128) -> Self {
        CertError::Capacity {
            what: what.into(),
            needed,
            guard,
        }
    }
}
