//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong at desk scale.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("outside the supported envelope: {0}")]
    Envelope(String),

    #[error("capacity exceeded: {what} is {estimated}, cap is {cap}{}",
            hint.as_deref().map(|h| format!("; {h}")).unwrap_or_default())]
    Capacity {
        what: String,
        estimated: u128,
        cap: u128,
        hint: Option<String>,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("ambient space mismatch: {0}")]
    Ambient(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("nonzero radical (dimension {0}); quotient the form by its radical first (not done here)")]
    NonzeroRadical(usize),

    #[error("refused: {0}")]
    Refusal(String),

    /// A structural claim failed on the given input. This is a first-class
    /// outcome: the tool doubles as a falsification harness.
    #[error("violation at {step}: {detail}")]
    Violation { step: String, detail: String },

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn violation(step: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Violation {
            step: step.into(),
            detail: detail.into(),
        }
    }

    /// Stable machine-readable rendering used by the CLI on any refusal.
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            Error::NotPrime(_) => "not_prime",
            Error::Envelope(_) => "envelope",
            Error::Capacity { .. } => "capacity",
            Error::Dimension(_) => "dimension",
            Error::Ambient(_) => "ambient",
            Error::InvalidParams(_) => "invalid_params",
            Error::Validation(_) => "validation",
            Error::NonzeroRadical(_) => "nonzero_radical",
            Error::Refusal(_) => "refusal",
            Error::Violation { .. } => "violation",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        };
        let mut obj = serde_json::json!({
            "kind": kind,
            "message": self.to_string(),
        });
        if let Error::Capacity {
            estimated,
            cap,
            hint,
            ..
        } = self
        {
            obj["estimated"] = serde_json::json!(estimated.to_string());
            obj["cap"] = serde_json::json!(cap.to_string());
            if let Some(h) = hint {
                obj["hint"] = serde_json::json!(h);
            }
        }
        if let Error::Violation { step, .. } = self {
            obj["step"] = serde_json::json!(step);
        }
        serde_json::json!({ "error": obj })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
