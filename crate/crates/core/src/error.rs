use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access::Action;
use crate::exchange::ExchangeError;
use crate::lifecycle::{LifecycleState, TransitionAction};
use crate::metrics::MetricsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Stable machine tags reported by the API and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    Validation,
    Auth,
    NotFound,
    IllegalTransition,
    Cycle,
    Conflict,
    Storage,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Validation => "VALIDATION",
            ErrorCode::Auth => "AUTH",
            ErrorCode::NotFound => "NOT_FOUND",
            ErrorCode::IllegalTransition => "ILLEGAL_TRANSITION",
            ErrorCode::Cycle => "CYCLE",
            ErrorCode::Conflict => "CONFLICT",
            ErrorCode::Storage => "STORAGE",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("invalid model: {0}")]
    Model(#[from] ExchangeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{user} may not {action}: {reason} [{rule}]")]
    Unauthorized {
        user: String,
        action: Action,
        rule: String,
        reason: String,
    },
    #[error("unknown user {0}")]
    UnknownUser(String),
    #[error("invalid or missing token")]
    InvalidToken,
    #[error("not found: {0}")]
    NotFound(String),
    #[error("cannot {action} a version in state {state}")]
    IllegalTransition {
        state: LifecycleState,
        action: TransitionAction,
    },
    #[error("composition would create a cycle: {0}")]
    CyclicComposition(String),
    #[error("unresolved relation: {0}")]
    UnresolvedRelation(String),
    #[error("replace relation placeholder {0:?} is not an element of the parent model")]
    MissingPlaceholder(String),
    #[error("variant {variant} of {entry} already has an open draft (version {version})")]
    DraftExists {
        entry: String,
        variant: String,
        version: u32,
    },
    #[error("variant {0} already exists")]
    DuplicateVariant(String),
    #[error("origin version is {0}; variants branch only from Released or InUse versions")]
    OriginNotReleased(LifecycleState),
    #[error("version is immutable in state {0}")]
    Immutable(LifecycleState),
    #[error("no check is pending on this version")]
    NothingToAcknowledge,
    #[error("search query has no terms and no filters")]
    EmptyQuery,
    #[error("{0}")]
    Conflict(String),
    #[error("storage error at {}: {message}", path.display())]
    Storage { path: PathBuf, message: String },
}

impl Error {
    pub fn code(&self) -> ErrorCode {
        match self {
            Error::Validation(_)
            | Error::Model(_)
            | Error::Metrics(_)
            | Error::UnresolvedRelation(_)
            | Error::MissingPlaceholder(_)
            | Error::EmptyQuery => ErrorCode::Validation,
            Error::Unauthorized { .. } | Error::UnknownUser(_) | Error::InvalidToken => {
                ErrorCode::Auth
            }
            Error::NotFound(_) => ErrorCode::NotFound,
            Error::IllegalTransition { .. } => ErrorCode::IllegalTransition,
            Error::CyclicComposition(_) => ErrorCode::Cycle,
            Error::DraftExists { .. }
            | Error::DuplicateVariant(_)
            | Error::OriginNotReleased(_)
            | Error::Immutable(_)
            | Error::NothingToAcknowledge
            | Error::Conflict(_) => ErrorCode::Conflict,
            Error::Storage { .. } => ErrorCode::Storage,
        }
    }

    pub(crate) fn storage(path: impl Into<PathBuf>, message: impl fmt::Display) -> Self {
        Error::Storage {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
