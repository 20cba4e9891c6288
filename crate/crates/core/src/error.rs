use std::fmt;

use thiserror::Error;

/// Errors raised while building or running a computing network.
#[derive(Debug, Error)]
pub enum CnError {
    /// Invalid parameters, arities or shapes.
    #[error("configuration error: {0}")]
    Config(String),

    /// A node produced a non-finite state.
    #[error("numeric divergence at node {node}: {detail}")]
    Divergence { node: usize, detail: String },

    /// An ant ran out of candidate edges more often than the restart bound allows.
    #[error("ant {ant} hit a dead end at node {node} after {restarts} restarts")]
    DeadEnd {
        ant: usize,
        node: usize,
        restarts: usize,
    },

    /// A problem instance that cannot be used, e.g. a non-positive tour length.
    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    /// A step error annotated with where in the schedule it happened.
    #[error("{position}: {source}")]
    AtStep {
        position: StepPosition,
        #[source]
        source: Box<CnError>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Location of a failing step inside a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepPosition {
    pub slow_step: usize,
    /// `None` when the slow step itself failed.
    pub fast_step: Option<usize>,
}

impl fmt::Display for StepPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fast_step {
            Some(fast) => write!(f, "slow step {}, fast step {}", self.slow_step, fast),
            None => write!(f, "slow step {} (adaptation)", self.slow_step),
        }
    }
}

impl CnError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CnError::Config(msg.into())
    }

    pub(crate) fn diverged(node: usize, detail: impl Into<String>) -> Self {
        CnError::Divergence {
            node,
            detail: detail.into(),
        }
    }

    /// The innermost error, skipping step annotations.
    pub fn root(&self) -> &CnError {
        match self {
            CnError::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the root cause is numeric rather than configuration or I/O.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.root(),
            CnError::Divergence { .. } | CnError::DeadEnd { .. }
        )
    }
}

pub type Result<T, E = CnError> = std::result::Result<T, E>;
