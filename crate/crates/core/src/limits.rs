//! Resource limits for the search routines.
//!
//! Every potentially long-running search has a `try_` variant taking a
//! [`Limits`] value; the plain variants run unbounded. The CLI builds its
//! limits from the `H1WB_TIMEOUT_MS` environment variable and maps
//! [`Expired`] to its resource-cap exit code.

use std::time::{Duration, Instant};

/// Deadline carried through the backtracking searches.
#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    deadline: Option<Instant>,
}

/// A search ran past its deadline; the partial answer is discarded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("search deadline expired")]
pub struct Expired;

impl Limits {
    /// No limits: searches run to completion.
    pub fn none() -> Self {
        Limits { deadline: None }
    }

    /// Cap any single search at `timeout` from now.
    pub fn timeout(timeout: Duration) -> Self {
        Limits {
            deadline: Some(Instant::now() + timeout),
        }
    }

    pub fn check(&self) -> Result<(), Expired> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Expired),
            _ => Ok(()),
        }
    }
}
