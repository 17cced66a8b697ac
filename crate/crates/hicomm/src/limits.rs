use crate::error::{Error, Result};
use std::time::Instant;

/// Resource budget threaded through every potentially large computation.
///
/// `max_cubes` bounds the number of cubes stored by a single closure or
/// enumeration; `deadline`, when set, aborts long-running loops. Hitting
/// either limit is an error — results are never silently truncated.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_cubes: usize,
    pub deadline: Option<Instant>,
}

pub const DEFAULT_MAX_CUBES: usize = 1 << 24;

impl Default for Limits {
    fn default() -> Self {
        Limits { max_cubes: DEFAULT_MAX_CUBES, deadline: None }
    }
}

impl Limits {
    pub fn with_max_cubes(max_cubes: usize) -> Self {
        Limits { max_cubes, deadline: None }
    }

    /// Fail if `stored` cubes already exceed the budget.
    pub fn check_cubes(&self, stored: usize) -> Result<()> {
        if stored > self.max_cubes {
            Err(Error::Budget { stored, limit: self.max_cubes })
        } else {
            Ok(())
        }
    }

    /// Fail if the deadline has passed. `what` names the phase for the message.
    pub fn check_time(&self, what: &str) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::Timeout(what.to_string())),
            _ => Ok(()),
        }
    }
}
