//! Resource caps shared by the enumeration and complex-building routines.

use std::time::Instant;

use crate::error::{Error, Result};

/// Caps on the expensive searches. Exceeding a cap is always reported as an
/// explicit [`Error::ResourceCap`], never a silent truncation.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Maximum number of facets an order complex may produce.
    pub max_facets: usize,
    /// Maximum number of distinct states an enumeration may visit.
    pub max_states: usize,
    /// Optional wall-clock deadline.
    pub deadline: Option<Instant>,
    /// Permit buildings beyond the default desk-scale guard.
    pub allow_large: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_facets: 2_000_000,
            max_states: 2_000_000,
            deadline: None,
            allow_large: false,
        }
    }
}

impl Limits {
    pub fn check_deadline(&self, what: &'static str, progress: impl FnOnce() -> String) -> Result<()> {
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                return Err(Error::ResourceCap {
                    what,
                    limit: 0,
                    progress: format!("time budget exhausted; {}", progress()),
                });
            }
        }
        Ok(())
    }

    pub fn check_count(
        &self,
        what: &'static str,
        count: usize,
        limit: usize,
        progress: impl FnOnce() -> String,
    ) -> Result<()> {
        if count > limit {
            return Err(Error::ResourceCap {
                what,
                limit,
                progress: progress(),
            });
        }
        Ok(())
    }
}
