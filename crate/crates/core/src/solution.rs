//! Subset solutions: the chromosome of the optimizer.

use std::fmt;

use crate::error::{Error, Result};

/// A fixed-size set of row identifiers drawn from the candidate set.
///
/// Members are kept canonically sorted (byte order), so set equality is a
/// plain sequence comparison and hashing is stable regardless of the order
/// in which members were produced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetSolution {
    members: Vec<String>,
}

impl SubsetSolution {
    /// Builds a solution, sorting members canonically. Fails on empty or
    /// duplicate members.
    pub fn new(mut members: Vec<String>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInitPop("empty solution".into()));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInitPop(format!(
                "duplicate member in solution: {}",
                members
                    .windows(2)
                    .find(|w| w[0] == w[1])
                    .map(|w| w[0].as_str())
                    .unwrap_or("")
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.binary_search_by(|m| m.as_str().cmp(id)).is_ok()
    }
}

impl fmt::Display for SubsetSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.members.join(","))
    }
}
