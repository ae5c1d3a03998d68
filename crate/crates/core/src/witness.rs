//! Witness lists shared by every listing engine.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::ops::ControlFlow;

/// `(v1, v2, v3)` with `v_i` in part `i - 1`.
pub type Triangle = [usize; 3];

/// Distinct witnesses in lexicographic order.
///
/// `truncated` is set exactly when `requested_t` was reached and at least one
/// further distinct witness exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListingResult {
    pub witnesses: Vec<Vec<usize>>,
    pub truncated: bool,
    pub requested_t: Option<usize>,
    pub found: usize,
    /// Emissions of an already-listed witness; always 0 for a correct engine.
    pub duplicate_emissions: usize,
}

impl ListingResult {
    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn as_set(&self) -> HashSet<Vec<usize>> {
        self.witnesses.iter().cloned().collect()
    }
}

/// Accumulates witnesses up to an optional limit `t`.
#[derive(Debug)]
pub struct Collector {
    limit: Option<usize>,
    seen: HashSet<Vec<usize>>,
    witnesses: Vec<Vec<usize>>,
    truncated: bool,
    duplicates: usize,
}

impl Collector {
    pub fn new(limit: Option<usize>) -> Self {
        Collector {
            limit,
            seen: HashSet::new(),
            witnesses: Vec::new(),
            truncated: false,
            duplicates: 0,
        }
    }

    pub fn limit(&self) -> Option<usize> {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// `true` once a witness beyond the limit has been offered.
    pub fn is_done(&self) -> bool {
        self.truncated
    }

    /// Offers a witness; `Break` means the caller must stop emitting.
    pub fn push(&mut self, witness: &[usize]) -> ControlFlow<()> {
        if self.truncated {
            return ControlFlow::Break(());
        }
        if self.seen.contains(witness) {
            self.duplicates += 1;
            return ControlFlow::Continue(());
        }
        if self.limit.is_some_and(|t| self.witnesses.len() >= t) {
            self.truncated = true;
            return ControlFlow::Break(());
        }
        self.seen.insert(witness.to_vec());
        self.witnesses.push(witness.to_vec());
        ControlFlow::Continue(())
    }

    pub fn finish(self) -> ListingResult {
        let mut witnesses = self.witnesses;
        witnesses.sort_unstable();
        ListingResult {
            found: witnesses.len(),
            witnesses,
            truncated: self.truncated,
            requested_t: self.limit,
            duplicate_emissions: self.duplicates,
        }
    }
}
