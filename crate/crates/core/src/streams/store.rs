use std::collections::{BTreeMap, BTreeSet};

use super::{Op, SetId, StreamOp};
use crate::error::{Error, RecoveryError, Result};
use crate::hashing::Element;
use crate::sketch::RecoveryProvider;

/// Authoritative contents of every set. Answers recovery queries.
///
/// Sets are ordered so recovery streams (and therefore everything built from
/// them) are deterministic. Unknown set ids are created empty on first use by
/// [`SetStore::apply`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SetStore {
    sets: BTreeMap<SetId, BTreeSet<Element>>,
    recovery_queries: u64,
    elements_streamed: u64,
}

impl SetStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies `op` with set semantics and reports whether it was legal.
    pub fn apply(&mut self, op: StreamOp) -> bool {
        let set = self.sets.entry(op.set_id).or_default();
        match op.op {
            Op::Insert => set.insert(op.element),
            Op::Delete => set.remove(&op.element),
        }
    }

    pub fn contains(&self, set_id: SetId, x: Element) -> bool {
        self.sets.get(&set_id).is_some_and(|s| s.contains(&x))
    }

    pub fn get(&self, set_id: SetId) -> Option<&BTreeSet<Element>> {
        self.sets.get(&set_id)
    }

    pub fn set_ids(&self) -> impl Iterator<Item = SetId> + '_ {
        self.sets.keys().copied()
    }

    /// Recovery query: the current elements of `set_id`.
    pub fn recover(&mut self, set_id: SetId) -> Result<Vec<Element>> {
        let set = self.sets.get(&set_id).ok_or(Error::NotFound(set_id))?;
        self.recovery_queries += 1;
        self.elements_streamed += set.len() as u64;
        Ok(set.iter().copied().collect())
    }

    /// Recovery handle for a single set, usable by sketch deletes.
    pub fn recovery_for(&mut self, set_id: SetId) -> SetRecovery<'_> {
        SetRecovery {
            store: self,
            set_id,
        }
    }

    pub fn recovery_queries(&self) -> u64 {
        self.recovery_queries
    }

    pub fn elements_streamed(&self) -> u64 {
        self.elements_streamed
    }
}

pub struct SetRecovery<'a> {
    store: &'a mut SetStore,
    set_id: SetId,
}

impl RecoveryProvider for SetRecovery<'_> {
    fn recover(&mut self) -> std::result::Result<Vec<Element>, RecoveryError> {
        self.store
            .recover(self.set_id)
            .map_err(|e| RecoveryError::new(e.to_string()))
    }
}
