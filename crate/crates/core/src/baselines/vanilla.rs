use std::sync::Arc;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::hashing::{Element, HashFamily};
use crate::sketch::{DeleteOutcome, HashedPair, RecoveryProvider, Signature, SketchStats};

pub const VANILLA_MAGIC: &[u8; 4] = b"VMH1";

/// Keeps only the current argmin pair per hash function. Deleting any
/// argmin element forces a recovery query and a full recomputation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanillaSketch {
    family: Arc<HashFamily>,
    entries: Vec<Option<HashedPair>>,
    stats: SketchStats,
}

impl VanillaSketch {
    pub fn new(family: Arc<HashFamily>) -> Self {
        Self {
            entries: vec![None; family.k()],
            family,
            stats: SketchStats::default(),
        }
    }

    pub fn init<I>(family: Arc<HashFamily>, elements: I) -> Self
    where
        I: IntoIterator<Item = Element>,
    {
        let mut sketch = Self::new(family);
        sketch.recompute(&elements.into_iter().collect::<Vec<_>>());
        sketch
    }

    fn recompute(&mut self, elements: &[Element]) {
        for (h, entry) in self.family.functions().iter().zip(self.entries.iter_mut()) {
            *entry = elements.iter().map(|&x| HashedPair::of(h, x)).min();
        }
    }

    pub fn insert(&mut self, x: Element) {
        for (h, entry) in self.family.functions().iter().zip(self.entries.iter_mut()) {
            let p = HashedPair::of(h, x);
            match entry {
                Some(cur) if *cur <= p => {}
                _ => *entry = Some(p),
            }
        }
    }

    pub fn delete<R>(&mut self, x: Element, recovery: &mut R) -> Result<DeleteOutcome>
    where
        R: RecoveryProvider + ?Sized,
    {
        let is_argmin = self
            .entries
            .iter()
            .any(|e| e.is_some_and(|p| p.element == x));
        if !is_argmin {
            return Ok(DeleteOutcome::Untouched);
        }
        let elements = recovery.recover()?;
        self.stats.fault_count += 1;
        self.stats.recovery_queries += 1;
        self.stats.recovery_elements_streamed += elements.len() as u64;
        self.recompute(&elements);
        Ok(DeleteOutcome::Recovered { fault: true })
    }

    pub fn get_signature(&self) -> Result<Signature> {
        let values = self
            .entries
            .iter()
            .map(|e| e.map(|p| p.hash).ok_or(Error::EmptySet))
            .collect::<Result<Vec<_>>>()?;
        Ok(Signature::new(values, self.family.master_seed()))
    }

    pub fn entries(&self) -> &[Option<HashedPair>] {
        &self.entries
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn family(&self) -> &Arc<HashFamily> {
        &self.family
    }

    pub fn stats(&self) -> SketchStats {
        self.stats
    }

    /// `VMH1` layout: magic, k (u32), seed (u64), then per function a tagged
    /// pair (tag 1 = no entry).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(VANILLA_MAGIC);
        w.u32(self.k() as u32);
        w.u64(self.family.master_seed());
        for &e in &self.entries {
            w.optional_pair(e);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8], family: Arc<HashFamily>) -> Result<Self> {
        let mut r = Reader::new(bytes, VANILLA_MAGIC)?;
        let k = r.u32()? as usize;
        let seed = r.u64()?;
        if k != family.k() || seed != family.master_seed() {
            return Err(Error::Decode("blob does not match the hash family".into()));
        }
        let entries = (0..k)
            .map(|_| r.optional_pair())
            .collect::<Result<Vec<_>>>()?;
        r.finish()?;
        Ok(Self {
            family,
            entries,
            stats: SketchStats::default(),
        })
    }
}
