//! The ℓ-buffered k-MinHash sketch.
//!
//! For each of the `k` hash functions the sketch keeps a buffer of at most
//! `ℓ` `(hash, element)` pairs together with a threshold `δ`. The structure
//! maintains three invariants for the tracked set `A`:
//!
//! 1. an element's pair is buffered iff it is `<= δ`;
//! 2. a buffer never holds more than `ℓ` pairs;
//! 3. a buffer is empty iff `A` is empty, in which case `δ` is [`Threshold::Top`].
//!
//! Together they make every buffer a prefix of the sorted pairs of `A`, so the
//! buffer minimum is always the exact MinHash. Inserts only ever shrink `δ`;
//! deletes never touch it. A delete that empties a buffer while `A` is still
//! nonempty is a *fault*: the sketch asks a [`RecoveryProvider`] for the
//! current contents of `A` and rebuilds from scratch.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::codec::{Reader, Writer};
use crate::error::{invalid, Error, RecoveryError, Result};
use crate::hashing::{Element, HashFamily, HashValue, TabulationHash};

/// A `(h(x), x)` pair, ordered by hash first and element second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HashedPair {
    pub hash: HashValue,
    pub element: Element,
}

impl HashedPair {
    pub fn new(hash: HashValue, element: Element) -> Self {
        Self { hash, element }
    }

    #[inline]
    pub fn of(h: &TabulationHash, element: Element) -> Self {
        Self {
            hash: h.eval(element),
            element,
        }
    }
}

impl fmt::Display for HashedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.hash, self.element)
    }
}

/// A buffer threshold: a real pair, or `(+inf, +inf)`.
///
/// `Top` compares greater than every pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Threshold {
    Pair(HashedPair),
    Top,
}

impl Threshold {
    #[inline]
    pub fn admits(self, p: HashedPair) -> bool {
        match self {
            Threshold::Pair(d) => p <= d,
            Threshold::Top => true,
        }
    }
}

/// The `r` smallest pairs of `pairs`, sorted ascending. Duplicates collapse.
pub fn smallest<I>(pairs: I, r: usize) -> Vec<HashedPair>
where
    I: IntoIterator<Item = HashedPair>,
{
    let mut all: Vec<HashedPair> = pairs.into_iter().collect();
    all.sort_unstable();
    all.dedup();
    all.truncate(r);
    all
}

/// Sorted, duplicate-free set of pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Buffer {
    pairs: Vec<HashedPair>,
}

impl Buffer {
    fn with_capacity(cap: usize) -> Self {
        Self {
            pairs: Vec::with_capacity(cap),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn min(&self) -> Option<HashedPair> {
        self.pairs.first().copied()
    }

    pub fn max(&self) -> Option<HashedPair> {
        self.pairs.last().copied()
    }

    pub fn contains(&self, p: HashedPair) -> bool {
        self.pairs.binary_search(&p).is_ok()
    }

    pub fn as_slice(&self) -> &[HashedPair] {
        &self.pairs
    }

    /// `Smallest(B ∪ {p}, cap)`. Returns false when `p` was already present
    /// or did not make the cut.
    #[inline]
    fn offer(&mut self, p: HashedPair, cap: usize) -> bool {
        if self.pairs.len() == cap && self.pairs.last().is_some_and(|&m| p > m) {
            return false;
        }
        match self.pairs.binary_search(&p) {
            Ok(_) => false,
            Err(pos) => {
                self.pairs.insert(pos, p);
                if self.pairs.len() > cap {
                    self.pairs.pop();
                }
                true
            }
        }
    }
}

/// A k-MinHash signature: entry `i` is `min { h_i(x) : x in A }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    values: Vec<HashValue>,
    family_seed: u64,
}

impl Signature {
    pub fn new(values: Vec<HashValue>, family_seed: u64) -> Self {
        Self {
            values,
            family_seed,
        }
    }

    /// Plain from-scratch k-MinHash of `elements`.
    pub fn compute(family: &HashFamily, elements: &[Element]) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        let values = family
            .functions()
            .iter()
            .map(|h| elements.iter().map(|&x| h.eval(x)).min().expect("nonempty"))
            .collect();
        Ok(Self::new(values, family.master_seed()))
    }

    pub fn values(&self) -> &[HashValue] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn family_seed(&self) -> u64 {
        self.family_seed
    }
}

/// Answers recovery queries with the current contents of the tracked set.
pub trait RecoveryProvider {
    fn recover(&mut self) -> Result<Vec<Element>, RecoveryError>;
}

impl<F> RecoveryProvider for F
where
    F: FnMut() -> Result<Vec<Element>, RecoveryError>,
{
    fn recover(&mut self) -> Result<Vec<Element>, RecoveryError> {
        self()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SketchStats {
    /// Deletes that emptied a buffer of a still-nonempty set.
    pub fault_count: u64,
    pub recovery_queries: u64,
    pub recovery_elements_streamed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeleteOutcome {
    /// No buffer held the element.
    Untouched,
    Removed,
    /// A buffer emptied and the sketch was rebuilt from a recovery query.
    /// `fault` is false when the recovered set was empty.
    Recovered {
        fault: bool,
    },
}

/// ℓ-buffered k-MinHash of one set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BufferedSketch {
    family: Arc<HashFamily>,
    ell: usize,
    buffers: Vec<Buffer>,
    thresholds: Vec<Threshold>,
    stats: SketchStats,
}

impl BufferedSketch {
    /// Sketch of the empty set.
    pub fn new(family: Arc<HashFamily>, ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(invalid("buffer size must be >= 1"));
        }
        let k = family.k();
        Ok(Self {
            buffers: (0..k).map(|_| Buffer::with_capacity(ell)).collect(),
            thresholds: vec![Threshold::Top; k],
            family,
            ell,
            stats: SketchStats::default(),
        })
    }

    /// Builds the sketch of `elements` from scratch. Duplicates are ignored.
    pub fn init<I>(family: Arc<HashFamily>, ell: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = Element>,
    {
        let mut sketch = Self::new(family, ell)?;
        sketch.rebuild(elements.into_iter().collect());
        Ok(sketch)
    }

    /// Returns whether the rebuilt set is nonempty.
    fn rebuild(&mut self, mut elements: Vec<Element>) -> bool {
        elements.sort_unstable();
        elements.dedup();
        let ell = self.ell;
        for ((h, buf), threshold) in self
            .family
            .functions()
            .iter()
            .zip(self.buffers.iter_mut())
            .zip(self.thresholds.iter_mut())
        {
            buf.pairs.clear();
            for &x in &elements {
                buf.offer(HashedPair::of(h, x), ell);
            }
            *threshold = if buf.len() == ell {
                Threshold::Pair(buf.max().expect("full buffer"))
            } else {
                Threshold::Top
            };
        }
        !elements.is_empty()
    }

    pub fn insert(&mut self, x: Element) {
        let ell = self.ell;
        for ((h, buf), threshold) in self
            .family
            .functions()
            .iter()
            .zip(self.buffers.iter_mut())
            .zip(self.thresholds.iter_mut())
        {
            let p = HashedPair::of(h, x);
            if !threshold.admits(p) {
                continue;
            }
            if buf.offer(p, ell) && buf.len() == ell {
                *threshold = Threshold::Pair(buf.max().expect("full buffer"));
            }
        }
    }

    /// Removes `x`. On a fault the sketch is rebuilt from `recovery`; if the
    /// recovery query fails the sketch is left exactly as before the call.
    pub fn delete<R>(&mut self, x: Element, recovery: &mut R) -> Result<DeleteOutcome>
    where
        R: RecoveryProvider + ?Sized,
    {
        let mut hits: Vec<(usize, usize)> = Vec::new();
        let mut empties = false;
        for (i, h) in self.family.functions().iter().enumerate() {
            let p = HashedPair::of(h, x);
            if !self.thresholds[i].admits(p) {
                continue;
            }
            if let Ok(pos) = self.buffers[i].pairs.binary_search(&p) {
                if self.buffers[i].len() == 1 {
                    empties = true;
                    break;
                }
                hits.push((i, pos));
            }
        }

        if empties {
            let elements = recovery.recover()?;
            self.stats.recovery_queries += 1;
            self.stats.recovery_elements_streamed += elements.len() as u64;
            let fault = self.rebuild(elements);
            if fault {
                self.stats.fault_count += 1;
            }
            return Ok(DeleteOutcome::Recovered { fault });
        }
        if hits.is_empty() {
            return Ok(DeleteOutcome::Untouched);
        }
        for (i, pos) in hits {
            self.buffers[i].pairs.remove(pos);
        }
        Ok(DeleteOutcome::Removed)
    }

    /// The exact k-MinHash of the tracked set, in O(k).
    pub fn get_signature(&self) -> Result<Signature> {
        let values = self
            .buffers
            .iter()
            .map(|b| b.min().map(|p| p.hash).ok_or(Error::EmptySet))
            .collect::<Result<Vec<_>>>()?;
        Ok(Signature::new(values, self.family.master_seed()))
    }

    pub fn k(&self) -> usize {
        self.buffers.len()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn family(&self) -> &Arc<HashFamily> {
        &self.family
    }

    pub fn buffers(&self) -> &[Buffer] {
        &self.buffers
    }

    pub fn thresholds(&self) -> &[Threshold] {
        &self.thresholds
    }

    pub fn stats(&self) -> SketchStats {
        self.stats
    }

    pub fn is_empty(&self) -> bool {
        self.buffers.iter().all(Buffer::is_empty)
    }

    /// Total pairs held across all buffers; at most `k * ℓ`.
    pub fn stored_pairs(&self) -> usize {
        self.buffers.iter().map(Buffer::len).sum()
    }

    /// Brute-force check of the structural invariants against the set the
    /// sketch is supposed to track. O(|A| k log ℓ).
    pub fn check_invariants(&self, set: &HashSet<Element>) -> InvariantReport {
        let mut violations = Vec::new();
        for (i, ((h, buf), &threshold)) in self
            .family
            .functions()
            .iter()
            .zip(&self.buffers)
            .zip(&self.thresholds)
            .enumerate()
        {
            if buf.len() > self.ell {
                violations.push(Violation::Overflow {
                    index: i,
                    len: buf.len(),
                });
            }
            if buf.pairs.windows(2).any(|w| w[0] >= w[1]) {
                violations.push(Violation::Unsorted { index: i });
            }
            if buf.is_empty() != set.is_empty() {
                violations.push(Violation::Emptiness { index: i });
            }
            if set.is_empty() && threshold != Threshold::Top {
                violations.push(Violation::ThresholdNotTop { index: i });
            }
            for &p in &buf.pairs {
                if !set.contains(&p.element) || h.eval(p.element) != p.hash {
                    violations.push(Violation::ForeignPair { index: i, pair: p });
                }
            }
            let buf_max = buf.max();
            let mut below_max = 0usize;
            for &x in set {
                let p = HashedPair::of(h, x);
                if buf.contains(p) != threshold.admits(p) {
                    violations.push(Violation::Threshold { index: i, pair: p });
                }
                if buf_max.is_some_and(|m| p <= m) {
                    below_max += 1;
                }
            }
            if below_max != buf.len() {
                violations.push(Violation::NotPrefix { index: i });
            }
        }
        InvariantReport { violations }
    }

    /// Serializes to the `BMH1` checkpoint layout:
    /// magic, k (u32), ℓ (u32), family seed (u64), then per function the
    /// threshold (tag u8 + hash u32 + element u32; tag 1 means top), the pair
    /// count (u32) and the sorted pairs. All integers little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(BMH_MAGIC);
        w.u32(self.k() as u32);
        w.u32(self.ell as u32);
        w.u64(self.family.master_seed());
        for (buf, &t) in self.buffers.iter().zip(&self.thresholds) {
            w.threshold(t);
            w.u32(buf.len() as u32);
            for &p in &buf.pairs {
                w.pair(p);
            }
        }
        w.finish()
    }

    /// Restores a checkpoint. `family` must match the recorded k and seed.
    /// Statistics restart from zero.
    pub fn from_bytes(bytes: &[u8], family: Arc<HashFamily>) -> Result<Self> {
        let mut r = Reader::new(bytes, BMH_MAGIC)?;
        let k = r.u32()? as usize;
        let ell = r.u32()? as usize;
        let seed = r.u64()?;
        if k != family.k() || seed != family.master_seed() {
            return Err(Error::Decode(format!(
                "blob was written for k={k} seed={seed}, family has k={} seed={}",
                family.k(),
                family.master_seed()
            )));
        }
        let mut sketch = Self::new(family, ell).map_err(|e| Error::Decode(e.to_string()))?;
        for i in 0..k {
            sketch.thresholds[i] = r.threshold()?;
            let count = r.u32()? as usize;
            if count > ell {
                return Err(Error::Decode(format!("buffer {i} holds {count} > ℓ pairs")));
            }
            let pairs = (0..count).map(|_| r.pair()).collect::<Result<Vec<_>>>()?;
            if pairs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Decode(format!("buffer {i} is not sorted")));
            }
            sketch.buffers[i].pairs = pairs;
        }
        r.finish()?;
        Ok(sketch)
    }
}

pub const BMH_MAGIC: &[u8; 4] = b"BMH1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Invariant (i): buffer membership disagrees with the threshold.
    Threshold {
        index: usize,
        pair: HashedPair,
    },
    /// Invariant (ii).
    Overflow {
        index: usize,
        len: usize,
    },
    /// Invariant (iii): buffer emptiness disagrees with set emptiness.
    Emptiness {
        index: usize,
    },
    /// Invariant (iii): empty set with a finite threshold.
    ThresholdNotTop {
        index: usize,
    },
    /// Buffered pair that is not in `H(A, h_i)`.
    ForeignPair {
        index: usize,
        pair: HashedPair,
    },
    /// Buffer is not the `|B|` smallest pairs of `H(A, h_i)`.
    NotPrefix {
        index: usize,
    },
    Unsorted {
        index: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub violations: Vec<Violation>,
}

impl InvariantReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(hash: u32, element: u32) -> HashedPair {
        HashedPair::new(hash, element)
    }

    /// k = 1 family with `h(x) = values[x]` for `x < 16`.
    fn fixed_family(values: &[u32]) -> Arc<HashFamily> {
        let h = TabulationHash::lookup(values).unwrap();
        Arc::new(HashFamily::from_functions(vec![h], 0).unwrap())
    }

    fn no_recovery() -> impl FnMut() -> Result<Vec<Element>, RecoveryError> {
        || Err(RecoveryError::new("unexpected recovery"))
    }

    fn brute_smallest(
        family: &HashFamily,
        i: usize,
        set: &[Element],
        ell: usize,
    ) -> Vec<HashedPair> {
        let mut all: Vec<_> = set.iter().map(|&x| pair(family.eval(i, x), x)).collect();
        all.sort();
        all.truncate(ell);
        all
    }

    #[test]
    fn smallest_examples() {
        let (a, b, c) = (10, 11, 12);
        assert_eq!(
            smallest([pair(5, a), pair(2, b), pair(9, c)], 2),
            vec![pair(2, b), pair(5, a)]
        );
        let x = vec![pair(5, a), pair(2, b), pair(9, c)];
        let mut sorted = x.clone();
        sorted.sort();
        assert_eq!(smallest(x, 10), sorted);
        assert_eq!(smallest([pair(4, b), pair(4, a)], 1), vec![pair(4, a)]);
    }

    #[test]
    fn top_exceeds_every_pair() {
        assert!(Threshold::Top > Threshold::Pair(pair(u32::MAX, u32::MAX)));
        assert!(Threshold::Top.admits(pair(u32::MAX, u32::MAX)));
        assert!(!Threshold::Pair(pair(3, 1)).admits(pair(3, 2)));
        assert!(Threshold::Pair(pair(3, 1)).admits(pair(3, 1)));
    }

    #[test]
    fn init_empty() {
        let family = HashFamily::shared(4, 1).unwrap();
        let s = BufferedSketch::init(family, 3, []).unwrap();
        assert!(s.is_empty());
        assert!(s.thresholds().iter().all(|&t| t == Threshold::Top));
        assert!(matches!(s.get_signature(), Err(Error::EmptySet)));
    }

    #[test]
    fn init_not_full() {
        let family = HashFamily::shared(1, 2).unwrap();
        let s = BufferedSketch::init(family, 5, [4, 8, 15]).unwrap();
        assert_eq!(s.buffers()[0].len(), 3);
        assert_eq!(s.thresholds()[0], Threshold::Top);
    }

    #[test]
    fn init_matches_brute_force_sort() {
        let family = HashFamily::shared(4, 77).unwrap();
        let set: Vec<Element> = (0..100).map(|i| i * 7919 + 3).collect();
        let s = BufferedSketch::init(family.clone(), 8, set.iter().copied()).unwrap();
        for i in 0..4 {
            let expect = brute_smallest(&family, i, &set, 8);
            assert_eq!(s.buffers()[i].as_slice(), expect.as_slice());
            assert_eq!(s.thresholds()[i], Threshold::Pair(*expect.last().unwrap()));
        }
        assert!(s.check_invariants(&set.iter().copied().collect()).is_ok());
    }

    #[test]
    fn init_ignores_duplicates() {
        let family = HashFamily::shared(3, 5).unwrap();
        let a = BufferedSketch::init(family.clone(), 2, [1, 2, 3, 2, 1]).unwrap();
        let b = BufferedSketch::init(family, 2, [3, 2, 1]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn insert_into_empty_keeps_top() {
        let family = HashFamily::shared(1, 3).unwrap();
        let mut s = BufferedSketch::new(family, 2).unwrap();
        s.insert(9);
        assert_eq!(s.buffers()[0].len(), 1);
        assert_eq!(s.thresholds()[0], Threshold::Top);
    }

    #[test]
    fn insert_into_full_buffer_tightens_threshold() {
        // a = 1 -> 3, b = 2 -> 7, x = 3 -> 5
        let family = fixed_family(&[100, 3, 7, 5]);
        let mut s = BufferedSketch::init(family.clone(), 2, [1, 2]).unwrap();
        assert_eq!(s.buffers()[0].as_slice(), &[pair(3, 1), pair(7, 2)]);
        assert_eq!(s.thresholds()[0], Threshold::Pair(pair(7, 2)));

        s.insert(3);
        assert_eq!(s.buffers()[0].as_slice(), &[pair(3, 1), pair(5, 3)]);
        assert_eq!(s.thresholds()[0], Threshold::Pair(pair(5, 3)));

        let fresh = BufferedSketch::init(family, 2, [1, 2, 3]).unwrap();
        assert_eq!(s.buffers(), fresh.buffers());
        assert_eq!(s.thresholds(), fresh.thresholds());
    }

    #[test]
    fn duplicate_insert_is_noop() {
        let family = HashFamily::shared(8, 11).unwrap();
        let mut s = BufferedSketch::init(family, 3, 0..50).unwrap();
        let before = s.clone();
        for x in 0..50 {
            s.insert(x);
        }
        assert_eq!(s, before);
    }

    #[test]
    fn delete_outside_buffers_is_noop() {
        let family = HashFamily::shared(1, 12).unwrap();
        let set: Vec<Element> = (0..40).collect();
        let mut s = BufferedSketch::init(family.clone(), 4, set.iter().copied()).unwrap();
        let buffered: HashSet<_> = s.buffers()[0]
            .as_slice()
            .iter()
            .map(|p| p.element)
            .collect();
        let victim = *set.iter().find(|x| !buffered.contains(x)).unwrap();
        let before = s.clone();
        assert_eq!(
            s.delete(victim, &mut no_recovery()).unwrap(),
            DeleteOutcome::Untouched
        );
        assert_eq!(s, before);
    }

    #[test]
    fn delete_absent_is_noop() {
        let family = HashFamily::shared(16, 13).unwrap();
        let mut s = BufferedSketch::init(family, 4, 0..30).unwrap();
        let before = s.clone();
        assert_eq!(
            s.delete(1_000, &mut no_recovery()).unwrap(),
            DeleteOutcome::Untouched
        );
        assert_eq!(s, before);
    }

    #[test]
    fn fault_rebuilds_from_survivor() {
        let family = fixed_family(&[0, 10, 20]);
        let (a, b) = (1, 2);
        let mut s = BufferedSketch::init(family.clone(), 1, [a, b]).unwrap();
        assert_eq!(s.buffers()[0].as_slice(), &[pair(10, a)]);
        let outcome = s.delete(a, &mut || Ok(vec![b])).unwrap();
        assert_eq!(outcome, DeleteOutcome::Recovered { fault: true });
        assert_eq!(s.buffers()[0].as_slice(), &[pair(20, b)]);
        assert_eq!(s.stats().fault_count, 1);
        assert_eq!(s.stats().recovery_elements_streamed, 1);
        assert_eq!(s, {
            let mut fresh = BufferedSketch::init(family, 1, [b]).unwrap();
            fresh.stats = s.stats();
            fresh
        });
    }

    #[test]
    fn deleting_last_element_resets_without_fault() {
        let family = HashFamily::shared(5, 14).unwrap();
        let mut s = BufferedSketch::init(family, 3, [42]).unwrap();
        let outcome = s.delete(42, &mut || Ok(vec![])).unwrap();
        assert_eq!(outcome, DeleteOutcome::Recovered { fault: false });
        assert!(s.is_empty());
        assert!(s.thresholds().iter().all(|&t| t == Threshold::Top));
        assert_eq!(s.stats().fault_count, 0);
        assert_eq!(s.stats().recovery_queries, 1);
        // Deleting from the empty sketch does nothing further.
        assert_eq!(
            s.delete(42, &mut no_recovery()).unwrap(),
            DeleteOutcome::Untouched
        );
    }

    #[test]
    fn failed_recovery_leaves_state_untouched() {
        let family = fixed_family(&[0, 10, 20, 30]);
        let mut s = BufferedSketch::init(family, 1, [1, 2, 3]).unwrap();
        let before = s.clone();
        let err = s.delete(1, &mut no_recovery()).unwrap_err();
        assert!(matches!(err, Error::Recovery(_)));
        assert_eq!(s, before);
    }

    #[test]
    fn signature_is_buffer_minimum() {
        let family = fixed_family(&[0, 3, 7]);
        let s = BufferedSketch::init(family, 2, [1, 2]).unwrap();
        assert_eq!(s.get_signature().unwrap().values(), &[3]);
    }

    #[test]
    fn invariant_checker_flags_injected_pair() {
        let family = HashFamily::shared(2, 21).unwrap();
        let set: HashSet<Element> = (0..60).collect();
        let mut s = BufferedSketch::init(family.clone(), 4, set.iter().copied()).unwrap();
        assert!(s.check_invariants(&set).is_ok());

        // Push a pair of A that lies above δ into buffer 0.
        let Threshold::Pair(delta) = s.thresholds()[0] else {
            panic!("full buffer expected")
        };
        let above = set
            .iter()
            .map(|&x| HashedPair::of(family.get(0), x))
            .filter(|&p| p > delta)
            .min()
            .unwrap();
        s.buffers[0].pairs.push(above);
        let report = s.check_invariants(&set);
        assert!(!report.is_ok());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Threshold { index: 0, .. })));
    }

    #[test]
    fn blob_roundtrip_and_layout() {
        let family = HashFamily::shared(3, 0xabc).unwrap();
        let mut s = BufferedSketch::init(family.clone(), 4, 0..10).unwrap();
        s.delete(3, &mut || Ok((0..10).filter(|&x| x != 3).collect()))
            .unwrap();
        let bytes = s.to_bytes();
        assert_eq!(&bytes[..4], b"BMH1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(u64::from_le_bytes(bytes[12..20].try_into().unwrap()), 0xabc);
        let restored = BufferedSketch::from_bytes(&bytes, family).unwrap();
        assert_eq!(restored.buffers(), s.buffers());
        assert_eq!(restored.thresholds(), s.thresholds());

        let other = HashFamily::shared(3, 0xabd).unwrap();
        assert!(BufferedSketch::from_bytes(&bytes, other).is_err());
        assert!(BufferedSketch::from_bytes(&bytes[..bytes.len() - 1], s.family().clone()).is_err());
    }

    #[test]
    fn zero_ell_rejected() {
        let family = HashFamily::shared(1, 0).unwrap();
        assert!(BufferedSketch::new(family, 0).is_err());
    }
}
