//! The BSS sketch and its proactive variant.
//!
//! Each set is represented by a `rows × c²` counter matrix. An element lands
//! in exactly one row, chosen by the trailing-zero count of a pairwise hash
//! (so row `i` receives roughly a `2^-(i+1)` fraction of the set), and in one
//! cell of that row chosen by a second pairwise hash. Updates are O(1).
//!
//! A query picks row `⌊log2(α·n_A)⌋`, reads its nonzero cells as a set over
//! the universe `[c²]` and returns the k-MinHash of that set.
//!
//! The one-row-per-element level rule is a reconstruction: the reference
//! description only says that an update touches "the right row".

use std::sync::Arc;

use crate::codec::{Reader, Writer};
use crate::error::{invalid, Error, Result};
use crate::hashing::{derive_seed, Element, HashFamily, PairwiseHash};
use crate::sketch::{HashedPair, Signature, SketchStats};
use crate::streams::Op;

/// Row-selection constant used by the reference experiments.
pub const BSS_ALPHA: f64 = 0.1;

pub const BSS_MAGIC: &[u8; 4] = b"BSS1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BssParams {
    /// Number of rows, `⌈log2 N⌉`.
    pub rows: usize,
    /// Cells per row (`c²`).
    pub cells: usize,
    pub alpha: f64,
}

impl BssParams {
    pub fn new(universe_bits: u32, cells: usize) -> Result<Self> {
        if !(1..=32).contains(&universe_bits) {
            return Err(invalid("universe_bits must be in 1..=32"));
        }
        if cells == 0 || cells > u32::MAX as usize {
            return Err(invalid("c² must be in 1..=2^32-1"));
        }
        Ok(Self {
            rows: universe_bits as usize,
            cells,
            alpha: BSS_ALPHA,
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha must be positive"));
        }
        self.alpha = alpha;
        Ok(self)
    }
}

/// Counter/row/cell touched by one update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellUpdate {
    pub row: usize,
    pub cell: usize,
    pub before: u32,
    pub after: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BssSketch {
    params: BssParams,
    counters: Vec<u32>,
    level_hash: PairwiseHash,
    cell_hash: PairwiseHash,
    size: u64,
    seed: u64,
}

impl BssSketch {
    pub fn new(params: BssParams, seed: u64) -> Self {
        Self {
            counters: vec![0; params.rows * params.cells],
            level_hash: PairwiseHash::new(derive_seed(seed, 0)),
            cell_hash: PairwiseHash::new(derive_seed(seed, 1)),
            params,
            size: 0,
            seed,
        }
    }

    pub fn params(&self) -> BssParams {
        self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Current set size `n_A`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn level(&self, x: Element) -> usize {
        let v = self.level_hash.eval(x as u64, 1 << 32);
        (v.trailing_zeros() as usize).min(self.params.rows - 1)
    }

    pub fn cell(&self, x: Element) -> usize {
        self.cell_hash.eval(x as u64, self.params.cells as u64) as usize
    }

    pub fn row(&self, row: usize) -> &[u32] {
        let c = self.params.cells;
        &self.counters[row * c..(row + 1) * c]
    }

    /// Nonzero cell indices of `row`, as elements of the universe `[c²]`.
    pub fn row_cells(&self, row: usize) -> impl Iterator<Item = Element> + '_ {
        self.row(row)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i as Element)
    }

    pub fn counter_total(&self) -> u64 {
        self.counters.iter().map(|&c| c as u64).sum()
    }

    /// Applies `+1`/`-1` for `x`. Decrementing a zero counter means the
    /// stream was not legal; the sketch is left unchanged in that case.
    pub fn update(&mut self, x: Element, op: Op) -> Result<CellUpdate> {
        let row = self.level(x);
        let cell = self.cell(x);
        let slot = &mut self.counters[row * self.params.cells + cell];
        let before = *slot;
        match op {
            Op::Insert => {
                *slot += 1;
                self.size += 1;
            }
            Op::Delete => {
                if before == 0 || self.size == 0 {
                    return Err(Error::IllegalStream(format!(
                        "delete of {x} hits an empty counter (row {row}, cell {cell})"
                    )));
                }
                *slot -= 1;
                self.size -= 1;
            }
        }
        Ok(CellUpdate {
            row,
            cell,
            before,
            after: *slot,
        })
    }

    /// Row consulted by queries: `clamp(⌊log2(α·n_A)⌋, 0, rows-1)`.
    pub fn query_row(&self) -> Result<usize> {
        if self.size == 0 {
            return Err(Error::EmptySet);
        }
        let scaled = self.params.alpha * self.size as f64;
        let row = if scaled < 1.0 {
            0
        } else {
            scaled.log2().floor() as usize
        };
        Ok(row.min(self.params.rows - 1))
    }

    /// k-MinHash of the query row's nonzero cells. O(c² + k·nnz).
    pub fn signature(&self, family: &HashFamily) -> Result<Signature> {
        let row = self.query_row()?;
        let cells: Vec<Element> = self.row_cells(row).collect();
        if cells.is_empty() {
            return Err(Error::EmptyRow { row });
        }
        Signature::compute(family, &cells)
    }

    /// `BSS1` layout: magic, rows (u32), cells (u32), alpha (f64 bits),
    /// seed (u64), n_A (u64), then the counters row-major as u32.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(BSS_MAGIC);
        w.u32(self.params.rows as u32);
        w.u32(self.params.cells as u32);
        w.u64(self.params.alpha.to_bits());
        w.u64(self.seed);
        w.u64(self.size);
        for &c in &self.counters {
            w.u32(c);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, BSS_MAGIC)?;
        let rows = r.u32()?;
        let cells = r.u32()? as usize;
        let alpha = f64::from_bits(r.u64()?);
        let params = BssParams::new(rows, cells)
            .and_then(|p| p.with_alpha(alpha))
            .map_err(|e| Error::Decode(e.to_string()))?;
        let seed = r.u64()?;
        let mut sketch = Self::new(params, seed);
        sketch.size = r.u64()?;
        for c in sketch.counters.iter_mut() {
            *c = r.u32()?;
        }
        r.finish()?;
        if sketch.counter_total() != sketch.size {
            return Err(Error::Decode("counter total disagrees with n_A".into()));
        }
        Ok(sketch)
    }
}

/// BSS with a k-MinHash signature maintained for every row, so queries are
/// O(k). Emptying the cell that holds a row minimum forces an O(k·c²)
/// recomputation of that row's signature.
#[derive(Clone, Debug, PartialEq)]
pub struct BssProactiveSketch {
    bss: BssSketch,
    family: Arc<HashFamily>,
    row_minima: Vec<Option<HashedPair>>,
    stats: SketchStats,
}

impl BssProactiveSketch {
    pub fn new(params: BssParams, seed: u64, family: Arc<HashFamily>) -> Self {
        Self {
            row_minima: vec![None; params.rows * family.k()],
            bss: BssSketch::new(params, seed),
            family,
            stats: SketchStats::default(),
        }
    }

    pub fn inner(&self) -> &BssSketch {
        &self.bss
    }

    pub fn stats(&self) -> SketchStats {
        self.stats
    }

    pub fn update(&mut self, x: Element, op: Op) -> Result<CellUpdate> {
        let upd = self.bss.update(x, op)?;
        let k = self.family.k();
        let cell = upd.cell as Element;
        let minima = &mut self.row_minima[upd.row * k..(upd.row + 1) * k];
        match op {
            Op::Insert if upd.before == 0 => {
                for (h, slot) in self.family.functions().iter().zip(minima.iter_mut()) {
                    let p = HashedPair::of(h, cell);
                    if slot.is_none_or(|cur| p < cur) {
                        *slot = Some(p);
                    }
                }
            }
            Op::Delete
                if upd.after == 0
                    && minima.iter().any(|m| m.is_some_and(|p| p.element == cell)) =>
            {
                self.stats.fault_count += 1;
                self.recompute_row(upd.row);
            }
            _ => {}
        }
        Ok(upd)
    }

    fn recompute_row(&mut self, row: usize) {
        let k = self.family.k();
        let cells: Vec<Element> = self.bss.row_cells(row).collect();
        self.stats.recovery_elements_streamed += self.bss.params.cells as u64;
        let minima = &mut self.row_minima[row * k..(row + 1) * k];
        for (h, slot) in self.family.functions().iter().zip(minima.iter_mut()) {
            *slot = cells.iter().map(|&c| HashedPair::of(h, c)).min();
        }
    }

    /// Maintained signature of `row`, if the row is nonempty.
    pub fn row_signature(&self, row: usize) -> Option<Signature> {
        let k = self.family.k();
        let values = self.row_minima[row * k..(row + 1) * k]
            .iter()
            .map(|m| m.map(|p| p.hash))
            .collect::<Option<Vec<_>>>()?;
        Some(Signature::new(values, self.family.master_seed()))
    }

    pub fn signature(&self) -> Result<Signature> {
        let row = self.bss.query_row()?;
        self.row_signature(row).ok_or(Error::EmptyRow { row })
    }
}
