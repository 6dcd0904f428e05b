//! Seeded hash functions shared by every sketch.
//!
//! Signatures use simple tabulation hashing with 8 tables of 16 random 32-bit
//! words: the input is cut into eight 4-bit slices, each slice indexes its own
//! table, and the eight lookups are XOR-combined. The BSS baseline additionally
//! needs 2-wise independent functions, provided by [`PairwiseHash`].
//!
//! Elements live in the universe `[0, N)` with `N <= 2^32` (0-based).
//!
//! # Seeding
//!
//! A master seed is expanded with ChaCha8: function `i` of a family takes the
//! first word of ChaCha8 stream `i` keyed by the master seed as its own seed,
//! and its tables are the first 128 words of the ChaCha8 generator keyed by
//! that function seed. Everything is therefore a pure function of the master
//! seed and bit-identical across runs and platforms.

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// A universe element. The universe is `[0, 2^universe_bits)`.
pub type Element = u32;

/// Output of a signature hash function.
pub type HashValue = u32;

pub const TABLE_COUNT: usize = 8;
pub const TABLE_ENTRIES: usize = 16;

/// Expands `master` into the seed of the `index`-th independent stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Deterministic RNG for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simple tabulation hash over 32-bit keys, 8 nibble tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulationHash {
    tables: [[u32; TABLE_ENTRIES]; TABLE_COUNT],
    seed: u64,
}

impl TabulationHash {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut tables = [[0u32; TABLE_ENTRIES]; TABLE_COUNT];
        for table in tables.iter_mut() {
            for entry in table.iter_mut() {
                *entry = rng.next_u32();
            }
        }
        Self { tables, seed }
    }

    /// Builds a function from explicit tables. `seed` is only recorded.
    pub fn from_tables(tables: [[u32; TABLE_ENTRIES]; TABLE_COUNT], seed: u64) -> Self {
        Self { tables, seed }
    }

    /// A function with `h(x) = values[x]` for `x < values.len() <= 16`:
    /// the first table holds `values`, all other tables are zero.
    pub fn lookup(values: &[u32]) -> Result<Self> {
        if values.len() > TABLE_ENTRIES {
            return Err(invalid("lookup hash supports at most 16 values"));
        }
        let mut tables = [[0u32; TABLE_ENTRIES]; TABLE_COUNT];
        tables[0][..values.len()].copy_from_slice(values);
        Ok(Self::from_tables(tables, 0))
    }

    #[inline]
    pub fn eval(&self, x: Element) -> HashValue {
        let t = &self.tables;
        t[0][(x & 0xf) as usize]
            ^ t[1][((x >> 4) & 0xf) as usize]
            ^ t[2][((x >> 8) & 0xf) as usize]
            ^ t[3][((x >> 12) & 0xf) as usize]
            ^ t[4][((x >> 16) & 0xf) as usize]
            ^ t[5][((x >> 20) & 0xf) as usize]
            ^ t[6][((x >> 24) & 0xf) as usize]
            ^ t[7][((x >> 28) & 0xf) as usize]
    }

    pub fn tables(&self) -> &[[u32; TABLE_ENTRIES]; TABLE_COUNT] {
        &self.tables
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// The vector of `k` signature hash functions. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFamily {
    functions: Vec<TabulationHash>,
    master_seed: u64,
}

impl HashFamily {
    pub fn new(k: usize, master_seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("hash family needs k >= 1"));
        }
        let functions = (0..k as u64)
            .map(|i| TabulationHash::from_seed(derive_seed(master_seed, i)))
            .collect();
        Ok(Self {
            functions,
            master_seed,
        })
    }

    /// Convenience wrapper returning a shareable family.
    pub fn shared(k: usize, master_seed: u64) -> Result<Arc<Self>> {
        Self::new(k, master_seed).map(Arc::new)
    }

    /// Wraps hand-built functions, e.g. fixed tables in tests.
    pub fn from_functions(functions: Vec<TabulationHash>, master_seed: u64) -> Result<Self> {
        if functions.is_empty() {
            return Err(invalid("hash family needs k >= 1"));
        }
        Ok(Self {
            functions,
            master_seed,
        })
    }

    pub fn k(&self) -> usize {
        self.functions.len()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn get(&self, i: usize) -> &TabulationHash {
        &self.functions[i]
    }

    pub fn functions(&self) -> &[TabulationHash] {
        &self.functions
    }

    #[inline]
    pub fn eval(&self, i: usize, x: Element) -> HashValue {
        self.functions[i].eval(x)
    }
}

/// Mersenne prime 2^61 - 1, larger than any 32-bit universe.
pub const PAIRWISE_PRIME: u64 = (1 << 61) - 1;

/// `x -> ((a*x + b) mod p) mod range` with `p = 2^61 - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairwiseHash {
    a: u64,
    b: u64,
}

impl PairwiseHash {
    pub fn new(seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let a = rng.random_range(1..PAIRWISE_PRIME);
        let b = rng.random_range(0..PAIRWISE_PRIME);
        Self { a, b }
    }

    pub fn from_parts(a: u64, b: u64) -> Result<Self> {
        if a == 0 || a >= PAIRWISE_PRIME || b >= PAIRWISE_PRIME {
            return Err(invalid(
                "pairwise coefficients must satisfy 1 <= a < p, 0 <= b < p",
            ));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// Panics if `range == 0`.
    #[inline]
    pub fn eval(&self, x: u64, range: u64) -> u64 {
        assert!(range > 0, "pairwise hash range must be positive");
        let v = (self.a as u128 * x as u128 + self.b as u128) % PAIRWISE_PRIME as u128;
        v as u64 % range
    }
}
