//! ℓ-buffered k-MinHash: exact k-MinHash signatures of sets under fully
//! dynamic insert/delete streams, with recovery queries on rare faults.
//!
//! ```
//! use bmh_core::{BufferedSketch, HashFamily, SetStore, StreamOp};
//!
//! let family = HashFamily::shared(64, 7).unwrap();
//! let mut store = SetStore::new();
//! let mut sketch = BufferedSketch::new(family.clone(), 8).unwrap();
//! for x in 0..1000 {
//!     store.apply(StreamOp::insert(0, x));
//!     sketch.insert(x);
//! }
//! for x in 0..900 {
//!     store.apply(StreamOp::delete(0, x));
//!     sketch.delete(x, &mut store.recovery_for(0)).unwrap();
//! }
//! let fresh = BufferedSketch::init(family, 8, 900..1000).unwrap();
//! assert_eq!(sketch.get_signature().unwrap(), fresh.get_signature().unwrap());
//! ```

pub mod baselines;
mod codec;
pub mod error;
pub mod hashing;
pub mod lsh;
pub mod par;
pub mod similarity;
pub mod sketch;
pub mod streams;

pub use baselines::{BssParams, BssProactiveSketch, BssSketch, NaiveBufferSketch, VanillaSketch};
pub use error::{Error, RecoveryError, Result};
pub use hashing::{
    derive_seed, seeded_rng, Element, HashFamily, HashValue, PairwiseHash, TabulationHash,
};
pub use lsh::{choose_banding, AcpScore, BandingParams, LshIndex};
pub use par::Execution;
pub use similarity::{
    estimate_jaccard, exact_jaccard, exact_jaccard_sorted, rmse, SimilarityEstimate,
};
pub use sketch::{
    smallest, BufferedSketch, DeleteOutcome, HashedPair, RecoveryProvider, Signature, SketchStats,
    Threshold,
};
pub use streams::{Op, SetId, SetStore, StreamOp};
