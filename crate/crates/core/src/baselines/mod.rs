//! Reference competitors of the buffered sketch.

pub mod bss;
pub mod naive;
pub mod vanilla;

pub use bss::{BssParams, BssProactiveSketch, BssSketch, CellUpdate, BSS_ALPHA};
pub use naive::{find_naive_witness, NaiveBufferSketch};
pub use vanilla::VanillaSketch;
