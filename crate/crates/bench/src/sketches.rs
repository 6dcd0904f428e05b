use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use bmh_core::baselines::{BssParams, BssProactiveSketch, BssSketch};
use bmh_core::{
    BufferedSketch, Element, Error, HashFamily, Op, Result, SetStore, Signature, VanillaSketch,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchKind {
    Bmh,
    Vanilla,
    Bss,
    BssProactive,
}

impl SketchKind {
    pub const ALL: [SketchKind; 4] = [
        SketchKind::Bmh,
        SketchKind::Vanilla,
        SketchKind::Bss,
        SketchKind::BssProactive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SketchKind::Bmh => "bmh",
            SketchKind::Vanilla => "vanilla",
            SketchKind::Bss => "bss",
            SketchKind::BssProactive => "bss-proactive",
        }
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sketch `{s}`")))
    }
}

/// Memory/shape parameters shared by every sketch kind.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SketchShape {
    pub k: usize,
    pub ell: usize,
    /// BSS cells per row (`c²`).
    pub cells: usize,
    pub universe_bits: u32,
}

impl SketchShape {
    /// Equal-memory shape: `c² = k`.
    pub fn equal_memory(k: usize, ell: usize, universe_bits: u32) -> Self {
        Self {
            k,
            ell,
            cells: k,
            universe_bits,
        }
    }
}

/// Uniform driver interface over the four sketches. Callers apply each
/// update to the [`SetStore`] first, so recovery sees the post-update set.
pub trait StreamSketch {
    fn update(&mut self, x: Element, op: Op, store: &mut SetStore, set_id: u32) -> Result<()>;
    fn query(&mut self) -> Result<Signature>;
    fn faults(&self) -> u64;
}

impl StreamSketch for BufferedSketch {
    fn update(&mut self, x: Element, op: Op, store: &mut SetStore, set_id: u32) -> Result<()> {
        match op {
            Op::Insert => self.insert(x),
            Op::Delete => {
                self.delete(x, &mut store.recovery_for(set_id))?;
            }
        }
        Ok(())
    }

    fn query(&mut self) -> Result<Signature> {
        self.get_signature()
    }

    fn faults(&self) -> u64 {
        self.stats().fault_count
    }
}

impl StreamSketch for VanillaSketch {
    fn update(&mut self, x: Element, op: Op, store: &mut SetStore, set_id: u32) -> Result<()> {
        match op {
            Op::Insert => self.insert(x),
            Op::Delete => {
                self.delete(x, &mut store.recovery_for(set_id))?;
            }
        }
        Ok(())
    }

    fn query(&mut self) -> Result<Signature> {
        self.get_signature()
    }

    fn faults(&self) -> u64 {
        self.stats().fault_count
    }
}

/// BSS computes its signature at query time, so it carries the family.
pub struct BssWithFamily {
    pub sketch: BssSketch,
    pub family: Arc<HashFamily>,
}

impl StreamSketch for BssWithFamily {
    fn update(&mut self, x: Element, op: Op, _: &mut SetStore, _: u32) -> Result<()> {
        self.sketch.update(x, op).map(|_| ())
    }

    fn query(&mut self) -> Result<Signature> {
        self.sketch.signature(&self.family)
    }

    fn faults(&self) -> u64 {
        0
    }
}

impl StreamSketch for BssProactiveSketch {
    fn update(&mut self, x: Element, op: Op, _: &mut SetStore, _: u32) -> Result<()> {
        BssProactiveSketch::update(self, x, op).map(|_| ())
    }

    fn query(&mut self) -> Result<Signature> {
        self.signature()
    }

    fn faults(&self) -> u64 {
        self.stats().fault_count
    }
}

/// A fresh, empty sketch of `kind`. `family` must have `shape.k` functions.
/// BSS level/cell hashes are seeded from `bss_seed`, which must be shared by
/// sketches whose signatures will be compared.
pub fn empty_sketch(
    kind: SketchKind,
    shape: SketchShape,
    family: Arc<HashFamily>,
    bss_seed: u64,
) -> Result<Box<dyn StreamSketch>> {
    Ok(match kind {
        SketchKind::Bmh => Box::new(BufferedSketch::new(family, shape.ell)?),
        SketchKind::Vanilla => Box::new(VanillaSketch::new(family)),
        SketchKind::Bss => Box::new(BssWithFamily {
            sketch: BssSketch::new(BssParams::new(shape.universe_bits, shape.cells)?, bss_seed),
            family,
        }),
        SketchKind::BssProactive => Box::new(BssProactiveSketch::new(
            BssParams::new(shape.universe_bits, shape.cells)?,
            bss_seed,
            family,
        )),
    })
}

/// Signature of a static set, built the cheapest exact way for each kind.
pub fn static_signature(
    kind: SketchKind,
    shape: SketchShape,
    family: &Arc<HashFamily>,
    bss_seed: u64,
    set: &[Element],
) -> Result<Signature> {
    match kind {
        SketchKind::Bmh => {
            BufferedSketch::init(family.clone(), shape.ell, set.iter().copied())?.get_signature()
        }
        SketchKind::Vanilla => {
            VanillaSketch::init(family.clone(), set.iter().copied()).get_signature()
        }
        SketchKind::Bss | SketchKind::BssProactive => {
            let mut s = BssSketch::new(BssParams::new(shape.universe_bits, shape.cells)?, bss_seed);
            for &x in set {
                s.update(x, Op::Insert)?;
            }
            s.signature(family)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_roundtrip_through_names() {
        for k in SketchKind::ALL {
            assert_eq!(k.name().parse::<SketchKind>().unwrap(), k);
        }
        assert!("minhash".parse::<SketchKind>().is_err());
    }

    #[test]
    fn exact_sketches_agree_on_static_sets() {
        let shape = SketchShape::equal_memory(16, 4, 16);
        let family = HashFamily::shared(16, 3).unwrap();
        let set: Vec<Element> = (100..400).collect();
        let a = static_signature(SketchKind::Bmh, shape, &family, 0, &set).unwrap();
        let b = static_signature(SketchKind::Vanilla, shape, &family, 0, &set).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn streamed_and_static_bss_agree() {
        let shape = SketchShape::equal_memory(8, 4, 16);
        let family = HashFamily::shared(8, 4).unwrap();
        let set: Vec<Element> = (0..500).collect();
        let mut store = SetStore::new();
        let mut s = empty_sketch(SketchKind::BssProactive, shape, family.clone(), 9).unwrap();
        for &x in &set {
            s.update(x, Op::Insert, &mut store, 0).unwrap();
        }
        let expect = static_signature(SketchKind::Bss, shape, &family, 9, &set).unwrap();
        assert_eq!(s.query().unwrap(), expect);
    }
}
