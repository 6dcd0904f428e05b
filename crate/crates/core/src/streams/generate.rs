use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;

use super::{SetId, StreamOp};
use crate::error::{invalid, Result};
use crate::hashing::{seeded_rng, Element};

/// Largest universe the per-element Bernoulli samplers will sweep.
pub const MAX_SAMPLED_UNIVERSE_BITS: u32 = 26;

fn universe_size(universe_bits: u32) -> Result<u64> {
    if !(1..=32).contains(&universe_bits) {
        return Err(invalid("universe_bits must be in 1..=32"));
    }
    Ok(1u64 << universe_bits)
}

/// `n` distinct uniform elements inserted into set 0, then deleted in
/// insertion order.
pub fn gen_uniform_stream(n: usize, universe_bits: u32, seed: u64) -> Result<Vec<StreamOp>> {
    let elements = distinct_elements(n, universe_bits, seed)?;
    let mut ops = Vec::with_capacity(2 * n);
    ops.extend(elements.iter().map(|&x| StreamOp::insert(0, x)));
    ops.extend(elements.iter().map(|&x| StreamOp::delete(0, x)));
    Ok(ops)
}

/// `n` distinct uniform elements of `[2^universe_bits]` in random order.
pub fn distinct_elements(n: usize, universe_bits: u32, seed: u64) -> Result<Vec<Element>> {
    let size = universe_size(universe_bits)?;
    if n as u64 > size {
        return Err(invalid(format!(
            "cannot draw {n} distinct elements from 2^{universe_bits}"
        )));
    }
    let mut rng = seeded_rng(seed);
    Ok(sample(&mut rng, size as usize, n)
        .into_iter()
        .map(|x| x as Element)
        .collect())
}

/// Parameters of the correlated-pair generator.
///
/// `A` takes each universe element with probability `q`. `A'` keeps each
/// element of `A` with probability `p1 = 2J/(1+J)` and takes each element
/// outside `A` with probability `p2 = |A|(1-p1)/(N-|A|)`, so that
/// `E|A'| = |A|` and the expected similarity is `J`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairGenConfig {
    pub universe_bits: u32,
    pub q: f64,
    pub target_j: f64,
}

impl PairGenConfig {
    pub fn new(universe_bits: u32, q: f64, target_j: f64) -> Result<Self> {
        if !(1..=MAX_SAMPLED_UNIVERSE_BITS).contains(&universe_bits) {
            return Err(invalid(format!(
                "universe_bits must be in 1..={MAX_SAMPLED_UNIVERSE_BITS}"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("density q must be in (0, 1)"));
        }
        if !(target_j > 0.0 && target_j <= 1.0) {
            return Err(invalid("target J must be in (0, 1]"));
        }
        Ok(Self {
            universe_bits,
            q,
            target_j,
        })
    }

    pub fn universe_size(&self) -> u64 {
        1 << self.universe_bits
    }

    pub fn p1(&self) -> f64 {
        2.0 * self.target_j / (1.0 + self.target_j)
    }

    /// `p2` for a first set of size `a_len`. Errors when it exceeds 1.
    pub fn p2(&self, a_len: usize) -> Result<f64> {
        let n = self.universe_size() as f64;
        let a = a_len as f64;
        if a >= n {
            return if self.p1() >= 1.0 {
                Ok(0.0)
            } else {
                Err(invalid(
                    "A covers the universe; no room for new elements in A'",
                ))
            };
        }
        let p2 = a * (1.0 - self.p1()) / (n - a);
        if p2 > 1.0 {
            return Err(invalid(format!(
                "infeasible configuration: p2 = {p2:.3} > 1"
            )));
        }
        Ok(p2.max(0.0))
    }
}

/// Draws `(A, A')`, both sorted ascending.
pub fn gen_correlated_pair(cfg: &PairGenConfig, seed: u64) -> Result<(Vec<Element>, Vec<Element>)> {
    let mut rng = seeded_rng(seed);
    let n = cfg.universe_size();
    let mut in_a = vec![false; n as usize];
    let mut a = Vec::new();
    for x in 0..n {
        if rng.random::<f64>() < cfg.q {
            in_a[x as usize] = true;
            a.push(x as Element);
        }
    }
    let p1 = cfg.p1();
    let p2 = cfg.p2(a.len())?;
    let mut b = Vec::with_capacity(a.len());
    for x in 0..n {
        let p = if in_a[x as usize] { p1 } else { p2 };
        if p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p) {
            b.push(x as Element);
        }
    }
    Ok((a, b))
}

/// One event of a mixed workload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Update(StreamOp),
    Query,
}

/// `n` events on set 0: a signature query with probability `p`, otherwise a
/// legal update. Updates insert a fresh uniform element or delete a uniform
/// live element with equal probability (always insert when the set is empty).
pub fn gen_mixed_workload(n: usize, p: f64, universe_bits: u32, seed: u64) -> Result<Vec<Event>> {
    gen_mixed_workload_from(&[], n, p, universe_bits, seed)
}

/// Like [`gen_mixed_workload`], for a set that already holds `initial`
/// (distinct elements of the same universe).
pub fn gen_mixed_workload_from(
    initial: &[Element],
    n: usize,
    p: f64,
    universe_bits: u32,
    seed: u64,
) -> Result<Vec<Event>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("query fraction must be in [0, 1]"));
    }
    let size = universe_size(universe_bits)?;
    if initial.iter().any(|&x| x as u64 >= size) {
        return Err(invalid("initial elements outside the universe"));
    }
    let mut rng = seeded_rng(seed);
    let mut live: Vec<Element> = initial.to_vec();
    let mut members: HashSet<Element> = initial.iter().copied().collect();
    if members.len() != live.len() {
        return Err(invalid("initial elements must be distinct"));
    }
    let mut events = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.random::<f64>() < p {
            events.push(Event::Query);
            continue;
        }
        let full = members.len() as u64 == size;
        if !full && (live.is_empty() || rng.random::<bool>()) {
            let x = loop {
                let x = rng.random_range(0..size) as Element;
                if members.insert(x) {
                    break x;
                }
            };
            live.push(x);
            events.push(Event::Update(StreamOp::insert(0, x)));
        } else {
            let i = rng.random_range(0..live.len());
            let x = live.swap_remove(i);
            members.remove(&x);
            events.push(Event::Update(StreamOp::delete(0, x)));
        }
    }
    Ok(events)
}

/// Synthetic ACP corpus: random background sets plus pairs with planted
/// similarity.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedCorpus {
    /// Set `i` has id `i`; every set is sorted ascending.
    pub sets: Vec<Vec<Element>>,
    /// Planted pairs `(a, b)` with `a < b`.
    pub planted: Vec<(SetId, SetId)>,
}

/// `m` sets of `set_size` elements each. Sets `2i` and `2i+1` for
/// `i < planted` share exactly `⌈2nJ/(1+J)⌉` elements, with `J` uniform in
/// `j_range`, so their similarity is at least `J`. The rest are independent
/// uniform sets.
pub fn gen_planted_corpus(
    m: usize,
    set_size: usize,
    planted: usize,
    j_range: (f64, f64),
    universe_bits: u32,
    seed: u64,
) -> Result<PlantedCorpus> {
    let (lo, hi) = j_range;
    if 2 * planted > m {
        return Err(invalid("more planted pairs than the corpus can hold"));
    }
    if !(0.0 < lo && lo <= hi && hi <= 1.0) {
        return Err(invalid(
            "planted similarity range must satisfy 0 < lo <= hi <= 1",
        ));
    }
    if set_size == 0 {
        return Err(invalid("set_size must be positive"));
    }
    let size = universe_size(universe_bits)?;
    if (2 * set_size) as u64 > size {
        return Err(invalid("universe too small for the requested set size"));
    }
    let mut rng = seeded_rng(seed);
    let mut sets = Vec::with_capacity(m);
    let mut pairs = Vec::with_capacity(planted);
    for i in 0..m {
        if i < 2 * planted && i % 2 == 1 {
            continue;
        }
        let elements = distinct_elements(set_size, universe_bits, rng.random())?;
        if i < 2 * planted {
            let j = if lo == hi {
                lo
            } else {
                rng.random_range(lo..=hi)
            };
            let shared = ((2.0 * set_size as f64 * j) / (1.0 + j)).ceil() as usize;
            let shared = shared.min(set_size);
            let base: HashSet<Element> = elements.iter().copied().collect();
            let mut twin: Vec<Element> = elements[..shared].to_vec();
            while twin.len() < set_size {
                let x = rng.random_range(0..size) as Element;
                if !base.contains(&x) && !twin.contains(&x) {
                    twin.push(x);
                }
            }
            let mut a = elements;
            a.sort_unstable();
            twin.sort_unstable();
            sets.push(a);
            sets.push(twin);
            pairs.push((i as SetId, i as SetId + 1));
        } else {
            let mut a = elements;
            a.sort_unstable();
            sets.push(a);
        }
    }
    Ok(PlantedCorpus {
        sets,
        planted: pairs,
    })
}
