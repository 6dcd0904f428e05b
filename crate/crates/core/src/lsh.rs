//! Banding over signatures for all-candidate-pairs (ACP) queries, and
//! precision/recall scoring against exact similarities.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::hashing::{seeded_rng, HashValue};
use crate::par::Execution;
use crate::sketch::Signature;
use crate::streams::SetId;

/// `b` bands of `r` rows each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BandingParams {
    pub b: usize,
    pub r: usize,
}

impl BandingParams {
    pub fn new(b: usize, r: usize) -> Result<Self> {
        if b == 0 || r == 0 {
            return Err(invalid("bands and rows per band must be positive"));
        }
        Ok(Self { b, r })
    }

    /// Signature entries consumed, `b·r`.
    pub fn width(&self) -> usize {
        self.b * self.r
    }

    pub fn candidate_probability(&self, s: f64) -> f64 {
        candidate_probability(s, self.r, self.b)
    }
}

/// `1 - (1 - s^r)^b`.
pub fn candidate_probability(s: f64, r: usize, b: usize) -> f64 {
    1.0 - (1.0 - s.powi(r as i32)).powi(b as i32)
}

/// Largest `r` (with `b = ⌊k_max / r⌋`) whose candidate probability at
/// similarity `r1` is at least `target_p1`.
pub fn choose_banding(k_max: usize, r1: f64, target_p1: f64) -> Result<BandingParams> {
    if k_max == 0 {
        return Err(invalid("k_max must be positive"));
    }
    if !(r1 > 0.0 && r1 <= 1.0) || !(target_p1 > 0.0 && target_p1 < 1.0) {
        return Err(invalid("need 0 < r1 <= 1 and 0 < p1 < 1"));
    }
    (1..=k_max)
        .rev()
        .map(|r| BandingParams { b: k_max / r, r })
        .find(|p| p.candidate_probability(r1) >= target_p1)
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "no banding within k = {k_max} reaches p1 = {target_p1} at r1 = {r1}"
            ))
        })
}

/// Every banding `(⌊k_max/r⌋, r)` for `r ≤ max_r`, scored by `eval` and
/// sorted best first. Used where no closed form ties `(b, r)` to quality.
pub fn grid_sweep<F>(k_max: usize, max_r: usize, mut eval: F) -> Result<Vec<(BandingParams, f64)>>
where
    F: FnMut(BandingParams) -> Result<f64>,
{
    let mut out = Vec::new();
    for r in 1..=max_r.min(k_max) {
        let p = BandingParams::new(k_max / r, r)?;
        out.push((p, eval(p)?));
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(b.0.r.cmp(&a.0.r)));
    Ok(out)
}

/// Banded bucket index over signatures.
#[derive(Clone, Debug)]
pub struct LshIndex {
    params: BandingParams,
    seed: u64,
    buckets: Vec<HashMap<u64, Vec<SetId>>>,
    ids: HashSet<SetId>,
}

impl LshIndex {
    pub fn new(params: BandingParams, seed: u64) -> Self {
        Self {
            buckets: vec![HashMap::new(); params.b],
            params,
            seed,
            ids: HashSet::new(),
        }
    }

    pub fn params(&self) -> BandingParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn band_key(&self, band: usize, entries: &[HashValue]) -> u64 {
        let mut h = DefaultHasher::new();
        (self.seed, band as u64, entries).hash(&mut h);
        h.finish()
    }

    pub fn insert(&mut self, set_id: SetId, sig: &Signature) -> Result<()> {
        let r = self.params.r;
        if sig.k() < self.params.width() {
            return Err(invalid(format!(
                "signature has {} entries, banding needs {}",
                sig.k(),
                self.params.width()
            )));
        }
        if !self.ids.insert(set_id) {
            return Err(invalid(format!("set {set_id} already indexed")));
        }
        for band in 0..self.params.b {
            let key = self.band_key(band, &sig.values()[band * r..(band + 1) * r]);
            self.buckets[band].entry(key).or_default().push(set_id);
        }
        Ok(())
    }

    /// Buckets of one band, for inspection.
    pub fn band(&self, band: usize) -> &HashMap<u64, Vec<SetId>> {
        &self.buckets[band]
    }

    /// All unordered pairs sharing at least one bucket, as sorted `(a, b)`
    /// with `a < b`.
    pub fn candidates(&self, exec: Execution) -> Vec<(SetId, SetId)> {
        let per_band = exec.map_slice(&self.buckets, |band| {
            let mut pairs = Vec::new();
            for ids in band.values() {
                for (i, &a) in ids.iter().enumerate() {
                    for &b in &ids[i + 1..] {
                        pairs.push((a.min(b), a.max(b)));
                    }
                }
            }
            pairs
        });
        let mut all: Vec<_> = per_band.into_iter().flatten().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// Confusion counts and derived metrics. Ratios with a zero denominator
/// are 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcpScore {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

fn f1_of(precision: f64, recall: f64) -> f64 {
    safe_div(2.0 * precision * recall, precision + recall)
}

impl AcpScore {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        let precision = safe_div(tp as f64, (tp + fp) as f64);
        let recall = safe_div(tp as f64, (tp + fn_) as f64);
        Self {
            tp,
            fp,
            fn_,
            tn,
            precision,
            recall,
            f1: f1_of(precision, recall),
        }
    }
}

fn normalize(pairs: &[(SetId, SetId)]) -> HashSet<(SetId, SetId)> {
    pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
}

/// All unordered pairs of `0..m`.
pub fn all_pairs(m: usize) -> impl Iterator<Item = (SetId, SetId)> {
    (0..m as SetId).flat_map(move |a| (a + 1..m as SetId).map(move |b| (a, b)))
}

/// Grades `returned` over `universe_pairs`: a pair is a true positive when
/// it is returned and its exact similarity is at least `threshold`.
pub fn score_acp<I, F>(
    returned: &[(SetId, SetId)],
    universe_pairs: I,
    exact_sim: F,
    threshold: f64,
) -> AcpScore
where
    I: IntoIterator<Item = (SetId, SetId)>,
    F: Fn(SetId, SetId) -> f64,
{
    let returned = normalize(returned);
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (a, b) in universe_pairs {
        let pair = (a.min(b), a.max(b));
        let truth = exact_sim(pair.0, pair.1) >= threshold;
        match (returned.contains(&pair), truth) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    AcpScore::from_counts(tp, fp, fn_, tn)
}

/// ACP score where false negatives are estimated from a uniform sample of
/// the pairs that were not returned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledAcpScore {
    pub tp: u64,
    pub fp: u64,
    pub sampled: u64,
    pub sampled_positives: u64,
    pub fn_estimate: f64,
    pub precision: f64,
    pub recall: f64,
    /// 95% interval for recall from a Wilson interval on the sampled rate.
    pub recall_interval: (f64, f64),
    pub f1: f64,
}

/// Exact precision over the returned pairs; recall estimated by sampling
/// `samples` non-returned pairs (with replacement) among `m` sets.
pub fn score_acp_sampled<F>(
    returned: &[(SetId, SetId)],
    m: usize,
    exact_sim: F,
    threshold: f64,
    samples: usize,
    seed: u64,
) -> Result<SampledAcpScore>
where
    F: Fn(SetId, SetId) -> f64,
{
    if m < 2 {
        return Err(invalid("need at least two sets"));
    }
    let returned = normalize(returned);
    let (mut tp, mut fp) = (0u64, 0u64);
    for &(a, b) in &returned {
        if exact_sim(a, b) >= threshold {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    let total = (m as u64) * (m as u64 - 1) / 2;
    let negatives = total.saturating_sub(returned.len() as u64);
    let mut rng = seeded_rng(seed);
    let (mut sampled, mut positives) = (0u64, 0u64);
    if negatives > 0 {
        while sampled < samples as u64 {
            let x = rng.random_range(0..m as SetId);
            let y = rng.random_range(0..m as SetId);
            let (a, b) = (x.min(y), x.max(y));
            if a == b || returned.contains(&(a, b)) {
                continue;
            }
            sampled += 1;
            if exact_sim(a, b) >= threshold {
                positives += 1;
            }
        }
    }
    let (rate, lo, hi) = wilson(positives, sampled);
    let neg = negatives as f64;
    let tpf = tp as f64;
    let recall = safe_div(tpf, tpf + rate * neg);
    let recall_interval = (safe_div(tpf, tpf + hi * neg), safe_div(tpf, tpf + lo * neg));
    let precision = safe_div(tpf, (tp + fp) as f64);
    Ok(SampledAcpScore {
        tp,
        fp,
        sampled,
        sampled_positives: positives,
        fn_estimate: rate * neg,
        precision,
        recall,
        recall_interval,
        f1: f1_of(precision, recall),
    })
}

/// Point estimate and 95% Wilson interval for `hits / n` (all 0 when n = 0).
fn wilson(hits: u64, n: u64) -> (f64, f64, f64) {
    if n == 0 {
        return (0.0, 0.0, 0.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = hits as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    (p, (center - half).max(0.0), (center + half).min(1.0))
}
