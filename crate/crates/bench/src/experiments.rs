//! The experiment drivers behind each CLI subcommand.

use std::collections::BTreeMap;
use std::sync::Arc;

use bmh_core::lsh::{all_pairs, choose_banding, grid_sweep, score_acp, score_acp_sampled};
use bmh_core::similarity::error_stddev;
use bmh_core::streams::{
    distinct_elements, gen_correlated_pair, gen_mixed_workload_from, gen_planted_corpus,
    gen_uniform_stream, Event, PairGenConfig,
};
use bmh_core::{
    derive_seed, estimate_jaccard, exact_jaccard_sorted, rmse, BandingParams, Element, Error,
    Execution, HashFamily, LshIndex, Result, SetId, SetStore, Signature, StreamOp,
};
use serde::Serialize;

use crate::report::Row;
use crate::sketches::{empty_sketch, static_signature, SketchKind, SketchShape, StreamSketch};
use crate::timing::{time_reps, Timing};

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg.to_string()))
    }
}

/// Applies `ops` to `store` and `sketch` in order (store first).
pub fn run_stream(
    sketch: &mut dyn StreamSketch,
    store: &mut SetStore,
    ops: &[StreamOp],
) -> Result<()> {
    for op in ops {
        store.apply(*op);
        sketch.update(op.element, op.op, store, op.set_id)?;
    }
    Ok(())
}

struct StreamRun {
    ops: Vec<StreamOp>,
    family: Arc<HashFamily>,
}

fn stress_runs(
    n: usize,
    k: usize,
    universe_bits: u32,
    reps: usize,
    seed: u64,
) -> Result<Vec<StreamRun>> {
    (0..reps.max(1))
        .map(|r| {
            Ok(StreamRun {
                ops: gen_uniform_stream(n, universe_bits, derive_seed(seed, 2 * r as u64))?,
                family: HashFamily::shared(k, derive_seed(seed, 2 * r as u64 + 1))?,
            })
        })
        .collect()
}

/// Times `kind` over each prepared run; returns timing and per-run faults.
fn time_stress(
    kind: SketchKind,
    shape: SketchShape,
    runs: &[StreamRun],
    reps: usize,
) -> Result<(Timing, Vec<u64>)> {
    let (timing, results) = time_reps(reps, |r| -> Result<u64> {
        let run = &runs[r];
        let mut store = SetStore::new();
        let mut sketch = empty_sketch(kind, shape, run.family.clone(), 0)?;
        run_stream(sketch.as_mut(), &mut store, &run.ops)?;
        Ok(sketch.faults())
    });
    let faults = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((timing, faults))
}

#[derive(Clone, Debug)]
pub struct FaultSweepConfig {
    pub n: usize,
    pub k: usize,
    pub ells: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub universe_bits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaultSweepRow {
    pub ell: usize,
    pub k: usize,
    pub n: usize,
    pub reps: usize,
    pub mean_time_s: f64,
    pub median_time_s: f64,
    pub mean_faults: f64,
}

impl Row for FaultSweepRow {
    const COLUMNS: &'static [&'static str] = &[
        "ell",
        "k",
        "n",
        "reps",
        "mean_time_s",
        "median_time_s",
        "mean_faults",
    ];
}

/// n inserts then the same n deletes, for every ℓ in the sweep.
pub fn fault_sweep(cfg: &FaultSweepConfig) -> Result<Vec<FaultSweepRow>> {
    check(cfg.reps >= 1, "reps must be at least 1")?;
    check(!cfg.ells.is_empty(), "empty ℓ sweep")?;
    let runs = stress_runs(cfg.n, cfg.k, cfg.universe_bits, cfg.reps, cfg.seed)?;
    cfg.ells
        .iter()
        .map(|&ell| {
            let shape = SketchShape::equal_memory(cfg.k, ell, cfg.universe_bits);
            let (t, faults) = time_stress(SketchKind::Bmh, shape, &runs, cfg.reps)?;
            Ok(FaultSweepRow {
                ell,
                k: cfg.k,
                n: cfg.n,
                reps: cfg.reps,
                mean_time_s: t.mean,
                median_time_s: t.median,
                mean_faults: faults.iter().sum::<u64>() as f64 / faults.len() as f64,
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SpeedupConfig {
    pub ns: Vec<usize>,
    pub k: usize,
    pub ell: usize,
    pub reps: usize,
    pub seed: u64,
    pub universe_bits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub vanilla_time_s: f64,
    pub bmh_time_s: f64,
    pub speedup: f64,
    pub vanilla_faults: f64,
    pub bmh_faults: f64,
}

impl Row for SpeedupRow {
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "k",
        "ell",
        "vanilla_time_s",
        "bmh_time_s",
        "speedup",
        "vanilla_faults",
        "bmh_faults",
    ];
}

/// Vanilla vs buffered sketch on identical n-inserts/n-deletes streams.
pub fn speedup(cfg: &SpeedupConfig) -> Result<Vec<SpeedupRow>> {
    check(cfg.reps >= 1, "reps must be at least 1")?;
    let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len() as f64;
    cfg.ns
        .iter()
        .map(|&n| {
            let runs = stress_runs(n, cfg.k, cfg.universe_bits, cfg.reps, cfg.seed)?;
            let shape = SketchShape::equal_memory(cfg.k, cfg.ell, cfg.universe_bits);
            let (tv, fv) = time_stress(SketchKind::Vanilla, shape, &runs, cfg.reps)?;
            let (tb, fb) = time_stress(SketchKind::Bmh, shape, &runs, cfg.reps)?;
            Ok(SpeedupRow {
                n,
                k: cfg.k,
                ell: cfg.ell,
                vanilla_time_s: tv.mean,
                bmh_time_s: tb.mean,
                speedup: tv.mean / tb.mean,
                vanilla_faults: mean(&fv),
                bmh_faults: mean(&fb),
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct MixedConfig {
    pub n: usize,
    pub ps: Vec<f64>,
    pub k: usize,
    pub ell: usize,
    /// Elements inserted (untimed) before the workload starts.
    pub prefill: usize,
    pub reps: usize,
    pub seed: u64,
    pub universe_bits: u32,
    pub sketches: Vec<SketchKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedRow {
    pub sketch: SketchKind,
    pub p: f64,
    pub n: usize,
    pub mean_time_s: f64,
    pub median_time_s: f64,
    pub queries: usize,
    pub updates: usize,
    pub failed_queries: usize,
}

impl Row for MixedRow {
    const COLUMNS: &'static [&'static str] = &[
        "sketch",
        "p",
        "n",
        "mean_time_s",
        "median_time_s",
        "queries",
        "updates",
        "failed_queries",
    ];
}

/// Interleaved queries (fraction p) and legal updates against each sketch,
/// all with `k = c²`.
pub fn mixed(cfg: &MixedConfig) -> Result<Vec<MixedRow>> {
    check(cfg.reps >= 1, "reps must be at least 1")?;
    let shape = SketchShape::equal_memory(cfg.k, cfg.ell, cfg.universe_bits);
    let mut rows = Vec::new();
    for &p in &cfg.ps {
        let prepared = (0..cfg.reps)
            .map(|r| {
                let s = derive_seed(cfg.seed, r as u64);
                let initial = distinct_elements(cfg.prefill, cfg.universe_bits, derive_seed(s, 0))?;
                let events = gen_mixed_workload_from(
                    &initial,
                    cfg.n,
                    p,
                    cfg.universe_bits,
                    derive_seed(s, 1),
                )?;
                let family = HashFamily::shared(cfg.k, derive_seed(s, 2))?;
                Ok((initial, events, family))
            })
            .collect::<Result<Vec<_>>>()?;
        for &kind in &cfg.sketches {
            let mut setup = Vec::with_capacity(cfg.reps + 1);
            for (initial, _, family) in prepared.iter().chain(prepared.first()) {
                let mut store = SetStore::new();
                let mut sketch = empty_sketch(kind, shape, family.clone(), 0)?;
                let ops: Vec<StreamOp> = initial.iter().map(|&x| StreamOp::insert(0, x)).collect();
                run_stream(sketch.as_mut(), &mut store, &ops)?;
                setup.push(Some((store, sketch)));
            }
            // the warm-up call consumes the trailing copy of rep 0
            let mut warm = true;
            let (t, results) = time_reps(cfg.reps, |r| -> Result<(usize, usize, usize)> {
                let slot = if std::mem::take(&mut warm) {
                    cfg.reps
                } else {
                    r
                };
                let (mut store, mut sketch) = setup[slot].take().expect("each setup used once");
                let (mut q, mut u, mut failed) = (0, 0, 0);
                for e in &prepared[r].1 {
                    match e {
                        Event::Query => {
                            q += 1;
                            match sketch.query() {
                                Ok(sig) => {
                                    std::hint::black_box(sig);
                                }
                                Err(Error::EmptySet | Error::EmptyRow { .. }) => failed += 1,
                                Err(e) => return Err(e),
                            }
                        }
                        Event::Update(op) => {
                            u += 1;
                            store.apply(*op);
                            sketch.update(op.element, op.op, &mut store, 0)?;
                        }
                    }
                }
                Ok((q, u, failed))
            });
            let results = results.into_iter().collect::<Result<Vec<_>>>()?;
            let (q, u, failed) = results[0];
            rows.push(MixedRow {
                sketch: kind,
                p,
                n: cfg.n,
                mean_time_s: t.mean,
                median_time_s: t.median,
                queries: q,
                updates: u,
                failed_queries: failed,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct RmseConfig {
    pub js: Vec<f64>,
    pub pairs: usize,
    pub k: usize,
    pub ell: usize,
    pub q: f64,
    pub universe_bits: u32,
    pub seed: u64,
    pub sketches: Vec<SketchKind>,
    pub exec: Execution,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RmseRow {
    pub j: f64,
    pub sketch: SketchKind,
    pub k_used: usize,
    pub pairs: usize,
    pub rmse: f64,
    pub stddev: f64,
    pub mean_exact_j: f64,
    pub failures: usize,
}

impl Row for RmseRow {
    const COLUMNS: &'static [&'static str] = &[
        "j",
        "sketch",
        "k_used",
        "pairs",
        "rmse",
        "stddev",
        "mean_exact_j",
        "failures",
    ];
}

/// Equal-memory hash count for `kind`: Vanilla gets `k·log2 N` functions.
pub fn equal_memory_k(kind: SketchKind, k: usize, universe_bits: u32) -> usize {
    match kind {
        SketchKind::Vanilla => k * universe_bits as usize,
        _ => k,
    }
}

/// RMSE of each sketch's estimate over correlated pairs per target J.
/// Pairs where a BSS query fails (empty row) are counted as failures and
/// left out of the RMSE.
pub fn rmse_experiment(cfg: &RmseConfig) -> Result<Vec<RmseRow>> {
    check(cfg.pairs >= 1, "need at least one pair")?;
    let mut rows = Vec::new();
    for (ji, &j) in cfg.js.iter().enumerate() {
        let gen = PairGenConfig::new(cfg.universe_bits, cfg.q, j)?;
        let pair_seed = |i: usize| derive_seed(cfg.seed, (ji as u64) << 32 | i as u64);
        let pairs = cfg
            .exec
            .map_range(cfg.pairs, |i| gen_correlated_pair(&gen, pair_seed(i)))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let truths: Vec<f64> = pairs
            .iter()
            .map(|(a, b)| exact_jaccard_sorted(a, b))
            .collect();
        for &kind in &cfg.sketches {
            let k_used = equal_memory_k(kind, cfg.k, cfg.universe_bits);
            let shape = SketchShape::equal_memory(cfg.k, cfg.ell, cfg.universe_bits);
            let estimates = cfg.exec.map_range(cfg.pairs, |i| -> Result<Option<f64>> {
                let s = derive_seed(pair_seed(i), 7);
                let family = HashFamily::shared(k_used, s)?;
                let (a, b) = &pairs[i];
                let sa = static_signature(kind, shape, &family, s, a);
                let sb = static_signature(kind, shape, &family, s, b);
                match (sa, sb) {
                    (Ok(x), Ok(y)) => Ok(Some(estimate_jaccard(&x, &y)?.estimate)),
                    (Err(Error::EmptyRow { .. } | Error::EmptySet), _)
                    | (_, Err(Error::EmptyRow { .. } | Error::EmptySet)) => Ok(None),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                }
            });
            let mut scored = Vec::new();
            let mut failures = 0;
            for (e, &t) in estimates.into_iter().zip(&truths) {
                match e? {
                    Some(e) => scored.push((e, t)),
                    None => failures += 1,
                }
            }
            let (r, sd) = if scored.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                (rmse(&scored)?, error_stddev(&scored)?)
            };
            rows.push(RmseRow {
                j,
                sketch: kind,
                k_used,
                pairs: cfg.pairs,
                rmse: r,
                stddev: sd,
                mean_exact_j: truths.iter().sum::<f64>() / truths.len() as f64,
                failures,
            });
        }
    }
    Ok(rows)
}

/// Where the ACP sets come from.
#[derive(Clone, Debug)]
pub enum AcpSource {
    Planted {
        m: usize,
        set_size: usize,
        planted: usize,
        j_range: (f64, f64),
    },
    /// Sets given explicitly; set `i` has id `i`.
    Sets(Vec<Vec<Element>>),
}

#[derive(Clone, Debug)]
pub struct AcpConfig {
    pub source: AcpSource,
    pub threshold: f64,
    /// Explicit banding; otherwise chosen for `p1` at `r1`.
    pub banding: Option<BandingParams>,
    pub r1: f64,
    pub p1: f64,
    pub k: usize,
    pub ell: usize,
    pub sketch: SketchKind,
    pub universe_bits: u32,
    pub seed: u64,
    pub exec: Execution,
    /// Score exactly when the number of pairs is at most this; sample
    /// otherwise.
    pub exact_limit: u64,
    pub negative_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcpSummaryRow {
    pub sketch: SketchKind,
    pub sets: usize,
    pub b: usize,
    pub r: usize,
    pub threshold: f64,
    pub candidates: usize,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub tn: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub recall_lo: f64,
    pub recall_hi: f64,
    pub exact: bool,
}

impl Row for AcpSummaryRow {
    const COLUMNS: &'static [&'static str] = &[
        "sketch",
        "sets",
        "b",
        "r",
        "threshold",
        "candidates",
        "tp",
        "fp",
        "fn",
        "tn",
        "precision",
        "recall",
        "f1",
        "recall_lo",
        "recall_hi",
        "exact",
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRow {
    pub set_id_a: SetId,
    pub set_id_b: SetId,
    pub estimated_sim: f64,
    pub exact_sim: f64,
}

impl Row for CandidateRow {
    const COLUMNS: &'static [&'static str] =
        &["set_id_a", "set_id_b", "estimated_sim", "exact_sim"];
}

#[derive(Clone, Debug)]
pub struct AcpReport {
    pub summary: AcpSummaryRow,
    pub candidates: Vec<CandidateRow>,
    pub signatures: Vec<Signature>,
    pub sets: Vec<Vec<Element>>,
    pub planted: Vec<(SetId, SetId)>,
}

type Corpus = (Vec<Vec<Element>>, Vec<(SetId, SetId)>);

fn acp_inputs(cfg: &AcpConfig) -> Result<Corpus> {
    match &cfg.source {
        AcpSource::Planted {
            m,
            set_size,
            planted,
            j_range,
        } => {
            let c = gen_planted_corpus(
                *m,
                *set_size,
                *planted,
                *j_range,
                cfg.universe_bits,
                derive_seed(cfg.seed, 0),
            )?;
            Ok((c.sets, c.planted))
        }
        AcpSource::Sets(sets) => {
            let mut sorted = sets.clone();
            for s in &mut sorted {
                s.sort_unstable();
                s.dedup();
            }
            Ok((sorted, Vec::new()))
        }
    }
}

fn acp_signatures(cfg: &AcpConfig, sets: &[Vec<Element>]) -> Result<Vec<Signature>> {
    let family = HashFamily::shared(cfg.k, derive_seed(cfg.seed, 1))?;
    let shape = SketchShape::equal_memory(cfg.k, cfg.ell, cfg.universe_bits);
    let bss_seed = derive_seed(cfg.seed, 2);
    cfg.exec
        .map_slice(sets, |s| {
            static_signature(cfg.sketch, shape, &family, bss_seed, s)
        })
        .into_iter()
        .collect()
}

fn score_banding(
    cfg: &AcpConfig,
    params: BandingParams,
    sets: &[Vec<Element>],
    sigs: &[Signature],
) -> Result<(AcpSummaryRow, Vec<(SetId, SetId)>)> {
    let mut idx = LshIndex::new(params, derive_seed(cfg.seed, 3));
    for (i, s) in sigs.iter().enumerate() {
        idx.insert(i as SetId, s)?;
    }
    let returned = idx.candidates(cfg.exec);
    let m = sets.len();
    let sim = |a: SetId, b: SetId| exact_jaccard_sorted(&sets[a as usize], &sets[b as usize]);
    let total_pairs = (m as u64) * (m as u64).saturating_sub(1) / 2;
    let summary = if total_pairs <= cfg.exact_limit {
        let s = score_acp(&returned, all_pairs(m), sim, cfg.threshold);
        AcpSummaryRow {
            sketch: cfg.sketch,
            sets: m,
            b: params.b,
            r: params.r,
            threshold: cfg.threshold,
            candidates: returned.len(),
            tp: s.tp,
            fp: s.fp,
            fn_: s.fn_ as f64,
            tn: s.tn as f64,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
            recall_lo: s.recall,
            recall_hi: s.recall,
            exact: true,
        }
    } else {
        let s = score_acp_sampled(
            &returned,
            m,
            sim,
            cfg.threshold,
            cfg.negative_samples,
            derive_seed(cfg.seed, 4),
        )?;
        let negatives = (total_pairs - returned.len() as u64) as f64;
        AcpSummaryRow {
            sketch: cfg.sketch,
            sets: m,
            b: params.b,
            r: params.r,
            threshold: cfg.threshold,
            candidates: returned.len(),
            tp: s.tp,
            fp: s.fp,
            fn_: s.fn_estimate,
            tn: negatives - s.fn_estimate,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
            recall_lo: s.recall_interval.0,
            recall_hi: s.recall_interval.1,
            exact: false,
        }
    };
    Ok((summary, returned))
}

/// Sketches every set, bands the signatures, extracts candidates and scores
/// them against exact similarities.
pub fn acp(cfg: &AcpConfig) -> Result<AcpReport> {
    let (sets, planted) = acp_inputs(cfg)?;
    check(sets.len() >= 2, "ACP needs at least two sets")?;
    let params = match cfg.banding {
        Some(p) => p,
        None => choose_banding(cfg.k, cfg.r1, cfg.p1)?,
    };
    check(params.width() <= cfg.k, "b·r exceeds k")?;
    let sigs = acp_signatures(cfg, &sets)?;
    let (summary, returned) = score_banding(cfg, params, &sets, &sigs)?;
    let candidates = returned
        .iter()
        .map(|&(a, b)| {
            Ok(CandidateRow {
                set_id_a: a,
                set_id_b: b,
                estimated_sim: estimate_jaccard(&sigs[a as usize], &sigs[b as usize])?.estimate,
                exact_sim: exact_jaccard_sorted(&sets[a as usize], &sets[b as usize]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AcpReport {
        summary,
        candidates,
        signatures: sigs,
        sets,
        planted,
    })
}

/// Scores every banding `(⌊k/r⌋, r)` with `r ≤ max_r`, best F1 first. Meant
/// for sketches (BSS) whose collision law has no closed form.
pub fn acp_grid(cfg: &AcpConfig, max_r: usize) -> Result<Vec<AcpSummaryRow>> {
    let (sets, _) = acp_inputs(cfg)?;
    check(sets.len() >= 2, "ACP needs at least two sets")?;
    let sigs = acp_signatures(cfg, &sets)?;
    let mut rows: BTreeMap<(usize, usize), AcpSummaryRow> = BTreeMap::new();
    let order = grid_sweep(cfg.k, max_r, |p| {
        let (row, _) = score_banding(cfg, p, &sets, &sigs)?;
        let f1 = row.f1;
        rows.insert((p.b, p.r), row);
        Ok(f1)
    })?;
    Ok(order
        .into_iter()
        .filter_map(|(p, _)| rows.remove(&(p.b, p.r)))
        .collect())
}
