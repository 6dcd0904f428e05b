use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bmh_bench::experiments::{
    acp, acp_grid, fault_sweep, mixed, rmse_experiment, speedup, AcpConfig, AcpSource,
    FaultSweepConfig, MixedConfig, RmseConfig, SpeedupConfig,
};
use bmh_bench::report::{emit, schema_line, Format, Row};
use bmh_bench::sketches::SketchKind;
use bmh_core::streams::{
    format_stream, gen_correlated_pair, gen_uniform_stream, load_graph_balls, read_stream,
    BallOptions, PairGenConfig,
};
use bmh_core::{
    derive_seed, exact_jaccard_sorted, BandingParams, Error, Execution, Result, SetStore, StreamOp,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bmh", version, about = "Buffered k-MinHash experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    universe_bits: Option<u32>,
}

impl Common {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            Format::Csv
        }
    }

    fn emit<T: Row>(&self, cmd: &str, rows: &[T]) -> Result<()> {
        emit(cmd, rows, self.format(), self.out.as_deref())
    }
}

fn parse_kind(s: &str) -> std::result::Result<SketchKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

#[derive(Subcommand)]
enum Command {
    /// n inserts then n deletes for each ℓ; time and fault counts.
    FaultSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,12,16,32,64")]
        ells: Vec<usize>,
    },
    /// Vanilla vs buffered sketch wall time on the same streams.
    Speedup {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1024,4096")]
        ns: Vec<usize>,
    },
    /// Interleaved queries and updates against every sketch.
    Mixed {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.05,0.1,0.5")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 4096)]
        prefill: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_kind, default_value = "bmh,vanilla,bss,bss-proactive")]
        sketches: Vec<SketchKind>,
    },
    /// Estimation error over correlated pairs per target Jaccard.
    Rmse {
        #[command(flatten)]
        common: Common,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
        )]
        j: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0.05)]
        q: f64,
        #[arg(long, value_delimiter = ',', value_parser = parse_kind, default_value = "bmh,vanilla,bss")]
        sketches: Vec<SketchKind>,
        #[arg(long)]
        sequential: bool,
    },
    /// All-candidate-pairs via LSH banding, scored against exact similarity.
    Acp {
        #[command(flatten)]
        common: Common,
        /// Similarity threshold J.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, requires = "r")]
        b: Option<usize>,
        #[arg(long, requires = "b")]
        r: Option<usize>,
        /// Similarity at which candidate probability reaches --p1.
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long, default_value_t = 0.8)]
        p1: f64,
        #[arg(long, value_parser = parse_kind, default_value = "bmh")]
        sketch: SketchKind,
        /// Stream file whose final sets form the corpus.
        #[arg(long, conflicts_with = "graph")]
        dataset: Option<PathBuf>,
        /// Edge list; the corpus is the d-hop balls of the top-v centers.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        top_v: usize,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        undirected: bool,
        #[arg(long, default_value_t = 200)]
        sets: usize,
        #[arg(long, default_value_t = 200)]
        set_size: usize,
        #[arg(long, default_value_t = 10)]
        planted: usize,
        /// Score every (⌊k/r⌋, r) with r up to this value instead.
        #[arg(long)]
        grid: Option<usize>,
        /// Write the candidate pairs here.
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long, default_value_t = 50_000_000)]
        exact_limit: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        sequential: bool,
    },
    /// Uniform n-inserts-then-n-deletes stream in stream-file format.
    GenStream {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4096)]
        n: usize,
    },
    /// Correlated pairs (sets 2i and 2i+1) in stream-file format.
    GenPairs {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.5)]
        j: f64,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long, default_value_t = 0.05)]
        q: f64,
    },
    /// d-hop balls of the highest-degree nodes, as a stream file.
    LoadBalls {
        #[command(flatten)]
        common: Common,
        graph: PathBuf,
        #[arg(long, default_value_t = 1000)]
        top_v: usize,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        undirected: bool,
        #[arg(long)]
        include_center: bool,
    },
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?
        }
    }
    Ok(())
}

fn sets_from_stream(ops: &[StreamOp]) -> Vec<Vec<u32>> {
    let mut store = SetStore::new();
    for op in ops {
        store.apply(*op);
    }
    let ids: Vec<u32> = store.set_ids().collect();
    let max = ids.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut sets = vec![Vec::new(); max];
    for id in ids {
        sets[id as usize] = store
            .get(id)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
    }
    sets
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::FaultSweep { common, n, ells } => {
            let rows = fault_sweep(&FaultSweepConfig {
                n,
                k: common.k.unwrap_or(100),
                ells,
                reps: common.reps,
                seed: common.seed,
                universe_bits: common.universe_bits.unwrap_or(32),
            })?;
            common.emit("fault-sweep", &rows)
        }
        Command::Speedup { common, ns } => {
            let rows = speedup(&SpeedupConfig {
                ns,
                k: common.k.unwrap_or(256),
                ell: common.ell.unwrap_or(32),
                reps: common.reps,
                seed: common.seed,
                universe_bits: common.universe_bits.unwrap_or(32),
            })?;
            common.emit("speedup", &rows)
        }
        Command::Mixed {
            common,
            n,
            p,
            prefill,
            sketches,
        } => {
            let rows = mixed(&MixedConfig {
                n,
                ps: p,
                k: common.k.unwrap_or(1024),
                ell: common.ell.unwrap_or(12),
                prefill,
                reps: common.reps,
                seed: common.seed,
                universe_bits: common.universe_bits.unwrap_or(20),
                sketches,
            })?;
            common.emit("mixed", &rows)
        }
        Command::Rmse {
            common,
            j,
            pairs,
            q,
            sketches,
            sequential,
        } => {
            let universe_bits = common.universe_bits.unwrap_or(17);
            let rows = rmse_experiment(&RmseConfig {
                js: j,
                pairs,
                k: common.k.unwrap_or(1024),
                ell: common.ell.unwrap_or(universe_bits as usize),
                q,
                universe_bits,
                seed: common.seed,
                sketches,
                exec: exec(sequential),
            })?;
            common.emit("rmse", &rows)
        }
        Command::Acp {
            common,
            threshold,
            b,
            r,
            r1,
            p1,
            sketch,
            dataset,
            graph,
            top_v,
            d,
            undirected,
            sets,
            set_size,
            planted,
            grid,
            candidates,
            exact_limit,
            samples,
            sequential,
        } => {
            let source = if let Some(path) = dataset {
                AcpSource::Sets(sets_from_stream(&read_stream(path)?))
            } else if let Some(path) = graph {
                let mut opts = BallOptions::new(top_v, d);
                opts.undirected = undirected;
                AcpSource::Sets(load_graph_balls(path, opts)?.balls)
            } else {
                AcpSource::Planted {
                    m: sets,
                    set_size,
                    planted,
                    j_range: (threshold.max(0.5), 0.9),
                }
            };
            let banding = match (b, r) {
                (Some(b), Some(r)) => Some(BandingParams::new(b, r)?),
                _ => None,
            };
            let cfg = AcpConfig {
                source,
                threshold,
                banding,
                r1: r1.unwrap_or(threshold),
                p1,
                k: common.k.unwrap_or(1024),
                ell: common.ell.unwrap_or(12),
                sketch,
                universe_bits: common.universe_bits.unwrap_or(20),
                seed: common.seed,
                exec: exec(sequential),
                exact_limit,
                negative_samples: samples,
            };
            if let Some(max_r) = grid {
                return common.emit("acp", &acp_grid(&cfg, max_r)?);
            }
            let report = acp(&cfg)?;
            if let Some(path) = candidates {
                emit(
                    "acp-candidates",
                    &report.candidates,
                    common.format(),
                    Some(&path),
                )?;
            }
            common.emit("acp", &[report.summary])
        }
        Command::GenStream { common, n } => {
            let ops = gen_uniform_stream(n, common.universe_bits.unwrap_or(32), common.seed)?;
            let text = format!("# {}\n{}", schema_line("gen-stream"), format_stream(&ops));
            write_text(common.out.as_deref(), &text)
        }
        Command::GenPairs {
            common,
            j,
            pairs,
            q,
        } => {
            let cfg = PairGenConfig::new(common.universe_bits.unwrap_or(17), q, j)?;
            let mut text = format!("# {}\n", schema_line("gen-pairs"));
            let mut ops = Vec::new();
            for i in 0..pairs {
                let (a, b) = gen_correlated_pair(&cfg, derive_seed(common.seed, i as u64))?;
                let id = 2 * i as u32;
                writeln!(
                    text,
                    "# pair {i}: sets {id},{} exact_j {}",
                    id + 1,
                    exact_jaccard_sorted(&a, &b)
                )
                .expect("string write");
                ops.extend(a.iter().map(|&x| StreamOp::insert(id, x)));
                ops.extend(b.iter().map(|&x| StreamOp::insert(id + 1, x)));
            }
            text.push_str(&format_stream(&ops));
            write_text(common.out.as_deref(), &text)
        }
        Command::LoadBalls {
            common,
            graph,
            top_v,
            d,
            undirected,
            include_center,
        } => {
            let mut opts = BallOptions::new(top_v, d);
            opts.undirected = undirected;
            opts.include_center = include_center;
            let g = load_graph_balls(graph, opts)?;
            let mut text = format!("# {}\n", schema_line("load-balls"));
            let mut ops = Vec::new();
            for (i, (c, ball)) in g.centers.iter().zip(&g.balls).enumerate() {
                writeln!(text, "# set {i}: center {c}").expect("string write");
                ops.extend(ball.iter().map(|&x| StreamOp::insert(i as u32, x)));
            }
            text.push_str(&format_stream(&ops));
            write_text(common.out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn final_sets_from_stream() {
        let ops = [
            StreamOp::insert(2, 5),
            StreamOp::insert(0, 1),
            StreamOp::delete(2, 5),
            StreamOp::insert(2, 7),
        ];
        assert_eq!(sets_from_stream(&ops), vec![vec![1], vec![], vec![7]]);
    }
}
