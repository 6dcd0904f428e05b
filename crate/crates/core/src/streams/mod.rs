//! Fully-dynamic input model: stream operations, the authoritative set
//! store, synthetic generators, stream files and graph neighbourhoods.

mod generate;
mod graph;
mod io;
mod store;

use std::fmt;

use crate::hashing::Element;

pub use generate::{
    distinct_elements, gen_correlated_pair, gen_mixed_workload, gen_mixed_workload_from,
    gen_planted_corpus, gen_uniform_stream, Event, PairGenConfig, PlantedCorpus,
    MAX_SAMPLED_UNIVERSE_BITS,
};
pub use graph::{balls_from_edges, load_graph_balls, parse_edge_list, BallOptions, GraphBalls};
pub use io::{format_stream, parse_stream, read_stream, write_stream};
pub use store::{SetRecovery, SetStore};

/// Set identifier in `[m]`.
pub type SetId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Insert,
    Delete,
}

impl Op {
    pub fn sign(self) -> i8 {
        match self {
            Op::Insert => 1,
            Op::Delete => -1,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Insert => "+1",
            Op::Delete => "-1",
        })
    }
}

/// One triple `<i, x, o>` of the stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamOp {
    pub set_id: SetId,
    pub element: Element,
    pub op: Op,
}

impl StreamOp {
    pub fn insert(set_id: SetId, element: Element) -> Self {
        Self {
            set_id,
            element,
            op: Op::Insert,
        }
    }

    pub fn delete(set_id: SetId, element: Element) -> Self {
        Self {
            set_id,
            element,
            op: Op::Delete,
        }
    }
}
