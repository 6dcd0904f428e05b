//! Neighbourhood sets ("balls") of high-degree vertices of a graph given as
//! a SNAP edge list.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::hashing::Element;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallOptions {
    pub top_v: usize,
    /// Hop radius, 1 or 2.
    pub d: u32,
    pub include_center: bool,
    /// Treat every edge as bidirectional (degree and BFS both).
    pub undirected: bool,
}

impl BallOptions {
    pub fn new(top_v: usize, d: u32) -> Self {
        Self {
            top_v,
            d,
            include_center: false,
            undirected: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphBalls {
    pub centers: Vec<Element>,
    /// `balls[i]` belongs to `centers[i]`, sorted ascending.
    pub balls: Vec<Vec<Element>>,
}

/// Whitespace-separated `source target` pairs; `#` lines are comments.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Vec<(Element, Element)>> {
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let mut it = line.split_whitespace();
        let (Some(s), Some(t)) = (it.next(), it.next()) else {
            return Err(err("expected `source target`"));
        };
        let s = s.parse().map_err(|_| err("bad source vertex"))?;
        let t = t.parse().map_err(|_| err("bad target vertex"))?;
        edges.push((s, t));
    }
    Ok(edges)
}

pub fn load_graph_balls(path: impl AsRef<Path>, opts: BallOptions) -> Result<GraphBalls> {
    let edges = parse_edge_list(BufReader::new(File::open(path)?))?;
    balls_from_edges(&edges, opts)
}

/// Picks the `top_v` vertices of largest out-degree (ties by smaller id) and
/// returns the vertices within `d` hops of each.
pub fn balls_from_edges(edges: &[(Element, Element)], opts: BallOptions) -> Result<GraphBalls> {
    if opts.d == 0 {
        return Err(Error::InvalidArgument("radius must be at least 1".into()));
    }
    if opts.d > 2 {
        return Err(Error::Unsupported(format!(
            "radius {} (only 1 and 2)",
            opts.d
        )));
    }
    let mut adj: HashMap<Element, BTreeSet<Element>> = HashMap::new();
    for &(s, t) in edges {
        adj.entry(s).or_default().insert(t);
        if opts.undirected {
            adj.entry(t).or_default().insert(s);
        } else {
            adj.entry(t).or_default();
        }
    }
    let mut vertices: Vec<(usize, Element)> = adj.iter().map(|(&v, n)| (n.len(), v)).collect();
    vertices.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let centers: Vec<Element> = vertices.iter().take(opts.top_v).map(|&(_, v)| v).collect();

    let balls = centers
        .iter()
        .map(|&c| {
            let mut ball: BTreeSet<Element> = BTreeSet::new();
            let mut frontier: BTreeSet<Element> = BTreeSet::from([c]);
            let mut seen: BTreeSet<Element> = BTreeSet::from([c]);
            for _ in 0..opts.d {
                let mut next = BTreeSet::new();
                for v in &frontier {
                    for &u in &adj[v] {
                        ball.insert(u);
                        if seen.insert(u) {
                            next.insert(u);
                        }
                    }
                }
                frontier = next;
            }
            if opts.include_center {
                ball.insert(c);
            } else {
                ball.remove(&c);
            }
            ball.into_iter().collect()
        })
        .collect();
    Ok(GraphBalls { centers, balls })
}
