//! The naive buffering strategy, kept as a regression target.
//!
//! It stores up to ℓ pairs per function but keeps no threshold: a delete just
//! removes the pair and an insert only adds when the buffer has room. After
//! a full buffer drops a small incoming pair, the reported minimum is wrong.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::hashing::{Element, HashFamily};
use crate::sketch::HashedPair;
use crate::streams::{Op, StreamOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveBufferSketch {
    family: Arc<HashFamily>,
    ell: usize,
    buffers: Vec<Vec<HashedPair>>,
}

impl NaiveBufferSketch {
    pub fn new(family: Arc<HashFamily>, ell: usize) -> Self {
        Self {
            buffers: vec![Vec::new(); family.k()],
            family,
            ell,
        }
    }

    pub fn insert(&mut self, x: Element) {
        for (h, buf) in self.family.functions().iter().zip(self.buffers.iter_mut()) {
            let p = HashedPair::of(h, x);
            if buf.len() < self.ell && !buf.contains(&p) {
                buf.push(p);
            }
        }
    }

    pub fn delete(&mut self, x: Element) {
        for buf in &mut self.buffers {
            buf.retain(|p| p.element != x);
        }
    }

    pub fn apply(&mut self, op: StreamOp) {
        match op.op {
            Op::Insert => self.insert(op.element),
            Op::Delete => self.delete(op.element),
        }
    }

    /// Reported minimum of function `i`, if its buffer is nonempty.
    pub fn min(&self, i: usize) -> Option<HashedPair> {
        self.buffers[i].iter().min().copied()
    }
}

/// Shortest legal single-set stream over `universe` after which the naive
/// sketch (function 0) reports a minimum that differs from the true one.
/// Breadth-first over at most `max_len` operations; ties go to the sequence
/// that is first when each step tries the universe in the given order.
pub fn find_naive_witness(
    family: &Arc<HashFamily>,
    ell: usize,
    universe: &[Element],
    max_len: usize,
) -> Option<Vec<StreamOp>> {
    let h = family.get(0);
    let mut queue: VecDeque<(Vec<StreamOp>, Vec<Element>, NaiveBufferSketch)> = VecDeque::new();
    queue.push_back((
        Vec::new(),
        Vec::new(),
        NaiveBufferSketch::new(family.clone(), ell),
    ));
    while let Some((ops, set, naive)) = queue.pop_front() {
        if ops.len() == max_len {
            continue;
        }
        for &x in universe {
            let op = if set.contains(&x) {
                StreamOp::delete(0, x)
            } else {
                StreamOp::insert(0, x)
            };
            let mut set = set.clone();
            match op.op {
                Op::Insert => set.push(x),
                Op::Delete => set.retain(|&y| y != x),
            }
            let mut naive = naive.clone();
            naive.apply(op);
            let mut ops = ops.clone();
            ops.push(op);
            let truth = set.iter().map(|&y| HashedPair::of(h, y)).min();
            if let (Some(t), Some(n)) = (truth, naive.min(0)) {
                if t != n {
                    return Some(ops);
                }
            }
            queue.push_back((ops, set, naive));
        }
    }
    None
}
