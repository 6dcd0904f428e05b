//! Stream files: UTF-8 text, one op per line, `set_id<TAB>element<TAB>op`
//! with `op` either `+1` or `-1`. Blank lines and lines starting with `#`
//! are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Op, StreamOp};
use crate::error::{Error, Result};

pub fn format_stream(ops: &[StreamOp]) -> String {
    let mut out = String::with_capacity(ops.len() * 16);
    for op in ops {
        let _ = writeln!(out, "{}\t{}\t{}", op.set_id, op.element, op.op);
    }
    out
}

pub fn parse_stream(text: &str) -> Result<Vec<StreamOp>> {
    let mut ops = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [set_id, element, op] = fields[..] else {
            return Err(err("expected three tab-separated fields"));
        };
        let set_id = set_id.parse().map_err(|_| err("bad set id"))?;
        let element = element.parse().map_err(|_| err("bad element"))?;
        let op = match op {
            "+1" | "1" => Op::Insert,
            "-1" | "\u{2212}1" => Op::Delete,
            _ => return Err(err("op must be +1 or -1")),
        };
        ops.push(StreamOp {
            set_id,
            element,
            op,
        });
    }
    Ok(ops)
}

pub fn read_stream(path: impl AsRef<Path>) -> Result<Vec<StreamOp>> {
    parse_stream(&fs::read_to_string(path)?)
}

pub fn write_stream(path: impl AsRef<Path>, ops: &[StreamOp]) -> Result<()> {
    fs::write(path, format_stream(ops))?;
    Ok(())
}
