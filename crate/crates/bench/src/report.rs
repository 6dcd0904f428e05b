//! CSV/JSON emission. Every CSV starts with a `# bmh <command> v<N>` schema
//! line followed by a header row.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use bmh_core::Result;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// A result row with a fixed, versioned column list.
pub trait Row: Serialize {
    const COLUMNS: &'static [&'static str];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn schema_line(command: &str) -> String {
    format!("bmh {command} v{SCHEMA_VERSION}")
}

pub fn render<T: Row>(command: &str, rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut out = format!("# {}\n", schema_line(command)).into_bytes();
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut out);
            w.write_record(T::COLUMNS).map_err(io::Error::from)?;
            for row in rows {
                w.serialize(row).map_err(io::Error::from)?;
            }
            w.flush()?;
            drop(w);
            Ok(out)
        }
        Format::Json => {
            let doc = serde_json::json!({
                "schema": schema_line(command),
                "columns": T::COLUMNS,
                "rows": rows,
            });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(io::Error::other)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Writes to `out`, or to stdout when `out` is `None`.
pub fn emit<T: Row>(command: &str, rows: &[T], format: Format, out: Option<&Path>) -> Result<()> {
    let bytes = render(command, rows, format)?;
    match out {
        Some(path) => File::create(path)?.write_all(&bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
