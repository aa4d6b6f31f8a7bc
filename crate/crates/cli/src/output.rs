//! Report persistence: versioned JSON and full-precision CSV.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use log::info;
use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// `{:.16e}`: 17 significant digits, enough to round-trip every `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with a header row; every cell already formatted.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

pub fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, content)?;
            info!("wrote {}", p.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
