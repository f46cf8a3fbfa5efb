//! Exit-sample files: one `#`-prefixed JSON manifest line, a CSV header, and
//! one row per sample.
//!
//! ```text
//! #{"command":"simulate","parameters":{...},"rng_version":...}
//! seed_index,exit_time,exit_side,steps
//! 0,7.2365,1,724
//! ```

use std::io::{self, BufRead, Write};

use serde_json::Value;
use thiserror::Error;

use super::ExitSample;

pub const CSV_COLUMNS: &str = "seed_index,exit_time,exit_side,steps";

#[derive(Debug, Error)]
pub enum SampleFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("sample file is empty")]
    Empty,
    #[error("first line is not a '#'-prefixed manifest")]
    MissingManifest,
    #[error("manifest is not valid JSON: {0}")]
    BadManifest(#[from] serde_json::Error),
    #[error("expected column header {CSV_COLUMNS:?}, found {0:?}")]
    BadHeader(String),
    #[error("line {line}: {reason}")]
    BadRow { line: usize, reason: String },
}

/// Rows only, in the exact byte form [`write_exit_csv`] uses.
pub fn format_rows(samples: &[ExitSample]) -> String {
    let mut out = String::with_capacity(32 * samples.len());
    for s in samples {
        out.push_str(&format!("{},{:?},{},{}\n", s.seed_index, s.exit_time, s.exit_side, s.steps));
    }
    out
}

pub fn write_exit_csv<W: Write>(mut w: W, manifest: &Value, samples: &[ExitSample]) -> io::Result<()> {
    writeln!(w, "#{}", serde_json::to_string(manifest).map_err(io::Error::other)?)?;
    writeln!(w, "{CSV_COLUMNS}")?;
    w.write_all(format_rows(samples).as_bytes())?;
    w.flush()
}

pub fn read_exit_csv<R: BufRead>(r: R) -> Result<(Value, Vec<ExitSample>), SampleFileError> {
    let mut lines = r.lines();
    let first = lines.next().ok_or(SampleFileError::Empty)??;
    let manifest_text = first.strip_prefix('#').ok_or(SampleFileError::MissingManifest)?;
    let manifest: Value = serde_json::from_str(manifest_text)?;
    let header = lines.next().ok_or(SampleFileError::BadHeader(String::new()))??;
    if header.trim() != CSV_COLUMNS {
        return Err(SampleFileError::BadHeader(header));
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 3;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| SampleFileError::BadRow { line: lineno, reason: reason.to_string() };
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let sample = ExitSample {
            seed_index: fields[0].parse().map_err(|_| bad("bad seed_index"))?,
            exit_time: fields[1].parse().map_err(|_| bad("bad exit_time"))?,
            exit_side: fields[2].parse().map_err(|_| bad("bad exit_side"))?,
            steps: fields[3].parse().map_err(|_| bad("bad steps"))?,
        };
        if !(sample.exit_time >= 0.0 && sample.exit_time.is_finite()) {
            return Err(bad("exit_time must be finite and nonnegative"));
        }
        if sample.exit_side != 1 && sample.exit_side != -1 {
            return Err(bad("exit_side must be 1 or -1"));
        }
        samples.push(sample);
    }
    Ok((manifest, samples))
}
