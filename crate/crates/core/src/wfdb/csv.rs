//! Plain-CSV signal I/O: one sample per line, LF newlines, '.' decimal
//! separator. An optional header row on the first line is skipped.

use crate::error::{Error, Result};
use crate::signal::Signal;
use std::io::Write;
use std::path::Path;

pub fn read_csv(path: &Path, fs: f64) -> Result<Signal> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(e, path))?;
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match trimmed.parse::<f64>() {
            Ok(v) => samples.push(v),
            Err(_) if idx == 0 => {} // header row
            Err(_) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("not a number: {trimmed:?}"),
                    path: Some(path.to_path_buf()),
                })
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptySignal(Some(path.to_path_buf())));
    }
    Signal::new(samples, fs)
}

/// Writes samples in the same one-per-line format `read_csv` accepts.
/// Values survive the round trip exactly.
pub fn write_csv(path: &Path, samples: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(samples.len() * 12);
    for v in samples {
        out.push_str(&format!("{v}"));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(e, path))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(e, path))?;
    Ok(())
}
