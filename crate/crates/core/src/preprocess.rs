//! Baseline-wander removal by approximation-band cancellation, plus the
//! dyadic band-frequency bookkeeping for a J-level decomposition.
//!
//! Removing the level-8 approximation acts as a high-pass with ideal cutoff
//! `f_max / 256`; with the MIT-BIH content bandwidth convention
//! (`f_max = 130`) that is 0.507 Hz, just above the baseline-wander range.
//! Note the published band table uses that nominal `f_max`, while the
//! filters themselves halve the true Nyquist `fs / 2`; [`band_frequencies`]
//! takes whichever `f_max` the caller wants, and the CLI reports both.

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::wavelet::{dwt, reconstruct_band, BandSelector, ExtensionMode, FilterBank};
use serde::Serialize;

/// Decomposition depth used by the detection pipeline unless overridden.
pub const DEFAULT_LEVELS: usize = 8;

/// Nominal ECG content bandwidth (Hz) used for the published band table.
pub const DEFAULT_FMAX_HZ: f64 = 130.0;

/// A band of a J-level decomposition, for frequency bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    /// Detail level j (1 = finest).
    Detail(usize),
    /// Approximation at level J.
    Approx(usize),
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Band::Detail(j) => write!(f, "d{j}"),
            Band::Approx(j) => write!(f, "a{j}"),
        }
    }
}

/// Ideal frequency range covered by one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandRange {
    pub band: Band,
    pub lo_hz: f64,
    pub hi_hz: f64,
}

/// Dyadic band edges: detail j spans `f_max/2^j .. f_max/2^(j-1)`, the
/// approximation at level J spans `0 .. f_max/2^J`.
pub fn band_frequencies(band: Band, f_max: f64) -> Result<BandRange> {
    if f_max.is_nan() || f_max <= 0.0 || f_max.is_infinite() {
        return Err(Error::Domain(format!(
            "f_max must be positive, got {f_max}"
        )));
    }
    let level = match band {
        Band::Detail(j) | Band::Approx(j) => j,
    };
    if level == 0 || level > 60 {
        return Err(Error::Domain(format!("band level {level} out of range")));
    }
    let edge = f_max / (1u64 << level) as f64;
    let (lo_hz, hi_hz) = match band {
        Band::Detail(_) => (edge, 2.0 * edge),
        Band::Approx(_) => (0.0, edge),
    };
    Ok(BandRange { band, lo_hz, hi_hz })
}

/// All rows of the band table for a J-level decomposition: d1..dJ then aJ.
pub fn band_table(levels: usize, f_max: f64) -> Result<Vec<BandRange>> {
    let mut rows = Vec::with_capacity(levels + 1);
    for j in 1..=levels {
        rows.push(band_frequencies(Band::Detail(j), f_max)?);
    }
    rows.push(band_frequencies(Band::Approx(levels), f_max)?);
    Ok(rows)
}

/// Formats a band edge the way the band table prints it: truncated (not
/// rounded) to three decimals, trailing zeros trimmed. Truncation is what
/// turns 130/256 = 0.5078125 into "0.507".
pub fn format_band_edge(hz: f64) -> String {
    let truncated = (hz * 1000.0).trunc() / 1000.0;
    let mut s = format!("{truncated:.3}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

/// Removes baseline wander by decomposing `levels` deep and reconstructing
/// from the details only. Output has the input's length and alignment.
pub fn remove_baseline(
    x: &Signal,
    levels: usize,
    bank: &FilterBank,
    mode: ExtensionMode,
) -> Result<Signal> {
    let d = dwt(x.samples(), levels, bank, mode)?;
    let filtered = reconstruct_band(&d, BandSelector::AllDetails)?;
    Ok(x.like(filtered))
}
