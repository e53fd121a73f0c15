//! Cross-correlation scoring of reconstructed detail bands against the ECG,
//! and selection of the band that tracks the QRS best.

use crate::error::{Error, Result};
use crate::preprocess::remove_baseline;
use crate::signal::Signal;
use crate::wavelet::{dwt, reconstruct_band, BandSelector, Decomposition, ExtensionMode, FilterBank};
use serde::Serialize;

/// Zero-lag correlation of one detail band with the reference signal,
/// as a percentage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandScore {
    pub level: usize,
    pub score: f64,
}

/// What the band reconstructions are correlated against.
///
/// Scoring against the baseline-removed signal is the default: drift lives
/// in the approximation band and would otherwise depress every detail
/// score. `Raw` is available for comparison against published tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreReference {
    BaselineRemoved,
    Raw,
}

/// Zero-lag normalized cross-correlation scaled to percent:
/// `100 * sum(x*y) / sqrt(sum(x^2) * sum(y^2))`.
///
/// The result is clamped to ±100 so rounding can never escape the
/// Cauchy-Schwarz bound.
pub fn cross_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::ShapeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut dot = 0.0;
    let mut ex = 0.0;
    let mut ey = 0.0;
    for (a, b) in x.iter().zip(y) {
        dot += a * b;
        ex += a * a;
        ey += b * b;
    }
    if ex == 0.0 || ey == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "all-zero operand in cross-correlation".into(),
        ));
    }
    Ok((100.0 * dot / (ex * ey).sqrt()).clamp(-100.0, 100.0))
}

/// Scores every detail band of `decomp` against `reference` and returns
/// `(best level, all scores)`. Ties break toward the lower (wider-band)
/// level.
pub fn rank_bands(decomp: &Decomposition, reference: &[f64]) -> Result<(usize, Vec<BandScore>)> {
    let mut scores = Vec::with_capacity(decomp.levels());
    let mut best = 1;
    let mut best_score = f64::NEG_INFINITY;
    for level in 1..=decomp.levels() {
        let rec = reconstruct_band(decomp, BandSelector::Detail(level))?;
        let score = match cross_correlation(reference, &rec) {
            Ok(s) => s,
            // A silent band carries no QRS information; score it at the
            // bottom instead of failing the whole ranking.
            Err(Error::UndefinedCorrelation(_)) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        if score > best_score {
            best_score = score;
            best = level;
        }
        scores.push(BandScore {
            level,
            score: if score.is_finite() { score } else { 0.0 },
        });
    }
    Ok((best, scores))
}

/// Decomposes `x`, reconstructs each detail band at the original rate, and
/// scores each against the reference signal.
pub fn select_band(
    x: &Signal,
    levels: usize,
    bank: &FilterBank,
    reference: ScoreReference,
) -> Result<(usize, Vec<BandScore>)> {
    let work = match reference {
        ScoreReference::BaselineRemoved => {
            remove_baseline(x, levels, bank, ExtensionMode::Periodic)?
        }
        ScoreReference::Raw => x.clone(),
    };
    let decomp = dwt(work.samples(), levels, bank, ExtensionMode::Periodic)?;
    rank_bands(&decomp, work.samples())
}
