//! Threshold R-peak detector.
//!
//! Pipeline: baseline removal, decomposition, reconstruction of one detail
//! band (`yc`), hard threshold at a fraction of `max |yc|`, grouping of
//! supra-threshold indices into QRS spans, peak localization in the
//! baseline-removed signal, and refractory pruning.
//!
//! Thresholding uses `|yc|` rather than signed values so records with
//! negative-dominant QRS deflections detect identically; on
//! positive-dominant records the rule reduces to the plain maximum. All
//! time constants are seconds, converted with `round(s * fs)`, so sampling
//! rates other than 360 Hz behave sensibly.

use crate::correlation::{rank_bands, BandScore};
use crate::error::{Error, Result};
use crate::preprocess::remove_baseline;
use crate::signal::Signal;
use crate::wavelet::{dwt, reconstruct_band, BandSelector, ExtensionMode, WaveletKind};
use serde::Serialize;

/// Fixed detail level versus per-record cross-correlation ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandMode {
    Fixed,
    Auto,
}

/// What to do with two peaks inside one refractory window.
///
/// `KeepLarger` keeps the larger-magnitude peak (deterministic and
/// strictly better on synthetic ground truth); `KeepEarlier` reproduces
/// the plain eliminate-the-later-peak rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RefractoryPolicy {
    KeepLarger,
    KeepEarlier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorConfig {
    /// Threshold as a fraction of `max |yc|`.
    pub threshold_ratio: f64,
    /// Supra-threshold indices closer than this belong to one QRS.
    pub min_qrs_gap_s: f64,
    /// Minimum spacing between kept R peaks.
    pub refractory_s: f64,
    /// Peak search extends this far beyond each span edge.
    pub peak_search_pad_s: f64,
    /// Detail level used for `yc` when `band_mode` is `Fixed`.
    pub level: usize,
    /// Decomposition depth.
    pub levels: usize,
    pub band_mode: BandMode,
    pub wavelet: WaveletKind,
    pub refractory_policy: RefractoryPolicy,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            threshold_ratio: 0.15,
            min_qrs_gap_s: 0.100,
            refractory_s: 0.200,
            peak_search_pad_s: 0.050,
            level: 4,
            levels: 8,
            band_mode: BandMode::Fixed,
            wavelet: WaveletKind::Db4,
            refractory_policy: RefractoryPolicy::KeepLarger,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threshold_ratio.is_nan() || self.threshold_ratio <= 0.0 || self.threshold_ratio >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "threshold_ratio must be in (0, 1), got {}",
                self.threshold_ratio
            )));
        }
        if self.min_qrs_gap_s.is_nan() || self.min_qrs_gap_s <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "min_qrs_gap_s must be positive, got {}",
                self.min_qrs_gap_s
            )));
        }
        if self.refractory_s < self.min_qrs_gap_s {
            return Err(Error::InvalidConfig(format!(
                "refractory_s ({}) must be at least min_qrs_gap_s ({})",
                self.refractory_s, self.min_qrs_gap_s
            )));
        }
        if self.peak_search_pad_s < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "peak_search_pad_s must be non-negative, got {}",
                self.peak_search_pad_s
            )));
        }
        if self.levels == 0 {
            return Err(Error::InvalidConfig("levels must be at least 1".into()));
        }
        if self.level == 0 || self.level > self.levels {
            return Err(Error::InvalidConfig(format!(
                "detail level {} out of range 1..={}",
                self.level, self.levels
            )));
        }
        Ok(())
    }
}

/// One detected QRS complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QrsEvent {
    /// First supra-threshold sample of the span.
    pub start: usize,
    /// Last supra-threshold sample of the span.
    pub end: usize,
    /// Location of the absolute maximum of the filtered ECG near the span.
    pub r_peak: usize,
    /// Filtered-signal value at `r_peak` (signed).
    pub peak_amplitude: f64,
}

/// Detection output plus the intermediate artifacts for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub events: Vec<QrsEvent>,
    /// The reconstructed detail band detection ran on, at the original rate.
    pub yc: Vec<f64>,
    pub threshold: f64,
    pub fs: f64,
    /// True when `yc` was identically zero and no threshold exists.
    pub degenerate: bool,
    /// Detail level actually used (differs from `config.level` in auto mode).
    pub selected_level: usize,
    /// Full score table when band selection ran in auto mode.
    pub band_scores: Option<Vec<BandScore>>,
    pub config: DetectorConfig,
}

impl DetectionResult {
    /// R-peak sample indices, ascending.
    pub fn r_peaks(&self) -> Vec<usize> {
        self.events.iter().map(|e| e.r_peak).collect()
    }
}

/// Supra-threshold index set of `yc` with the threshold that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCrossings {
    pub threshold: f64,
    pub indices: Vec<usize>,
    /// Set when `yc` is identically zero: the threshold is 0 and the index
    /// set empty rather than all samples.
    pub degenerate: bool,
}

/// Hard threshold at `ratio * max |yc|`; returns all indices with
/// `|yc| >= threshold`, ascending.
pub fn threshold_indices(yc: &[f64], ratio: f64) -> Result<ThresholdCrossings> {
    if yc.is_empty() {
        return Err(Error::EmptySignal(None));
    }
    if ratio.is_nan() || ratio <= 0.0 || ratio >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "threshold ratio must be in (0, 1), got {ratio}"
        )));
    }
    let max = yc.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Ok(ThresholdCrossings {
            threshold: 0.0,
            indices: Vec::new(),
            degenerate: true,
        });
    }
    let threshold = ratio * max;
    let indices = yc
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() >= threshold)
        .map(|(i, _)| i)
        .collect();
    Ok(ThresholdCrossings {
        threshold,
        indices,
        degenerate: false,
    })
}

/// Merges ascending indices into spans: consecutive indices closer than
/// `round(min_gap_s * fs)` samples belong to the same QRS. The span count
/// is the detector's QRS count before refractory pruning.
pub fn group_events(indices: &[usize], fs: f64, min_gap_s: f64) -> Result<Vec<(usize, usize)>> {
    if fs.is_nan() || fs <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "sampling rate must be positive, got {fs}"
        )));
    }
    if min_gap_s.is_nan() || min_gap_s <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "min_gap_s must be positive, got {min_gap_s}"
        )));
    }
    let gap = (min_gap_s * fs).round() as usize;
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for &i in indices {
        match spans.last_mut() {
            Some((_, end)) if i >= *end && i - *end < gap => *end = i,
            _ => spans.push((i, i)),
        }
    }
    Ok(spans)
}

/// Locates one R peak per span as the argmax of `|filtered|` over the span
/// extended by `pad_s` on both sides, then sweeps left to right removing
/// peaks inside the refractory window of the previously kept peak.
pub fn locate_r_peaks(
    spans: &[(usize, usize)],
    filtered: &[f64],
    fs: f64,
    pad_s: f64,
    refractory_s: f64,
    policy: RefractoryPolicy,
) -> Result<Vec<QrsEvent>> {
    if fs.is_nan() || fs <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "sampling rate must be positive, got {fs}"
        )));
    }
    let pad = (pad_s * fs).round() as usize;
    let refractory = (refractory_s * fs).round() as usize;
    let n = filtered.len();
    let mut events: Vec<QrsEvent> = Vec::with_capacity(spans.len());
    for &(start, end) in spans {
        if start > end || end >= n {
            return Err(Error::SpanOutOfBounds {
                start,
                end,
                len: n,
            });
        }
        let lo = start.saturating_sub(pad);
        let hi = (end + pad).min(n - 1);
        let mut r_peak = lo;
        let mut best = filtered[lo].abs();
        for (i, v) in filtered.iter().enumerate().take(hi + 1).skip(lo + 1) {
            let mag = v.abs();
            if mag > best {
                best = mag;
                r_peak = i;
            }
        }
        let event = QrsEvent {
            start,
            end,
            r_peak,
            peak_amplitude: filtered[r_peak],
        };
        match events.last_mut() {
            Some(last) if event.r_peak < last.r_peak + refractory => {
                if policy == RefractoryPolicy::KeepLarger
                    && event.peak_amplitude.abs() > last.peak_amplitude.abs()
                {
                    *last = event;
                }
            }
            _ => events.push(event),
        }
    }
    Ok(events)
}

/// Runs the full detection pipeline on `x`.
pub fn detect(x: &Signal, config: &DetectorConfig) -> Result<DetectionResult> {
    config.validate()?;
    let min_len = 1usize
        .checked_shl(config.levels as u32)
        .unwrap_or(usize::MAX);
    if x.len() < min_len {
        return Err(Error::TooShort {
            len: x.len(),
            min: min_len,
        });
    }
    let bank = config.wavelet.bank();
    let filtered = remove_baseline(x, config.levels, &bank, ExtensionMode::Periodic)?;
    let decomp = dwt(filtered.samples(), config.levels, &bank, ExtensionMode::Periodic)?;
    let (selected_level, band_scores) = match config.band_mode {
        BandMode::Fixed => (config.level, None),
        BandMode::Auto => {
            let (best, scores) = rank_bands(&decomp, filtered.samples())?;
            (best, Some(scores))
        }
    };
    let yc = reconstruct_band(&decomp, BandSelector::Detail(selected_level))?;
    let crossings = threshold_indices(&yc, config.threshold_ratio)?;
    let spans = group_events(&crossings.indices, x.fs(), config.min_qrs_gap_s)?;
    let events = locate_r_peaks(
        &spans,
        filtered.samples(),
        x.fs(),
        config.peak_search_pad_s,
        config.refractory_s,
        config.refractory_policy,
    )?;
    Ok(DetectionResult {
        events,
        yc,
        threshold: crossings.threshold,
        fs: x.fs(),
        degenerate: crossings.degenerate,
        selected_level,
        band_scores,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_worked_example() {
        let t = threshold_indices(&[0.0, 0.2, 1.0, 0.1], 0.15).unwrap();
        assert_eq!(t.threshold, 0.15);
        assert_eq!(t.indices, vec![1, 2]);
        assert!(!t.degenerate);
    }

    #[test]
    fn threshold_uses_magnitude() {
        let t = threshold_indices(&[-1.0, 0.05], 0.15).unwrap();
        assert_eq!(t.threshold, 0.15);
        assert_eq!(t.indices, vec![0]);
    }

    #[test]
    fn threshold_is_scale_invariant() {
        let yc = [0.1, -0.9, 0.02, 0.5, -0.13];
        let base = threshold_indices(&yc, 0.15).unwrap();
        for scale in [0.25, 4.0, 1024.0] {
            let scaled: Vec<f64> = yc.iter().map(|v| v * scale).collect();
            let t = threshold_indices(&scaled, 0.15).unwrap();
            assert_eq!(t.indices, base.indices, "scale {scale}");
        }
    }

    #[test]
    fn threshold_degenerate_and_errors() {
        let t = threshold_indices(&[0.0, 0.0, 0.0], 0.15).unwrap();
        assert!(t.degenerate);
        assert!(t.indices.is_empty());
        assert_eq!(t.threshold, 0.0);
        assert!(threshold_indices(&[], 0.15).is_err());
        assert!(threshold_indices(&[1.0], 0.0).is_err());
        assert!(threshold_indices(&[1.0], 1.0).is_err());
    }

    #[test]
    fn grouping_worked_examples() {
        // Two clusters 190 samples apart stay separate at fs = 360.
        let mut indices: Vec<usize> = (1000..=1010).collect();
        indices.extend(1200..=1205);
        let spans = group_events(&indices, 360.0, 0.1).unwrap();
        assert_eq!(spans, vec![(1000, 1010), (1200, 1205)]);

        // A 20-sample gap is inside the 36-sample merge radius.
        let spans = group_events(&[500, 520], 360.0, 0.1).unwrap();
        assert_eq!(spans, vec![(500, 520)]);

        // Merge radius follows round(min_gap_s * fs): 25 samples at 250 Hz.
        let spans = group_events(&[0, 24, 48], 250.0, 0.1).unwrap();
        assert_eq!(spans, vec![(0, 48)]);
        let spans = group_events(&[0, 25], 250.0, 0.1).unwrap();
        assert_eq!(spans, vec![(0, 0), (25, 25)]);
    }

    #[test]
    fn grouping_handles_empty_input() {
        assert!(group_events(&[], 360.0, 0.1).unwrap().is_empty());
    }

    #[test]
    fn peak_location_on_a_single_bump() {
        let mut x = vec![0.0; 200];
        for (i, v) in x.iter_mut().enumerate().take(110).skip(90) {
            let t = (i as f64 - 100.0) / 4.0;
            *v = (-0.5 * t * t).exp();
        }
        let events =
            locate_r_peaks(&[(95, 105)], &x, 360.0, 0.05, 0.2, RefractoryPolicy::KeepLarger)
                .unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].r_peak, 100);
        assert!(events[0].peak_amplitude > 0.99);
    }

    #[test]
    fn inverted_qrs_peaks_at_magnitude_maximum() {
        let mut x = vec![0.0; 100];
        for (i, v) in x.iter_mut().enumerate().take(60).skip(40) {
            let t = (i as f64 - 50.0) / 3.0;
            *v = -(-0.5 * t * t).exp();
        }
        let events =
            locate_r_peaks(&[(45, 55)], &x, 360.0, 0.02, 0.2, RefractoryPolicy::KeepLarger)
                .unwrap();
        assert_eq!(events[0].r_peak, 50);
        assert!(events[0].peak_amplitude < 0.0);
    }

    #[test]
    fn refractory_keeps_the_larger_peak() {
        // Two spans 50 ms apart at 360 Hz; the second peak is larger.
        let mut x = vec![0.0; 400];
        x[100] = 1.0;
        x[118] = 2.0;
        let spans = [(99, 101), (117, 119)];
        let events =
            locate_r_peaks(&spans, &x, 360.0, 0.0, 0.2, RefractoryPolicy::KeepLarger).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].r_peak, 118);

        let events =
            locate_r_peaks(&spans, &x, 360.0, 0.0, 0.2, RefractoryPolicy::KeepEarlier).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].r_peak, 100);
    }

    #[test]
    fn span_bounds_are_checked() {
        let x = vec![0.0; 10];
        assert!(matches!(
            locate_r_peaks(&[(5, 12)], &x, 360.0, 0.0, 0.2, RefractoryPolicy::KeepLarger),
            Err(Error::SpanOutOfBounds { .. })
        ));
    }

    #[test]
    fn config_invariants_are_enforced() {
        let mut cfg = DetectorConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.threshold_ratio = 1.0;
        assert!(cfg.validate().is_err());
        cfg = DetectorConfig {
            refractory_s: 0.05,
            ..DetectorConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg = DetectorConfig {
            level: 9,
            ..DetectorConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn detect_rejects_short_signals() {
        let x = Signal::new(vec![0.0; 100], 360.0).unwrap();
        assert!(matches!(
            detect(&x, &DetectorConfig::default()),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn flat_signal_detects_nothing_and_flags_degenerate() {
        let x = Signal::new(vec![0.0; 1024], 360.0).unwrap();
        let r = detect(&x, &DetectorConfig::default()).unwrap();
        assert!(r.events.is_empty());
        assert!(r.degenerate);
        assert_eq!(r.threshold, 0.0);
    }

    #[test]
    fn power_of_two_scaling_gives_identical_peaks() {
        // Scaling by powers of two is exact in binary floating point, so
        // every stage scales verbatim and the relative threshold picks the
        // same index set.
        let fs = 360.0;
        let n = 4096;
        let mut samples = vec![0.0; n];
        for beat in 0..10 {
            let center = 200 + beat * 360;
            for (i, v) in samples
                .iter_mut()
                .enumerate()
                .take(center + 31)
                .skip(center - 30)
            {
                let t = (i as f64 - center as f64) / 7.0;
                *v += (1.0 - t * t) * (-0.5 * t * t).exp();
            }
        }
        let x = Signal::new(samples.clone(), fs).unwrap();
        let base = detect(&x, &DetectorConfig::default()).unwrap();
        assert!(!base.events.is_empty());
        for k in [-6i32, -2, 3, 9] {
            let scale = (2.0f64).powi(k);
            let scaled =
                Signal::new(samples.iter().map(|v| v * scale).collect(), fs).unwrap();
            let r = detect(&scaled, &DetectorConfig::default()).unwrap();
            assert_eq!(r.r_peaks(), base.r_peaks(), "scale 2^{k}");
        }
    }
}
