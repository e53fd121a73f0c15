//! Beat-level scoring: tolerance-window matching of detected against
//! reference beats, sensitivity, and per-record report rows.

use crate::detector::{detect, DetectorConfig};
use crate::error::{Error, Result};
use crate::wfdb::{read_annotations, read_signal_212, RecordHeader};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Default matching window between a detected peak and a reference beat.
pub const DEFAULT_TOLERANCE_S: f64 = 0.150;

/// Outcome of matching detected peaks against reference beats.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub true_positives: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    /// Matched pairs as (detected sample, reference sample).
    pub pairs: Vec<(usize, usize)>,
    pub tolerance_s: f64,
}

fn check_ascending(name: &str, list: &[usize]) -> Result<()> {
    if list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedInput(format!(
            "{name} indices must be ascending"
        )));
    }
    Ok(())
}

/// Greedy one-to-one matching: references are swept in order and each takes
/// the nearest unmatched detection within `round(tolerance_s * fs)` samples.
/// Unmatched references count as false negatives, unmatched detections as
/// false positives.
pub fn match_beats(
    detected: &[usize],
    reference: &[usize],
    fs: f64,
    tolerance_s: f64,
) -> Result<MatchResult> {
    if fs.is_nan() || fs <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "sampling rate must be positive, got {fs}"
        )));
    }
    if tolerance_s.is_nan() || tolerance_s < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be non-negative, got {tolerance_s}"
        )));
    }
    check_ascending("detected", detected)?;
    check_ascending("reference", reference)?;
    let tolerance = (tolerance_s * fs).round() as i64;
    let mut used = vec![false; detected.len()];
    let mut pairs = Vec::new();
    let mut lower = 0usize;
    for &r in reference {
        let r = r as i64;
        while lower < detected.len() && (detected[lower] as i64) < r - tolerance {
            lower += 1;
        }
        let mut best: Option<(usize, i64)> = None;
        for (i, &d) in detected.iter().enumerate().skip(lower) {
            let d = d as i64;
            if d > r + tolerance {
                break;
            }
            if used[i] {
                continue;
            }
            let dist = (d - r).abs();
            if best.is_none_or(|(_, b)| dist < b) {
                best = Some((i, dist));
            }
        }
        if let Some((i, _)) = best {
            used[i] = true;
            pairs.push((detected[i], r as usize));
        }
    }
    let true_positives = pairs.len();
    Ok(MatchResult {
        true_positives,
        false_negatives: reference.len() - true_positives,
        false_positives: detected.len() - true_positives,
        pairs,
        tolerance_s,
    })
}

/// Sensitivity in percent: `100 * TP / (TP + FN)`.
pub fn sensitivity(true_positives: usize, false_negatives: usize) -> Result<f64> {
    let denom = true_positives + false_negatives;
    if denom == 0 {
        return Err(Error::UndefinedSensitivity);
    }
    Ok(100.0 * true_positives as f64 / denom as f64)
}

/// Rounds half away from zero to two decimals, the convention used when
/// printing sensitivity columns.
pub fn round2(pct: f64) -> f64 {
    (pct * 100.0).round() / 100.0
}

/// One table row: reference beat count and detector score for a record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub record: String,
    pub total_beats: usize,
    pub true_positives: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    pub sensitivity_pct: f64,
}

/// Per-record rows plus the aggregate computed from summed counts (never
/// from averaged percentages).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub aggregate: EvalRow,
    pub tolerance_s: f64,
}

impl EvalReport {
    pub fn from_rows(rows: Vec<EvalRow>, tolerance_s: f64) -> Result<Self> {
        let tb: usize = rows.iter().map(|r| r.total_beats).sum();
        let tp: usize = rows.iter().map(|r| r.true_positives).sum();
        let fn_: usize = rows.iter().map(|r| r.false_negatives).sum();
        let fp: usize = rows.iter().map(|r| r.false_positives).sum();
        let aggregate = EvalRow {
            record: "All".into(),
            total_beats: tb,
            true_positives: tp,
            false_negatives: fn_,
            false_positives: fp,
            sensitivity_pct: round2(sensitivity(tp, fn_)?),
        };
        Ok(Self {
            rows,
            aggregate,
            tolerance_s,
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("record,tb,tp,fn,fp,se_pct\n");
        for row in self.rows.iter().chain(std::iter::once(&self.aggregate)) {
            out.push_str(&format!(
                "{},{},{},{},{},{:.2}\n",
                row.record,
                row.total_beats,
                row.true_positives,
                row.false_negatives,
                row.false_positives,
                row.sensitivity_pct
            ));
        }
        out
    }

    /// Aligned text table with the classical columns.
    pub fn to_table_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<8} {:>7} {:>7} {:>6} {:>6} {:>8}\n",
            "Record", "TB", "TP", "FN", "FP", "Se(%)"
        ));
        for row in self.rows.iter().chain(std::iter::once(&self.aggregate)) {
            out.push_str(&format!(
                "{:<8} {:>7} {:>7} {:>6} {:>6} {:>8.2}\n",
                row.record,
                row.total_beats,
                row.true_positives,
                row.false_negatives,
                row.false_positives,
                row.sensitivity_pct
            ));
        }
        out
    }
}

/// The three files that make up one record on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordFiles {
    pub header: PathBuf,
    pub data: PathBuf,
    pub annotations: PathBuf,
}

impl RecordFiles {
    /// `dir/name` -> `dir/name.hea`, `dir/name.dat`, `dir/name.atr`.
    pub fn from_base(base: &Path) -> Self {
        Self {
            header: base.with_extension("hea"),
            data: base.with_extension("dat"),
            annotations: base.with_extension("atr"),
        }
    }

    pub fn exist(&self) -> bool {
        self.header.is_file() && self.data.is_file() && self.annotations.is_file()
    }
}

/// Runs the detector on one record and scores it against the beat
/// annotations. `channel` falls back to the MLII lead, then channel 0.
pub fn evaluate_record(
    files: &RecordFiles,
    config: &DetectorConfig,
    tolerance_s: f64,
    channel: Option<usize>,
) -> Result<EvalRow> {
    let header = RecordHeader::read(&files.header)?;
    let channel = channel.unwrap_or_else(|| header.default_channel());
    let signal = read_signal_212(&files.data, &header, channel)?;
    let annotations = read_annotations(&files.annotations)?;
    let reference: Vec<usize> = annotations
        .iter()
        .filter(|a| a.is_beat)
        .map(|a| a.sample)
        .collect();
    let detection = detect(&signal, config)?;
    let m = match_beats(&detection.r_peaks(), &reference, signal.fs(), tolerance_s)?;
    Ok(EvalRow {
        record: header.record_name.clone(),
        total_beats: reference.len(),
        true_positives: m.true_positives,
        false_negatives: m.false_negatives,
        false_positives: m.false_positives,
        sensitivity_pct: round2(sensitivity(m.true_positives, m.false_negatives)?),
    })
}
