//! Wavelet filter-bank toolkit for ECG work.
//!
//! The pipeline runs in five stages, each usable on its own:
//!
//! 1. [`wavelet`] - db4/Haar filter banks, multilevel DWT with exact
//!    reconstruction, and single-band reconstruction at the original rate;
//! 2. [`preprocess`] - baseline-wander removal by cancelling the level-8
//!    approximation, plus dyadic band-frequency tables;
//! 3. [`correlation`] - cross-correlation ranking of detail bands against
//!    the ECG to pick the detection band;
//! 4. [`detector`] - hard-threshold R-peak detection on the reconstructed
//!    band with QRS grouping and refractory pruning;
//! 5. [`eval`] - beat matching against reference annotations and
//!    sensitivity reporting, with [`synth`] providing ground-truthed
//!    synthetic records.
//!
//! [`wfdb`] reads MIT-BIH style headers, format-212 signals and annotation
//! files bit-exactly. Everything is pure and thread-safe; no globals.

pub mod correlation;
pub mod detector;
pub mod error;
pub mod eval;
pub mod preprocess;
pub mod signal;
pub mod synth;
pub mod wavelet;
pub mod wfdb;

pub use error::{Error, Result};
pub use signal::Signal;

pub use correlation::{cross_correlation, select_band, BandScore, ScoreReference};
pub use detector::{detect, DetectionResult, DetectorConfig, QrsEvent};
pub use eval::{evaluate_record, match_beats, sensitivity, EvalReport, EvalRow};
pub use preprocess::{band_frequencies, remove_baseline, Band, BandRange};
pub use synth::{synth_ecg, SynthSpec};
pub use wavelet::{
    dwt, dwt_step, idwt, qmf_highpass, reconstruct_band, synthesis_filters, BandSelector,
    Decomposition, ExtensionMode, FilterBank, WaveletKind,
};
