//! Uniformly sampled single-channel waveform, the carrier between all
//! pipeline stages.

use crate::error::{Error, Result};

/// A real-valued signal with its sampling rate and an optional label
/// (record or lead name). Values are millivolts for ECG channels and
/// dimensionless for synthetic inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
    label: Option<String>,
}

impl Signal {
    /// Wraps `samples` at sampling rate `fs` (Hz). `fs` must be positive
    /// and finite.
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if fs.is_nan() || fs <= 0.0 || fs.is_infinite() {
            return Err(Error::InvalidConfig(format!(
                "sampling rate must be positive, got {fs}"
            )));
        }
        Ok(Self {
            samples,
            fs,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Same sampling rate and label, new sample values.
    pub(crate) fn like(&self, samples: Vec<f64>) -> Self {
        Self {
            samples,
            fs: self.fs,
            label: self.label.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_fs() {
        assert!(Signal::new(vec![1.0], 0.0).is_err());
        assert!(Signal::new(vec![1.0], -360.0).is_err());
        assert!(Signal::new(vec![1.0], f64::NAN).is_err());
    }

    #[test]
    fn carries_label() {
        let s = Signal::new(vec![1.0, 2.0], 360.0).unwrap().with_label("MLII");
        assert_eq!(s.label(), Some("MLII"));
        assert_eq!(s.len(), 2);
        assert!((s.duration_s() - 2.0 / 360.0).abs() < 1e-15);
    }
}
