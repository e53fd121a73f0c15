//! Filter construction for two-channel orthogonal banks.
//!
//! Everything is derived from the analysis low-pass `h0` by the
//! quadrature-mirror index relations (1-based `n = 1..=L`):
//!
//! ```text
//! h1(n) = (-1)^n     h0(L+1-n)      analysis high-pass
//! g0(n) =            h0(L+1-n)      synthesis low-pass
//! g1(n) = (-1)^(n-1) h0(L+1-n)      synthesis high-pass
//! ```

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// 8-tap Daubechies scaling filter with four vanishing moments.
///
/// This is the common "db4" (2p-tap naming); some older texts use "D4" for
/// the 4-tap filter, which is `db2` here. Values come from a 60-digit
/// spectral-factorization run rounded to f64: the rounded taps satisfy
/// `sum = sqrt(2)` and unit energy exactly in f64, and double-shift
/// orthogonality to below 5e-18.
const DB4_H0: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];

const HAAR_H0: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

fn check_lowpass(h0: &[f64]) -> Result<()> {
    if h0.is_empty() {
        return Err(Error::InvalidFilter("empty low-pass filter".into()));
    }
    if !h0.len().is_multiple_of(2) {
        return Err(Error::InvalidFilter(format!(
            "low-pass filter length must be even, got {}",
            h0.len()
        )));
    }
    Ok(())
}

/// Analysis high-pass companion of `h0`: alternating-sign reversal,
/// `h1(n) = (-1)^n h0(L+1-n)`.
pub fn qmf_highpass(h0: &[f64]) -> Result<Vec<f64>> {
    check_lowpass(h0)?;
    let l = h0.len();
    Ok((1..=l)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * h0[l - n]
        })
        .collect())
}

/// Synthesis pair for `h0`: `g0` is `h0` reversed, `g1(n) = (-1)^(n-1) h0(L+1-n)`.
pub fn synthesis_filters(h0: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_lowpass(h0)?;
    let l = h0.len();
    let g0 = (1..=l).map(|n| h0[l - n]).collect();
    let g1 = (1..=l)
        .map(|n| {
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            sign * h0[l - n]
        })
        .collect();
    Ok((g0, g1))
}

/// The four FIR filters of a two-channel orthogonal wavelet system.
///
/// `h0`/`h1` are the analysis pair, `g0`/`g1` the synthesis pair; all four
/// have the same length and are tied to `h0` by the index relations above.
/// The transform in [`crate::wavelet`] consumes the analysis pair directly
/// and inverts through the adjoint, which for an orthonormal bank is the
/// exact inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    h0: Vec<f64>,
    h1: Vec<f64>,
    g0: Vec<f64>,
    g1: Vec<f64>,
    name: String,
}

impl FilterBank {
    /// Builds the full bank from an analysis low-pass filter.
    pub fn from_lowpass(name: impl Into<String>, h0: Vec<f64>) -> Result<Self> {
        let h1 = qmf_highpass(&h0)?;
        let (g0, g1) = synthesis_filters(&h0)?;
        Ok(Self {
            h0,
            h1,
            g0,
            g1,
            name: name.into(),
        })
    }

    /// The 8-tap Daubechies bank used throughout the detection pipeline.
    pub fn db4() -> Self {
        Self::from_lowpass("db4", DB4_H0.to_vec()).expect("static db4 taps are valid")
    }

    pub fn haar() -> Self {
        Self::from_lowpass("haar", HAAR_H0.to_vec()).expect("static haar taps are valid")
    }

    /// Filter length `L`, identical for all four filters.
    pub fn filter_len(&self) -> usize {
        self.h0.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn h0(&self) -> &[f64] {
        &self.h0
    }

    pub fn h1(&self) -> &[f64] {
        &self.h1
    }

    pub fn g0(&self) -> &[f64] {
        &self.g0
    }

    pub fn g1(&self) -> &[f64] {
        &self.g1
    }
}

/// Wavelet families selectable from configs and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletKind {
    Db4,
    Haar,
}

impl WaveletKind {
    pub fn bank(self) -> FilterBank {
        match self {
            WaveletKind::Db4 => FilterBank::db4(),
            WaveletKind::Haar => FilterBank::haar(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WaveletKind::Db4 => "db4",
            WaveletKind::Haar => "haar",
        }
    }
}

impl std::str::FromStr for WaveletKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "db4" => Ok(WaveletKind::Db4),
            "haar" => Ok(WaveletKind::Haar),
            other => Err(Error::InvalidConfig(format!(
                "unknown wavelet {other:?} (expected db4 or haar)"
            ))),
        }
    }
}
