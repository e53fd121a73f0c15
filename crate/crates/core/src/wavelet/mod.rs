//! Two-channel orthogonal filter-bank DWT: filter derivation, multilevel
//! forward decomposition, exact inverse, and single-band reconstruction.
//!
//! All operations are pure functions of their inputs and safe to call from
//! multiple threads; [`Decomposition`] values are immutable once built.

mod filters;
mod transform;

pub use filters::{qmf_highpass, synthesis_filters, FilterBank, WaveletKind};
pub use transform::{dwt, dwt_step, idwt, reconstruct_band, BandSelector, Decomposition, ExtensionMode};
