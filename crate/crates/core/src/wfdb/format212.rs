//! Format-212 signal decoding: two 12-bit two's-complement samples packed
//! into every 3-byte frame.
//!
//! Byte layout per frame: sample A's low 8 bits in byte 0, A's high 4 bits
//! in the low nibble of byte 1, sample B's high 4 bits in the high nibble
//! of byte 1, B's low 8 bits in byte 2. Successive samples cycle through
//! the record's signals, so a two-signal record stores (ch0, ch1) per frame.

use super::header::RecordHeader;
use crate::error::{Error, Result};
use crate::signal::Signal;
use std::path::Path;

/// Sign-extends a 12-bit value.
fn extend12(v: u16) -> i16 {
    if v & 0x800 != 0 {
        (v | 0xF000) as i16
    } else {
        v as i16
    }
}

/// Decodes one 3-byte frame into its two 12-bit samples.
pub fn decode_frame(frame: [u8; 3]) -> (i16, i16) {
    let a = ((frame[1] as u16 & 0x0F) << 8) | frame[0] as u16;
    let b = ((frame[1] as u16 & 0xF0) << 4) | frame[2] as u16;
    (extend12(a), extend12(b))
}

/// Packs two 12-bit samples into a frame. Exists for test fixtures; values
/// outside the 12-bit range are masked.
pub fn encode_frame(a: i16, b: i16) -> [u8; 3] {
    let a = a as u16 & 0x0FFF;
    let b = b as u16 & 0x0FFF;
    [
        (a & 0xFF) as u8,
        ((a >> 8) as u8 & 0x0F) | (((b >> 8) as u8 & 0x0F) << 4),
        (b & 0xFF) as u8,
    ]
}

/// Decodes a packed sample stream into raw adu values, all channels
/// interleaved. `expected` caps the count when nonzero; otherwise the whole
/// buffer is decoded. A trailing 2-byte fragment decodes as one final
/// sample (some writers drop the pad byte).
pub fn decode_stream(bytes: &[u8], expected: usize) -> Result<Vec<i16>> {
    let capacity = if expected > 0 {
        expected
    } else {
        bytes.len() / 3 * 2 + usize::from(bytes.len() % 3 == 2)
    };
    let mut out = Vec::with_capacity(capacity);
    let mut offset = 0usize;
    while out.len() < capacity {
        let remaining = capacity - out.len();
        match bytes.len() - offset {
            0 => break,
            1 => {
                return Err(Error::Truncated {
                    offset: offset as u64,
                    path: None,
                })
            }
            2 if remaining == 1 => {
                let (a, _) = decode_frame([bytes[offset], bytes[offset + 1], 0]);
                out.push(a);
                offset += 2;
            }
            2 => {
                return Err(Error::Truncated {
                    offset: offset as u64,
                    path: None,
                })
            }
            _ => {
                let (a, b) = decode_frame([bytes[offset], bytes[offset + 1], bytes[offset + 2]]);
                out.push(a);
                if remaining > 1 {
                    out.push(b);
                }
                offset += 3;
            }
        }
    }
    if expected > 0 && out.len() < expected {
        return Err(Error::Truncated {
            offset: offset as u64,
            path: None,
        });
    }
    Ok(out)
}

/// Reads one channel of a format-212 .dat file and converts adu to
/// physical units via `(adu - baseline) / gain`.
pub fn read_signal_212(path: &Path, header: &RecordHeader, channel: usize) -> Result<Signal> {
    if channel >= header.n_signals {
        return Err(Error::ChannelOutOfRange {
            channel,
            n_signals: header.n_signals,
        });
    }
    let spec = &header.signals[channel];
    if spec.format != 212 {
        return Err(Error::UnsupportedFormat(spec.format));
    }
    let bytes = std::fs::read(path).map_err(|e| Error::io(e, path))?;
    let expected = header.n_samples * header.n_signals;
    let adus = decode_stream(&bytes, expected).map_err(|e| match e {
        Error::Truncated { offset, .. } => Error::Truncated {
            offset,
            path: Some(path.to_path_buf()),
        },
        other => other,
    })?;
    let samples: Vec<f64> = adus
        .chunks(header.n_signals)
        .filter_map(|frame| frame.get(channel))
        .map(|&adu| (adu as f64 - spec.baseline as f64) / spec.gain)
        .collect();
    let mut label = header.record_name.clone();
    if let Some(desc) = &spec.description {
        label.push('/');
        label.push_str(desc);
    }
    Ok(Signal::new(samples, header.fs)?.with_label(label))
}

/// Sum of adu values as the reference tools compute header checksums:
/// 16-bit wrapping sum.
pub fn adu_checksum(adus: &[i16]) -> i16 {
    adus.iter()
        .fold(0i16, |acc, &v| acc.wrapping_add(v))
}
