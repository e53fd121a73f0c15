//! MIT annotation (.atr) stream decoding.
//!
//! The file is a sequence of 2-byte little-endian words. The high 6 bits
//! hold a type code, the low 10 bits a time increment in samples relative
//! to the previous annotation. Codes 1..=49 are annotations proper; the
//! remainder are modifiers:
//!
//! * 59 SKIP - the next four bytes are a signed 32-bit time offset stored
//!   high word first (each word little-endian), applied to the next
//!   annotation's time;
//! * 60 NUM, 61 SUB, 62 CHN - carry a field value in the increment bits;
//! * 63 AUX - the increment holds a byte count of auxiliary text that
//!   follows (plus a pad byte when odd), attached to the last annotation.
//!
//! The all-zero word terminates the stream.

use crate::error::{Error, Result};
use std::path::Path;

/// One annotation: a sample position, its type code, and the standard
/// beat/non-beat classification of that code.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub sample: usize,
    pub type_code: u8,
    pub is_beat: bool,
    pub aux: Option<String>,
}

/// Standard beat-type classification: normal, bundle branch blocks,
/// premature/ectopic beats, escapes, paced and fusion beats, plus the
/// unclassifiable/learning codes. Rhythm changes, artifacts, waveform
/// fiducials and comments are not beats.
pub fn is_beat_code(code: u8) -> bool {
    matches!(code, 1..=13 | 25 | 30 | 34 | 35 | 38 | 41)
}

const SKIP: u8 = 59;
const NUM: u8 = 60;
const SUB: u8 = 61;
const CHN: u8 = 62;
const AUX: u8 = 63;

pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(e, path))?;
    parse_annotations(&bytes)
}

/// Decodes an annotation byte stream. See the module docs for the layout.
pub fn parse_annotations(bytes: &[u8]) -> Result<Vec<Annotation>> {
    let mut anns: Vec<Annotation> = Vec::new();
    let mut time: i64 = 0;
    let mut offset = 0usize;
    let word_at = |offset: usize| -> Option<u16> {
        let b0 = *bytes.get(offset)?;
        let b1 = *bytes.get(offset + 1)?;
        Some(u16::from_le_bytes([b0, b1]))
    };
    while let Some(word) = word_at(offset) {
        offset += 2;
        let code = (word >> 10) as u8;
        let increment = (word & 0x03FF) as i64;
        match code {
            0 if increment == 0 => return Ok(anns),
            0 => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("zero type code with nonzero increment {increment}"),
                    path: None,
                })
            }
            1..=49 => {
                time += increment;
                if time < 0 {
                    return Err(Error::CorruptFile(format!(
                        "negative cumulative annotation time {time}"
                    )));
                }
                if let Some(last) = anns.last() {
                    if (time as usize) < last.sample {
                        return Err(Error::CorruptFile(format!(
                            "annotation times decrease: {} after {}",
                            time, last.sample
                        )));
                    }
                }
                anns.push(Annotation {
                    sample: time as usize,
                    type_code: code,
                    is_beat: is_beat_code(code),
                    aux: None,
                });
            }
            SKIP => {
                let hi = word_at(offset).ok_or(Error::Truncated {
                    offset: offset as u64,
                    path: None,
                })?;
                let lo = word_at(offset + 2).ok_or(Error::Truncated {
                    offset: offset as u64 + 2,
                    path: None,
                })?;
                offset += 4;
                let skip = ((hi as u32) << 16 | lo as u32) as i32;
                time += skip as i64;
                if time < 0 {
                    return Err(Error::CorruptFile(format!(
                        "negative cumulative annotation time {time} after skip"
                    )));
                }
            }
            NUM | SUB | CHN => {
                // Field values we do not carry; consumed with the word.
            }
            AUX => {
                let count = increment as usize;
                let end = offset + count;
                if end > bytes.len() {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!(
                            "aux payload of {count} bytes truncated at offset {offset}"
                        ),
                        path: None,
                    });
                }
                let text = String::from_utf8_lossy(&bytes[offset..end])
                    .trim_end_matches('\0')
                    .to_string();
                offset = end + (count & 1);
                if let Some(last) = anns.last_mut() {
                    last.aux = Some(text);
                }
            }
            other => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("invalid annotation type code {other}"),
                    path: None,
                })
            }
        }
    }
    // Clean end of buffer without a terminator word.
    Ok(anns)
}

/// Encodes annotations back into the byte-pair stream, terminator included.
/// Exists for test fixtures only.
pub fn encode_annotations(anns: &[Annotation]) -> Vec<u8> {
    let mut bytes = Vec::new();
    let mut time: i64 = 0;
    for ann in anns {
        let mut delta = ann.sample as i64 - time;
        debug_assert!(delta >= 0, "annotations must be time-ordered");
        if delta > 0x03FF {
            bytes.extend_from_slice(&((SKIP as u16) << 10).to_le_bytes());
            let skip = delta as i32;
            bytes.extend_from_slice(&(((skip as u32) >> 16) as u16).to_le_bytes());
            bytes.extend_from_slice(&((skip as u32) as u16).to_le_bytes());
            delta = 0;
        }
        let word = ((ann.type_code as u16) << 10) | (delta as u16 & 0x03FF);
        bytes.extend_from_slice(&word.to_le_bytes());
        if let Some(aux) = &ann.aux {
            let payload = aux.as_bytes();
            let word = ((AUX as u16) << 10) | (payload.len() as u16 & 0x03FF);
            bytes.extend_from_slice(&word.to_le_bytes());
            bytes.extend_from_slice(payload);
            if payload.len() % 2 == 1 {
                bytes.push(0);
            }
        }
        time = ann.sample as i64;
    }
    bytes.extend_from_slice(&0u16.to_le_bytes());
    bytes
}
