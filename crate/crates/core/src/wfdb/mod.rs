//! Readers for MIT-BIH style records: header (.hea), format-212 signal
//! (.dat) and annotation (.atr) files, plus a plain-CSV signal reader for
//! synthetic inputs. Readers are reentrant and open files read-only;
//! the encoders exist only to build test fixtures.

mod annotation;
mod csv;
mod format212;
mod header;

pub use annotation::{
    encode_annotations, is_beat_code, parse_annotations, read_annotations, Annotation,
};
pub use csv::{read_csv, write_csv};
pub use format212::{adu_checksum, decode_frame, decode_stream, encode_frame, read_signal_212};
pub use header::{RecordHeader, SignalSpec};
