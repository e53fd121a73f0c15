//! WFDB header (.hea) parsing and serialization.
//!
//! Grammar handled here (one record line, then one line per signal):
//!
//! ```text
//! record_name[/n_segments] n_signals [fs[/counter_fs[(counter_base)]] [n_samples]]
//! file_name format[xN][:skew][+offset] [gain[(baseline)][/units] [adc_res [adc_zero [init_value [checksum [block_size [description...]]]]]]]
//! ```
//!
//! Comment lines start with `#`; anything after the signal lines is
//! ignored. Only plain format 212 signal lines are accepted.

use crate::error::{Error, Result};
use std::path::Path;

/// Per-signal description from a header line.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    pub format: u32,
    /// adu per physical unit; the WFDB default 200 substitutes for a
    /// missing or zero gain.
    pub gain: f64,
    /// adu value corresponding to 0 physical units: the parenthesized
    /// baseline if present, else adc_zero, else 0.
    pub baseline: i32,
    pub adc_resolution: Option<u32>,
    pub adc_zero: Option<i32>,
    pub initial_value: Option<i32>,
    /// 16-bit checksum of all original samples, as written by the
    /// reference tools.
    pub checksum: Option<i16>,
    pub block_size: Option<u32>,
    /// Trailing description, conventionally the lead name (e.g. "MLII").
    pub description: Option<String>,
}

/// Parsed record header.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordHeader {
    pub record_name: String,
    pub n_signals: usize,
    pub fs: f64,
    /// Samples per signal; 0 when the header leaves it unstated.
    pub n_samples: usize,
    pub signals: Vec<SignalSpec>,
}

const DEFAULT_GAIN: f64 = 200.0;
const DEFAULT_FS: f64 = 250.0;

fn parse_err(line: usize, msg: impl Into<String>, path: Option<&Path>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
        path: path.map(|p| p.to_path_buf()),
    }
}

impl RecordHeader {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(e, path))?;
        Self::parse_with_path(&text, Some(path))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_path(text, None)
    }

    fn parse_with_path(text: &str, path: Option<&Path>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (line_no, record_line) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing record line", path))?;
        let mut tokens = record_line.split_whitespace();
        let name_token = tokens
            .next()
            .ok_or_else(|| parse_err(line_no, "missing record name", path))?;
        let record_name = name_token
            .split('/')
            .next()
            .unwrap_or(name_token)
            .to_string();
        let n_signals: usize = tokens
            .next()
            .ok_or_else(|| parse_err(line_no, "missing signal count", path))?
            .parse()
            .map_err(|_| parse_err(line_no, "signal count is not an integer", path))?;
        if n_signals < 1 {
            return Err(parse_err(line_no, "record must have at least one signal", path));
        }
        let fs = match tokens.next() {
            Some(tok) => {
                let base = tok.split('/').next().unwrap_or(tok);
                base.parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("bad sampling rate {base:?}"), path))?
            }
            None => DEFAULT_FS,
        };
        if fs.is_nan() || fs <= 0.0 {
            return Err(parse_err(line_no, format!("sampling rate must be positive, got {fs}"), path));
        }
        let n_samples = match tokens.next() {
            Some(tok) => tok
                .parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("bad sample count {tok:?}"), path))?,
            None => 0,
        };

        let mut signals = Vec::with_capacity(n_signals);
        for _ in 0..n_signals {
            let (line_no, line) = lines.next().ok_or_else(|| {
                parse_err(line_no, format!("expected {n_signals} signal line(s)"), path)
            })?;
            signals.push(parse_signal_line(line_no, line, path)?);
        }
        Ok(Self {
            record_name,
            n_signals,
            fs,
            n_samples,
            signals,
        })
    }

    /// Serializes back to header text. Parsing the output reproduces the
    /// header (used by fixture round-trip tests).
    pub fn to_header_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {}\n",
            self.record_name, self.n_signals, self.fs, self.n_samples
        );
        for s in &self.signals {
            out.push_str(&format!("{} {} {}({})", s.file_name, s.format, s.gain, s.baseline));
            let tail = [
                s.adc_resolution.map(|v| v.to_string()),
                s.adc_zero.map(|v| v.to_string()),
                s.initial_value.map(|v| v.to_string()),
                s.checksum.map(|v| v.to_string()),
                s.block_size.map(|v| v.to_string()),
                s.description.clone(),
            ];
            for field in tail.into_iter().flatten() {
                out.push(' ');
                out.push_str(&field);
            }
            out.push('\n');
        }
        out
    }

    /// Channel whose description matches `lead` exactly.
    pub fn channel_for_lead(&self, lead: &str) -> Option<usize> {
        self.signals
            .iter()
            .position(|s| s.description.as_deref() == Some(lead))
    }

    /// The analysis channel: the one labelled "MLII" when present,
    /// otherwise channel 0.
    pub fn default_channel(&self) -> usize {
        self.channel_for_lead("MLII").unwrap_or(0)
    }
}

fn parse_signal_line(line_no: usize, line: &str, path: Option<&Path>) -> Result<SignalSpec> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err(parse_err(line_no, "signal line needs file name and format", path));
    }
    let file_name = tokens[0].to_string();
    let format_token = tokens[1];
    let digits: String = format_token.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return Err(parse_err(line_no, format!("bad format field {format_token:?}"), path));
    }
    if digits.len() != format_token.len() {
        // xN / :skew / +offset modifiers describe multiplexed or skewed
        // layouts this reader does not handle.
        return Err(parse_err(
            line_no,
            format!("unsupported format modifiers in {format_token:?}"),
            path,
        ));
    }
    let format: u32 = digits
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad format code {digits:?}"), path))?;
    if format != 212 {
        return Err(Error::UnsupportedFormat(format));
    }

    let mut gain = DEFAULT_GAIN;
    let mut paren_baseline = None;
    if let Some(tok) = tokens.get(2) {
        let no_units = tok.split('/').next().unwrap_or(tok);
        let (gain_part, baseline_part) = match no_units.find('(') {
            Some(open) => {
                let close = no_units.find(')').ok_or_else(|| {
                    parse_err(line_no, format!("unbalanced baseline in {tok:?}"), path)
                })?;
                (&no_units[..open], Some(&no_units[open + 1..close]))
            }
            None => (no_units, None),
        };
        let g: f64 = gain_part
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad gain {gain_part:?}"), path))?;
        if g != 0.0 {
            gain = g;
        }
        if let Some(b) = baseline_part {
            paren_baseline = Some(b.parse::<i32>().map_err(|_| {
                parse_err(line_no, format!("bad baseline {b:?}"), path)
            })?);
        }
    }

    let int_field = |idx: usize| -> Result<Option<i64>> {
        match tokens.get(idx) {
            Some(tok) => tok
                .parse::<i64>()
                .map(Some)
                .map_err(|_| parse_err(line_no, format!("bad integer field {tok:?}"), path)),
            None => Ok(None),
        }
    };
    let adc_resolution = int_field(3)?.map(|v| v as u32);
    let adc_zero = int_field(4)?.map(|v| v as i32);
    let initial_value = int_field(5)?.map(|v| v as i32);
    let checksum = int_field(6)?.map(|v| v as i16);
    let block_size = int_field(7)?.map(|v| v as u32);
    let description = if tokens.len() > 8 {
        Some(tokens[8..].join(" "))
    } else {
        None
    };

    let baseline = paren_baseline.or(adc_zero).unwrap_or(0);
    Ok(SignalSpec {
        file_name,
        format,
        gain,
        baseline,
        adc_resolution,
        adc_zero,
        initial_value,
        checksum,
        block_size,
        description,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MITDB_STYLE: &str = "\
117 2 360 650000
117.dat 212 200 11 1024 839 31170 0 MLII
117.dat 212 200 11 1024 930 20026 0 V2
# comment trailer ignored
";

    #[test]
    fn parses_two_signal_record() {
        let h = RecordHeader::parse(MITDB_STYLE).unwrap();
        assert_eq!(h.record_name, "117");
        assert_eq!(h.n_signals, 2);
        assert_eq!(h.fs, 360.0);
        assert_eq!(h.n_samples, 650000);
        assert_eq!(h.signals[0].gain, 200.0);
        assert_eq!(h.signals[0].baseline, 1024);
        assert_eq!(h.signals[0].checksum, Some(31170));
        assert_eq!(h.signals[0].description.as_deref(), Some("MLII"));
        assert_eq!(h.signals[1].description.as_deref(), Some("V2"));
        assert_eq!(h.default_channel(), 0);
        assert_eq!(h.channel_for_lead("V2"), Some(1));
    }

    #[test]
    fn minimal_header_round_trips() {
        let text = "rec 1 360 100\nrec.dat 212 200(0) 12 0 5 -3 0 lead I\n";
        let h = RecordHeader::parse(text).unwrap();
        assert_eq!(h.signals[0].description.as_deref(), Some("lead I"));
        let reparsed = RecordHeader::parse(&h.to_header_text()).unwrap();
        assert_eq!(h, reparsed);
    }

    #[test]
    fn format_16_is_rejected_explicitly() {
        let text = "rec 1 360 100\nrec.dat 16 200\n";
        assert!(matches!(
            RecordHeader::parse(text),
            Err(Error::UnsupportedFormat(16))
        ));
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let text = "rec x 360\n";
        match RecordHeader::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "rec 2 360 100\nrec.dat 212 200\n";
        match RecordHeader::parse(text) {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error for missing signal line, got {other:?}"),
        }
    }

    #[test]
    fn gain_zero_and_missing_fields_take_defaults() {
        let text = "rec 1 360\nrec.dat 212 0\n";
        let h = RecordHeader::parse(text).unwrap();
        assert_eq!(h.n_samples, 0);
        assert_eq!(h.signals[0].gain, 200.0);
        assert_eq!(h.signals[0].baseline, 0);
        assert_eq!(h.signals[0].description, None);
    }

    #[test]
    fn counter_rate_suffix_is_ignored() {
        let text = "rec 1 360/360(0) 100\nrec.dat 212 200(512)/mV 11 1024\n";
        let h = RecordHeader::parse(text).unwrap();
        assert_eq!(h.fs, 360.0);
        // Parenthesized baseline wins over adc_zero.
        assert_eq!(h.signals[0].baseline, 512);
        assert_eq!(h.signals[0].adc_zero, Some(1024));
    }

    #[test]
    fn multiplexed_format_modifier_is_rejected() {
        let text = "rec 1 360 100\nrec.dat 212x2 200\n";
        assert!(matches!(RecordHeader::parse(text), Err(Error::Parse { .. })));
    }
}
