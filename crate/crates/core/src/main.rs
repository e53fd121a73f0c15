//! Batch command-line frontend for the detection pipeline. Emits CSV/JSON
//! artifacts suitable for external plotting; no rendering of its own.

use clap::{Args, Parser, Subcommand};
use qrswave::detector::{BandMode, RefractoryPolicy};
use qrswave::preprocess::{band_table, format_band_edge, Band, DEFAULT_FMAX_HZ};
use qrswave::wavelet::{dwt, reconstruct_band, BandSelector, ExtensionMode};
use qrswave::{
    detect, eval, remove_baseline, select_band, wfdb, DetectorConfig, Error, ScoreReference,
    Signal, WaveletKind,
};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_PROCESS: u8 = 5;
const EXIT_ALL_RECORDS_FAILED: u8 = 6;

const LONG_ABOUT: &str = "\
Wavelet ECG toolkit: dyadic band tables, baseline-wander removal,
cross-correlation band ranking, R-peak detection and beat-level
evaluation against reference annotations.

Exit codes:
  0  success
  2  usage error
  3  i/o error (missing or unreadable file)
  4  parse error (malformed header, signal, annotation or CSV data)
  5  processing error (invalid configuration, degenerate input)
  6  every requested record failed to evaluate";

#[derive(Parser)]
#[command(name = "qrswave", version, about = "Wavelet ECG toolkit", long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Input signal: a one-column CSV, or a WFDB record (path to .hea/.dat
    /// or the extension-less base name).
    input: PathBuf,
    /// Sampling rate in Hz, used for CSV inputs (WFDB headers carry their own).
    #[arg(long, default_value_t = 360.0)]
    fs: f64,
    /// Channel index for multi-signal records; defaults to the MLII lead,
    /// then channel 0.
    #[arg(long)]
    channel: Option<usize>,
}

#[derive(Args)]
struct TransformArgs {
    /// Decomposition depth.
    #[arg(long, default_value_t = 8)]
    levels: usize,
    /// Wavelet family: db4 or haar.
    #[arg(long, default_value = "db4", value_parser = parse_wavelet)]
    wavelet: WaveletKind,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory (created if absent).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Detection threshold as a fraction of max |yc|.
    #[arg(long, default_value_t = 0.15)]
    threshold_ratio: f64,
    /// Detail level supplying yc.
    #[arg(long, default_value_t = 4)]
    level: usize,
    /// Pick the detection band per record by cross-correlation instead of
    /// using --level.
    #[arg(long)]
    auto_band: bool,
    /// Keep the earlier peak of a refractory conflict instead of the larger.
    #[arg(long)]
    keep_earlier: bool,
}

impl DetectArgs {
    fn config(&self, transform: &TransformArgs) -> DetectorConfig {
        DetectorConfig {
            threshold_ratio: self.threshold_ratio,
            level: self.level,
            levels: transform.levels,
            band_mode: if self.auto_band {
                BandMode::Auto
            } else {
                BandMode::Fixed
            },
            wavelet: transform.wavelet,
            refractory_policy: if self.keep_earlier {
                RefractoryPolicy::KeepEarlier
            } else {
                RefractoryPolicy::KeepLarger
            },
            ..DetectorConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the dyadic band-frequency table for a decomposition depth.
    Bands {
        #[arg(long, default_value_t = 360.0)]
        fs: f64,
        /// Nominal content bandwidth for the published-table columns.
        #[arg(long, default_value_t = DEFAULT_FMAX_HZ)]
        fmax: f64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Also write bands.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write each band's reconstruction at the original rate, plus the
    /// band-frequency table.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        transform: TransformArgs,
        #[arg(long, default_value_t = DEFAULT_FMAX_HZ)]
        fmax: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Remove baseline wander and write the filtered signal as CSV.
    Filter {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        transform: TransformArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Score every detail band against the signal by cross-correlation.
    Xcorr {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        transform: TransformArgs,
        /// Correlate against the raw signal instead of the baseline-removed one.
        #[arg(long)]
        raw: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Detect R peaks; writes events.csv and summary.json.
    Detect {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        transform: TransformArgs,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate records against their reference annotations.
    Eval {
        /// Record names or paths (e.g. 117 or /data/117.hea).
        #[arg(required = true)]
        records: Vec<String>,
        /// Directory holding <record>.hea/.dat/.atr; falls back to the
        /// QRSWAVE_DATA_DIR environment variable, then the current directory.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        channel: Option<usize>,
        /// Beat-matching window in milliseconds.
        #[arg(long, default_value_t = 150.0)]
        tolerance_ms: f64,
        #[command(flatten)]
        transform: TransformArgs,
        #[command(flatten)]
        detect: DetectArgs,
        /// Report file format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn parse_wavelet(s: &str) -> Result<WaveletKind, String> {
    s.parse::<WaveletKind>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
    AllRecordsFailed(usize),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::AllRecordsFailed(n) => {
                write!(f, "all {n} record(s) failed to evaluate")
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::AllRecordsFailed(_) => EXIT_ALL_RECORDS_FAILED,
            Failure::Lib(e) => match e {
                Error::Io { .. } | Error::Truncated { .. } => EXIT_IO,
                Error::Parse { .. }
                | Error::UnsupportedFormat(_)
                | Error::CorruptFile(_)
                | Error::EmptySignal(_) => EXIT_PARSE,
                _ => EXIT_PROCESS,
            },
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bands {
            fs,
            fmax,
            levels,
            out,
        } => cmd_bands(fs, fmax, levels, out.as_deref()),
        Command::Decompose {
            input,
            transform,
            fmax,
            out,
        } => cmd_decompose(&input, &transform, fmax, &out.out),
        Command::Filter {
            input,
            transform,
            out,
        } => cmd_filter(&input, &transform, &out.out),
        Command::Xcorr {
            input,
            transform,
            raw,
            out,
        } => cmd_xcorr(&input, &transform, raw, &out.out),
        Command::Detect {
            input,
            transform,
            detect,
            out,
        } => cmd_detect(&input, &transform, &detect, &out.out),
        Command::Eval {
            records,
            data_dir,
            channel,
            tolerance_ms,
            transform,
            detect,
            format,
            out,
        } => cmd_eval(
            &records,
            data_dir,
            channel,
            tolerance_ms,
            &transform,
            &detect,
            &format,
            &out.out,
        ),
    }
}

/// Loads a CSV signal or one channel of a WFDB record, by file extension.
fn load_signal(args: &InputArgs) -> Result<Signal, Error> {
    match args.input.extension().and_then(|e| e.to_str()) {
        Some("csv") | Some("txt") => wfdb::read_csv(&args.input, args.fs),
        _ => {
            let base = args.input.with_extension("");
            let header = wfdb::RecordHeader::read(&base.with_extension("hea"))?;
            let channel = args.channel.unwrap_or_else(|| header.default_channel());
            wfdb::read_signal_212(&base.with_extension("dat"), &header, channel)
        }
    }
}

/// Writes through a temp file plus rename so readers never observe a
/// partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(e, parent))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(e, &tmp))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(e, path))?;
    Ok(())
}

fn band_label(band: Band) -> String {
    band.to_string()
}

fn bands_table_string(fs: f64, fmax: f64, levels: usize) -> Result<String, Error> {
    let nominal = band_table(levels, fmax)?;
    let dyadic = band_table(levels, fs / 2.0)?;
    let mut out = String::new();
    out.push_str(&format!(
        "{:<6} {:>22} {:>22}\n",
        "band",
        format!("f_max={fmax} Hz", fmax = format_band_edge(fmax)),
        format!("fs/2={} Hz", format_band_edge(fs / 2.0)),
    ));
    for (n, d) in nominal.iter().zip(&dyadic) {
        out.push_str(&format!(
            "{:<6} {:>22} {:>22}\n",
            band_label(n.band),
            format!("{}..{}", format_band_edge(n.lo_hz), format_band_edge(n.hi_hz)),
            format!("{}..{}", format_band_edge(d.lo_hz), format_band_edge(d.hi_hz)),
        ));
    }
    Ok(out)
}

fn bands_csv_string(fs: f64, fmax: f64, levels: usize) -> Result<String, Error> {
    let nominal = band_table(levels, fmax)?;
    let dyadic = band_table(levels, fs / 2.0)?;
    let mut out =
        String::from("band,fmax_lo_hz,fmax_hi_hz,nyquist_lo_hz,nyquist_hi_hz\n");
    for (n, d) in nominal.iter().zip(&dyadic) {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            band_label(n.band),
            format_band_edge(n.lo_hz),
            format_band_edge(n.hi_hz),
            format_band_edge(d.lo_hz),
            format_band_edge(d.hi_hz),
        ));
    }
    Ok(out)
}

fn cmd_bands(fs: f64, fmax: f64, levels: usize, out: Option<&Path>) -> Result<(), Failure> {
    print!("{}", bands_table_string(fs, fmax, levels)?);
    if let Some(dir) = out {
        let path = dir.join("bands.csv");
        write_atomic(&path, &bands_csv_string(fs, fmax, levels)?)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Two-column plot file: time in seconds against the sample value.
fn plot_csv(samples: &[f64], fs: f64) -> String {
    let mut out = String::with_capacity(samples.len() * 24);
    out.push_str("time_s,value\n");
    for (i, v) in samples.iter().enumerate() {
        out.push_str(&format!("{},{v}\n", i as f64 / fs));
    }
    out
}

fn cmd_decompose(
    input: &InputArgs,
    transform: &TransformArgs,
    fmax: f64,
    out: &Path,
) -> Result<(), Failure> {
    let signal = load_signal(input)?;
    let bank = transform.wavelet.bank();
    let decomp = dwt(
        signal.samples(),
        transform.levels,
        &bank,
        ExtensionMode::Periodic,
    )?;
    for level in 1..=transform.levels {
        let rec = reconstruct_band(&decomp, BandSelector::Detail(level))?;
        let path = out.join(format!("band_d{level}.csv"));
        write_atomic(&path, &plot_csv(&rec, signal.fs()))?;
    }
    let approx = reconstruct_band(&decomp, BandSelector::Approx)?;
    let approx_path = out.join(format!("band_a{}.csv", transform.levels));
    write_atomic(&approx_path, &plot_csv(&approx, signal.fs()))?;
    let table_path = out.join("bands.csv");
    write_atomic(
        &table_path,
        &bands_csv_string(signal.fs(), fmax, transform.levels)?,
    )?;
    println!(
        "decomposed {} samples into {} band files + band table in {}",
        signal.len(),
        transform.levels + 1,
        out.display()
    );
    Ok(())
}

fn cmd_filter(input: &InputArgs, transform: &TransformArgs, out: &Path) -> Result<(), Failure> {
    let signal = load_signal(input)?;
    let bank = transform.wavelet.bank();
    let filtered = remove_baseline(&signal, transform.levels, &bank, ExtensionMode::Periodic)?;
    let path = out.join("filtered.csv");
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(e, parent))?;
    }
    let mut body = String::with_capacity(filtered.len() * 12);
    for v in filtered.samples() {
        body.push_str(&format!("{v}\n"));
    }
    write_atomic(&path, &body)?;
    println!(
        "filtered {} samples ({} levels, {}) -> {}",
        filtered.len(),
        transform.levels,
        transform.wavelet.name(),
        path.display()
    );
    Ok(())
}

fn cmd_xcorr(
    input: &InputArgs,
    transform: &TransformArgs,
    raw: bool,
    out: &Path,
) -> Result<(), Failure> {
    let signal = load_signal(input)?;
    let bank = transform.wavelet.bank();
    let reference = if raw {
        ScoreReference::Raw
    } else {
        ScoreReference::BaselineRemoved
    };
    let (best, scores) = select_band(&signal, transform.levels, &bank, reference)?;
    let mut csv = String::from("level,percent\n");
    println!("{:<6} {:>10}", "band", "xcorr(%)");
    for s in &scores {
        csv.push_str(&format!("{},{:.4}\n", s.level, s.score));
        let marker = if s.level == best { "  <- best" } else { "" };
        println!("d{:<5} {:>10.2}{marker}", s.level, s.score);
    }
    let path = out.join("xcorr.csv");
    write_atomic(&path, &csv)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct DetectSummary<'a> {
    input: String,
    n_qrs: usize,
    threshold: f64,
    degenerate: bool,
    fs: f64,
    selected_level: usize,
    config: &'a DetectorConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    band_scores: Option<&'a [qrswave::BandScore]>,
}

fn cmd_detect(
    input: &InputArgs,
    transform: &TransformArgs,
    detect_args: &DetectArgs,
    out: &Path,
) -> Result<(), Failure> {
    let signal = load_signal(input)?;
    let config = detect_args.config(transform);
    let result = detect(&signal, &config)?;

    let mut events = String::from("sample_index,time_s,amplitude\n");
    for e in &result.events {
        events.push_str(&format!(
            "{},{},{}\n",
            e.r_peak,
            e.r_peak as f64 / result.fs,
            e.peak_amplitude
        ));
    }
    let events_path = out.join("events.csv");
    write_atomic(&events_path, &events)?;

    let summary = DetectSummary {
        input: input.input.display().to_string(),
        n_qrs: result.events.len(),
        threshold: result.threshold,
        degenerate: result.degenerate,
        fs: result.fs,
        selected_level: result.selected_level,
        config: &result.config,
        band_scores: result.band_scores.as_deref(),
    };
    let summary_path = out.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_atomic(&summary_path, &json)?;

    if result.degenerate {
        eprintln!("warning: flat input, threshold degenerate; no events");
    }
    println!(
        "{} QRS events (threshold {:.6}, level d{}) -> {}, {}",
        result.events.len(),
        result.threshold,
        result.selected_level,
        events_path.display(),
        summary_path.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    records: &[String],
    data_dir: Option<PathBuf>,
    channel: Option<usize>,
    tolerance_ms: f64,
    transform: &TransformArgs,
    detect_args: &DetectArgs,
    format: &str,
    out: &Path,
) -> Result<(), Failure> {
    if !matches!(format, "csv" | "json") {
        return Err(Failure::Usage(format!(
            "unknown report format {format:?} (expected csv or json)"
        )));
    }
    let data_dir = data_dir
        .or_else(|| std::env::var_os("QRSWAVE_DATA_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let config = detect_args.config(transform);
    let tolerance_s = tolerance_ms / 1000.0;

    let mut rows = Vec::new();
    for record in records {
        let base = if record.contains(std::path::MAIN_SEPARATOR) || record.ends_with(".hea") {
            PathBuf::from(record)
        } else {
            data_dir.join(record)
        };
        let files = eval::RecordFiles::from_base(&base);
        match eval::evaluate_record(&files, &config, tolerance_s, channel) {
            Ok(row) => rows.push(row),
            Err(e) => eprintln!("warning: skipping record {record}: {e}"),
        }
    }
    if rows.is_empty() {
        return Err(Failure::AllRecordsFailed(records.len()));
    }
    let report = eval::EvalReport::from_rows(rows, tolerance_s)?;
    print!("{}", report.to_table_string());
    let path = out.join(format!("report.{format}"));
    let body = match format {
        "csv" => report.to_csv_string(),
        _ => serde_json::to_string_pretty(&report).expect("report serializes"),
    };
    write_atomic(&path, &body)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
