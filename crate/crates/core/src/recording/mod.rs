//! Physical recordings (force/position streams with a JSON sidecar) and
//! pointing-task logs.
//!
//! A recording is a CSV file with the fixed header `t,fn,ft,x` (seconds,
//! newtons, newtons, millimetres) next to a `<stem>.meta.json` sidecar holding
//! the [`RecordingMeta`]. Pointing logs are JSON Lines, one [`PointingTrial`]
//! per line.

mod pointing;
mod validate;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use pointing::{
    parse_pointing_log, read_pointing_log, serialize_pointing_log, PointingLogError, PointingTrial,
};
pub use validate::{validate_recording, ValidationFlag, ValidationReport};

/// Normal force at or above which the finger counts as touching the screen.
pub const CONTACT_THRESHOLD_N: f64 = 0.1;

pub const CSV_HEADER: [&str; 4] = ["t", "fn", "ft", "x"];

/// Sliding or pointing direction along the screen length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Left to right (increasing x).
    Ltr,
    /// Right to left (decreasing x).
    Rtl,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Ltr => Direction::Rtl,
            Direction::Rtl => Direction::Ltr,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Ltr => "ltr",
            Direction::Rtl => "rtl",
        }
    }
}

/// Actuation condition of a physical trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actuation {
    Off,
    ConstantMax,
    Ridge,
}

impl Actuation {
    pub fn as_str(self) -> &'static str {
        match self {
            Actuation::Off => "off",
            Actuation::ConstantMax => "constant_max",
            Actuation::Ridge => "ridge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceSample {
    /// Seconds since the start of the recording.
    pub t: f64,
    /// Normal force, N.
    pub f_n: f64,
    /// Tangential force, N.
    pub f_t: f64,
    /// Finger position along the screen length, mm.
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub participant_id: String,
    pub tablet_id: String,
    pub actuation: Actuation,
    /// Programmed ridge `[x_lo, x_hi]` in mm; present iff `actuation == ridge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge_span: Option<[f64; 2]>,
    /// mm/s
    pub nominal_speed: f64,
    /// `[lo, hi]` in N.
    pub nominal_force_window: [f64; 2],
    /// mm
    pub screen_length: f64,
    /// Hz
    pub sample_rate: f64,
    pub session_index: u32,
    pub trial_index: u32,
}

impl RecordingMeta {
    /// Checks the sidecar's own invariants.
    pub fn validate(&self) -> Result<(), RecordingError> {
        let bad = |msg: String| Err(RecordingError::InvalidMeta(msg));
        if self.ridge_span.is_some() != (self.actuation == Actuation::Ridge) {
            return bad("ridge_span must be present exactly when actuation is 'ridge'".into());
        }
        if let Some([lo, hi]) = self.ridge_span {
            if !(hi > lo) {
                return bad(format!("ridge span [{lo}, {hi}] is empty"));
            }
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return bad(format!(
                "sample_rate must be positive, got {}",
                self.sample_rate
            ));
        }
        let [lo, hi] = self.nominal_force_window;
        if !(lo < hi) {
            return bad(format!(
                "nominal_force_window [{lo}, {hi}] must satisfy lo < hi"
            ));
        }
        if !(self.screen_length > 0.0) {
            return bad(format!(
                "screen_length must be positive, got {}",
                self.screen_length
            ));
        }
        if !(self.nominal_speed > 0.0) {
            return bad(format!(
                "nominal_speed must be positive, got {}",
                self.nominal_speed
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    pub meta: RecordingMeta,
    pub samples: Vec<ForceSample>,
}

impl Recording {
    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    /// Median spacing between consecutive timestamps.
    pub fn median_interval(&self) -> f64 {
        let dts: Vec<f64> = self.samples.windows(2).map(|w| w[1].t - w[0].t).collect();
        crate::stats::median(&dts)
    }
}

#[derive(Debug, Error)]
pub enum RecordingError {
    #[error("malformed header: expected `t,fn,ft,x`, found `{0}`")]
    MalformedHeader(String),
    #[error("malformed row at data line {line}")]
    MalformedRow { line: usize },
    #[error("time does not increase at data line {line}")]
    NonMonotonicTime { line: usize },
    #[error("recording has no samples")]
    EmptyRecording,
    #[error("invalid recording metadata: {0}")]
    InvalidMeta(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Parses a `t,fn,ft,x` CSV into a [`Recording`].
///
/// Line numbers in errors count data rows from 1 (the header is not counted).
/// Structural invariants (header, numeric finite fields, strictly increasing
/// time, non-empty) are enforced here; protocol-level properties such as
/// duration and position range are reported by [`validate_recording`].
pub fn parse_recording(csv_bytes: &[u8], meta: RecordingMeta) -> Result<Recording, RecordingError> {
    meta.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(csv_bytes);

    let header = reader
        .headers()
        .map_err(|_| RecordingError::MalformedHeader(String::new()))?
        .clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(RecordingError::MalformedHeader(
            header.iter().collect::<Vec<_>>().join(","),
        ));
    }

    let mut samples: Vec<ForceSample> = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 1;
        let row = row.map_err(|_| RecordingError::MalformedRow { line })?;
        if row.len() != 4 {
            return Err(RecordingError::MalformedRow { line });
        }
        let mut vals = [0.0; 4];
        for (slot, field) in vals.iter_mut().zip(row.iter()) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or(RecordingError::MalformedRow { line })?;
        }
        let sample = ForceSample {
            t: vals[0],
            f_n: vals[1],
            f_t: vals[2],
            x: vals[3],
        };
        if let Some(prev) = samples.last() {
            if !(sample.t > prev.t) {
                return Err(RecordingError::NonMonotonicTime { line });
            }
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(RecordingError::EmptyRecording);
    }
    Ok(Recording { meta, samples })
}

/// Serializes samples as `t,fn,ft,x` CSV. Values use the shortest decimal
/// form that parses back to the identical `f64`.
pub fn serialize_recording(recording: &Recording) -> String {
    let mut out = String::with_capacity(recording.samples.len() * 48 + 16);
    out.push_str("t,fn,ft,x\n");
    for s in &recording.samples {
        let _ = writeln!(out, "{},{},{},{}", s.t, s.f_n, s.f_t, s.x);
    }
    out
}

/// `data/foo.csv` -> `data/foo.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Reads a recording CSV together with its metadata sidecar.
pub fn read_recording(csv_path: &Path) -> Result<Recording, RecordingError> {
    let meta_path = sidecar_path(csv_path);
    let meta_bytes = fs::read(&meta_path).map_err(|source| RecordingError::Io {
        path: meta_path.clone(),
        source,
    })?;
    let meta: RecordingMeta =
        serde_json::from_slice(&meta_bytes).map_err(|source| RecordingError::Json {
            path: meta_path,
            source,
        })?;
    let csv_bytes = fs::read(csv_path).map_err(|source| RecordingError::Io {
        path: csv_path.to_path_buf(),
        source,
    })?;
    parse_recording(&csv_bytes, meta)
}

/// Writes `<csv_path>` and its `.meta.json` sidecar.
pub fn write_recording(recording: &Recording, csv_path: &Path) -> Result<(), RecordingError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RecordingError::Io { path, source }
    };
    crate::util::write_atomic(csv_path, serialize_recording(recording).as_bytes())
        .map_err(io_err(csv_path))?;
    let meta_path = sidecar_path(csv_path);
    let mut meta = serde_json::to_string_pretty(&recording.meta).expect("metadata serializes");
    meta.push('\n');
    crate::util::write_atomic(&meta_path, meta.as_bytes()).map_err(io_err(&meta_path))?;
    Ok(())
}
