use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Direction;

/// One drag-to-target trial. Times are milliseconds since session start,
/// geometry is in millimetres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointingTrial {
    pub participant_id: String,
    pub tablet_id: String,
    pub haptic: bool,
    pub distance_d: f64,
    pub width_w: f64,
    pub t_touch: f64,
    pub t_release: f64,
    pub release_x: f64,
    pub target_center: f64,
    pub success: bool,
    pub trial_index: u32,
    pub direction: Direction,
}

impl PointingTrial {
    /// Movement time in ms.
    pub fn movement_time(&self) -> f64 {
        self.t_release - self.t_touch
    }

    /// Whether the release position lies inside the target.
    pub fn released_inside_target(&self) -> bool {
        (self.release_x - self.target_center).abs() <= self.width_w / 2.0
    }
}

#[derive(Debug, Error)]
pub enum PointingLogError {
    #[error("line {line}: malformed trial: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: stored success flag disagrees with release position")]
    InconsistentSuccessFlag { line: usize },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Metadata lines (`{"log_header": ...}` / `{"log_footer": ...}`) may be
/// interleaved by a logging front-end; they carry no trial.
fn is_metadata_line(value: &serde_json::Value) -> bool {
    value
        .as_object()
        .is_some_and(|o| o.contains_key("log_header") || o.contains_key("log_footer"))
}

/// Parses a JSON Lines pointing log. Blank lines and header/footer metadata
/// lines are skipped; line numbers in errors are 1-based file lines.
pub fn parse_pointing_log(jsonl_bytes: &[u8]) -> Result<Vec<PointingTrial>, PointingLogError> {
    let text = std::str::from_utf8(jsonl_bytes).map_err(|e| PointingLogError::MalformedLine {
        line: 1 + jsonl_bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        message: "invalid UTF-8".into(),
    })?;
    let mut trials = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw).map_err(|e| PointingLogError::MalformedLine {
                line,
                message: e.to_string(),
            })?;
        if is_metadata_line(&value) {
            continue;
        }
        let trial: PointingTrial =
            serde_json::from_value(value).map_err(|e| PointingLogError::MalformedLine {
                line,
                message: e.to_string(),
            })?;
        check_trial(&trial).map_err(|message| PointingLogError::MalformedLine { line, message })?;
        if trial.released_inside_target() != trial.success {
            return Err(PointingLogError::InconsistentSuccessFlag { line });
        }
        trials.push(trial);
    }
    Ok(trials)
}

fn check_trial(t: &PointingTrial) -> Result<(), String> {
    let finite = [
        t.distance_d,
        t.width_w,
        t.t_touch,
        t.t_release,
        t.release_x,
        t.target_center,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !finite {
        return Err("non-finite numeric field".into());
    }
    if !(t.width_w > 0.0) {
        return Err(format!("width_w must be positive, got {}", t.width_w));
    }
    if !(t.distance_d > 0.0) {
        return Err(format!("distance_d must be positive, got {}", t.distance_d));
    }
    if !(t.t_release > t.t_touch) {
        return Err(format!(
            "t_release ({}) must be later than t_touch ({})",
            t.t_release, t.t_touch
        ));
    }
    Ok(())
}

pub fn serialize_pointing_log(trials: &[PointingTrial]) -> String {
    let mut out = String::new();
    for t in trials {
        out.push_str(&serde_json::to_string(t).expect("trial serializes"));
        out.push('\n');
    }
    out
}

pub fn read_pointing_log(path: &Path) -> Result<Vec<PointingTrial>, PointingLogError> {
    let bytes = std::fs::read(path).map_err(|source| PointingLogError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pointing_log(&bytes)
}
