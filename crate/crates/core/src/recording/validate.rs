use serde::{Deserialize, Serialize};

use super::{Recording, CONTACT_THRESHOLD_N};
use crate::signal;

pub const MIN_DURATION_S: f64 = 1.0;
pub const MAX_DURATION_S: f64 = 60.0;
/// Allowed relative deviation of the median sample interval from `1/sample_rate`.
pub const SAMPLE_INTERVAL_TOLERANCE: f64 = 0.10;
/// A sample counts as moving when `|v| >= MOTION_FRACTION * nominal_speed`.
pub const MOTION_FRACTION: f64 = 0.1;
/// Out-of-window fractions above this raise [`ValidationFlag::ForceOutsideWindow`].
pub const FORCE_WINDOW_FLAG_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationFlag {
    DurationOutOfRange,
    SampleIntervalMismatch,
    PositionOutOfRange,
    ForceOutsideWindow,
    NoContact,
}

/// Diagnostic summary of one recording. Nothing here rejects data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_samples: usize,
    pub duration: f64,
    pub median_interval: f64,
    /// Fraction of samples with `f_n` outside `nominal_force_window`.
    pub out_of_window_fraction: f64,
    /// Fraction of samples with `f_n` below the contact threshold.
    pub below_contact_fraction: f64,
    /// Fraction of samples whose smoothed speed exceeds a tenth of nominal.
    pub motion_duty_cycle: f64,
    /// Fraction of samples with `x` outside `[0, screen_length]`.
    pub position_out_of_range_fraction: f64,
    pub flags: Vec<ValidationFlag>,
}

pub fn validate_recording(r: &Recording) -> ValidationReport {
    let n = r.samples.len();
    let frac = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let [lo, hi] = r.meta.nominal_force_window;

    let out_of_window = r
        .samples
        .iter()
        .filter(|s| s.f_n < lo || s.f_n > hi)
        .count();
    let below_contact = r
        .samples
        .iter()
        .filter(|s| s.f_n < CONTACT_THRESHOLD_N)
        .count();
    let out_of_range = r
        .samples
        .iter()
        .filter(|s| s.x < 0.0 || s.x > r.meta.screen_length)
        .count();

    let window = signal::window_samples(crate::swipe::VELOCITY_WINDOW_S, r.meta.sample_rate);
    let v = signal::smoothed_velocity(&r.times(), &r.positions(), window);
    let moving = v
        .iter()
        .filter(|v| v.abs() >= MOTION_FRACTION * r.meta.nominal_speed)
        .count();

    let duration = r.duration();
    let median_interval = if n >= 2 {
        r.median_interval()
    } else {
        f64::NAN
    };

    let mut flags = Vec::new();
    if !(MIN_DURATION_S..=MAX_DURATION_S).contains(&duration) {
        flags.push(ValidationFlag::DurationOutOfRange);
    }
    let nominal_dt = 1.0 / r.meta.sample_rate;
    if !((median_interval - nominal_dt).abs() <= SAMPLE_INTERVAL_TOLERANCE * nominal_dt) {
        flags.push(ValidationFlag::SampleIntervalMismatch);
    }
    if out_of_range > 0 {
        flags.push(ValidationFlag::PositionOutOfRange);
    }
    if frac(out_of_window) > FORCE_WINDOW_FLAG_FRACTION {
        flags.push(ValidationFlag::ForceOutsideWindow);
    }
    if below_contact == n {
        flags.push(ValidationFlag::NoContact);
    }

    ValidationReport {
        n_samples: n,
        duration,
        median_interval,
        out_of_window_fraction: frac(out_of_window),
        below_contact_fraction: frac(below_contact),
        motion_duty_cycle: frac(moving),
        position_out_of_range_fraction: frac(out_of_range),
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recording::{Actuation, ForceSample, RecordingMeta};

    fn recording(f_n: impl Fn(usize) -> f64, n: usize) -> Recording {
        let meta = RecordingMeta {
            participant_id: "P01".into(),
            tablet_id: "t".into(),
            actuation: Actuation::Off,
            ridge_span: None,
            nominal_speed: 100.0,
            nominal_force_window: [0.5, 1.5],
            screen_length: 100.0,
            sample_rate: 1000.0,
            session_index: 0,
            trial_index: 0,
        };
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 / 1000.0;
                ForceSample {
                    t,
                    f_n: f_n(i),
                    f_t: 0.5,
                    x: 100.0 * t / (n as f64 / 1000.0),
                }
            })
            .collect();
        Recording { meta, samples }
    }

    #[test]
    fn all_in_window() {
        let rep = validate_recording(&recording(|_| 1.0, 2000));
        assert_eq!(rep.out_of_window_fraction, 0.0);
        assert_eq!(rep.below_contact_fraction, 0.0);
        assert!(rep.flags.is_empty(), "{:?}", rep.flags);
        assert!(rep.motion_duty_cycle > 0.99);
    }

    #[test]
    fn half_out_of_window() {
        let rep = validate_recording(&recording(|i| if i % 2 == 0 { 2.0 } else { 1.0 }, 2000));
        assert_eq!(rep.out_of_window_fraction, 0.5);
        assert!(rep.flags.contains(&ValidationFlag::ForceOutsideWindow));
    }

    #[test]
    fn short_recording_is_flagged_not_rejected() {
        let r = recording(|_| 1.0, 3);
        let before = r.clone();
        let rep = validate_recording(&r);
        assert!(rep.flags.contains(&ValidationFlag::DurationOutOfRange));
        assert_eq!(r, before);
        assert_eq!(rep, validate_recording(&r));
    }
}
