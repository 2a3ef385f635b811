//! From raw force/position samples to canonical friction-vs-position swipes.
//!
//! Stages: [`compute_friction`] (μ = |F_T| / F_N under contact),
//! [`segment_swipes`] (constant-direction runs trimmed to steady speed,
//! right-to-left runs mirrored so x ascends), [`estimate_trend_slope`] /
//! [`correct_trend`] (linear crosstalk removal around x = 50 mm) and
//! [`quality_gate`].

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recording::{Direction, Recording, CONTACT_THRESHOLD_N};
use crate::signal;
use crate::stats;

/// Velocity smoothing window: 51 samples at 10 kHz.
pub const VELOCITY_WINDOW_S: f64 = 0.0051;
pub const DEFAULT_MIN_SPEED_FRACTION: f64 = 0.5;
/// Runs travelling less than this are turnaround jitter, not swipes.
pub const MIN_SWIPE_TRAVEL_MM: f64 = 5.0;
pub const MIN_SWIPE_SAMPLES: usize = 10;
pub const TREND_PIVOT_MM: f64 = 50.0;
/// Trend slopes at or beyond this magnitude (per mm) are rejected as implausible.
pub const MAX_TREND_SLOPE: f64 = 0.1;
pub const DEFAULT_CV_THRESHOLD: f64 = 0.35;
pub const DEFAULT_SLIP_DROP_FRACTION: f64 = 0.4;
pub const MAX_SLIP_EVENTS: usize = 3;
pub const SLIP_WINDOW_S: f64 = 0.020;
/// μ is smoothed over this window before slip detection so that sensor noise
/// alone does not register as slips.
pub const SLIP_SMOOTHING_S: f64 = 0.005;
/// Swipes with less of their samples inside the nominal force window are rejected.
pub const MIN_FORCE_IN_WINDOW_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwipeError {
    #[error("no sample reaches the contact threshold")]
    AllSamplesInvalid,
    #[error("no swipe found in recording")]
    NoSwipesFound,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("swipe is already trend corrected")]
    AlreadyCorrected,
    #[error("implausible trend slope {0} per mm")]
    ImplausibleTrend(f64),
}

/// Per-sample friction coefficient with validity masks.
#[derive(Debug, Clone, PartialEq)]
pub struct FrictionSeries {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// `NaN` where `valid_mask` is false.
    pub mu: Vec<f64>,
    /// Finger in contact (`f_n >= 0.1 N`).
    pub valid_mask: Vec<bool>,
    /// `f_n` inside the nominal force window.
    pub in_force_window: Vec<bool>,
    pub screen_length: f64,
    pub sample_rate: f64,
}

pub fn compute_friction(r: &Recording) -> Result<FrictionSeries, SwipeError> {
    let [lo, hi] = r.meta.nominal_force_window;
    let n = r.samples.len();
    let mut fs = FrictionSeries {
        t: Vec::with_capacity(n),
        x: Vec::with_capacity(n),
        mu: Vec::with_capacity(n),
        valid_mask: Vec::with_capacity(n),
        in_force_window: Vec::with_capacity(n),
        screen_length: r.meta.screen_length,
        sample_rate: r.meta.sample_rate,
    };
    for s in &r.samples {
        let valid = s.f_n >= CONTACT_THRESHOLD_N;
        fs.t.push(s.t);
        fs.x.push(s.x);
        fs.mu
            .push(if valid { s.f_t.abs() / s.f_n } else { f64::NAN });
        fs.valid_mask.push(valid);
        fs.in_force_window.push((lo..=hi).contains(&s.f_n));
    }
    if !fs.valid_mask.iter().any(|&v| v) {
        return Err(SwipeError::AllSamplesInvalid);
    }
    Ok(fs)
}

/// Inclusive index range into the source series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpan {
    pub start: usize,
    pub end: usize,
}

impl SampleSpan {
    pub fn overlaps(&self, other: &SampleSpan) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Swipe {
    pub direction: Direction,
    /// Canonical position, strictly ascending (`L - x` for right-to-left).
    pub x: Vec<f64>,
    pub mu: Vec<f64>,
    pub t: Vec<f64>,
    /// mm/s
    pub mean_speed: f64,
    pub trend_corrected: bool,
    pub screen_length: f64,
    pub span: SampleSpan,
    pub force_in_window_fraction: f64,
}

impl Swipe {
    /// Builds a swipe from physical positions, mirroring right-to-left input.
    pub fn from_physical(
        direction: Direction,
        x_physical: &[f64],
        mu: Vec<f64>,
        t: Vec<f64>,
        screen_length: f64,
    ) -> Self {
        assert!(x_physical.len() == mu.len() && mu.len() == t.len());
        let x: Vec<f64> = x_physical
            .iter()
            .map(|&x| canonical_x(direction, x, screen_length))
            .collect();
        let n = x.len();
        let mean_speed = if n >= 2 {
            (x[n - 1] - x[0]) / (t[n - 1] - t[0])
        } else {
            0.0
        };
        Swipe {
            direction,
            x,
            mu,
            t,
            mean_speed,
            trend_corrected: false,
            screen_length,
            span: SampleSpan {
                start: 0,
                end: n.saturating_sub(1),
            },
            force_in_window_fraction: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn mean_mu(&self) -> f64 {
        stats::mean(&self.mu)
    }

    /// Within-swipe sample standard deviation of μ.
    pub fn std_mu(&self) -> f64 {
        stats::sample_std(&self.mu)
    }

    /// Position on the physical screen axis for canonical position `x`.
    pub fn physical_x(&self, x: f64) -> f64 {
        canonical_x(self.direction, x, self.screen_length)
    }

    /// `x,mu,t` CSV for plotting.
    pub fn to_debug_csv(&self) -> String {
        let mut out = String::from("x,mu,t\n");
        for i in 0..self.len() {
            let _ = writeln!(out, "{},{},{}", self.x[i], self.mu[i], self.t[i]);
        }
        out
    }
}

/// The canonical mirror is its own inverse.
pub fn canonical_x(direction: Direction, x: f64, screen_length: f64) -> f64 {
    match direction {
        Direction::Ltr => x,
        Direction::Rtl => screen_length - x,
    }
}

/// Splits a series into constant-direction swipes.
///
/// Each run of constant velocity sign that travels at least
/// [`MIN_SWIPE_TRAVEL_MM`] is trimmed to the samples between the first and
/// last with `|v| >= min_speed_fraction * median|v|` of the run. Samples
/// without contact are dropped, and so is any sample whose canonical
/// position does not advance past its predecessor.
pub fn segment_swipes(
    fs: &FrictionSeries,
    min_speed_fraction: f64,
) -> Result<Vec<Swipe>, SwipeError> {
    let window = signal::window_samples(VELOCITY_WINDOW_S, fs.sample_rate);
    let v = signal::smoothed_velocity(&fs.t, &fs.x, window);
    let n = v.len();

    let mut swipes = Vec::new();
    let mut start = 0;
    while start < n {
        let sign = v[start].signum() * (v[start] != 0.0) as i32 as f64;
        let mut end = start;
        while end + 1 < n && v[end + 1].signum() * (v[end + 1] != 0.0) as i32 as f64 == sign {
            end += 1;
        }
        if sign != 0.0 && (fs.x[end] - fs.x[start]).abs() >= MIN_SWIPE_TRAVEL_MM {
            let direction = if sign > 0.0 {
                Direction::Ltr
            } else {
                Direction::Rtl
            };
            if let Some(s) = build_swipe(fs, &v, start, end, direction, min_speed_fraction) {
                swipes.push(s);
            }
        }
        start = end + 1;
    }
    if swipes.is_empty() {
        return Err(SwipeError::NoSwipesFound);
    }
    Ok(swipes)
}

fn build_swipe(
    fs: &FrictionSeries,
    v: &[f64],
    start: usize,
    end: usize,
    direction: Direction,
    min_speed_fraction: f64,
) -> Option<Swipe> {
    let speeds: Vec<f64> = v[start..=end].iter().map(|v| v.abs()).collect();
    let threshold = min_speed_fraction * stats::median(&speeds);
    let first = start + speeds.iter().position(|&s| s >= threshold)?;
    let last = start + speeds.iter().rposition(|&s| s >= threshold)?;

    let mut x = Vec::new();
    let mut mu = Vec::new();
    let mut t = Vec::new();
    let mut in_window = 0usize;
    for i in first..=last {
        if !fs.valid_mask[i] {
            continue;
        }
        let cx = canonical_x(direction, fs.x[i], fs.screen_length);
        if x.last().is_some_and(|&prev| cx <= prev) {
            continue;
        }
        x.push(cx);
        mu.push(fs.mu[i]);
        t.push(fs.t[i]);
        in_window += fs.in_force_window[i] as usize;
    }
    let k = x.len();
    if k < 2 {
        return None;
    }
    Some(Swipe {
        direction,
        mean_speed: (x[k - 1] - x[0]) / (t[k - 1] - t[0]),
        force_in_window_fraction: in_window as f64 / k as f64,
        x,
        mu,
        t,
        trend_corrected: false,
        screen_length: fs.screen_length,
        span: SampleSpan {
            start: first,
            end: last,
        },
    })
}

/// Linear crosstalk model ε = a (x − pivot).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendModel {
    /// per mm
    pub slope_a: f64,
    /// mm
    pub pivot: f64,
}

impl TrendModel {
    pub fn new(slope_a: f64) -> Result<Self, SwipeError> {
        if !(slope_a.abs() < MAX_TREND_SLOPE) {
            return Err(SwipeError::ImplausibleTrend(slope_a));
        }
        Ok(TrendModel {
            slope_a,
            pivot: TREND_PIVOT_MM,
        })
    }

    pub fn epsilon(&self, x: f64) -> f64 {
        self.slope_a * (x - self.pivot)
    }
}

/// Mean of per-swipe OLS slopes of μ against x.
pub fn estimate_trend_slope(swipes: &[Swipe]) -> Result<TrendModel, SwipeError> {
    let slopes: Vec<f64> = swipes
        .iter()
        .filter(|s| s.len() >= MIN_SWIPE_SAMPLES)
        .filter_map(|s| stats::linear_regression(&s.x, &s.mu).ok())
        .map(|fit| fit.slope)
        .collect();
    if slopes.is_empty() {
        return Err(SwipeError::InsufficientData(format!(
            "trend estimation needs a swipe with at least {MIN_SWIPE_SAMPLES} samples"
        )));
    }
    TrendModel::new(stats::mean(&slopes))
}

/// Subtracts ε = a (x − pivot) from μ.
pub fn correct_trend(s: &Swipe, m: &TrendModel) -> Result<Swipe, SwipeError> {
    if s.trend_corrected {
        return Err(SwipeError::AlreadyCorrected);
    }
    let mut out = s.clone();
    for (mu, &x) in out.mu.iter_mut().zip(&s.x) {
        *mu -= m.epsilon(x);
    }
    out.trend_corrected = true;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    StickSlip,
    TooShort,
    ForceOutOfWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    /// Coefficient of variation of μ (sample std / mean).
    pub cv: f64,
    pub slip_event_count: usize,
    pub accepted: bool,
    pub reject_reason: Option<RejectReason>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityConfig {
    pub cv_threshold: f64,
    pub slip_drop_fraction: f64,
    pub max_slip_events: usize,
    pub slip_window_s: f64,
    pub min_samples: usize,
    pub min_force_in_window_fraction: f64,
}

impl Default for QualityConfig {
    fn default() -> Self {
        QualityConfig {
            cv_threshold: DEFAULT_CV_THRESHOLD,
            slip_drop_fraction: DEFAULT_SLIP_DROP_FRACTION,
            max_slip_events: MAX_SLIP_EVENTS,
            slip_window_s: SLIP_WINDOW_S,
            min_samples: MIN_SWIPE_SAMPLES,
            min_force_in_window_fraction: MIN_FORCE_IN_WINDOW_FRACTION,
        }
    }
}

pub fn quality_gate(
    swipes: &[Swipe],
    cv_threshold: f64,
    slip_drop_fraction: f64,
) -> Vec<QualityReport> {
    let cfg = QualityConfig {
        cv_threshold,
        slip_drop_fraction,
        ..QualityConfig::default()
    };
    swipes.iter().map(|s| assess_swipe(s, &cfg)).collect()
}

pub fn assess_swipe(s: &Swipe, cfg: &QualityConfig) -> QualityReport {
    let mean = s.mean_mu();
    let cv = if s.len() < 2 {
        0.0
    } else if mean > 0.0 {
        s.std_mu() / mean
    } else {
        f64::INFINITY
    };
    let slip_event_count = count_slip_events(s, cfg.slip_drop_fraction, cfg.slip_window_s);
    let reject_reason = if s.len() < cfg.min_samples {
        Some(RejectReason::TooShort)
    } else if s.force_in_window_fraction < cfg.min_force_in_window_fraction {
        Some(RejectReason::ForceOutOfWindow)
    } else if !(cv <= cfg.cv_threshold) || slip_event_count > cfg.max_slip_events {
        Some(RejectReason::StickSlip)
    } else {
        None
    };
    QualityReport {
        cv,
        slip_event_count,
        accepted: reject_reason.is_none(),
        reject_reason,
    }
}

/// Counts drops of smoothed μ below its trailing maximum (over `window_s`)
/// larger than `drop_fraction` of the swipe median. Events closer than
/// `window_s` to the previous one are merged.
pub fn count_slip_events(s: &Swipe, drop_fraction: f64, window_s: f64) -> usize {
    if s.len() < 2 {
        return 0;
    }
    let limit = drop_fraction * stats::median(&s.mu);
    let dt = stats::median(&s.t.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>());
    let mu = signal::moving_average(&s.mu, signal::window_samples(SLIP_SMOOTHING_S, 1.0 / dt));
    let mut window: VecDeque<usize> = VecDeque::new();
    let mut last_event = f64::NEG_INFINITY;
    let mut count = 0;
    for i in 0..s.len() {
        while window.front().is_some_and(|&j| s.t[i] - s.t[j] > window_s) {
            window.pop_front();
        }
        if let Some(&j) = window.front() {
            if mu[j] - mu[i] > limit && s.t[i] - last_event >= window_s {
                count += 1;
                last_event = s.t[i];
            }
        }
        while window.back().is_some_and(|&j| mu[j] <= mu[i]) {
            window.pop_back();
        }
        window.push_back(i);
    }
    count
}
