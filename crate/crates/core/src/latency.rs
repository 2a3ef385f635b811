//! End-to-end latency from ridge recordings.
//!
//! For each swipe, t1 is the interpolated time at which the finger reaches
//! the ridge's leading edge and t2 the onset of the friction response: the
//! centre of the half-maximum interval around the extremum of the smoothed
//! friction derivative. For a symmetric transition this is the inflection
//! point; for a first-order rise after a pure delay it is the half-rise time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recording::Direction;
use crate::signal;
use crate::stats;
use crate::swipe::Swipe;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatencyError {
    #[error("invalid ridge: {0}")]
    InvalidRidge(String),
    #[error("swipe does not cross the ridge edge")]
    RidgeNotCrossed,
    #[error("no actuation detected after the ridge crossing")]
    NoActuationDetected,
    #[error("need at least {needed} crossings, got {got}")]
    InsufficientCrossings { needed: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RidgePolarity {
    FrictionUp,
    FrictionDown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub polarity: RidgePolarity,
}

impl RidgeSpec {
    pub fn new(x_lo: f64, x_hi: f64, polarity: RidgePolarity) -> Result<Self, LatencyError> {
        if !(x_hi > x_lo) {
            return Err(LatencyError::InvalidRidge(format!(
                "[{x_lo}, {x_hi}] has no width"
            )));
        }
        Ok(RidgeSpec {
            x_lo,
            x_hi,
            polarity,
        })
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// Physical position of the edge met first in `direction`.
    pub fn leading_edge(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Ltr => self.x_lo,
            Direction::Rtl => self.x_hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetConfig {
    /// Zero-phase moving-average window applied to μ before differentiation, s.
    pub smoothing_window: f64,
    /// Onset search interval after t1, s.
    pub search_window: f64,
    /// The derivative peak must exceed this multiple of the baseline derivative std.
    pub noise_factor: f64,
    /// Baseline interval before t1, s.
    pub baseline_window: f64,
    /// Absolute floor on the derivative peak, 1/s.
    pub min_derivative: f64,
}

impl Default for OnsetConfig {
    fn default() -> Self {
        OnsetConfig {
            smoothing_window: 0.005,
            search_window: 0.300,
            noise_factor: 5.0,
            baseline_window: 0.050,
            min_derivative: 1e-3,
        }
    }
}

/// t1: time at which the swipe reaches the ridge's leading edge.
pub fn detect_ridge_crossing(s: &Swipe, ridge: &RidgeSpec) -> Result<f64, LatencyError> {
    let edge = s.physical_x(ridge.leading_edge(s.direction));
    if s.x.first() == Some(&edge) {
        return Ok(s.t[0]);
    }
    signal::interpolated_crossing(&s.t, &s.x, edge, true, 0).ok_or(LatencyError::RidgeNotCrossed)
}

/// t2 for a swipe whose crossing time is `t1`.
pub fn detect_actuation_onset(
    s: &Swipe,
    ridge: &RidgeSpec,
    t1: f64,
    cfg: &OnsetConfig,
) -> Result<f64, LatencyError> {
    let n = s.len();
    if n < 3 {
        return Err(LatencyError::NoActuationDetected);
    }
    let dt = stats::median(&s.t.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>());
    let window = signal::window_samples(cfg.smoothing_window, 1.0 / dt);
    let smoothed = signal::moving_average(&s.mu, window);
    let deriv = signal::central_difference(&s.t, &smoothed);

    let baseline: Vec<f64> = (0..n)
        .filter(|&i| s.t[i] < t1 && s.t[i] >= t1 - cfg.baseline_window)
        .map(|i| deriv[i])
        .collect();
    let (base_level, base_std) = if baseline.len() >= 2 {
        (stats::mean(&baseline), stats::sample_std(&baseline))
    } else {
        (0.0, 0.0)
    };

    let sign = match ridge.polarity {
        RidgePolarity::FrictionUp => 1.0,
        RidgePolarity::FrictionDown => -1.0,
    };
    // Skip the ends, where the truncated smoothing window amplifies noise.
    let half_window = window / 2;
    let first = s.t.partition_point(|&t| t < t1).max(half_window);
    let last =
        s.t.partition_point(|&t| t <= t1 + cfg.search_window)
            .min(n.saturating_sub(half_window + 1));
    if first >= last {
        return Err(LatencyError::NoActuationDetected);
    }
    let g = |i: usize| sign * (deriv[i] - base_level);
    let peak = (first..last)
        .max_by(|&a, &b| g(a).total_cmp(&g(b)))
        .expect("non-empty range");
    let height = g(peak);
    if !(height > (cfg.noise_factor * base_std).max(cfg.min_derivative)) {
        return Err(LatencyError::NoActuationDetected);
    }

    let half = height / 2.0;
    let mut lo = peak;
    while lo > first && g(lo - 1) > half {
        lo -= 1;
    }
    let t_left = if lo > first {
        let (a, b) = (lo - 1, lo);
        s.t[a] + (half - g(a)) / (g(b) - g(a)) * (s.t[b] - s.t[a])
    } else {
        s.t[lo]
    };
    let mut hi = peak;
    while hi + 1 < last && g(hi + 1) > half {
        hi += 1;
    }
    let t_right = if hi + 1 < last {
        let (a, b) = (hi, hi + 1);
        s.t[a] + (g(a) - half) / (g(a) - g(b)) * (s.t[b] - s.t[a])
    } else {
        s.t[hi]
    };
    Ok(0.5 * (t_left + t_right))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingLatency {
    pub direction: Direction,
    pub t1: f64,
    pub t2: f64,
    pub dt: f64,
    /// Mean speed of the swipe, mm/s.
    pub speed: f64,
    /// Physical position at which the response was detected, mm.
    pub onset_position_mm: f64,
    /// Signed displacement of the onset from the leading edge, mm.
    pub shift_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionLatency {
    pub direction: Direction,
    pub mean_dt: f64,
    pub std_dt: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyEstimate {
    pub per_crossing: Vec<CrossingLatency>,
    /// ΔT, s
    pub mean_dt: f64,
    /// Sample std across crossings, s.
    pub std_dt: f64,
    pub n: usize,
    pub per_direction: Vec<DirectionLatency>,
    /// Swipes that did not cross the ridge or showed no response.
    pub skipped: usize,
}

/// Measures one crossing.
pub fn measure_crossing(
    s: &Swipe,
    ridge: &RidgeSpec,
    cfg: &OnsetConfig,
) -> Result<CrossingLatency, LatencyError> {
    let t1 = detect_ridge_crossing(s, ridge)?;
    let t2 = detect_actuation_onset(s, ridge, t1, cfg)?;
    let canonical_onset = interpolate(&s.t, &s.x, t2);
    let onset_position_mm = s.physical_x(canonical_onset);
    Ok(CrossingLatency {
        direction: s.direction,
        t1,
        t2,
        dt: t2 - t1,
        speed: s.mean_speed,
        onset_position_mm,
        shift_mm: onset_position_mm - ridge.leading_edge(s.direction),
    })
}

fn interpolate(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    let i = ts.partition_point(|&v| v < t).clamp(1, ts.len() - 1);
    let f = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    ys[i - 1] + f * (ys[i] - ys[i - 1])
}

/// Pools crossings over all swipes; both directions count alike.
pub fn estimate_latency(
    swipes: &[Swipe],
    ridge: &RidgeSpec,
    cfg: &OnsetConfig,
) -> Result<LatencyEstimate, LatencyError> {
    let mut per_crossing = Vec::new();
    let mut skipped = 0;
    let mut crossed = 0;
    for s in swipes {
        match measure_crossing(s, ridge, cfg) {
            Ok(c) => {
                crossed += 1;
                per_crossing.push(c);
            }
            Err(LatencyError::NoActuationDetected) => {
                crossed += 1;
                skipped += 1;
            }
            Err(_) => skipped += 1,
        }
    }
    if per_crossing.is_empty() && crossed > 0 {
        return Err(LatencyError::NoActuationDetected);
    }
    if per_crossing.len() < 2 {
        return Err(LatencyError::InsufficientCrossings {
            needed: 2,
            got: per_crossing.len(),
        });
    }
    let dts: Vec<f64> = per_crossing.iter().map(|c| c.dt).collect();
    let per_direction = [Direction::Ltr, Direction::Rtl]
        .into_iter()
        .filter_map(|d| {
            let v: Vec<f64> = per_crossing
                .iter()
                .filter(|c| c.direction == d)
                .map(|c| c.dt)
                .collect();
            (!v.is_empty()).then(|| DirectionLatency {
                direction: d,
                mean_dt: stats::mean(&v),
                std_dt: stats::sample_std(&v),
                n: v.len(),
            })
        })
        .collect();
    Ok(LatencyEstimate {
        mean_dt: stats::mean(&dts),
        std_dt: stats::sample_std(&dts),
        n: dts.len(),
        per_crossing,
        per_direction,
        skipped,
    })
}

/// Haptic shift in mm for a latency `dt` (s) at sliding speed `v` (mm/s).
pub fn spatial_shift(dt: f64, v: f64) -> f64 {
    debug_assert!(dt >= 0.0 && v > 0.0);
    v * dt
}
