//! Deterministic simulator of haptic tablets with known ground truth.
//!
//! Physical recordings come from a triangle-wave finger trajectory over a
//! friction field μ(x, t) that switches between an unactuated and an
//! actuated level. Ridge recordings gate actuation on finger occupancy after
//! a pure delay and a first-order lag. Pointing sessions draw movement times
//! from a Fitts law with participant offsets and Gaussian noise. All
//! randomness comes from ChaCha8 streams derived from a single seed.

mod physical;
mod pointing;
mod trajectory;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use physical::{
    simulate_physical_session, simulate_swipe_recording, write_physical_dataset, GroundTruth,
    ParticipantTraits, ParticipantTruth, PhysicalDataset, PhysicalProtocol, RecordingTruth,
    SimEventLog, SimSwipeParams,
};
pub use pointing::{
    simulate_pointing_logs, simulate_pointing_session, PointingGroundTruth, PointingProtocol,
    PointingSimSpec, CALIBRATED_MT_NOISE_MS,
};
pub use trajectory::Trajectory;

/// Default crosstalk trend injected into μ, per mm.
pub const DEFAULT_TREND_SLOPE: f64 = 0.0036;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, SynthError> {
    Err(SynthError::InvalidSpec(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Ultrasonic,
    Electroadhesion,
}

/// Spatial friction ripple under actuation (ultrasonic nodes and antinodes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialPattern {
    pub amplitude: f64,
    /// mm
    pub wavelength: f64,
    /// rad
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StickSlip {
    pub enabled: bool,
    /// Peak-to-peak relative size of the sawtooth.
    pub drop_fraction: f64,
    pub period_s: f64,
}

impl Default for StickSlip {
    fn default() -> Self {
        StickSlip {
            enabled: false,
            drop_fraction: 0.5,
            period_s: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTabletSpec {
    pub tablet_id: String,
    pub technology: Technology,
    /// μ with actuation off.
    pub mu_base: f64,
    /// μ under full actuation (before the spatial pattern).
    pub mu_actuated_mean: f64,
    #[serde(default)]
    pub spatial_pattern: Option<SpatialPattern>,
    /// s
    pub latency_delay: f64,
    /// s
    pub response_time_constant: f64,
    /// Per-sample Gaussian noise on μ.
    pub noise_std: f64,
    #[serde(default)]
    pub stick_slip: StickSlip,
    /// Linear crosstalk slope along the canonical swipe axis, per mm.
    #[serde(default = "default_trend")]
    pub trend_slope: f64,
}

fn default_trend() -> f64 {
    DEFAULT_TREND_SLOPE
}

impl SimTabletSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.mu_base > 0.0 && self.mu_actuated_mean > 0.0) {
            return invalid("friction levels must be positive");
        }
        if let Some(p) = &self.spatial_pattern {
            if !(p.wavelength > 0.0) {
                return invalid("spatial pattern wavelength must be positive");
            }
        }
        if !(self.latency_delay >= 0.0 && self.response_time_constant >= 0.0) {
            return invalid("latency delay and response time constant must be non-negative");
        }
        if !(self.noise_std >= 0.0) {
            return invalid("noise_std must be non-negative");
        }
        if self.stick_slip.enabled && !(self.stick_slip.period_s > 0.0) {
            return invalid("stick-slip period must be positive");
        }
        Ok(())
    }

    /// Expected onset delay after a crossing: delay plus the half-rise time.
    pub fn response_midpoint(&self) -> f64 {
        self.latency_delay + self.response_time_constant * std::f64::consts::LN_2
    }

    /// Ultrasonic tablet: actuation lowers friction, with a sinusoidal ripple.
    pub fn tpad() -> Self {
        SimTabletSpec {
            tablet_id: "tpad".into(),
            technology: Technology::Ultrasonic,
            mu_base: 0.771,
            mu_actuated_mean: 0.620,
            spatial_pattern: Some(SpatialPattern {
                amplitude: 0.124,
                wavelength: 25.0,
                phase: 0.0,
            }),
            latency_delay: 0.033 - 0.004 * std::f64::consts::LN_2,
            response_time_constant: 0.004,
            noise_std: 0.025,
            stick_slip: StickSlip::default(),
            trend_slope: DEFAULT_TREND_SLOPE,
        }
    }

    /// Electroadhesion tablet: actuation raises friction, fast response.
    pub fn tanvas() -> Self {
        SimTabletSpec {
            tablet_id: "tanvas".into(),
            technology: Technology::Electroadhesion,
            mu_base: 0.443,
            mu_actuated_mean: 0.744,
            spatial_pattern: None,
            latency_delay: 0.006 - 0.001 * std::f64::consts::LN_2,
            response_time_constant: 0.001,
            noise_std: 0.02,
            stick_slip: StickSlip::default(),
            trend_slope: DEFAULT_TREND_SLOPE,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "tpad" | "t-pad" => Some(Self::tpad()),
            "tanvas" => Some(Self::tanvas()),
            _ => None,
        }
    }
}

/// Complete input of one simulated tablet dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub tablet: SimTabletSpec,
    #[serde(default)]
    pub physical: PhysicalProtocol,
    #[serde(default)]
    pub pointing: PointingSimSpec,
}

impl SimulationSpec {
    pub fn preset(name: &str) -> Option<Self> {
        let tablet = SimTabletSpec::preset(name)?;
        // (b without, b with, miss without, miss with)
        let (b0, b1, e0, e1) = match tablet.technology {
            Technology::Ultrasonic => (293.0, 187.0, 0.109, 0.104),
            Technology::Electroadhesion => (217.0, 180.0, 0.050, 0.104),
        };
        let gt = |b_ms_per_bit, miss_prob| PointingGroundTruth {
            b_ms_per_bit,
            miss_prob,
            ..Default::default()
        };
        Some(SimulationSpec {
            tablet,
            physical: PhysicalProtocol::default(),
            pointing: PointingSimSpec {
                without_haptic: gt(b0, e0),
                with_haptic: gt(b1, e1),
                protocol: PointingProtocol::default(),
            },
        })
    }
}

/// Independent generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Writes the full dataset (recordings, pointing log, manifest) into `dir`.
pub fn write_dataset(
    spec: &SimulationSpec,
    seed: u64,
    dir: &std::path::Path,
) -> Result<GroundTruth, crate::Error> {
    let dataset = simulate_physical_session(&spec.tablet, &spec.physical, seed)?;
    let trials = simulate_pointing_session(&spec.tablet.tablet_id, &spec.pointing, seed)?;
    let mut truth = write_physical_dataset(&dataset, dir)?;
    let log_path = dir.join(POINTING_LOG_FILE);
    crate::util::write_atomic(
        &log_path,
        crate::recording::serialize_pointing_log(&trials).as_bytes(),
    )
    .map_err(|e| crate::Error::io(&log_path, e))?;
    truth.pointing = Some(spec.pointing.clone());
    let manifest = dir.join(GROUND_TRUTH_FILE);
    crate::util::write_atomic(&manifest, crate::util::to_json_pretty(&truth).as_bytes())
        .map_err(|e| crate::Error::io(&manifest, e))?;
    Ok(truth)
}

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";
pub const POINTING_LOG_FILE: &str = "pointing.trials.jsonl";
pub const RECORDINGS_DIR: &str = "recordings";
