//! Fitts' law analysis of pointing logs: ID = log2(D/W + 1), per-participant
//! regressions MT = a + b ID, movement time at the hardest ID, error rate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recording::PointingTrial;
use crate::stats::{self, StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FittsError {
    #[error("distance and width must be positive, got D={d}, W={w}")]
    NonPositiveGeometry { d: f64, w: f64 },
    #[error("no trials for condition {0}")]
    EmptyCondition(String),
    #[error("degenerate design: fewer than two distinct difficulty indexes")]
    DegenerateDesign,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionKey {
    pub tablet_id: String,
    pub haptic: bool,
}

impl ConditionKey {
    pub fn new(tablet_id: impl Into<String>, haptic: bool) -> Self {
        ConditionKey {
            tablet_id: tablet_id.into(),
            haptic,
        }
    }

    pub fn matches(&self, t: &PointingTrial) -> bool {
        t.tablet_id == self.tablet_id && t.haptic == self.haptic
    }
}

impl std::fmt::Display for ConditionKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let h = if self.haptic {
            "with haptic"
        } else {
            "without haptic"
        };
        write!(f, "{} {}", self.tablet_id, h)
    }
}

/// Shannon formulation, bits.
pub fn index_of_difficulty(d: f64, w: f64) -> Result<f64, FittsError> {
    if !(d > 0.0 && w > 0.0) {
        return Err(FittsError::NonPositiveGeometry { d, w });
    }
    Ok((d / w + 1.0).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittsFit {
    /// ms
    pub intercept_a: f64,
    /// ms/bit
    pub slope_b: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// OLS fit of `MT = a + b ID` to `(ID, MT)` points.
pub fn fitts_fit(points: &[(f64, f64)]) -> Result<FittsFit, FittsError> {
    let (ids, mts): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fit = stats::linear_regression(&ids, &mts).map_err(|e| match e {
        StatsError::DegenerateDesign | StatsError::InsufficientSamples { .. } => {
            FittsError::DegenerateDesign
        }
        other => FittsError::Stats(other),
    })?;
    Ok(FittsFit {
        intercept_a: fit.intercept,
        slope_b: fit.slope,
        r_squared: fit.r_squared,
        n_points: points.len(),
    })
}

/// Mean MT of one participant at one (D, W) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdMean {
    pub id: f64,
    pub distance_d: f64,
    pub width_w: f64,
    /// ms, over successful repetitions
    pub mean_mt: f64,
    pub n_success: usize,
    pub n_trials: usize,
}

/// (D, W, successful movement times, trial count) of one participant and geometry.
type Cell = (f64, f64, Vec<f64>, usize);

/// Per participant, per (D, W): mean MT over successful repetitions, sorted
/// by ascending ID. Cells whose every repetition failed are omitted.
pub fn aggregate_movement_times(
    trials: &[PointingTrial],
    key: &ConditionKey,
) -> Result<BTreeMap<String, Vec<IdMean>>, FittsError> {
    let mut cells: BTreeMap<String, BTreeMap<(u64, u64), Cell>> = BTreeMap::new();
    let mut any = false;
    for t in trials.iter().filter(|t| key.matches(t)) {
        any = true;
        let cell = cells
            .entry(t.participant_id.clone())
            .or_default()
            .entry((t.distance_d.to_bits(), t.width_w.to_bits()))
            .or_insert_with(|| (t.distance_d, t.width_w, Vec::new(), 0));
        cell.3 += 1;
        if t.success {
            cell.2.push(t.movement_time());
        }
    }
    if !any {
        return Err(FittsError::EmptyCondition(key.to_string()));
    }
    let mut out = BTreeMap::new();
    for (participant, by_cell) in cells {
        let mut means = Vec::new();
        for (d, w, mts, n_trials) in by_cell.into_values() {
            if mts.is_empty() {
                continue;
            }
            means.push(IdMean {
                id: index_of_difficulty(d, w)?,
                distance_d: d,
                width_w: w,
                mean_mt: stats::mean(&mts),
                n_success: mts.len(),
                n_trials,
            });
        }
        means.sort_by(|a, b| a.id.total_cmp(&b.id));
        out.insert(participant, means);
    }
    Ok(out)
}

/// Fraction of trials released outside the target.
pub fn error_rate(trials: &[PointingTrial]) -> Result<f64, FittsError> {
    if trials.is_empty() {
        return Err(FittsError::EmptyCondition(
            "error rate of an empty trial set".into(),
        ));
    }
    Ok(trials.iter().filter(|t| !t.success).count() as f64 / trials.len() as f64)
}

/// Largest ID present among the condition's trials.
pub fn hardest_id(trials: &[PointingTrial], key: &ConditionKey) -> Option<f64> {
    trials
        .iter()
        .filter(|t| key.matches(t))
        .filter_map(|t| index_of_difficulty(t.distance_d, t.width_w).ok())
        .max_by(f64::total_cmp)
}

/// Successful raw movement times at the condition's hardest ID.
pub fn hardest_id_movement_times(trials: &[PointingTrial], key: &ConditionKey) -> Vec<f64> {
    let Some(max_id) = hardest_id(trials, key) else {
        return Vec::new();
    };
    trials
        .iter()
        .filter(|t| key.matches(t) && t.success)
        .filter(|t| index_of_difficulty(t.distance_d, t.width_w).ok() == Some(max_id))
        .map(PointingTrial::movement_time)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantFit {
    pub participant_id: String,
    pub fit: FittsFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointingMetrics {
    pub key: ConditionKey,
    pub per_participant: Vec<ParticipantFit>,
    /// ms/bit
    pub per_participant_slopes: Vec<f64>,
    pub slope_mean: f64,
    pub slope_std: f64,
    pub intercept_mean: f64,
    /// Fit to the participant-averaged MT per ID.
    pub condition_fit: FittsFit,
    pub hardest_id: f64,
    /// ms, pooled over successful raw trials at the hardest ID
    pub mt_hardest_mean: f64,
    pub mt_hardest_std: f64,
    pub n_hardest: usize,
    pub error_rate: f64,
    pub n_errors: usize,
    pub n_trials: usize,
    pub n_participants: usize,
}

pub fn pointing_metrics(
    trials: &[PointingTrial],
    key: &ConditionKey,
) -> Result<PointingMetrics, FittsError> {
    let condition: Vec<PointingTrial> = trials.iter().filter(|t| key.matches(t)).cloned().collect();
    let aggregated = aggregate_movement_times(&condition, key)?;

    let mut per_participant = Vec::new();
    let mut by_id: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    for (participant, means) in &aggregated {
        for m in means {
            by_id
                .entry(m.id.to_bits())
                .or_insert_with(|| (m.id, Vec::new()))
                .1
                .push(m.mean_mt);
        }
        let points: Vec<(f64, f64)> = means.iter().map(|m| (m.id, m.mean_mt)).collect();
        match fitts_fit(&points) {
            Ok(fit) => per_participant.push(ParticipantFit {
                participant_id: participant.clone(),
                fit,
            }),
            Err(FittsError::DegenerateDesign) => {}
            Err(e) => return Err(e),
        }
    }
    if per_participant.is_empty() {
        return Err(FittsError::DegenerateDesign);
    }
    let slopes: Vec<f64> = per_participant.iter().map(|p| p.fit.slope_b).collect();
    let intercepts: Vec<f64> = per_participant.iter().map(|p| p.fit.intercept_a).collect();
    let grand: Vec<(f64, f64)> = by_id
        .into_values()
        .map(|(id, mts)| (id, stats::mean(&mts)))
        .collect();
    let condition_fit = fitts_fit(&grand)?;

    let max_id = hardest_id(&condition, key).expect("condition is non-empty");
    let hardest = hardest_id_movement_times(&condition, key);
    let n_errors = condition.iter().filter(|t| !t.success).count();
    Ok(PointingMetrics {
        key: key.clone(),
        slope_mean: stats::mean(&slopes),
        slope_std: stats::sample_std(&slopes),
        intercept_mean: stats::mean(&intercepts),
        per_participant_slopes: slopes,
        n_participants: per_participant.len(),
        per_participant,
        condition_fit,
        hardest_id: max_id,
        mt_hardest_mean: if hardest.is_empty() {
            f64::NAN
        } else {
            stats::mean(&hardest)
        },
        mt_hardest_std: stats::sample_std(&hardest),
        n_hardest: hardest.len(),
        error_rate: error_rate(&condition)?,
        n_errors,
        n_trials: condition.len(),
    })
}
