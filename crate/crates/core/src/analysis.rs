//! Dataset-level pipelines: recordings to physical metrics, trial logs to
//! pointing metrics, and the per-tablet metrics file tying both together.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fitts::{hardest_id_movement_times, pointing_metrics, ConditionKey, PointingMetrics};
use crate::friction::{
    friction_level_stats, friction_range, FrictionLevelStats, FrictionRangeStats,
    ParticipantSwipes, RepetitionPairing,
};
use crate::latency::{estimate_latency, LatencyEstimate, OnsetConfig, RidgePolarity, RidgeSpec};
use crate::recording::{self, Actuation, PointingTrial, Recording, ValidationFlag};
use crate::report::{
    build_tablet_profile, ProfileInputs, RawSamples, ReportError, TabletProfile, SPEC_VERSION,
};
use crate::swipe::{
    self, assess_swipe, compute_friction, correct_trend, segment_swipes, QualityConfig,
    RejectReason, Swipe, SwipeError, TrendModel, DEFAULT_MIN_SPEED_FRACTION, TREND_PIVOT_MM,
};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub min_speed_fraction: f64,
    pub quality: QualityConfig,
    pub onset: OnsetConfig,
    /// Fixed crosstalk slope per mm; estimated from the data when absent.
    pub trend_slope: Option<f64>,
    /// mm
    pub trend_pivot: f64,
    /// Inferred from the constant-actuation levels when absent.
    pub ridge_polarity: Option<RidgePolarity>,
    /// A participant is discarded when more than this fraction of their
    /// swipes in any condition is rejected.
    pub discard_fraction: f64,
    pub pairing: RepetitionPairing,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            min_speed_fraction: DEFAULT_MIN_SPEED_FRACTION,
            quality: QualityConfig::default(),
            onset: OnsetConfig::default(),
            trend_slope: None,
            trend_pivot: TREND_PIVOT_MM,
            ridge_polarity: None,
            discard_fraction: 0.5,
            pairing: RepetitionPairing::ByIndex,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SwipeCounts {
    pub segmented: usize,
    pub accepted: usize,
    pub too_short: usize,
    pub force_out_of_window: usize,
    pub stick_slip: usize,
    /// Recordings in which no swipe was found.
    pub empty_recordings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalMetrics {
    pub tablet_id: String,
    pub n_recordings: usize,
    pub trend: TrendModel,
    /// Condition providing μ_H.
    pub high_condition: Actuation,
    pub mu_high: FrictionLevelStats,
    pub mu_low: FrictionLevelStats,
    pub friction_range: FrictionRangeStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<RidgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency: Option<LatencyEstimate>,
    pub swipes: SwipeCounts,
    pub discarded_participants: Vec<String>,
    /// Recordings raising each validation flag.
    pub validation_flags: BTreeMap<ValidationFlag, usize>,
}

/// Contents of a `*.metrics.json` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabletMetrics {
    pub spec_version: String,
    pub tablet_id: String,
    #[serde(default)]
    pub physical: Option<PhysicalMetrics>,
    /// One entry per haptic condition, without haptic first.
    #[serde(default)]
    pub pointing: Vec<PointingMetrics>,
}

impl TabletMetrics {
    pub fn new(tablet_id: impl Into<String>) -> Self {
        TabletMetrics {
            spec_version: SPEC_VERSION.to_string(),
            tablet_id: tablet_id.into(),
            physical: None,
            pointing: Vec::new(),
        }
    }

    pub fn pointing_for(&self, haptic: bool) -> Option<&PointingMetrics> {
        self.pointing.iter().find(|p| p.key.haptic == haptic)
    }

    pub fn profile(&self) -> Result<TabletProfile, ReportError> {
        let p = self.physical.as_ref();
        let inputs = ProfileInputs {
            mu_high: p.map(|p| &p.mu_high),
            mu_low: p.map(|p| &p.mu_low),
            friction_range: p.map(|p| &p.friction_range),
            latency: p.and_then(|p| p.latency.as_ref()),
            pointing_without_haptic: self.pointing_for(false),
            pointing_with_haptic: self.pointing_for(true),
        };
        build_tablet_profile(&self.tablet_id, &inputs)
    }

    /// Per-trial samples for the cross-tablet tests; MT comes from `trials`.
    pub fn raw_samples(&self, trials: &[PointingTrial]) -> RawSamples {
        RawSamples {
            delta_mu_trials: self
                .physical
                .as_ref()
                .map(|p| p.friction_range.per_trial_samples.clone())
                .unwrap_or_default(),
            mt_hardest_without_haptic: hardest_id_movement_times(
                trials,
                &ConditionKey::new(&self.tablet_id, false),
            ),
            mt_hardest_with_haptic: hardest_id_movement_times(
                trials,
                &ConditionKey::new(&self.tablet_id, true),
            ),
        }
    }
}

struct Segmented {
    participant_id: String,
    actuation: Actuation,
    order: (u32, u32),
    ridge_span: Option<[f64; 2]>,
    swipes: Vec<Swipe>,
    flags: Vec<ValidationFlag>,
}

fn segment(r: &Recording, cfg: &AnalysisConfig) -> Result<Segmented, Error> {
    let flags = recording::validate_recording(r).flags;
    let fs = compute_friction(r)?;
    let swipes = match segment_swipes(&fs, cfg.min_speed_fraction) {
        Ok(s) => s,
        Err(SwipeError::NoSwipesFound) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    Ok(Segmented {
        participant_id: r.meta.participant_id.clone(),
        actuation: r.meta.actuation,
        order: (r.meta.session_index, r.meta.trial_index),
        ridge_span: r.meta.ridge_span,
        swipes,
        flags,
    })
}

/// Physical metrics of one tablet from all of its recordings.
pub fn analyze_physical(
    recordings: &[Recording],
    cfg: &AnalysisConfig,
) -> Result<PhysicalMetrics, Error> {
    let tablet_ids: BTreeSet<&str> = recordings
        .iter()
        .map(|r| r.meta.tablet_id.as_str())
        .collect();
    let tablet_id = match tablet_ids.len() {
        0 => return Err(Error::Input("no recordings".into())),
        1 => tablet_ids.into_iter().next().expect("one id").to_string(),
        _ => {
            return Err(Error::Input(format!(
                "recordings mix tablets: {tablet_ids:?}"
            )))
        }
    };

    let mut segmented = recordings
        .par_iter()
        .map(|r| segment(r, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    segmented.sort_by(|a, b| {
        (&a.participant_id, a.actuation as u8, a.order).cmp(&(
            &b.participant_id,
            b.actuation as u8,
            b.order,
        ))
    });

    let mut validation_flags = BTreeMap::new();
    let mut counts = SwipeCounts::default();
    for s in &segmented {
        for f in &s.flags {
            *validation_flags.entry(*f).or_insert(0) += 1;
        }
        counts.segmented += s.swipes.len();
        counts.empty_recordings += s.swipes.is_empty() as usize;
    }

    let trend = match cfg.trend_slope {
        Some(a) => TrendModel::new(a)?,
        None => {
            let pool: Vec<Swipe> = segmented
                .iter()
                .filter(|s| s.actuation != Actuation::Ridge)
                .flat_map(|s| s.swipes.iter())
                .filter(|s| assess_swipe(s, &cfg.quality).accepted)
                .cloned()
                .collect();
            swipe::estimate_trend_slope(&pool)?
        }
    };
    let trend = TrendModel {
        pivot: cfg.trend_pivot,
        ..trend
    };

    // (participant, actuation) -> accepted (repetition, swipe) and (rejected, total).
    let mut accepted: BTreeMap<(String, u8), Vec<(usize, Swipe)>> = BTreeMap::new();
    let mut rejected: BTreeMap<(String, u8), (usize, usize)> = BTreeMap::new();
    let mut ridge_spans = BTreeSet::new();
    for s in &segmented {
        let key = (s.participant_id.clone(), s.actuation as u8);
        // Repetitions number every segmented swipe of the condition in recording order.
        let rep_base = rejected.get(&key).map_or(0, |r| r.1);
        let tally = rejected.entry(key.clone()).or_insert((0, 0));
        let list = accepted.entry(key).or_default();
        if let Some([lo, hi]) = s.ridge_span {
            ridge_spans.insert((lo.to_bits(), hi.to_bits()));
        }
        for (k, sw) in s.swipes.iter().enumerate() {
            let corrected = correct_trend(sw, &trend)?;
            let q = assess_swipe(&corrected, &cfg.quality);
            match q.reject_reason {
                None => {
                    counts.accepted += 1;
                    list.push((rep_base + k, corrected));
                }
                Some(reason) => {
                    tally.0 += 1;
                    match reason {
                        RejectReason::TooShort => counts.too_short += 1,
                        RejectReason::ForceOutOfWindow => counts.force_out_of_window += 1,
                        RejectReason::StickSlip => counts.stick_slip += 1,
                    }
                }
            }
        }
        tally.1 += s.swipes.len();
    }
    let mut discarded = BTreeSet::new();
    for ((participant, _), (n_rej, n_all)) in &rejected {
        if *n_all == 0 || *n_rej as f64 > cfg.discard_fraction * *n_all as f64 {
            discarded.insert(participant.clone());
        }
    }

    let group = |actuation: Actuation| -> Vec<ParticipantSwipes> {
        accepted
            .iter()
            .filter(|((p, a), v)| *a == actuation as u8 && !discarded.contains(p) && !v.is_empty())
            .map(|((p, _), v)| {
                let (reps, swipes): (Vec<usize>, Vec<Swipe>) = v.iter().cloned().unzip();
                ParticipantSwipes::with_repetitions(p.clone(), swipes, reps)
            })
            .collect()
    };
    let off = friction_level_stats(&group(Actuation::Off))?;
    let on = friction_level_stats(&group(Actuation::ConstantMax))?;
    let (high_condition, high, low) = if on.mean_mu >= off.mean_mu {
        (Actuation::ConstantMax, on, off)
    } else {
        (Actuation::Off, off, on)
    };
    let range = friction_range(&high, &low, &cfg.pairing)?;

    let ridge_swipes: Vec<Swipe> = accepted
        .iter()
        .filter(|((p, a), _)| *a == Actuation::Ridge as u8 && !discarded.contains(p))
        .flat_map(|(_, v)| v.iter().map(|(_, s)| s.clone()))
        .collect();
    let (ridge, latency) = match ridge_spans.len() {
        0 => (None, None),
        1 => {
            let (lo, hi) = ridge_spans.into_iter().next().expect("one span");
            let polarity =
                cfg.ridge_polarity
                    .unwrap_or(if high_condition == Actuation::ConstantMax {
                        RidgePolarity::FrictionUp
                    } else {
                        RidgePolarity::FrictionDown
                    });
            let ridge = RidgeSpec::new(f64::from_bits(lo), f64::from_bits(hi), polarity)?;
            let est = estimate_latency(&ridge_swipes, &ridge, &cfg.onset)?;
            (Some(ridge), Some(est))
        }
        _ => {
            return Err(Error::Input(
                "ridge recordings use different ridge spans".into(),
            ))
        }
    };

    Ok(PhysicalMetrics {
        tablet_id,
        n_recordings: recordings.len(),
        trend,
        high_condition,
        mu_high: high,
        mu_low: low,
        friction_range: range,
        ridge,
        latency,
        swipes: counts,
        discarded_participants: discarded.into_iter().collect(),
        validation_flags,
    })
}

/// Pointing metrics per haptic condition present in `trials` for `tablet_id`.
pub fn analyze_pointing(
    trials: &[PointingTrial],
    tablet_id: &str,
) -> Result<Vec<PointingMetrics>, Error> {
    let mut out = Vec::new();
    for haptic in [false, true] {
        let key = ConditionKey::new(tablet_id, haptic);
        if trials.iter().any(|t| key.matches(t)) {
            out.push(pointing_metrics(trials, &key)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Input(format!(
            "no pointing trials for tablet '{tablet_id}'"
        )));
    }
    Ok(out)
}

/// The single tablet id of a set of trials.
pub fn single_tablet_id(trials: &[PointingTrial]) -> Result<String, Error> {
    let ids: BTreeSet<&str> = trials.iter().map(|t| t.tablet_id.as_str()).collect();
    match ids.len() {
        1 => Ok(ids.into_iter().next().expect("one id").to_string()),
        0 => Err(Error::Input("no pointing trials".into())),
        _ => Err(Error::Input(format!(
            "trials mix tablets {ids:?}; select one with --tablet"
        ))),
    }
}

fn sorted_files(dir: &Path, suffix: &str) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file()
            && path
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(suffix))
        {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Reads every `*.csv` recording (with sidecar) under `dir/recordings`, or
/// under `dir` itself when it has no `recordings` subdirectory.
pub fn load_recordings(dir: &Path) -> Result<Vec<Recording>, Error> {
    let sub = dir.join(crate::synth::RECORDINGS_DIR);
    let root = if sub.is_dir() { sub } else { dir.to_path_buf() };
    let files = sorted_files(&root, ".csv")?;
    if files.is_empty() {
        return Err(Error::Input(format!(
            "no recordings found in {}",
            root.display()
        )));
    }
    Ok(files
        .par_iter()
        .map(|p| recording::read_recording(p))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Reads a JSONL trial log, or every `*.trials.jsonl` file in a directory.
pub fn load_trials(path: &Path) -> Result<Vec<PointingTrial>, Error> {
    let files = if path.is_dir() {
        sorted_files(path, ".trials.jsonl")?
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return Err(Error::Input(format!(
            "no *.trials.jsonl files in {}",
            path.display()
        )));
    }
    let mut trials = Vec::new();
    for f in files {
        trials.extend(recording::read_pointing_log(&f)?);
    }
    Ok(trials)
}

pub fn read_metrics(path: &Path) -> Result<TabletMetrics, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::json(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{
        simulate_physical_session, PhysicalProtocol, SimSwipeParams, SimTabletSpec,
    };

    fn fast_protocol() -> PhysicalProtocol {
        PhysicalProtocol {
            participants: 3,
            recordings_per_condition: 2,
            ridge_recordings: 1,
            swipe: SimSwipeParams {
                sample_rate: 2000.0,
                ..PhysicalProtocol::default().swipe
            },
            ..Default::default()
        }
    }

    #[test]
    fn recovers_levels_and_orientation() {
        let ds = simulate_physical_session(&SimTabletSpec::tpad(), &fast_protocol(), 3).unwrap();
        let m = analyze_physical(&ds.recordings, &AnalysisConfig::default()).unwrap();
        assert_eq!(m.tablet_id, "tpad");
        assert_eq!(m.high_condition, Actuation::Off);
        let (high, low, _) = ds.truth.level_means(&m.discarded_participants);
        assert!((m.mu_high.mean_mu - high).abs() < 0.02);
        assert!((m.mu_low.mean_mu - low).abs() < 0.02);
        let kept = 3 - m.discarded_participants.len();
        assert!(m.friction_range.n_samples() <= kept * 2 * 6);
        assert!(m.friction_range.n_samples() >= kept * 6);
        assert_eq!(m.ridge.unwrap().polarity, RidgePolarity::FrictionDown);
        assert!(
            (m.trend.slope_a - 0.0036).abs() < 5e-4,
            "{}",
            m.trend.slope_a
        );
    }

    #[test]
    fn stick_slip_participant_is_discarded() {
        let protocol = PhysicalProtocol {
            stick_slip_probability: 1.0,
            ..fast_protocol()
        };
        let ds = simulate_physical_session(&SimTabletSpec::tanvas(), &protocol, 3).unwrap();
        let err = analyze_physical(&ds.recordings, &AnalysisConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Friction(_) | Error::Swipe(_)), "{err}");
    }

    #[test]
    fn mixed_tablets_are_rejected() {
        let a = simulate_physical_session(&SimTabletSpec::tpad(), &fast_protocol(), 1).unwrap();
        let b = simulate_physical_session(&SimTabletSpec::tanvas(), &fast_protocol(), 1).unwrap();
        let all: Vec<Recording> = a.recordings.into_iter().chain(b.recordings).collect();
        assert!(matches!(
            analyze_physical(&all, &AnalysisConfig::default()),
            Err(Error::Input(_))
        ));
    }
}
