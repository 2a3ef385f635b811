//! Friction-level and friction-range metrics: μ_H, μ_L, Δμ, r_μ, FC with
//! intra-trial (δ) and inter-participant (σ) spreads.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats;
use crate::swipe::Swipe;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrictionError {
    #[error("no accepted swipes")]
    NoAcceptedSwipes,
    #[error("participant sets differ between the high and low friction conditions")]
    ParticipantSetMismatch,
    #[error("participant {participant} has no repetition {repetition}")]
    MissingRepetition {
        participant: String,
        repetition: usize,
    },
}

/// Accepted swipes of one participant in one condition, each tagged with its
/// repetition index.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantSwipes {
    pub participant_id: String,
    pub swipes: Vec<Swipe>,
    pub repetitions: Vec<usize>,
}

impl ParticipantSwipes {
    /// Repetitions numbered by position.
    pub fn new(participant_id: impl Into<String>, swipes: Vec<Swipe>) -> Self {
        let repetitions = (0..swipes.len()).collect();
        ParticipantSwipes {
            participant_id: participant_id.into(),
            swipes,
            repetitions,
        }
    }

    pub fn with_repetitions(
        participant_id: impl Into<String>,
        swipes: Vec<Swipe>,
        repetitions: Vec<usize>,
    ) -> Self {
        assert_eq!(
            swipes.len(),
            repetitions.len(),
            "one repetition index per swipe"
        );
        ParticipantSwipes {
            participant_id: participant_id.into(),
            swipes,
            repetitions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantLevel {
    pub participant_id: String,
    /// Mean of this participant's swipe means.
    pub mean_mu: f64,
    pub n_swipes: usize,
    pub repetition_means: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrictionLevelStats {
    /// Grand mean of per-participant means (μ_H or μ_L).
    pub mean_mu: f64,
    /// δ: mean within-swipe standard deviation.
    pub intra_trial_std_delta: f64,
    /// σ: sample standard deviation of per-participant means.
    pub inter_participant_std_sigma: f64,
    pub n_swipes: usize,
    pub n_participants: usize,
    /// Empty when built from published summary values.
    #[serde(default)]
    pub participants: Vec<ParticipantLevel>,
}

impl FrictionLevelStats {
    /// Level stats from summary numbers only (no per-participant detail).
    pub fn from_summary(
        mean_mu: f64,
        sigma: f64,
        delta: f64,
        n_swipes: usize,
        n_participants: usize,
    ) -> Self {
        FrictionLevelStats {
            mean_mu,
            intra_trial_std_delta: delta,
            inter_participant_std_sigma: sigma,
            n_swipes,
            n_participants,
            participants: Vec::new(),
        }
    }

    fn participant(&self, id: &str) -> Option<&ParticipantLevel> {
        self.participants.iter().find(|p| p.participant_id == id)
    }
}

pub fn friction_level_stats(
    groups: &[ParticipantSwipes],
) -> Result<FrictionLevelStats, FrictionError> {
    let mut participants = Vec::new();
    let mut swipe_stds = Vec::new();
    for g in groups.iter().filter(|g| !g.swipes.is_empty()) {
        let means: Vec<f64> = g.swipes.iter().map(Swipe::mean_mu).collect();
        swipe_stds.extend(g.swipes.iter().map(Swipe::std_mu));

        let mut by_rep: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (&rep, &m) in g.repetitions.iter().zip(&means) {
            by_rep.entry(rep).or_default().push(m);
        }
        participants.push(ParticipantLevel {
            participant_id: g.participant_id.clone(),
            mean_mu: stats::mean(&means),
            n_swipes: means.len(),
            repetition_means: by_rep
                .into_iter()
                .map(|(k, v)| (k, stats::mean(&v)))
                .collect(),
        });
    }
    if participants.is_empty() {
        return Err(FrictionError::NoAcceptedSwipes);
    }
    participants.sort_by(|a, b| a.participant_id.cmp(&b.participant_id));
    let per_participant: Vec<f64> = participants.iter().map(|p| p.mean_mu).collect();
    Ok(FrictionLevelStats {
        mean_mu: stats::mean(&per_participant),
        intra_trial_std_delta: stats::mean(&swipe_stds),
        inter_participant_std_sigma: stats::sample_std(&per_participant),
        n_swipes: swipe_stds.len(),
        n_participants: participants.len(),
        participants,
    })
}

/// How repetitions of the high condition are matched to the low condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RepetitionPairing {
    /// Repetition k with repetition k, where both exist.
    ByIndex,
    /// `(high_repetition, low_repetition)` pairs applied to every participant.
    Explicit(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrictionRangeStats {
    pub mu_high: f64,
    pub mu_low: f64,
    /// Δμ = μ_H − μ_L
    pub delta_mu: f64,
    /// r_μ = μ_H / μ_L; absent when μ_L = 0.
    pub relative_range: Option<f64>,
    /// FC = 1 − μ_L / μ_H; absent when μ_H = 0.
    pub friction_contrast: Option<f64>,
    /// Sample std across per-participant Δμ; absent without participant detail.
    pub inter_participant_std: Option<f64>,
    /// Paired per-repetition Δμ values.
    pub per_trial_samples: Vec<f64>,
    pub n_participants: usize,
}

impl FrictionRangeStats {
    pub fn n_samples(&self) -> usize {
        self.per_trial_samples.len()
    }
}

pub fn friction_range(
    high: &FrictionLevelStats,
    low: &FrictionLevelStats,
    pairing: &RepetitionPairing,
) -> Result<FrictionRangeStats, FrictionError> {
    let (mu_high, mu_low) = (high.mean_mu, low.mean_mu);
    let mut out = FrictionRangeStats {
        mu_high,
        mu_low,
        delta_mu: mu_high - mu_low,
        relative_range: (mu_low != 0.0).then(|| mu_high / mu_low),
        friction_contrast: (mu_high != 0.0).then(|| 1.0 - mu_low / mu_high),
        inter_participant_std: None,
        per_trial_samples: Vec::new(),
        n_participants: high.n_participants.min(low.n_participants),
    };
    if high.participants.is_empty() && low.participants.is_empty() {
        return Ok(out);
    }
    let ids = |s: &FrictionLevelStats| {
        s.participants
            .iter()
            .map(|p| p.participant_id.clone())
            .collect::<Vec<_>>()
    };
    if ids(high) != ids(low) {
        return Err(FrictionError::ParticipantSetMismatch);
    }

    let mut participant_deltas = Vec::new();
    for h in &high.participants {
        let l = low
            .participant(&h.participant_id)
            .expect("participant sets match");
        participant_deltas.push(h.mean_mu - l.mean_mu);
        match pairing {
            RepetitionPairing::ByIndex => {
                for (rep, hm) in &h.repetition_means {
                    if let Some(lm) = l.repetition_means.get(rep) {
                        out.per_trial_samples.push(hm - lm);
                    }
                }
            }
            RepetitionPairing::Explicit(pairs) => {
                for &(hr, lr) in pairs {
                    let get = |p: &ParticipantLevel, rep: usize| {
                        p.repetition_means.get(&rep).copied().ok_or_else(|| {
                            FrictionError::MissingRepetition {
                                participant: p.participant_id.clone(),
                                repetition: rep,
                            }
                        })
                    };
                    out.per_trial_samples.push(get(h, hr)? - get(l, lr)?);
                }
            }
        }
    }
    out.inter_participant_std = Some(stats::sample_std(&participant_deltas));
    out.n_participants = participant_deltas.len();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recording::Direction;
    use proptest::prelude::*;

    fn swipe(mu: Vec<f64>) -> Swipe {
        let n = mu.len();
        let x: Vec<f64> = (0..n).map(|i| 10.0 + i as f64 * 0.1).collect();
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.001).collect();
        Swipe::from_physical(Direction::Ltr, &x, mu, t, 100.0)
    }

    fn flat(mu: f64, reps: usize) -> Vec<Swipe> {
        (0..reps).map(|_| swipe(vec![mu; 50])).collect()
    }

    #[test]
    fn single_flat_participant() {
        let s = friction_level_stats(&[ParticipantSwipes::new("P01", flat(0.744, 3))]).unwrap();
        assert!((s.mean_mu - 0.744).abs() < 1e-15);
        assert_eq!(s.intra_trial_std_delta, 0.0);
        assert_eq!(s.inter_participant_std_sigma, 0.0);
        assert_eq!(s.n_swipes, 3);
    }

    #[test]
    fn two_participants_sigma() {
        let s = friction_level_stats(&[
            ParticipantSwipes::new("P01", flat(0.6, 2)),
            ParticipantSwipes::new("P02", flat(0.8, 5)),
        ])
        .unwrap();
        assert!((s.mean_mu - 0.7).abs() < 1e-12);
        let oracle = ((0.1f64).powi(2) * 2.0).sqrt();
        assert!((s.inter_participant_std_sigma - oracle).abs() < 1e-12);
        assert!((s.inter_participant_std_sigma - 0.1414).abs() < 1e-4);
    }

    #[test]
    fn sinusoid_delta_is_rms() {
        let amp = 0.088 * 2f64.sqrt();
        let mu: Vec<f64> = (0..10_000)
            .map(|i| 0.55 + amp * (2.0 * std::f64::consts::PI * i as f64 / 2500.0).cos())
            .collect();
        let s = friction_level_stats(&[ParticipantSwipes::new("P01", vec![swipe(mu)])]).unwrap();
        assert!((s.intra_trial_std_delta - 0.088).abs() < 0.05 * 0.088);
    }

    #[test]
    fn empty_groups_are_an_error() {
        assert_eq!(
            friction_level_stats(&[ParticipantSwipes::new("P01", vec![])]),
            Err(FrictionError::NoAcceptedSwipes)
        );
    }

    #[test]
    fn range_from_reported_means() {
        let r = |h: f64, l: f64| {
            friction_range(
                &FrictionLevelStats::from_summary(h, 0.0, 0.0, 108, 6),
                &FrictionLevelStats::from_summary(l, 0.0, 0.0, 108, 6),
                &RepetitionPairing::ByIndex,
            )
            .unwrap()
        };
        assert!((r(0.771, 0.620).delta_mu - 0.151).abs() < 1e-12);
        let tanvas = r(0.744, 0.443);
        assert!((tanvas.delta_mu - 0.301).abs() < 1e-12);
        assert!((tanvas.relative_range.unwrap() - 1.6795).abs() < 1e-4);
        assert!((tanvas.friction_contrast.unwrap() - 0.4046).abs() < 1e-4);
        let same = r(0.5, 0.5);
        assert_eq!(
            (same.delta_mu, same.relative_range, same.friction_contrast),
            (0.0, Some(1.0), Some(0.0))
        );
        assert_eq!(r(0.5, 0.0).relative_range, None);
        assert_eq!(tanvas.inter_participant_std, None);
    }

    #[test]
    fn per_repetition_pairing() {
        let high = friction_level_stats(&[
            ParticipantSwipes::new("P01", vec![swipe(vec![0.8; 20]), swipe(vec![0.9; 20])]),
            ParticipantSwipes::new("P02", vec![swipe(vec![0.7; 20])]),
        ])
        .unwrap();
        let low = friction_level_stats(&[
            ParticipantSwipes::new("P01", vec![swipe(vec![0.5; 20]), swipe(vec![0.4; 20])]),
            ParticipantSwipes::with_repetitions(
                "P02",
                vec![swipe(vec![0.3; 20]), swipe(vec![0.2; 20])],
                vec![0, 1],
            ),
        ])
        .unwrap();
        let r = friction_range(&high, &low, &RepetitionPairing::ByIndex).unwrap();
        let expected = [0.3, 0.5, 0.4];
        assert_eq!(r.n_samples(), 3);
        for (a, b) in r.per_trial_samples.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let deltas = [0.85 - 0.45, 0.7 - 0.25];
        assert!((r.inter_participant_std.unwrap() - stats::sample_std(&deltas)).abs() < 1e-12);

        let explicit =
            friction_range(&high, &low, &RepetitionPairing::Explicit(vec![(0, 1)])).unwrap();
        assert!((explicit.per_trial_samples[0] - 0.4).abs() < 1e-12);
        assert!(matches!(
            friction_range(&high, &low, &RepetitionPairing::Explicit(vec![(1, 1)])),
            Err(FrictionError::MissingRepetition { .. })
        ));
    }

    #[test]
    fn mismatched_participants() {
        let a = friction_level_stats(&[ParticipantSwipes::new("P01", flat(0.8, 1))]).unwrap();
        let b = friction_level_stats(&[ParticipantSwipes::new("P02", flat(0.5, 1))]).unwrap();
        assert_eq!(
            friction_range(&a, &b, &RepetitionPairing::ByIndex),
            Err(FrictionError::ParticipantSetMismatch)
        );
    }

    fn arb_groups() -> impl Strategy<Value = Vec<Vec<Vec<f64>>>> {
        prop::collection::vec(
            prop::collection::vec(prop::collection::vec(0.2f64..1.0, 3..20), 1..5),
            1..5,
        )
    }

    fn build(groups: &[Vec<Vec<f64>>], k: f64) -> Vec<ParticipantSwipes> {
        groups
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let swipes = g
                    .iter()
                    .map(|mu| swipe(mu.iter().map(|m| m * k).collect()))
                    .collect();
                ParticipantSwipes::new(format!("P{i:02}"), swipes)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn scale_covariance(hi in arb_groups(), k in 0.1f64..10.0) {
            let lo: Vec<Vec<Vec<f64>>> = hi.iter().map(|g| g.iter().map(|s| s.iter().map(|m| m * 0.5).collect()).collect()).collect();
            let h1 = friction_level_stats(&build(&hi, 1.0)).unwrap();
            let hk = friction_level_stats(&build(&hi, k)).unwrap();
            let l1 = friction_level_stats(&build(&lo, 1.0)).unwrap();
            let lk = friction_level_stats(&build(&lo, k)).unwrap();
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
            prop_assert!(close(hk.mean_mu, k * h1.mean_mu));
            prop_assert!(close(hk.intra_trial_std_delta, k * h1.intra_trial_std_delta));
            prop_assert!(close(hk.inter_participant_std_sigma, k * h1.inter_participant_std_sigma));
            let r1 = friction_range(&h1, &l1, &RepetitionPairing::ByIndex).unwrap();
            let rk = friction_range(&hk, &lk, &RepetitionPairing::ByIndex).unwrap();
            prop_assert!(close(rk.delta_mu, k * r1.delta_mu));
            prop_assert!(close(rk.relative_range.unwrap(), r1.relative_range.unwrap()));
            prop_assert!(close(rk.friction_contrast.unwrap(), r1.friction_contrast.unwrap()));
        }

        #[test]
        fn contrast_identity_and_bounds(lo in 0.01f64..2.0, extra in 0.0f64..2.0) {
            let hi = lo + extra;
            let r = friction_range(
                &FrictionLevelStats::from_summary(hi, 0.0, 0.0, 1, 1),
                &FrictionLevelStats::from_summary(lo, 0.0, 0.0, 1, 1),
                &RepetitionPairing::ByIndex,
            ).unwrap();
            let fc = r.friction_contrast.unwrap();
            prop_assert!((fc - (1.0 - 1.0 / r.relative_range.unwrap())).abs() < 1e-12);
            prop_assert!((0.0..1.0).contains(&fc));
        }

        #[test]
        fn delta_is_order_invariant(groups in arb_groups()) {
            let a = friction_level_stats(&build(&groups, 1.0)).unwrap();
            let mut rev = build(&groups, 1.0);
            rev.reverse();
            for g in &mut rev {
                g.swipes.reverse();
            }
            let b = friction_level_stats(&rev).unwrap();
            prop_assert!((a.intra_trial_std_delta - b.intra_trial_std_delta).abs() < 1e-12);
        }

        #[test]
        fn sigma_zero_iff_equal_means(m in 0.1f64..1.0, n in 1usize..6) {
            let groups: Vec<_> = (0..n).map(|i| ParticipantSwipes::new(format!("P{i}"), flat(m, 2))).collect();
            prop_assert_eq!(friction_level_stats(&groups).unwrap().inter_participant_std_sigma, 0.0);
        }
    }
}
