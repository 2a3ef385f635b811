//! Friction levels and friction range from simulated swipe recordings,
//! stage by stage: μ series, segmentation, trend correction, quality gate,
//! level statistics and the high/low range.

use haptibench::friction::{
    friction_level_stats, friction_range, ParticipantSwipes, RepetitionPairing,
};
use haptibench::recording::Actuation;
use haptibench::swipe::{
    assess_swipe, compute_friction, correct_trend, estimate_trend_slope, segment_swipes,
    QualityConfig, Swipe, DEFAULT_MIN_SPEED_FRACTION,
};
use haptibench::synth::{simulate_swipe_recording, SimSwipeParams, SimTabletSpec};

fn swipes(spec: &SimTabletSpec, participant: usize, actuation: Actuation) -> Vec<Swipe> {
    let params = SimSwipeParams {
        actuation,
        sample_rate: 2000.0,
        seed: 100 * participant as u64 + actuation as u64,
        participant_id: format!("P{participant:02}"),
        ..Default::default()
    };
    let (recording, _) = simulate_swipe_recording(spec, &params, None).unwrap();
    let series = compute_friction(&recording).unwrap();
    segment_swipes(&series, DEFAULT_MIN_SPEED_FRACTION).unwrap()
}

fn main() {
    let spec = SimTabletSpec::tanvas();
    let participants = 1..=4;

    let raw: Vec<(usize, Actuation, Vec<Swipe>)> = participants
        .flat_map(|p| [Actuation::Off, Actuation::ConstantMax].map(|a| (p, a, swipes(&spec, p, a))))
        .collect();
    let all: Vec<Swipe> = raw.iter().flat_map(|(_, _, s)| s.iter().cloned()).collect();
    let trend = estimate_trend_slope(&all).unwrap();
    println!(
        "trend slope {:.5} per mm (injected {:.5})",
        trend.slope_a, spec.trend_slope
    );

    let gate = QualityConfig::default();
    let mut off = Vec::new();
    let mut on = Vec::new();
    for (p, actuation, group) in &raw {
        let kept: Vec<Swipe> = group
            .iter()
            .map(|s| correct_trend(s, &trend).unwrap())
            .filter(|s| assess_swipe(s, &gate).accepted)
            .collect();
        let entry = ParticipantSwipes::new(format!("P{p:02}"), kept);
        match actuation {
            Actuation::Off => off.push(entry),
            _ => on.push(entry),
        }
    }

    let low = friction_level_stats(&off).unwrap();
    let high = friction_level_stats(&on).unwrap();
    for (name, level) in [("μ_off", &low), ("μ_on", &high)] {
        println!(
            "{name}: {:.3} (σ {:.3}, δ {:.3}, {} swipes from {} participants)",
            level.mean_mu,
            level.inter_participant_std_sigma,
            level.intra_trial_std_delta,
            level.n_swipes,
            level.n_participants
        );
    }
    let range = friction_range(&high, &low, &RepetitionPairing::ByIndex).unwrap();
    println!(
        "Δμ {:.3}, r_μ {:.3}, FC {:.3} over {} paired samples",
        range.delta_mu,
        range.relative_range.unwrap_or(f64::NAN),
        range.friction_contrast.unwrap_or(f64::NAN),
        range.n_samples()
    );
}

#[cfg(test)]
#[test]
fn runs() {
    main();
}
