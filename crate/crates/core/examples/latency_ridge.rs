//! End-to-end latency from swipes across a narrow friction ridge, and the
//! spatial shift a user perceives at different swipe speeds.

use haptibench::latency::{estimate_latency, spatial_shift, OnsetConfig, RidgePolarity, RidgeSpec};
use haptibench::recording::Actuation;
use haptibench::swipe::{compute_friction, segment_swipes, DEFAULT_MIN_SPEED_FRACTION};
use haptibench::synth::{simulate_swipe_recording, SimSwipeParams, SimTabletSpec};

fn main() {
    let spec = SimTabletSpec::tanvas();
    let ridge = RidgeSpec::new(49.0, 51.0, RidgePolarity::FrictionUp).unwrap();
    println!(
        "simulated response midpoint {:.1} ms",
        spec.response_midpoint() * 1e3
    );

    for speed in [60.0, 100.0, 200.0] {
        let params = SimSwipeParams {
            speed,
            actuation: Actuation::Ridge,
            seed: speed as u64,
            ..Default::default()
        };
        let (recording, events) = simulate_swipe_recording(&spec, &params, Some(&ridge)).unwrap();
        let swipes = segment_swipes(
            &compute_friction(&recording).unwrap(),
            DEFAULT_MIN_SPEED_FRACTION,
        )
        .unwrap();
        let estimate = estimate_latency(&swipes, &ridge, &OnsetConfig::default()).unwrap();
        let shifts: Vec<String> = estimate
            .per_crossing
            .iter()
            .map(|c| format!("{:+.1}", c.shift_mm))
            .collect();
        println!(
            "{speed:>5} mm/s: ΔT {:.1} ± {:.1} ms over {} of {} crossings, expected shift {:.1} mm, measured [{}]",
            estimate.mean_dt * 1e3,
            estimate.std_dt * 1e3,
            estimate.n,
            events.ridge_crossing_times.len(),
            spatial_shift(estimate.mean_dt, speed),
            shifts.join(", ")
        );
    }
}

#[cfg(test)]
#[test]
fn runs() {
    main();
}
