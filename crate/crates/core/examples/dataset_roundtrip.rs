//! A seeded dataset on disk: recordings with sidecars, the pointing log and
//! the ground-truth manifest. Files are read back, validated and analysed,
//! and the recovered metrics are set against the manifest.

use haptibench::analysis::{analyze_physical, load_recordings, load_trials, AnalysisConfig};
use haptibench::recording::validate_recording;
use haptibench::synth::{write_dataset, SimulationSpec};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = SimulationSpec::preset("tanvas").unwrap();
    spec.physical.participants = 3;
    spec.physical.swipe.sample_rate = 2000.0;
    let truth = write_dataset(&spec, 42, dir.path()).unwrap();

    let recordings = load_recordings(dir.path()).unwrap();
    let flagged = recordings
        .iter()
        .filter(|r| !validate_recording(r).flags.is_empty())
        .count();
    let trials = load_trials(dir.path()).unwrap();
    println!(
        "{} recordings ({flagged} with validation flags), {} pointing trials",
        recordings.len(),
        trials.len()
    );

    let m = analyze_physical(&recordings, &AnalysisConfig::default()).unwrap();
    let (high, low, delta) = truth.level_means(&m.discarded_participants);
    println!("μ_H {:.4} (truth {high:.4})", m.mu_high.mean_mu);
    println!("μ_L {:.4} (truth {low:.4})", m.mu_low.mean_mu);
    println!("Δμ  {:.4} (truth {delta:.4})", m.friction_range.delta_mu);
    println!(
        "trend {:.5} per mm (truth {:.5})",
        m.trend.slope_a, truth.trend_slope
    );
    if let Some(latency) = &m.latency {
        println!(
            "ΔT  {:.2} ms (truth {:.2} ms)",
            latency.mean_dt * 1e3,
            truth.latency_s * 1e3
        );
    }
}

#[cfg(test)]
#[test]
fn runs() {
    main();
}
