//! Two simulated tablets benchmarked end to end: physical and pointing
//! metrics per tablet, then the t-test, F-test, ANOVA and summary table.

use haptibench::analysis::{analyze_physical, analyze_pointing, AnalysisConfig, TabletMetrics};
use haptibench::report::{compare_tablets, render_report, RawSamples, ReportFormat};
use haptibench::synth::{simulate_physical_session, simulate_pointing_session, SimulationSpec};

fn benchmark(preset: &str, seed: u64) -> (TabletMetrics, RawSamples) {
    let mut spec = SimulationSpec::preset(preset).unwrap();
    spec.physical.swipe.sample_rate = 2000.0;
    let physical = simulate_physical_session(&spec.tablet, &spec.physical, seed).unwrap();
    let trials = simulate_pointing_session(&spec.tablet.tablet_id, &spec.pointing, seed).unwrap();

    let mut metrics = TabletMetrics::new(&spec.tablet.tablet_id);
    metrics.physical =
        Some(analyze_physical(&physical.recordings, &AnalysisConfig::default()).unwrap());
    metrics.pointing = analyze_pointing(&trials, &spec.tablet.tablet_id).unwrap();
    let raw = metrics.raw_samples(&trials);
    (metrics, raw)
}

fn main() {
    let (a, raw_a) = benchmark("tpad", 11);
    let (b, raw_b) = benchmark("tanvas", 12);
    let report =
        compare_tablets(&a.profile().unwrap(), &b.profile().unwrap(), &raw_a, &raw_b).unwrap();
    print!(
        "{}",
        String::from_utf8(render_report(&report, ReportFormat::Markdown)).unwrap()
    );
}

#[cfg(test)]
#[test]
fn runs() {
    main();
}
