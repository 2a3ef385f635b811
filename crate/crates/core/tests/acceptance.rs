//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use haptibench::analysis::{analyze_physical, analyze_pointing, AnalysisConfig, TabletMetrics};
use haptibench::fitts::{index_of_difficulty, pointing_metrics, ConditionKey};
use haptibench::friction::{friction_range, FrictionLevelStats, RepetitionPairing};
use haptibench::latency::{measure_crossing, OnsetConfig, RidgePolarity, RidgeSpec};
use haptibench::recording::Direction;
use haptibench::report::compare_tablets;
use haptibench::stats::{
    self, f_test_variance, linear_regression, one_way_anova, two_sample_t_test,
};
use haptibench::swipe::{
    compute_friction, correct_trend, estimate_trend_slope, segment_swipes,
    DEFAULT_MIN_SPEED_FRACTION,
};
use haptibench::synth::{
    rng_for, simulate_physical_session, simulate_pointing_logs, simulate_pointing_session,
    simulate_swipe_recording, PhysicalProtocol, PointingGroundTruth, PointingProtocol,
    PointingSimSpec, SimSwipeParams, SimTabletSpec, Technology, CALIBRATED_MT_NOISE_MS,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn id_table() -> Outcome {
    let start = Instant::now();
    let listed = [6.3, 5.3, 4.8, 4.4, 4.1, 3.8, 3.6, 3.4];
    let mut bad = Vec::new();
    let mut values = Vec::new();
    for (w, &target) in (1..=8).zip(&listed) {
        let id = index_of_difficulty(80.0, f64::from(w)).unwrap();
        values.push(format!("{id:.3}"));
        let rounded = (id * 10.0).round() / 10.0;
        if rounded != target || (id - target).abs() > 0.05 {
            bad.push(format!("W={w}: {id:.3} vs {target}"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && elapsed < 1.0;
    outcome(
        pass,
        format!(
            "ID = [{}]; mismatches: {bad:?}; {elapsed:.4} s",
            values.join(", ")
        ),
    )
}

fn friction_range_arithmetic() -> Outcome {
    let r = |h: f64, l: f64| {
        let high = FrictionLevelStats::from_summary(h, 0.0, 0.0, 108, 6);
        let low = FrictionLevelStats::from_summary(l, 0.0, 0.0, 108, 6);
        friction_range(&high, &low, &RepetitionPairing::ByIndex).unwrap()
    };
    let tpad = r(0.771, 0.620);
    let tanvas = r(0.744, 0.443);
    let checks = [
        (tpad.delta_mu - 0.151).abs() < 1e-12,
        (tanvas.delta_mu - 0.301).abs() < 1e-12,
        (tpad.relative_range.unwrap() - 1.2435).abs() < 1e-3,
        (tanvas.relative_range.unwrap() - 1.6795).abs() < 1e-3,
        (tpad.friction_contrast.unwrap() - 0.1959).abs() < 1e-3,
        (tanvas.friction_contrast.unwrap() - 0.4046).abs() < 1e-3,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "Δμ {:.12} / {:.12}, r_μ {:.4} / {:.4}, FC {:.4} / {:.4}",
            tpad.delta_mu,
            tanvas.delta_mu,
            tpad.relative_range.unwrap(),
            tanvas.relative_range.unwrap(),
            tpad.friction_contrast.unwrap(),
            tanvas.friction_contrast.unwrap()
        ),
    )
}

fn physical_round_trip() -> Outcome {
    let start = Instant::now();
    let tau = 0.001;
    let spec = SimTabletSpec {
        tablet_id: "electro".into(),
        technology: Technology::Electroadhesion,
        mu_base: 0.45,
        mu_actuated_mean: 0.75,
        spatial_pattern: None,
        latency_delay: 0.020 - tau * std::f64::consts::LN_2,
        response_time_constant: tau,
        noise_std: 0.01,
        ..SimTabletSpec::tanvas()
    };
    let ds = simulate_physical_session(&spec, &PhysicalProtocol::default(), 2024).unwrap();
    let m = analyze_physical(&ds.recordings, &AnalysisConfig::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let (high, low, delta) = ds.truth.level_means(&m.discarded_participants);
    let latency = m.latency.as_ref().unwrap();
    let reps = m.mu_low.n_swipes;
    let pass = (m.mu_high.mean_mu - high).abs() <= 0.01
        && (m.mu_low.mean_mu - low).abs() <= 0.01
        && (m.friction_range.delta_mu - delta).abs() <= 0.015
        && (latency.mean_dt - 0.020).abs() <= 0.003
        && elapsed < 60.0;
    outcome(
        pass,
        format!(
            "μ_H {:.4} (truth {high:.4}), μ_L {:.4} (truth {low:.4}), Δμ {:.4} (truth {delta:.4}), ΔT {:.2} ms over {} crossings, {reps} low-level swipes, {} participants discarded, {elapsed:.1} s",
            m.mu_high.mean_mu,
            m.mu_low.mean_mu,
            m.friction_range.delta_mu,
            latency.mean_dt * 1e3,
            latency.n,
            m.discarded_participants.len()
        ),
    )
}

fn haptic_shift() -> Outcome {
    let spec = SimTabletSpec {
        latency_delay: 0.100,
        response_time_constant: 0.0,
        noise_std: 0.005,
        trend_slope: 0.0,
        ..SimTabletSpec::tanvas()
    };
    let params = SimSwipeParams {
        speed: 200.0,
        seed: 5,
        ..Default::default()
    };
    let ridge = RidgeSpec::new(49.0, 51.0, RidgePolarity::FrictionUp).unwrap();
    let (rec, _) = simulate_swipe_recording(&spec, &params, Some(&ridge)).unwrap();
    let swipes =
        segment_swipes(&compute_friction(&rec).unwrap(), DEFAULT_MIN_SPEED_FRACTION).unwrap();
    let mut pass = swipes.len() == 6;
    let mut shifts = Vec::new();
    for s in &swipes {
        let c = measure_crossing(s, &ridge, &OnsetConfig::default()).unwrap();
        let expected = match c.direction {
            Direction::Ltr => 20.0,
            Direction::Rtl => -20.0,
        };
        pass &= (c.shift_mm - expected).abs() <= 1.0;
        shifts.push(format!("{}:{:+.2}", c.direction.as_str(), c.shift_mm));
    }
    outcome(pass, format!("onset shifts (mm) [{}]", shifts.join(", ")))
}

fn ultrasonic_flatness() -> Outcome {
    let spec = SimTabletSpec::tpad();
    let ds = simulate_physical_session(&spec, &PhysicalProtocol::default(), 77).unwrap();
    let m = analyze_physical(&ds.recordings, &AnalysisConfig::default()).unwrap();
    let delta = m.mu_low.intra_trial_std_delta;
    outcome(
        (delta - 0.088).abs() <= 0.009,
        format!(
            "δ(μ_L) = {delta:.4} with amplitude 0.124, wavelength 25 mm, noise {}",
            spec.noise_std
        ),
    )
}

fn residual_slope(noise: f64) -> f64 {
    let spec = SimTabletSpec {
        noise_std: noise,
        ..SimTabletSpec::tanvas()
    };
    let mut swipes = Vec::new();
    for seed in 0..3 {
        let params = SimSwipeParams {
            seed,
            ..Default::default()
        };
        let (rec, _) = simulate_swipe_recording(&spec, &params, None).unwrap();
        swipes.extend(
            segment_swipes(&compute_friction(&rec).unwrap(), DEFAULT_MIN_SPEED_FRACTION).unwrap(),
        );
    }
    let model = estimate_trend_slope(&swipes).unwrap();
    swipes
        .iter()
        .map(|s| {
            let c = correct_trend(s, &model).unwrap();
            linear_regression(&c.x, &c.mu).unwrap().slope.abs()
        })
        .fold(0.0, f64::max)
}

fn trend_correction() -> Outcome {
    let noisy = residual_slope(0.01);
    let clean = residual_slope(0.0);
    outcome(
        noisy < 1e-4 && clean < 1e-9,
        format!("max |residual slope| per mm: {noisy:.2e} (noise 0.01), {clean:.2e} (noiseless)"),
    )
}

fn oracle_mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (
        m,
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0),
    )
}

fn stats_oracle() -> Outcome {
    let mut worst_stat: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut worst_t2: f64 = 0.0;
    let mut dfs_ok = true;
    for seed in 0..20u64 {
        let mut rng = rng_for(seed, 99);
        let mut draw = |n: usize, mu: f64, sd: f64| -> Vec<f64> {
            (0..n)
                .map(|_| mu + sd * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        let shift = 0.02 * seed as f64;
        let a = draw(108, 0.30, 0.12);
        let b = draw(108, 0.30 - shift, 0.10 + 0.003 * seed as f64);
        let groups: Vec<Vec<f64>> = (0..4)
            .map(|k| draw(60, 1500.0 + 40.0 * k as f64 * (seed % 3) as f64, 700.0))
            .collect();

        let (ma, va) = oracle_mean_var(&a);
        let (mb, vb) = oracle_mean_var(&b);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let df = na + nb - 2.0;
        let sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
        let t = (ma - mb) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt();
        let p_t = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t.abs()));
        let got = two_sample_t_test(&a, &b, true).unwrap();
        worst_stat = worst_stat.max((got.t_stat - t).abs());
        worst_p = worst_p.max((got.p_value - p_t).abs());
        dfs_ok &= got.df == 214.0;

        let f = va / vb;
        let fd = FisherSnedecor::new(na - 1.0, nb - 1.0).unwrap();
        let p_f = (2.0 * fd.cdf(f).min(1.0 - fd.cdf(f))).min(1.0);
        let got = f_test_variance(&a, &b).unwrap();
        worst_stat = worst_stat.max((got.f_stat - f).abs());
        worst_p = worst_p.max((got.p_value - p_f).abs());
        dfs_ok &= (got.df1, got.df2) == (107, 107);

        let all: Vec<f64> = groups.iter().flatten().copied().collect();
        let grand = all.iter().sum::<f64>() / all.len() as f64;
        let ssb: f64 = groups
            .iter()
            .map(|g| {
                let m = g.iter().sum::<f64>() / g.len() as f64;
                g.len() as f64 * (m - grand) * (m - grand)
            })
            .sum();
        let ssw: f64 = groups
            .iter()
            .map(|g| {
                let m = g.iter().sum::<f64>() / g.len() as f64;
                g.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
            })
            .sum();
        let (d1, d2) = (3.0, all.len() as f64 - 4.0);
        let f_anova = (ssb / d1) / (ssw / d2);
        let p_anova = 1.0 - FisherSnedecor::new(d1, d2).unwrap().cdf(f_anova);
        let got = one_way_anova(&groups).unwrap();
        worst_stat = worst_stat.max((got.f_stat - f_anova).abs() / f_anova.max(1.0));
        worst_p = worst_p.max((got.p_value - p_anova).abs());
        dfs_ok &= got.df_between == 3 && got.df_within == 236;

        let two = one_way_anova(&[&a, &b]).unwrap();
        let t = two_sample_t_test(&a, &b, true).unwrap().t_stat;
        worst_t2 = worst_t2.max((two.f_stat - t * t).abs());
    }
    outcome(
        worst_stat < 1e-9 && worst_p < 1e-6 && worst_t2 < 1e-9 && dfs_ok,
        format!(
            "20 datasets: max |Δstat| {worst_stat:.1e}, max |Δp| {worst_p:.1e}, max |F − t²| {worst_t2:.1e}, df (214; 107,107; 3) {}",
            if dfs_ok { "reproduced" } else { "MISMATCH" }
        ),
    )
}

fn fitts_round_trip() -> Outcome {
    let key = ConditionKey::new("t", false);
    let exact = PointingGroundTruth {
        mt_noise_std: 0.0,
        miss_prob: 0.0,
        ..Default::default()
    };
    let trials =
        simulate_pointing_logs(&exact, &PointingProtocol::default(), "t", false, 1).unwrap();
    let m = pointing_metrics(&trials, &key).unwrap();
    let noiseless = (m.condition_fit.slope_b - 250.0).abs() < 1e-9
        && (m.slope_mean - 250.0).abs() < 1e-9
        && (m.condition_fit.r_squared - 1.0).abs() < 1e-12;

    let gt = PointingGroundTruth {
        mt_noise_std: CALIBRATED_MT_NOISE_MS,
        ..Default::default()
    };
    let mut slopes = Vec::new();
    let mut r2 = Vec::new();
    for seed in 0..10 {
        let trials =
            simulate_pointing_logs(&gt, &PointingProtocol::default(), "t", false, seed).unwrap();
        let m = pointing_metrics(&trials, &key).unwrap();
        slopes.push(m.slope_mean);
        r2.push(m.condition_fit.r_squared);
    }
    let b = stats::mean(&slopes);
    let r2_median = stats::median(&r2);
    let worst = slopes.iter().map(|s| (s - 250.0).abs()).fold(0.0, f64::max);
    outcome(
        noiseless && (b - 250.0).abs() <= 15.0 && (0.95..=0.97).contains(&r2_median),
        format!(
            "noiseless exact: {noiseless}; σ = {CALIBRATED_MT_NOISE_MS} ms: median R² {r2_median:.4}, mean b over 10 seeds {b:.1} ms/bit (largest single-seed deviation {worst:.1})"
        ),
    )
}

fn fast_protocol(panel_seed: u64) -> PhysicalProtocol {
    PhysicalProtocol {
        ridge_recordings: 1,
        panel_seed: Some(panel_seed),
        swipe: SimSwipeParams {
            sample_rate: 1000.0,
            ..PhysicalProtocol::default().swipe
        },
        ..Default::default()
    }
}

fn tablet_run(
    spec: &SimTabletSpec,
    pointing: &PointingSimSpec,
    protocol: &PhysicalProtocol,
    seed: u64,
) -> (TabletMetrics, haptibench::report::RawSamples) {
    let ds = simulate_physical_session(spec, protocol, seed).unwrap();
    let trials = simulate_pointing_session(&spec.tablet_id, pointing, seed).unwrap();
    let mut m = TabletMetrics::new(&spec.tablet_id);
    m.physical = Some(analyze_physical(&ds.recordings, &AnalysisConfig::default()).unwrap());
    m.pointing = analyze_pointing(&trials, &spec.tablet_id).unwrap();
    let raw = m.raw_samples(&trials);
    (m, raw)
}

fn null_comparison() -> Outcome {
    let twin_a = SimTabletSpec {
        tablet_id: "twin_a".into(),
        ..SimTabletSpec::tanvas()
    };
    let twin_b = SimTabletSpec {
        tablet_id: "twin_b".into(),
        ..SimTabletSpec::tanvas()
    };
    let same = PointingGroundTruth::default();
    let pointing = |panel: u64| PointingSimSpec {
        without_haptic: same.clone(),
        with_haptic: same.clone(),
        protocol: PointingProtocol {
            panel_seed: Some(panel),
            ..Default::default()
        },
    };
    let quiet: Vec<bool> = (0..100u64)
        .into_par_iter()
        .map(|run| {
            let panel = 10_000 + run;
            let (ma, ra) = tablet_run(&twin_a, &pointing(panel), &fast_protocol(panel), 2 * run);
            let (mb, rb) = tablet_run(
                &twin_b,
                &pointing(panel),
                &fast_protocol(panel),
                2 * run + 1,
            );
            let r =
                compare_tablets(&ma.profile().unwrap(), &mb.profile().unwrap(), &ra, &rb).unwrap();
            r.tests.range_t_test.p_value > 0.01
                && r.tests.range_f_test.p_value > 0.01
                && r.tests.mt_anova.p_value > 0.01
        })
        .collect();
    let n_quiet = quiet.iter().filter(|&&q| q).count();

    let electro = |id: &str, delta: f64| SimTabletSpec {
        tablet_id: id.into(),
        mu_base: 0.45,
        mu_actuated_mean: 0.45 + delta,
        ..SimTabletSpec::tanvas()
    };
    let pointing = PointingSimSpec {
        protocol: PointingProtocol {
            panel_seed: Some(5),
            ..Default::default()
        },
        ..Default::default()
    };
    let (ma, ra) = tablet_run(&electro("small", 0.15), &pointing, &fast_protocol(5), 1);
    let (mb, rb) = tablet_run(&electro("large", 0.30), &pointing, &fast_protocol(5), 2);
    let r = compare_tablets(&ma.profile().unwrap(), &mb.profile().unwrap(), &ra, &rb).unwrap();
    let p = r.tests.range_t_test.p_value;
    outcome(
        n_quiet >= 95 && p < 1e-6,
        format!(
            "twins: {n_quiet}/100 runs with all p > 0.01; Δμ 0.15 vs 0.30: t = {:.2}, df {}, p = {p:.2e}",
            r.tests.range_t_test.t_stat, r.tests.range_t_test.df
        ),
    )
}

fn run_cli(args: &[&str]) -> i32 {
    haptibench::cli::run(std::iter::once("haptibench").chain(args.iter().copied()))
}

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn cli_pipeline(root: &Path, jobs: &str) {
    let s = |p: &Path| p.to_str().unwrap().to_string();
    for (name, preset) in [("a", "tpad"), ("b", "tanvas")] {
        let mut spec = haptibench::synth::SimulationSpec::preset(preset).unwrap();
        spec.physical.swipe.sample_rate = 2000.0;
        let spec_path = root.join(format!("{name}.spec.json"));
        std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
        let data = root.join(format!("data_{name}"));
        let metrics = root.join(format!("{name}.metrics.json"));
        assert_eq!(
            run_cli(&[
                "--jobs",
                jobs,
                "simulate",
                "--spec",
                &s(&spec_path),
                "--out",
                &s(&data),
                "--seed",
                "7"
            ]),
            0
        );
        assert_eq!(
            run_cli(&[
                "--jobs",
                jobs,
                "physical",
                "--in",
                &s(&data),
                "--out",
                &s(&metrics)
            ]),
            0
        );
        assert_eq!(
            run_cli(&["fitts", "--trials", &s(&data), "--out", &s(&metrics)]),
            0
        );
    }
    for out in ["cmp.report.md", "cmp.report.json"] {
        let code = run_cli(&[
            "compare",
            &s(&root.join("a.metrics.json")),
            &s(&root.join("b.metrics.json")),
            "--raw-a",
            &s(&root.join("data_a")),
            "--raw-b",
            &s(&root.join("data_b")),
            "--out",
            &s(&root.join(out)),
        ]);
        assert_eq!(code, 0);
    }
}

fn determinism() -> Outcome {
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    cli_pipeline(one.path(), "1");
    cli_pipeline(two.path(), "4");
    let a = tree_bytes(one.path());
    let b = tree_bytes(two.path());
    let differing: Vec<&String> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| &x.0)
        .collect();
    outcome(
        a.len() == b.len() && differing.is_empty(),
        format!(
            "{} files compared across two runs (--jobs 1 vs 4); differing: {differing:?}",
            a.len()
        ),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 10] = [
        ("ID table", id_table),
        ("Friction-range arithmetic", friction_range_arithmetic),
        ("Synthetic physical round-trip", physical_round_trip),
        ("Haptic-shift check", haptic_shift),
        ("Ultrasonic flatness metric", ultrasonic_flatness),
        ("Trend correction", trend_correction),
        ("Stats oracle", stats_oracle),
        ("Fitts round-trip", fitts_round_trip),
        ("Null comparison", null_comparison),
        ("Determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += !o.pass as usize;
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
