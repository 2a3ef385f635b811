//! Per-tablet profiles, cross-tablet statistics and rendered reports.
//!
//! Profiles follow the physical (friction levels, range, latency) and
//! pointing (Fitts slope, MT at the hardest ID, error rate) table layouts.
//! The summary lists every selected descriptor with its mean, std and n and
//! whether lower or higher values are preferable. No overall winner is
//! computed.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitts::PointingMetrics;
use crate::friction::{FrictionLevelStats, FrictionRangeStats};
use crate::latency::LatencyEstimate;
use crate::stats::{self, AnovaResult, FTestResult, StatsError, TTestResult};

/// Version of the report and metrics JSON schema.
pub const SPEC_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("missing metric: {0}")]
    MissingMetric(&'static str),
    #[error("statistical test failed: {0}")]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricDirection {
    LowerBetter,
    HigherBetter,
    Informational,
}

impl MetricDirection {
    fn mark(self) -> &'static str {
        match self {
            MetricDirection::LowerBetter => "(-)",
            MetricDirection::HigherBetter => "(+)",
            MetricDirection::Informational => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDescriptor {
    pub name: String,
    pub value: f64,
    pub std: Option<f64>,
    pub n: usize,
    pub direction: MetricDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub mean: f64,
    /// σ
    pub inter_participant_std: f64,
    /// δ
    pub intra_trial_std: f64,
    pub n_swipes: usize,
    pub n_participants: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeRow {
    pub mean: f64,
    pub inter_participant_std: Option<f64>,
    pub n: usize,
    pub relative_range: Option<f64>,
    pub friction_contrast: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyRow {
    pub mean_ms: f64,
    pub std_ms: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalProfile {
    pub mu_high: LevelRow,
    pub mu_low: LevelRow,
    pub friction_range: RangeRow,
    pub latency: LatencyRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointingRow {
    pub haptic: bool,
    /// ms/bit
    pub slope_mean: f64,
    pub slope_std: f64,
    pub n_participants: usize,
    pub hardest_id: f64,
    /// ms
    pub mt_hardest_mean: f64,
    pub mt_hardest_std: f64,
    pub n_hardest: usize,
    pub error_rate: f64,
    pub n_trials: usize,
}

impl From<&PointingMetrics> for PointingRow {
    fn from(m: &PointingMetrics) -> Self {
        PointingRow {
            haptic: m.key.haptic,
            slope_mean: m.slope_mean,
            slope_std: m.slope_std,
            n_participants: m.n_participants,
            hardest_id: m.hardest_id,
            mt_hardest_mean: m.mt_hardest_mean,
            mt_hardest_std: m.mt_hardest_std,
            n_hardest: m.n_hardest,
            error_rate: m.error_rate,
            n_trials: m.n_trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointingProfile {
    pub without_haptic: PointingRow,
    pub with_haptic: PointingRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabletProfile {
    pub tablet_id: String,
    pub physical: PhysicalProfile,
    pub pointing: PointingProfile,
}

/// Component metrics for one tablet; any `None` is reported as missing.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProfileInputs<'a> {
    pub mu_high: Option<&'a FrictionLevelStats>,
    pub mu_low: Option<&'a FrictionLevelStats>,
    pub friction_range: Option<&'a FrictionRangeStats>,
    pub latency: Option<&'a LatencyEstimate>,
    pub pointing_without_haptic: Option<&'a PointingMetrics>,
    pub pointing_with_haptic: Option<&'a PointingMetrics>,
}

fn level_row(s: &FrictionLevelStats) -> LevelRow {
    LevelRow {
        mean: s.mean_mu,
        inter_participant_std: s.inter_participant_std_sigma,
        intra_trial_std: s.intra_trial_std_delta,
        n_swipes: s.n_swipes,
        n_participants: s.n_participants,
    }
}

pub fn build_tablet_profile(
    tablet_id: &str,
    inputs: &ProfileInputs<'_>,
) -> Result<TabletProfile, ReportError> {
    let mu_high = inputs
        .mu_high
        .ok_or(ReportError::MissingMetric("mu_high"))?;
    let mu_low = inputs.mu_low.ok_or(ReportError::MissingMetric("mu_low"))?;
    let range = inputs
        .friction_range
        .ok_or(ReportError::MissingMetric("friction_range"))?;
    let latency = inputs
        .latency
        .ok_or(ReportError::MissingMetric("latency"))?;
    let without = inputs
        .pointing_without_haptic
        .ok_or(ReportError::MissingMetric("pointing_without_haptic"))?;
    let with = inputs
        .pointing_with_haptic
        .ok_or(ReportError::MissingMetric("pointing_with_haptic"))?;
    Ok(TabletProfile {
        tablet_id: tablet_id.to_string(),
        physical: PhysicalProfile {
            mu_high: level_row(mu_high),
            mu_low: level_row(mu_low),
            friction_range: RangeRow {
                mean: range.delta_mu,
                inter_participant_std: range.inter_participant_std,
                n: if range.n_samples() > 0 {
                    range.n_samples()
                } else {
                    range.n_participants
                },
                relative_range: range.relative_range,
                friction_contrast: range.friction_contrast,
            },
            latency: LatencyRow {
                mean_ms: latency.mean_dt * 1e3,
                std_ms: latency.std_dt * 1e3,
                n: latency.n,
            },
        },
        pointing: PointingProfile {
            without_haptic: without.into(),
            with_haptic: with.into(),
        },
    })
}

impl TabletProfile {
    /// Selected descriptors in summary-table order.
    pub fn descriptors(&self) -> Vec<MetricDescriptor> {
        use MetricDirection::*;
        let p = &self.physical;
        let d = |name: &str, value: f64, std: Option<f64>, n: usize, direction| MetricDescriptor {
            name: name.to_string(),
            value,
            std,
            n,
            direction,
        };
        let mut out = vec![
            d(
                "Lowest friction: mean",
                p.mu_low.mean,
                Some(p.mu_low.inter_participant_std),
                p.mu_low.n_participants,
                Informational,
            ),
            d(
                "Lowest friction: intra-trial SD",
                p.mu_low.intra_trial_std,
                None,
                p.mu_low.n_swipes,
                LowerBetter,
            ),
            d(
                "Highest friction: mean",
                p.mu_high.mean,
                Some(p.mu_high.inter_participant_std),
                p.mu_high.n_participants,
                Informational,
            ),
            d(
                "Highest friction: intra-trial SD",
                p.mu_high.intra_trial_std,
                None,
                p.mu_high.n_swipes,
                LowerBetter,
            ),
            d(
                "Friction range: mean",
                p.friction_range.mean,
                p.friction_range.inter_participant_std,
                p.friction_range.n,
                HigherBetter,
            ),
        ];
        if let Some(sd) = p.friction_range.inter_participant_std {
            out.push(d(
                "Friction range: inter-part. SD",
                sd,
                None,
                p.mu_high.n_participants,
                LowerBetter,
            ));
        }
        out.push(d(
            "Latency: mean (ms)",
            p.latency.mean_ms,
            Some(p.latency.std_ms),
            p.latency.n,
            LowerBetter,
        ));
        for (label, row) in [
            ("without haptic", &self.pointing.without_haptic),
            ("with haptic", &self.pointing.with_haptic),
        ] {
            out.push(d(
                &format!("MT at hardest ID, {label}: mean (ms)"),
                row.mt_hardest_mean,
                Some(row.mt_hardest_std),
                row.n_hardest,
                LowerBetter,
            ));
            out.push(d(
                &format!("MT at hardest ID, {label}: SD (ms)"),
                row.mt_hardest_std,
                None,
                row.n_hardest,
                LowerBetter,
            ));
        }
        for (label, row) in [
            ("without haptic", &self.pointing.without_haptic),
            ("with haptic", &self.pointing.with_haptic),
        ] {
            out.push(d(
                &format!("Error rate, {label}"),
                row.error_rate,
                None,
                row.n_trials,
                LowerBetter,
            ));
        }
        out
    }
}

/// Per-trial samples feeding the cross-tablet tests.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RawSamples {
    pub delta_mu_trials: Vec<f64>,
    pub mt_hardest_without_haptic: Vec<f64>,
    pub mt_hardest_with_haptic: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTests {
    /// Pooled two-sample t-test on per-trial Δμ (a vs b).
    pub range_t_test: TTestResult,
    /// Variance F-test on per-trial Δμ (a over b).
    pub range_f_test: FTestResult,
    /// One-way ANOVA on MT at the hardest ID over the four conditions.
    pub mt_anova: AnovaResult,
    pub anova_groups: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub name: String,
    pub direction: MetricDirection,
    pub a: MetricDescriptor,
    pub b: MetricDescriptor,
    /// b − a
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub spec_version: String,
    pub tablet_a: String,
    pub tablet_b: String,
    pub profile_a: TabletProfile,
    pub profile_b: TabletProfile,
    pub tests: ComparisonTests,
    pub summary: Vec<SummaryRow>,
    pub warnings: Vec<String>,
}

pub fn compare_tablets(
    a: &TabletProfile,
    b: &TabletProfile,
    raw_a: &RawSamples,
    raw_b: &RawSamples,
) -> Result<ComparisonReport, ReportError> {
    let mut warnings = Vec::new();
    let (na, nb) = (raw_a.delta_mu_trials.len(), raw_b.delta_mu_trials.len());
    if na != nb {
        warnings.push(format!(
            "sample size mismatch for friction range trials: {} has {na}, {} has {nb}",
            a.tablet_id, b.tablet_id
        ));
    }
    let groups = [
        (
            format!("{} without haptic", a.tablet_id),
            &raw_a.mt_hardest_without_haptic,
        ),
        (
            format!("{} with haptic", a.tablet_id),
            &raw_a.mt_hardest_with_haptic,
        ),
        (
            format!("{} without haptic", b.tablet_id),
            &raw_b.mt_hardest_without_haptic,
        ),
        (
            format!("{} with haptic", b.tablet_id),
            &raw_b.mt_hardest_with_haptic,
        ),
    ];
    let sizes: Vec<usize> = groups.iter().map(|(_, g)| g.len()).collect();
    if sizes.iter().any(|&n| n != sizes[0]) {
        let detail: Vec<String> = groups
            .iter()
            .map(|(name, g)| format!("{name}: {}", g.len()))
            .collect();
        warnings.push(format!(
            "unequal movement-time group sizes ({})",
            detail.join(", ")
        ));
    }

    let tests = ComparisonTests {
        range_t_test: stats::two_sample_t_test(
            &raw_a.delta_mu_trials,
            &raw_b.delta_mu_trials,
            true,
        )?,
        range_f_test: stats::f_test_variance(&raw_a.delta_mu_trials, &raw_b.delta_mu_trials)?,
        mt_anova: stats::one_way_anova(
            &groups.iter().map(|(_, g)| g.as_slice()).collect::<Vec<_>>(),
        )?,
        anova_groups: groups.iter().map(|(name, _)| name.clone()).collect(),
    };

    let da = a.descriptors();
    let db = b.descriptors();
    let summary = da
        .into_iter()
        .filter_map(|x| {
            let y = db.iter().find(|y| y.name == x.name)?.clone();
            Some(SummaryRow {
                name: x.name.clone(),
                direction: x.direction,
                difference: y.value - x.value,
                a: x,
                b: y,
            })
        })
        .collect();

    Ok(ComparisonReport {
        spec_version: SPEC_VERSION.to_string(),
        tablet_a: a.tablet_id.clone(),
        tablet_b: b.tablet_id.clone(),
        profile_a: a.clone(),
        profile_b: b.clone(),
        tests,
        summary,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Markdown,
}

pub fn render_report(report: &ComparisonReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => crate::util::to_json_pretty(report).into_bytes(),
        ReportFormat::Markdown => render_markdown(report).into_bytes(),
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.digits$}"))
}

fn p_value(p: f64) -> String {
    if p < 1e-3 {
        format!("{p:.2e}")
    } else {
        format!("{p:.3}")
    }
}

fn render_markdown(r: &ComparisonReport) -> String {
    let (a, b) = (&r.profile_a, &r.profile_b);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Haptic tablet comparison: {} vs {}\n",
        r.tablet_a, r.tablet_b
    );
    let _ = writeln!(s, "Schema version {}\n", r.spec_version);

    let _ = writeln!(s, "## Physical\n");
    let _ = writeln!(
        s,
        "| Metric | Descriptor | {} | {} |",
        r.tablet_a, r.tablet_b
    );
    let _ = writeln!(s, "|---|---|---|---|");
    for (label, la, lb) in [
        (
            "Highest friction μ_H",
            &a.physical.mu_high,
            &b.physical.mu_high,
        ),
        (
            "Lowest friction μ_L",
            &a.physical.mu_low,
            &b.physical.mu_low,
        ),
    ] {
        let _ = writeln!(
            s,
            "| {label} | Mean | {:.3} (n={}x{}) | {:.3} (n={}x{}) |",
            la.mean,
            la.n_participants,
            la.n_swipes / la.n_participants.max(1),
            lb.mean,
            lb.n_participants,
            lb.n_swipes / lb.n_participants.max(1)
        );
        let _ = writeln!(
            s,
            "| | Inter-part. std σ | {:.3} | {:.3} |",
            la.inter_participant_std, lb.inter_participant_std
        );
        let _ = writeln!(
            s,
            "| | Intra-trial std δ | {:.3} | {:.3} |",
            la.intra_trial_std, lb.intra_trial_std
        );
    }
    let (ra, rb) = (&a.physical.friction_range, &b.physical.friction_range);
    let _ = writeln!(
        s,
        "| Friction range Δμ | Mean | {:.3} (n={}) | {:.3} (n={}) |",
        ra.mean, ra.n, rb.mean, rb.n
    );
    let _ = writeln!(
        s,
        "| | Inter-part. std | {} | {} |",
        opt(ra.inter_participant_std, 3),
        opt(rb.inter_participant_std, 3)
    );
    let _ = writeln!(
        s,
        "| | Relative range r_μ | {} | {} |",
        opt(ra.relative_range, 3),
        opt(rb.relative_range, 3)
    );
    let _ = writeln!(
        s,
        "| | Friction contrast FC | {} | {} |",
        opt(ra.friction_contrast, 3),
        opt(rb.friction_contrast, 3)
    );
    let (la, lb) = (&a.physical.latency, &b.physical.latency);
    let _ = writeln!(
        s,
        "| End-to-end latency ΔT | Mean ± std | {:.1} ± {:.1} ms (n={}) | {:.1} ± {:.1} ms (n={}) |\n",
        la.mean_ms, la.std_ms, la.n, lb.mean_ms, lb.std_ms, lb.n
    );

    let _ = writeln!(s, "## Pointing\n");
    let _ = writeln!(
        s,
        "| Metric | Condition | {} | {} |",
        r.tablet_a, r.tablet_b
    );
    let _ = writeln!(s, "|---|---|---|---|");
    let rows = |p: &TabletProfile| {
        [
            p.pointing.without_haptic.clone(),
            p.pointing.with_haptic.clone(),
        ]
    };
    let (pa, pb) = (rows(a), rows(b));
    let cond = ["Without haptic", "With haptic"];
    for i in 0..2 {
        let label = if i == 0 { "Fitts' slope b" } else { "" };
        let _ = writeln!(
            s,
            "| {label} | {} | {:.0} ms/bit (σ={:.0}, n={}) | {:.0} ms/bit (σ={:.0}, n={}) |",
            cond[i],
            pa[i].slope_mean,
            pa[i].slope_std,
            pa[i].n_participants,
            pb[i].slope_mean,
            pb[i].slope_std,
            pb[i].n_participants
        );
    }
    for i in 0..2 {
        let label = if i == 0 {
            format!(
                "Movement time for ID={:.1}",
                pa[0].hardest_id.max(pb[0].hardest_id)
            )
        } else {
            String::new()
        };
        let _ = writeln!(
            s,
            "| {label} | {} | {:.0} ms (σ={:.0}, n={}) | {:.0} ms (σ={:.0}, n={}) |",
            cond[i],
            pa[i].mt_hardest_mean,
            pa[i].mt_hardest_std,
            pa[i].n_hardest,
            pb[i].mt_hardest_mean,
            pb[i].mt_hardest_std,
            pb[i].n_hardest
        );
    }
    for i in 0..2 {
        let label = if i == 0 { "Error rate (global)" } else { "" };
        let _ = writeln!(
            s,
            "| {label} | {} | {:.1} % (n={}) | {:.1} % (n={}) |",
            cond[i],
            100.0 * pa[i].error_rate,
            pa[i].n_trials,
            100.0 * pb[i].error_rate,
            pb[i].n_trials
        );
    }
    s.push('\n');

    let t = &r.tests;
    let _ = writeln!(s, "## Statistical tests\n");
    let _ = writeln!(
        s,
        "- Friction range, two-sample t-test ({}): T_{} = {:.2}, p = {}",
        if t.range_t_test.pooled {
            "pooled"
        } else {
            "Welch"
        },
        fmt_df(t.range_t_test.df),
        t.range_t_test.t_stat,
        p_value(t.range_t_test.p_value)
    );
    let _ = writeln!(
        s,
        "- Friction range, F-test for equality of variances: F_{},{} = {:.3}, p = {}",
        t.range_f_test.df1,
        t.range_f_test.df2,
        t.range_f_test.f_stat,
        p_value(t.range_f_test.p_value)
    );
    let _ = writeln!(
        s,
        "- Movement time at the hardest ID, one-way ANOVA over {}: F_{},{} = {:.2}, p = {}\n",
        t.anova_groups.join(" / "),
        t.mt_anova.df_between,
        t.mt_anova.df_within,
        t.mt_anova.f_stat,
        p_value(t.mt_anova.p_value)
    );

    let _ = writeln!(s, "## Summary\n");
    let _ = writeln!(
        s,
        "| Descriptor | | {} | {} | Difference (b − a) |",
        r.tablet_a, r.tablet_b
    );
    let _ = writeln!(s, "|---|---|---|---|---|");
    for row in &r.summary {
        let cell = |m: &MetricDescriptor| match m.std {
            Some(sd) => format!("{} ± {} (n={})", num(m.value), num(sd), m.n),
            None => format!("{} (n={})", num(m.value), m.n),
        };
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            row.name,
            row.direction.mark(),
            cell(&row.a),
            cell(&row.b),
            num(row.difference)
        );
    }
    if !r.warnings.is_empty() {
        let _ = writeln!(s, "\n## Warnings\n");
        for w in &r.warnings {
            let _ = writeln!(s, "- {w}");
        }
    }
    s
}

fn fmt_df(df: f64) -> String {
    if df.fract() == 0.0 {
        format!("{df:.0}")
    } else {
        format!("{df:.1}")
    }
}

fn num(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.4}")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn profile(id: &str, delta_mu: f64) -> TabletProfile {
        let level = |mean: f64, sigma: f64, delta: f64| LevelRow {
            mean,
            inter_participant_std: sigma,
            intra_trial_std: delta,
            n_swipes: 108,
            n_participants: 6,
        };
        let row = |haptic: bool, mt: f64| PointingRow {
            haptic,
            slope_mean: 200.0,
            slope_std: 80.0,
            n_participants: 10,
            hardest_id: 81f64.log2(),
            mt_hardest_mean: mt,
            mt_hardest_std: 500.0,
            n_hardest: 60,
            error_rate: 0.1,
            n_trials: 480,
        };
        TabletProfile {
            tablet_id: id.into(),
            physical: PhysicalProfile {
                mu_high: level(0.6 + delta_mu, 0.11, 0.03),
                mu_low: level(0.6, 0.1, 0.088),
                friction_range: RangeRow {
                    mean: delta_mu,
                    inter_participant_std: Some(0.121),
                    n: 108,
                    relative_range: Some((0.6 + delta_mu) / 0.6),
                    friction_contrast: Some(1.0 - 0.6 / (0.6 + delta_mu)),
                },
                latency: LatencyRow {
                    mean_ms: 33.0,
                    std_ms: 3.0,
                    n: 12,
                },
            },
            pointing: PointingProfile {
                without_haptic: row(false, 1815.0),
                with_haptic: row(true, 1491.0),
            },
        }
    }

    pub(crate) fn raw(shift: f64) -> RawSamples {
        let wave = |i: usize, k: f64| (i as f64 * k).sin();
        RawSamples {
            delta_mu_trials: (0..108)
                .map(|i| 0.15 + shift + 0.1 * wave(i, 0.7))
                .collect(),
            mt_hardest_without_haptic: (0..60).map(|i| 1800.0 + 400.0 * wave(i, 1.3)).collect(),
            mt_hardest_with_haptic: (0..60).map(|i| 1500.0 + 400.0 * wave(i, 0.9)).collect(),
        }
    }

    #[test]
    fn missing_latency_is_reported() {
        assert_eq!(
            build_tablet_profile("x", &ProfileInputs::default()).unwrap_err(),
            ReportError::MissingMetric("mu_high")
        );
        let hi = FrictionLevelStats::from_summary(0.771, 0.113, 0.028, 108, 6);
        let lo = FrictionLevelStats::from_summary(0.620, 0.100, 0.088, 108, 6);
        let range =
            crate::friction::friction_range(&hi, &lo, &crate::friction::RepetitionPairing::ByIndex)
                .unwrap();
        let inputs = ProfileInputs {
            mu_high: Some(&hi),
            mu_low: Some(&lo),
            friction_range: Some(&range),
            ..Default::default()
        };
        assert_eq!(
            build_tablet_profile("tpad", &inputs).unwrap_err(),
            ReportError::MissingMetric("latency")
        );
    }

    #[test]
    fn self_comparison_is_null() {
        let p = profile("tpad", 0.151);
        let r = compare_tablets(&p, &p, &raw(0.0), &raw(0.0)).unwrap();
        assert_eq!(r.tests.range_t_test.t_stat, 0.0);
        assert_eq!(r.tests.range_f_test.f_stat, 1.0);
        assert_eq!(r.tests.range_t_test.df, 214.0);
        assert_eq!(
            (r.tests.range_f_test.df1, r.tests.range_f_test.df2),
            (107, 107)
        );
        assert_eq!(r.tests.mt_anova.df_between, 3);
        assert!(r.warnings.is_empty());
        assert!(r.summary.iter().all(|row| row.difference == 0.0));
    }

    #[test]
    fn directions_follow_summary_marks() {
        let rows = profile("t", 0.2).descriptors();
        let dir = |name: &str| rows.iter().find(|d| d.name == name).unwrap().direction;
        assert_eq!(dir("Friction range: mean"), MetricDirection::HigherBetter);
        assert_eq!(
            dir("Friction range: inter-part. SD"),
            MetricDirection::LowerBetter
        );
        assert_eq!(dir("Latency: mean (ms)"), MetricDirection::LowerBetter);
        assert_eq!(
            dir("Lowest friction: intra-trial SD"),
            MetricDirection::LowerBetter
        );
        assert_eq!(
            dir("Highest friction: intra-trial SD"),
            MetricDirection::LowerBetter
        );
        assert_eq!(
            dir("MT at hardest ID, with haptic: mean (ms)"),
            MetricDirection::LowerBetter
        );
        assert_eq!(
            dir("MT at hardest ID, without haptic: SD (ms)"),
            MetricDirection::LowerBetter
        );
        assert_eq!(dir("Error rate, with haptic"), MetricDirection::LowerBetter);
        assert_eq!(dir("Lowest friction: mean"), MetricDirection::Informational);
        assert!(rows.iter().all(|d| d.n >= 1));
    }

    #[test]
    fn markdown_has_sections_and_is_deterministic() {
        let r = compare_tablets(
            &profile("tpad", 0.151),
            &profile("tanvas", 0.301),
            &raw(0.0),
            &raw(0.15),
        )
        .unwrap();
        let md = String::from_utf8(render_report(&r, ReportFormat::Markdown)).unwrap();
        for section in [
            "## Physical",
            "## Pointing",
            "## Statistical tests",
            "## Summary",
        ] {
            assert!(md.contains(section), "missing {section}");
        }
        assert_eq!(
            render_report(&r, ReportFormat::Markdown),
            render_report(&r, ReportFormat::Markdown)
        );
        let pos = |needle: &str| md.find(needle).unwrap();
        assert!(pos("Highest friction μ_H") < pos("Lowest friction μ_L"));
        assert!(pos("Lowest friction μ_L") < pos("Friction range Δμ"));
        assert!(pos("Friction range Δμ") < pos("End-to-end latency"));
    }

    #[test]
    fn json_round_trip() {
        let r = compare_tablets(
            &profile("tpad", 0.151),
            &profile("tanvas", 0.301),
            &raw(0.0),
            &raw(0.15),
        )
        .unwrap();
        let json = render_report(&r, ReportFormat::Json);
        let back: ComparisonReport = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.spec_version, SPEC_VERSION);
    }

    #[test]
    fn size_mismatch_warns() {
        let p = profile("a", 0.2);
        let mut short = raw(0.0);
        short.delta_mu_trials.truncate(100);
        let r = compare_tablets(&p, &p, &raw(0.0), &short).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }
}
