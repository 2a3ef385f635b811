//! `haptibench` command line: simulate, analyze, compare, report.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 analysis failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, AnalysisConfig, TabletMetrics};
use crate::latency::RidgePolarity;
use crate::report::{compare_tablets, render_report, ComparisonReport, ReportFormat};
use crate::synth::{self, SimulationSpec};
use crate::util::{to_json_pretty, write_atomic};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "haptibench",
    version,
    about = "Benchmark friction-modulation haptic touchscreens"
)]
struct Cli {
    /// Worker threads for per-recording work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON file whose keys override the analysis flags.
    #[arg(long, global = true, env = "HAPTIBENCH_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset with a ground-truth manifest.
    Simulate(SimulateArgs),
    /// Physical metrics from a directory of recordings.
    Physical(PhysicalArgs),
    /// Pointing metrics from JSONL trial logs.
    Fitts(FittsArgs),
    /// Compare two tablets and write the report.
    Compare(CompareArgs),
    /// Re-render a saved JSON comparison report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Simulation spec (JSON); see `--preset` for built-in tablets.
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    /// Built-in spec: tpad or tanvas.
    #[arg(long)]
    preset: Option<String>,
    /// Dataset directory to create.
    #[arg(long)]
    out: PathBuf,
    /// Master seed; the same seed and spec give byte-identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also print the ground-truth manifest to stdout.
    #[arg(long)]
    stdout: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Polarity {
    Up,
    Down,
}

#[derive(Debug, Args)]
struct Tunables {
    /// Reject swipes whose coefficient of variation of μ exceeds this.
    #[arg(long)]
    cv_threshold: Option<f64>,
    /// Relative μ drop counted as a stick-slip event.
    #[arg(long)]
    slip_drop_fraction: Option<f64>,
    /// Trim swipe ends below this fraction of the median speed.
    #[arg(long)]
    min_speed_fraction: Option<f64>,
    /// Onset smoothing window, s.
    #[arg(long)]
    smoothing_window: Option<f64>,
    /// Onset search window after the crossing, s.
    #[arg(long)]
    search_window: Option<f64>,
    /// Onset baseline window before the crossing, s.
    #[arg(long)]
    baseline_window: Option<f64>,
    /// Onset peak must exceed this many baseline derivative SDs.
    #[arg(long)]
    noise_factor: Option<f64>,
    /// Trend pivot, mm.
    #[arg(long)]
    trend_pivot: Option<f64>,
    /// Fixed trend slope per mm instead of estimating it.
    #[arg(long, allow_hyphen_values = true)]
    trend_slope: Option<f64>,
    /// Ridge raises (up) or lowers (down) friction; inferred by default.
    #[arg(long, value_enum)]
    ridge_polarity: Option<Polarity>,
    /// Drop a participant whose rejected swipe fraction exceeds this in any condition.
    #[arg(long)]
    discard_fraction: Option<f64>,
}

impl Tunables {
    fn apply(&self, cfg: &mut AnalysisConfig) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut cfg.quality.cv_threshold, self.cv_threshold);
        set(&mut cfg.quality.slip_drop_fraction, self.slip_drop_fraction);
        set(&mut cfg.min_speed_fraction, self.min_speed_fraction);
        set(&mut cfg.onset.smoothing_window, self.smoothing_window);
        set(&mut cfg.onset.search_window, self.search_window);
        set(&mut cfg.onset.baseline_window, self.baseline_window);
        set(&mut cfg.onset.noise_factor, self.noise_factor);
        set(&mut cfg.trend_pivot, self.trend_pivot);
        set(&mut cfg.discard_fraction, self.discard_fraction);
        if self.trend_slope.is_some() {
            cfg.trend_slope = self.trend_slope;
        }
        if let Some(p) = self.ridge_polarity {
            cfg.ridge_polarity = Some(match p {
                Polarity::Up => RidgePolarity::FrictionUp,
                Polarity::Down => RidgePolarity::FrictionDown,
            });
        }
    }
}

#[derive(Debug, Args)]
struct PhysicalArgs {
    /// Dataset directory (recordings/ subdirectory or CSV files directly).
    #[arg(long = "in")]
    input: PathBuf,
    /// Metrics file; pointing metrics already in it are kept.
    #[arg(long)]
    out: PathBuf,
    /// Also print the metrics JSON to stdout.
    #[arg(long)]
    stdout: bool,
    #[command(flatten)]
    tunables: Tunables,
}

#[derive(Debug, Args)]
struct FittsArgs {
    /// JSONL log, or a directory of *.trials.jsonl files.
    #[arg(long)]
    trials: PathBuf,
    /// Tablet to analyze when the logs hold several.
    #[arg(long)]
    tablet: Option<String>,
    /// Metrics file; physical metrics already in it are kept.
    #[arg(long)]
    out: PathBuf,
    /// Also print the metrics JSON to stdout.
    #[arg(long)]
    stdout: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    metrics_a: PathBuf,
    metrics_b: PathBuf,
    /// Trial logs of tablet A (file or directory).
    #[arg(long)]
    raw_a: PathBuf,
    /// Trial logs of tablet B (file or directory).
    #[arg(long)]
    raw_b: PathBuf,
    /// Report file.
    #[arg(long)]
    out: PathBuf,
    /// Defaults to markdown for `.md` outputs and JSON otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also print the report JSON to stdout.
    #[arg(long)]
    stdout: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// JSON comparison report.
    report: PathBuf,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    /// Defaults to markdown for `.md` outputs and JSON otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

fn format_for(format: Option<Format>, out: &Path) -> ReportFormat {
    match format {
        Some(Format::Json) => ReportFormat::Json,
        Some(Format::Markdown) => ReportFormat::Markdown,
        None if out.extension().is_some_and(|e| e == "md") => ReportFormat::Markdown,
        None => ReportFormat::Json,
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("haptibench: cannot start worker pool: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("haptibench: error: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Physical(a) => physical(a, analysis_config(&a.tunables, cli.config.as_deref())?),
        Command::Fitts(a) => fitts(a),
        Command::Compare(a) => compare(a),
        Command::Report(a) => report(a),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    write_atomic(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::json(path, e))
}

/// Defaults, then flags, then the keys present in the config file.
pub fn merge_config(
    base: &AnalysisConfig,
    overrides: &serde_json::Value,
) -> Result<AnalysisConfig, serde_json::Error> {
    fn overlay(dst: &mut serde_json::Value, src: &serde_json::Value) {
        match (dst, src) {
            (serde_json::Value::Object(d), serde_json::Value::Object(s)) => {
                for (k, v) in s {
                    match d.get_mut(k) {
                        Some(slot) => overlay(slot, v),
                        None => {
                            d.insert(k.clone(), v.clone());
                        }
                    }
                }
            }
            (d, s) => *d = s.clone(),
        }
    }
    let mut value = serde_json::to_value(base)?;
    overlay(&mut value, overrides);
    serde_json::from_value(value)
}

fn analysis_config(t: &Tunables, config: Option<&Path>) -> Result<AnalysisConfig, Error> {
    let mut cfg = AnalysisConfig::default();
    t.apply(&mut cfg);
    match config {
        None => Ok(cfg),
        Some(path) => {
            let overrides: serde_json::Value = read_json(path)?;
            merge_config(&cfg, &overrides).map_err(|e| Error::json(path, e))
        }
    }
}

fn simulate(a: &SimulateArgs) -> Result<(), Error> {
    let spec: SimulationSpec = match (&a.spec, &a.preset) {
        (Some(path), _) => read_json(path)?,
        (None, Some(name)) => SimulationSpec::preset(name).ok_or_else(|| {
            Error::Input(format!("unknown preset '{name}' (expected tpad or tanvas)"))
        })?,
        (None, None) => return Err(Error::Input("simulate needs --spec or --preset".into())),
    };
    eprintln!(
        "haptibench: simulating '{}' with seed {} into {}",
        spec.tablet.tablet_id,
        a.seed,
        a.out.display()
    );
    let truth = synth::write_dataset(&spec, a.seed, &a.out)?;
    eprintln!(
        "haptibench: wrote {} recordings and the pointing log",
        truth.recordings.len()
    );
    if a.stdout {
        print!("{}", to_json_pretty(&truth));
    }
    Ok(())
}

fn existing_metrics(path: &Path, tablet_id: &str) -> Result<TabletMetrics, Error> {
    if !path.exists() {
        return Ok(TabletMetrics::new(tablet_id));
    }
    let m = analysis::read_metrics(path)?;
    if m.tablet_id != tablet_id {
        return Err(Error::Input(format!(
            "{} holds metrics of '{}', not '{tablet_id}'",
            path.display(),
            m.tablet_id
        )));
    }
    Ok(m)
}

fn emit_metrics(m: &TabletMetrics, out: &Path, stdout: bool) -> Result<(), Error> {
    let json = to_json_pretty(m);
    write(out, json.as_bytes())?;
    eprintln!("haptibench: wrote {}", out.display());
    if stdout {
        print!("{json}");
    }
    Ok(())
}

fn physical(a: &PhysicalArgs, cfg: AnalysisConfig) -> Result<(), Error> {
    if !a.input.is_dir() {
        return Err(Error::Input(format!(
            "{} is not a directory",
            a.input.display()
        )));
    }
    let recordings = analysis::load_recordings(&a.input)?;
    eprintln!("haptibench: analyzing {} recordings", recordings.len());
    let physical = analysis::analyze_physical(&recordings, &cfg)?;
    let mut m = existing_metrics(&a.out, &physical.tablet_id)?;
    m.physical = Some(physical);
    emit_metrics(&m, &a.out, a.stdout)
}

fn fitts(a: &FittsArgs) -> Result<(), Error> {
    let trials = analysis::load_trials(&a.trials)?;
    let tablet_id = match &a.tablet {
        Some(t) => t.clone(),
        None => analysis::single_tablet_id(&trials)?,
    };
    eprintln!(
        "haptibench: analyzing {} trials of '{tablet_id}'",
        trials.len()
    );
    let pointing = analysis::analyze_pointing(&trials, &tablet_id)?;
    let mut m = existing_metrics(&a.out, &tablet_id)?;
    m.pointing = pointing;
    emit_metrics(&m, &a.out, a.stdout)
}

/// Library equivalent of the `compare` subcommand.
pub fn compare_files(
    metrics_a: &Path,
    metrics_b: &Path,
    raw_a: &Path,
    raw_b: &Path,
) -> Result<ComparisonReport, Error> {
    let a = analysis::read_metrics(metrics_a)?;
    let b = analysis::read_metrics(metrics_b)?;
    let ta = analysis::load_trials(raw_a)?;
    let tb = analysis::load_trials(raw_b)?;
    Ok(compare_tablets(
        &a.profile()?,
        &b.profile()?,
        &a.raw_samples(&ta),
        &b.raw_samples(&tb),
    )?)
}

fn compare(a: &CompareArgs) -> Result<(), Error> {
    let report = compare_files(&a.metrics_a, &a.metrics_b, &a.raw_a, &a.raw_b)?;
    for w in &report.warnings {
        eprintln!("haptibench: warning: {w}");
    }
    write(
        &a.out,
        &render_report(&report, format_for(a.format, &a.out)),
    )?;
    eprintln!("haptibench: wrote {}", a.out.display());
    if a.stdout {
        print!("{}", to_json_pretty(&report));
    }
    Ok(())
}

fn report(a: &ReportArgs) -> Result<(), Error> {
    let report: ComparisonReport = read_json(&a.report)?;
    write(
        &a.out,
        &render_report(&report, format_for(a.format, &a.out)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run(["haptibench"]), 1);
        assert_eq!(run(["haptibench", "frobnicate"]), 1);
        assert_eq!(run(["haptibench", "physical", "--out", "x.json"]), 1);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run(["haptibench", "--help"]), 0);
    }

    #[test]
    fn missing_input_exits_1() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("m.json");
        let missing = dir.path().join("nope");
        let code = run([
            "haptibench".as_ref(),
            "physical".as_ref(),
            "--in".as_ref(),
            missing.as_os_str(),
            "--out".as_ref(),
            out.as_os_str(),
        ]);
        assert_eq!(code, 1);
        assert!(!out.exists());
    }

    #[test]
    fn config_keys_override_flags() {
        let mut cfg = AnalysisConfig::default();
        Tunables {
            cv_threshold: Some(0.5),
            slip_drop_fraction: None,
            min_speed_fraction: None,
            smoothing_window: Some(0.004),
            search_window: None,
            baseline_window: None,
            noise_factor: None,
            trend_pivot: None,
            trend_slope: Some(-0.001),
            ridge_polarity: Some(Polarity::Down),
            discard_fraction: None,
        }
        .apply(&mut cfg);
        let merged =
            merge_config(&cfg, &serde_json::json!({"quality": {"cv_threshold": 0.2}})).unwrap();
        assert_eq!(merged.quality.cv_threshold, 0.2);
        assert_eq!(merged.onset.smoothing_window, 0.004);
        assert_eq!(merged.trend_slope, Some(-0.001));
        assert_eq!(merged.ridge_polarity, Some(RidgePolarity::FrictionDown));
        assert_eq!(
            merged.quality.slip_drop_fraction,
            cfg.quality.slip_drop_fraction
        );
    }
}
