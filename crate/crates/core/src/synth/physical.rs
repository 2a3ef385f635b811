use std::path::Path;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    invalid, rng_for, PointingSimSpec, SimTabletSpec, SynthError, Trajectory, RECORDINGS_DIR,
};
use crate::latency::RidgeSpec;
use crate::recording::{self, Actuation, Direction, ForceSample, Recording, RecordingMeta};
use crate::swipe::TREND_PIVOT_MM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimSwipeParams {
    /// Cruise speed, mm/s.
    pub speed: f64,
    /// Recording length, s.
    pub duration: f64,
    pub n_swipes: usize,
    /// Normal force bounds, N.
    pub force_window: [f64; 2],
    pub seed: u64,
    /// Hz
    pub sample_rate: f64,
    /// mm
    pub screen_length: f64,
    /// Physical turnaround positions, mm.
    pub travel: [f64; 2],
    /// Length of each raised-cosine speed ramp, s.
    pub turnaround_s: f64,
    /// `off` or `constant_max`; `ridge` when a ridge is passed.
    pub actuation: Actuation,
    /// Std of a per-swipe μ offset (trial-to-trial variation).
    pub swipe_mu_std: f64,
    /// Uniform jitter of sample timestamps, s; below half a sample period.
    pub time_jitter_s: f64,
    /// Normal-force random-walk intensity, N/√s.
    pub force_step_std: f64,
    pub participant_id: String,
    pub session_index: u32,
    pub trial_index: u32,
}

impl Default for SimSwipeParams {
    fn default() -> Self {
        SimSwipeParams {
            speed: 100.0,
            duration: 10.0,
            n_swipes: 6,
            force_window: [0.5, 1.5],
            seed: 0,
            sample_rate: 10_000.0,
            screen_length: 100.0,
            travel: [5.0, 95.0],
            turnaround_s: 0.03,
            actuation: Actuation::Off,
            swipe_mu_std: 0.0,
            time_jitter_s: 0.0,
            force_step_std: 0.5,
            participant_id: "P01".into(),
            session_index: 0,
            trial_index: 0,
        }
    }
}

impl SimSwipeParams {
    fn validate(&self) -> Result<(), SynthError> {
        if !(self.speed > 0.0) || self.n_swipes == 0 {
            return invalid("speed must be positive and n_swipes at least 1");
        }
        if !(self.sample_rate > 0.0 && self.duration > 0.0) {
            return invalid("sample_rate and duration must be positive");
        }
        let [lo, hi] = self.force_window;
        if !(lo > 0.0 && hi > lo) {
            return invalid(format!(
                "force window [{lo}, {hi}] must satisfy 0 < lo < hi"
            ));
        }
        let [a, b] = self.travel;
        if !(a >= 0.0 && b > a && b <= self.screen_length) {
            return invalid(format!("travel [{a}, {b}] must lie inside the screen"));
        }
        if !(self.time_jitter_s >= 0.0 && self.time_jitter_s < 0.5 / self.sample_rate) {
            return invalid("time jitter must be below half a sample period");
        }
        if !(self.swipe_mu_std >= 0.0 && self.force_step_std >= 0.0 && self.turnaround_s >= 0.0) {
            return invalid("noise and ramp parameters must be non-negative");
        }
        Ok(())
    }
}

/// Oracle bookkeeping for one simulated recording.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimEventLog {
    pub reversal_times: Vec<f64>,
    /// Leading-edge crossing of each leg.
    pub ridge_crossing_times: Vec<f64>,
    pub ridge_exit_times: Vec<f64>,
    pub crossing_directions: Vec<Direction>,
    /// Crossing + delay + half-rise time of the first-order response.
    pub actuation_onset_times: Vec<f64>,
    /// Per-swipe μ offsets actually applied.
    pub swipe_mu_offsets: Vec<f64>,
}

/// First-order response to a piecewise-constant command, evaluated exactly.
struct Lag {
    tau: f64,
    switches: Vec<(f64, f64)>,
    next: usize,
    t_switch: f64,
    level_at_switch: f64,
    target: f64,
}

impl Lag {
    fn new(tau: f64, initial: f64, switches: Vec<(f64, f64)>) -> Self {
        Lag {
            tau,
            switches,
            next: 0,
            t_switch: f64::NEG_INFINITY,
            level_at_switch: initial,
            target: initial,
        }
    }

    fn level(&self, t: f64) -> f64 {
        if self.tau == 0.0 || self.t_switch == f64::NEG_INFINITY {
            return self.target;
        }
        self.target + (self.level_at_switch - self.target) * (-(t - self.t_switch) / self.tau).exp()
    }

    /// Advances to `t`, which must not decrease between calls.
    fn at(&mut self, t: f64) -> f64 {
        while let Some(&(ts, target)) = self.switches.get(self.next) {
            if ts > t {
                break;
            }
            self.level_at_switch = self.level(ts);
            self.t_switch = ts;
            self.target = target;
            self.next += 1;
        }
        self.level(t)
    }
}

/// Simulates one recording of `params.n_swipes` back-and-forth swipes.
pub fn simulate_swipe_recording(
    spec: &SimTabletSpec,
    params: &SimSwipeParams,
    ridge: Option<&RidgeSpec>,
) -> Result<(Recording, SimEventLog), SynthError> {
    spec.validate()?;
    params.validate()?;
    let actuation = match (ridge, params.actuation) {
        (Some(_), _) => Actuation::Ridge,
        (None, Actuation::Ridge) => return invalid("ridge actuation needs a ridge"),
        (None, a) => a,
    };
    let traj = Trajectory::new(
        params.travel[0],
        params.travel[1],
        params.speed,
        params.turnaround_s,
        params.n_swipes,
        params.duration,
        Direction::Ltr,
    )?;

    let mut events = SimEventLog {
        reversal_times: traj.reversal_times(),
        ..Default::default()
    };
    let mut switches = Vec::new();
    if let Some(r) = ridge {
        if !(r.x_lo > traj.x_min && r.x_hi < traj.x_max) {
            return invalid(format!(
                "ridge [{}, {}] must lie inside the swipe travel",
                r.x_lo, r.x_hi
            ));
        }
        for leg in 0..traj.legs {
            let dir = traj.leg_direction(leg);
            let trailing = match dir {
                Direction::Ltr => r.x_hi,
                Direction::Rtl => r.x_lo,
            };
            let enter = traj
                .crossing_time(leg, r.leading_edge(dir))
                .expect("ridge inside travel");
            let exit = traj
                .crossing_time(leg, trailing)
                .expect("ridge inside travel");
            events.ridge_crossing_times.push(enter);
            events.ridge_exit_times.push(exit);
            events.crossing_directions.push(dir);
            events
                .actuation_onset_times
                .push(enter + spec.response_midpoint());
            switches.push((enter + spec.latency_delay, 1.0));
            switches.push((exit + spec.latency_delay, 0.0));
        }
    }
    let initial = if actuation == Actuation::ConstantMax {
        1.0
    } else {
        0.0
    };
    let mut lag = Lag::new(spec.response_time_constant, initial, switches);

    let mut offset_rng = rng_for(params.seed, 1);
    events.swipe_mu_offsets = (0..traj.legs)
        .map(|_| params.swipe_mu_std * offset_rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut rng = rng_for(params.seed, 0);
    let n = (params.duration * params.sample_rate).round() as usize;
    let dt = 1.0 / params.sample_rate;
    let [f_lo, f_hi] = params.force_window;
    let mut f_n = 0.5 * (f_lo + f_hi);
    let step = params.force_step_std * dt.sqrt();
    let span = spec.mu_actuated_mean - spec.mu_base;

    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let jitter = if params.time_jitter_s > 0.0 {
            rng.random_range(-params.time_jitter_s..params.time_jitter_s)
        } else {
            0.0
        };
        let t = i as f64 * dt + jitter;
        let x = traj.position(t);
        let a = lag.at(t);
        let walk: f64 = rng.sample(StandardNormal);
        let noise: f64 = rng.sample(StandardNormal);

        f_n += step * walk;
        if f_n > f_hi {
            f_n = 2.0 * f_hi - f_n;
        }
        if f_n < f_lo {
            f_n = 2.0 * f_lo - f_n;
        }
        f_n = f_n.clamp(f_lo, f_hi);

        let f_t = match traj.leg_at(t) {
            None => 0.0,
            Some((leg, _)) => {
                let dir = traj.leg_direction(leg);
                let x_canon = crate::swipe::canonical_x(dir, x, params.screen_length);
                let mut mu =
                    spec.mu_base + span * a + spec.trend_slope * (x_canon - TREND_PIVOT_MM);
                if let Some(p) = &spec.spatial_pattern {
                    mu += a
                        * p.amplitude
                        * (2.0 * std::f64::consts::PI * x / p.wavelength + p.phase).cos();
                }
                mu += events.swipe_mu_offsets[leg];
                if spec.stick_slip.enabled {
                    let phase = (t / spec.stick_slip.period_s).fract();
                    mu *= 1.0 + spec.stick_slip.drop_fraction * (phase - 0.5);
                }
                mu += spec.noise_std * noise;
                let sign = if dir == Direction::Ltr { 1.0 } else { -1.0 };
                -sign * mu * f_n
            }
        };
        samples.push(ForceSample { t, f_n, f_t, x });
    }

    let meta = RecordingMeta {
        participant_id: params.participant_id.clone(),
        tablet_id: spec.tablet_id.clone(),
        actuation,
        ridge_span: ridge.map(|r| [r.x_lo, r.x_hi]),
        nominal_speed: params.speed,
        nominal_force_window: params.force_window,
        screen_length: params.screen_length,
        sample_rate: params.sample_rate,
        session_index: params.session_index,
        trial_index: params.trial_index,
    };
    Ok((Recording { meta, samples }, events))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicalProtocol {
    pub participants: usize,
    /// Recordings per participant for each of `off` and `constant_max`.
    pub recordings_per_condition: usize,
    /// Ridge recordings per participant; 0 skips the latency protocol.
    pub ridge_recordings: usize,
    /// Std of a per-participant offset added to both friction levels.
    pub inter_participant_mu_std: f64,
    /// Std of a per-participant change of the friction range.
    pub inter_participant_range_std: f64,
    /// Probability that a participant shows stick-slip on every recording.
    pub stick_slip_probability: f64,
    /// mm
    pub ridge_span: [f64; 2],
    /// Seed of the participant panel; defaults to the session seed. Sharing
    /// it between two tablets models the same people testing both.
    pub panel_seed: Option<u64>,
    /// Template for every recording; seed, participant, actuation and
    /// indices are filled in per recording.
    pub swipe: SimSwipeParams,
}

impl Default for PhysicalProtocol {
    fn default() -> Self {
        PhysicalProtocol {
            participants: 6,
            recordings_per_condition: 3,
            ridge_recordings: 3,
            inter_participant_mu_std: 0.08,
            inter_participant_range_std: 0.1,
            stick_slip_probability: 0.0,
            ridge_span: [49.0, 51.0],
            panel_seed: None,
            swipe: SimSwipeParams {
                swipe_mu_std: 0.02,
                ..SimSwipeParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantTraits {
    pub participant_id: String,
    pub mu_offset: f64,
    pub range_offset: f64,
    pub stick_slip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantTruth {
    pub participant_id: String,
    pub mu_off: f64,
    pub mu_on: f64,
    pub mu_high: f64,
    pub mu_low: f64,
    pub delta_mu: f64,
    pub stick_slip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingTruth {
    /// Path relative to the dataset root.
    pub file: String,
    pub participant_id: String,
    pub actuation: Actuation,
    pub trial_index: u32,
    pub seed: u64,
    pub events: SimEventLog,
}

/// Ground-truth manifest written as `ground_truth.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec_version: String,
    pub seed: u64,
    pub tablet: SimTabletSpec,
    pub protocol: PhysicalProtocol,
    pub participants: Vec<ParticipantTruth>,
    /// Means over participants without stick-slip.
    pub mu_high_mean: f64,
    pub mu_low_mean: f64,
    pub delta_mu_mean: f64,
    /// Expected crossing-to-onset latency, s.
    pub latency_s: f64,
    pub trend_slope: f64,
    pub recordings: Vec<RecordingTruth>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointing: Option<PointingSimSpec>,
}

impl GroundTruth {
    /// `(μ_H, μ_L, Δμ)` averaged over participants not listed in `excluded`.
    pub fn level_means(&self, excluded: &[String]) -> (f64, f64, f64) {
        let kept: Vec<&ParticipantTruth> = self
            .participants
            .iter()
            .filter(|p| !excluded.contains(&p.participant_id))
            .collect();
        let n = kept.len() as f64;
        let mean = |f: fn(&ParticipantTruth) -> f64| kept.iter().map(|p| f(p)).sum::<f64>() / n;
        (
            mean(|p| p.mu_high),
            mean(|p| p.mu_low),
            mean(|p| p.delta_mu),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalDataset {
    pub truth: GroundTruth,
    pub recordings: Vec<Recording>,
}

fn participant_id(i: usize) -> String {
    format!("P{:02}", i + 1)
}

fn draw_panel(
    protocol: &PhysicalProtocol,
    seed: u64,
) -> Result<Vec<ParticipantTraits>, SynthError> {
    let mut rng = rng_for(protocol.panel_seed.unwrap_or(seed), 1 << 40);
    let normal = |s: f64| Normal::new(0.0, s).map_err(|e| SynthError::InvalidSpec(e.to_string()));
    let mu = normal(protocol.inter_participant_mu_std)?;
    let range = normal(protocol.inter_participant_range_std)?;
    Ok((0..protocol.participants)
        .map(|i| ParticipantTraits {
            participant_id: participant_id(i),
            mu_offset: mu.sample(&mut rng),
            range_offset: range.sample(&mut rng),
            stick_slip: rng.random::<f64>() < protocol.stick_slip_probability,
        })
        .collect())
}

fn participant_spec(
    spec: &SimTabletSpec,
    p: &ParticipantTraits,
) -> Result<SimTabletSpec, SynthError> {
    let sign = (spec.mu_actuated_mean - spec.mu_base).signum();
    let mut s = spec.clone();
    s.mu_base += p.mu_offset;
    s.mu_actuated_mean += p.mu_offset + sign * p.range_offset;
    s.stick_slip.enabled |= p.stick_slip;
    if !(s.mu_base > 0.0 && s.mu_actuated_mean > 0.0) {
        return invalid(format!(
            "participant {} draws a non-positive friction level",
            p.participant_id
        ));
    }
    Ok(s)
}

/// Simulates the full physical protocol for one tablet.
pub fn simulate_physical_session(
    spec: &SimTabletSpec,
    protocol: &PhysicalProtocol,
    seed: u64,
) -> Result<PhysicalDataset, SynthError> {
    spec.validate()?;
    if protocol.participants == 0 || protocol.recordings_per_condition == 0 {
        return invalid("protocol needs at least one participant and one recording per condition");
    }
    if !(0.0..=1.0).contains(&protocol.stick_slip_probability) {
        return invalid("stick_slip_probability must lie in [0, 1]");
    }
    let ridge = RidgeSpec::new(
        protocol.ridge_span[0],
        protocol.ridge_span[1],
        crate::latency::RidgePolarity::FrictionUp,
    )
    .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let panel = draw_panel(protocol, seed)?;

    let mut jobs = Vec::new();
    for (pi, p) in panel.iter().enumerate() {
        let conditions = [
            (Actuation::Off, protocol.recordings_per_condition),
            (Actuation::ConstantMax, protocol.recordings_per_condition),
            (Actuation::Ridge, protocol.ridge_recordings),
        ];
        for (ci, (actuation, count)) in conditions.into_iter().enumerate() {
            for trial in 0..count {
                let stream = ((pi as u64) << 20) | ((ci as u64) << 12) | trial as u64;
                jobs.push((p, actuation, trial as u32, rng_for(seed, stream).next_u64()));
            }
        }
    }

    let mut recordings = Vec::with_capacity(jobs.len());
    let mut truths = Vec::with_capacity(jobs.len());
    for (p, actuation, trial, rec_seed) in jobs {
        let pspec = participant_spec(spec, p)?;
        let params = SimSwipeParams {
            seed: rec_seed,
            actuation: if actuation == Actuation::Ridge {
                Actuation::Off
            } else {
                actuation
            },
            participant_id: p.participant_id.clone(),
            trial_index: trial,
            ..protocol.swipe.clone()
        };
        let r = (actuation == Actuation::Ridge).then_some(&ridge);
        let (rec, events) = simulate_swipe_recording(&pspec, &params, r)?;
        truths.push(RecordingTruth {
            file: format!(
                "{RECORDINGS_DIR}/{}_{}_{:02}.csv",
                p.participant_id,
                actuation.as_str(),
                trial
            ),
            participant_id: p.participant_id.clone(),
            actuation,
            trial_index: trial,
            seed: rec_seed,
            events,
        });
        recordings.push(rec);
    }

    let participants: Vec<ParticipantTruth> = panel
        .iter()
        .map(|p| {
            let s = participant_spec(spec, p).expect("validated above");
            ParticipantTruth {
                participant_id: p.participant_id.clone(),
                mu_off: s.mu_base,
                mu_on: s.mu_actuated_mean,
                mu_high: s.mu_base.max(s.mu_actuated_mean),
                mu_low: s.mu_base.min(s.mu_actuated_mean),
                delta_mu: (s.mu_actuated_mean - s.mu_base).abs(),
                stick_slip: p.stick_slip,
            }
        })
        .collect();
    let clean: Vec<&ParticipantTruth> = participants.iter().filter(|p| !p.stick_slip).collect();
    let mean_of = |f: fn(&ParticipantTruth) -> f64| {
        if clean.is_empty() {
            f64::NAN
        } else {
            clean.iter().map(|p| f(p)).sum::<f64>() / clean.len() as f64
        }
    };

    let truth = GroundTruth {
        spec_version: crate::report::SPEC_VERSION.to_string(),
        seed,
        tablet: spec.clone(),
        protocol: protocol.clone(),
        mu_high_mean: mean_of(|p| p.mu_high),
        mu_low_mean: mean_of(|p| p.mu_low),
        delta_mu_mean: mean_of(|p| p.delta_mu),
        participants,
        latency_s: spec.response_midpoint(),
        trend_slope: spec.trend_slope,
        recordings: truths,
        pointing: None,
    };
    Ok(PhysicalDataset { truth, recordings })
}

/// Writes recordings, sidecars and `ground_truth.json` under `dir`.
pub fn write_physical_dataset(
    dataset: &PhysicalDataset,
    dir: &Path,
) -> Result<GroundTruth, crate::Error> {
    for (rec, truth) in dataset.recordings.iter().zip(&dataset.truth.recordings) {
        recording::write_recording(rec, &dir.join(&truth.file))?;
    }
    let manifest = dir.join(super::GROUND_TRUTH_FILE);
    crate::util::write_atomic(
        &manifest,
        crate::util::to_json_pretty(&dataset.truth).as_bytes(),
    )
    .map_err(|e| crate::Error::io(&manifest, e))?;
    Ok(dataset.truth.clone())
}
