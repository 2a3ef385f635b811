use serde::{Deserialize, Serialize};

use super::{invalid, SynthError};
use crate::recording::Direction;

/// Back-and-forth finger motion between `x_min` and `x_max`.
///
/// Each leg accelerates and decelerates with raised-cosine velocity ramps of
/// length `ramp` and cruises at `speed` in between. Rest time is split
/// evenly before the first and after the last leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub x_min: f64,
    pub x_max: f64,
    pub speed: f64,
    pub ramp: f64,
    pub legs: usize,
    pub t_start: f64,
    pub leg_time: f64,
    pub first_direction: Direction,
}

impl Trajectory {
    pub fn new(
        x_min: f64,
        x_max: f64,
        speed: f64,
        ramp: f64,
        legs: usize,
        duration: f64,
        first_direction: Direction,
    ) -> Result<Self, SynthError> {
        if !(x_max > x_min) || !(speed > 0.0) || legs == 0 || !(ramp >= 0.0) {
            return invalid("trajectory needs x_max > x_min, positive speed and at least one leg");
        }
        let leg_time = (x_max - x_min) / speed + ramp;
        let rest = duration - legs as f64 * leg_time;
        if rest < 0.0 {
            return invalid(format!(
                "{legs} legs of {leg_time:.3} s do not fit in {duration} s; lower n_swipes or raise speed"
            ));
        }
        Ok(Trajectory {
            x_min,
            x_max,
            speed,
            ramp,
            legs,
            t_start: rest / 2.0,
            leg_time,
            first_direction,
        })
    }

    pub fn travel(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.legs as f64 * self.leg_time
    }

    pub fn leg_direction(&self, leg: usize) -> Direction {
        if leg.is_multiple_of(2) {
            self.first_direction
        } else {
            self.first_direction.opposite()
        }
    }

    /// Distance covered `tau` seconds into a leg.
    fn distance(&self, tau: f64) -> f64 {
        let (v, r, big_t) = (self.speed, self.ramp, self.leg_time);
        let ramp_up = |u: f64| {
            if r == 0.0 {
                0.0
            } else {
                0.5 * v * (u - r / std::f64::consts::PI * (std::f64::consts::PI * u / r).sin())
            }
        };
        if tau <= 0.0 {
            0.0
        } else if tau >= big_t {
            self.travel()
        } else if tau < r {
            ramp_up(tau)
        } else if tau <= big_t - r {
            0.5 * v * r + v * (tau - r)
        } else {
            self.travel() - ramp_up(big_t - tau)
        }
    }

    fn start_of(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Ltr => self.x_min,
            Direction::Rtl => self.x_max,
        }
    }

    /// `(leg, tau)` for a time inside the moving phase.
    pub fn leg_at(&self, t: f64) -> Option<(usize, f64)> {
        if t < self.t_start || t >= self.t_end() {
            return None;
        }
        let k = (((t - self.t_start) / self.leg_time).floor() as usize).min(self.legs - 1);
        Some((k, t - self.t_start - k as f64 * self.leg_time))
    }

    pub fn position(&self, t: f64) -> f64 {
        if t < self.t_start {
            return self.start_of(self.first_direction);
        }
        match self.leg_at(t) {
            Some((k, tau)) => self.leg_position(k, tau),
            None => {
                let last = self.leg_direction(self.legs - 1);
                self.start_of(last.opposite())
            }
        }
    }

    fn leg_position(&self, leg: usize, tau: f64) -> f64 {
        let s = self.distance(tau);
        match self.leg_direction(leg) {
            Direction::Ltr => self.x_min + s,
            Direction::Rtl => self.x_max - s,
        }
    }

    /// Direction of motion at `t`, `None` while resting.
    pub fn moving_direction(&self, t: f64) -> Option<Direction> {
        self.leg_at(t).map(|(k, _)| self.leg_direction(k))
    }

    /// Times at which the direction reverses (boundaries between legs).
    pub fn reversal_times(&self) -> Vec<f64> {
        (1..self.legs)
            .map(|k| self.t_start + k as f64 * self.leg_time)
            .collect()
    }

    /// Time at which leg `leg` passes physical position `x`.
    pub fn crossing_time(&self, leg: usize, x: f64) -> Option<f64> {
        let target = match self.leg_direction(leg) {
            Direction::Ltr => x - self.x_min,
            Direction::Rtl => self.x_max - x,
        };
        if !(target > 0.0 && target < self.travel()) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, self.leg_time);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.distance(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Some(self.t_start + leg as f64 * self.leg_time + 0.5 * (lo + hi))
    }
}
