//! Benchmarking toolkit for friction-modulation haptic touchscreens.
//!
//! Physical metrics (friction levels, range, variability, end-to-end latency)
//! come from force/position recordings; behavioural metrics (Fitts slope,
//! movement time, error rate) come from pointing-task logs. Two tablets are
//! compared with t, F and ANOVA tests, and a seeded simulator provides
//! ground-truth datasets.

// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fitts;
pub mod friction;
pub mod latency;
pub mod recording;
pub mod report;
pub mod signal;
pub mod stats;
pub mod swipe;
pub mod synth;
pub mod util;

pub use error::Error;
