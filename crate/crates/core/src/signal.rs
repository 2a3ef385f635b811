//! Small signal-processing helpers shared by the swipe and latency stages.

/// Odd sample count closest to `window_s * sample_rate` (at least 1).
pub fn window_samples(window_s: f64, sample_rate: f64) -> usize {
    let n = (window_s * sample_rate).round().max(1.0) as usize;
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

/// Centered (zero-phase) moving average over `window` samples.
///
/// Near the ends the window shrinks symmetrically so every output is an
/// unweighted mean of samples centred on its own index.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let n = xs.len();
    let half = window / 2;
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let slice = &xs[i - h..=i + h];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

/// Derivative of `ys` with respect to `ts`: central differences inside,
/// one-sided at the ends. Handles uneven spacing.
pub fn central_difference(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = ts.len();
    assert_eq!(n, ys.len(), "time and value lengths differ");
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                let (a, b) = if i == 0 {
                    (0, 1)
                } else if i == n - 1 {
                    (n - 2, n - 1)
                } else {
                    (i - 1, i + 1)
                };
                (ys[b] - ys[a]) / (ts[b] - ts[a])
            })
            .collect(),
    }
}

/// Velocity by central differences, then a zero-phase moving average.
pub fn smoothed_velocity(ts: &[f64], xs: &[f64], window: usize) -> Vec<f64> {
    moving_average(&central_difference(ts, xs), window)
}

/// Time at which the piecewise-linear signal `ys(ts)` first reaches `level`
/// moving in the direction given by `rising`, searching from index `from`.
pub fn interpolated_crossing(
    ts: &[f64],
    ys: &[f64],
    level: f64,
    rising: bool,
    from: usize,
) -> Option<f64> {
    for i in from.max(1)..ts.len() {
        let (y0, y1) = (ys[i - 1], ys[i]);
        let crosses = if rising {
            y0 < level && y1 >= level
        } else {
            y0 > level && y1 <= level
        };
        if crosses {
            let frac = (level - y0) / (y1 - y0);
            return Some(ts[i - 1] + frac * (ts[i] - ts[i - 1]));
        }
    }
    None
}
