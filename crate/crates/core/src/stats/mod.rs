//! Statistical battery: ordinary least squares, pooled (or Welch) two-sample
//! t-test, two-sided variance F-test and one-way ANOVA.
//!
//! p-values come from the in-crate incomplete beta implementation in
//! [`special`]; nothing here depends on an external numerics library.

pub mod special;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use special::incomplete_beta_regularized;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degenerate design: all x values are equal")]
    DegenerateDesign,
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("insufficient groups: need at least 2 groups of 2 samples each")]
    InsufficientGroups,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("domain error: {0}")]
    Domain(String),
}

/// Arithmetic mean; `NaN` for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the `n - 1` denominator (0 for fewer than two values).
///
/// Data are shifted by the first value before the two-pass sum, so a
/// constant sequence yields exactly zero.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let k = xs[0];
    let m = xs.iter().map(|x| x - k).sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - k - m) * (x - k - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample standard deviation with the `n - 1` denominator.
pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

/// Median of a slice (copies and sorts; `NaN` for empty input).
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinRegResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `sqrt(SS_res / (n - 2))`; zero when `n == 2`.
    pub residual_std: f64,
    /// Standard error of the slope; zero when `n == 2`.
    pub slope_std_error: f64,
    pub n: usize,
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
///
/// R² is `1 - SS_res / SS_tot`; when `y` is constant (`SS_tot == 0`) the fit
/// is exact and R² is reported as 1.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<LinRegResult, StatsError> {
    assert_eq!(x.len(), y.len(), "x and y must have equal lengths");
    let n = x.len();
    if n < 2 {
        return Err(StatsError::InsufficientSamples { needed: 2, got: n });
    }
    check_finite(x)?;
    check_finite(y)?;
    let mx = mean(x);
    let my = mean(y);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::DegenerateDesign);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let (residual_std, slope_std_error) = if n > 2 {
        let s = (ss_res / (n - 2) as f64).sqrt();
        (s, s / sxx.sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(LinRegResult {
        slope,
        intercept,
        r_squared,
        residual_std,
        slope_std_error,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    /// Degrees of freedom; `n1 + n2 - 2` when pooled, Welch–Satterthwaite
    /// (generally fractional) otherwise.
    pub df: f64,
    /// Two-sided.
    pub p_value: f64,
    pub pooled: bool,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Two-sample t-test of `mean(a) == mean(b)`, two-sided.
///
/// `pooled = true` is the classic equal-variance test; `false` selects Welch.
pub fn two_sample_t_test(a: &[f64], b: &[f64], pooled: bool) -> Result<TTestResult, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::InsufficientSamples {
                needed: 2,
                got: s.len(),
            });
        }
        check_finite(s)?;
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (m1, m2) = (mean(a), mean(b));
    let (v1, v2) = (sample_variance(a), sample_variance(b));
    let diff = m1 - m2;

    let (se, df) = if pooled {
        let sp2 = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0);
        ((sp2 * (1.0 / n1 + 1.0 / n2)).sqrt(), n1 + n2 - 2.0)
    } else {
        let q1 = v1 / n1;
        let q2 = v2 / n2;
        let denom = q1 * q1 / (n1 - 1.0) + q2 * q2 / (n2 - 1.0);
        let df = if denom > 0.0 {
            (q1 + q2).powi(2) / denom
        } else {
            n1 + n2 - 2.0
        };
        ((q1 + q2).sqrt(), df)
    };

    let t_stat = if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            return Err(StatsError::ZeroVariance("both samples"));
        }
    } else {
        diff / se
    };
    let p_value = special::student_t_two_sided(t_stat, df)?;
    Ok(TTestResult {
        t_stat,
        df,
        p_value,
        pooled,
        mean_a: m1,
        mean_b: m2,
        n_a: a.len(),
        n_b: b.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FTestResult {
    pub f_stat: f64,
    pub df1: usize,
    pub df2: usize,
    /// Two-sided: `2 * min(P(F <= f), P(F >= f))`, capped at 1.
    pub p_value: f64,
}

/// F-test for equality of two variances, `F = s_a² / s_b²`.
pub fn f_test_variance(a: &[f64], b: &[f64]) -> Result<FTestResult, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::InsufficientSamples {
                needed: 2,
                got: s.len(),
            });
        }
        check_finite(s)?;
    }
    let vb = sample_variance(b);
    if vb == 0.0 {
        return Err(StatsError::ZeroVariance("denominator sample"));
    }
    let f_stat = sample_variance(a) / vb;
    let (df1, df2) = (a.len() - 1, b.len() - 1);
    let lower = special::fisher_f_cdf(f_stat, df1 as f64, df2 as f64)?;
    let upper = special::fisher_f_sf(f_stat, df1 as f64, df2 as f64)?;
    Ok(FTestResult {
        f_stat,
        df1,
        df2,
        p_value: (2.0 * lower.min(upper)).min(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_stat: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
}

/// One-way ANOVA across `groups` (each a sample).
pub fn one_way_anova<S: AsRef<[f64]>>(groups: &[S]) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 || groups.iter().any(|g| g.as_ref().len() < 2) {
        return Err(StatsError::InsufficientGroups);
    }
    for g in groups {
        check_finite(g.as_ref())?;
    }
    let total_n: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / total_n as f64;

    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let g = g.as_ref();
        let m = mean(g);
        ss_between += g.len() as f64 * (m - grand) * (m - grand);
        ss_within += g.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    }
    let df_between = groups.len() - 1;
    let df_within = total_n - groups.len();
    let ms_within = ss_within / df_within as f64;
    let ms_between = ss_between / df_between as f64;
    let f_stat = if ms_within == 0.0 {
        if ms_between == 0.0 {
            0.0
        } else {
            return Err(StatsError::ZeroVariance("within groups"));
        }
    } else {
        ms_between / ms_within
    };
    let p_value = special::fisher_f_sf(f_stat, df_between as f64, df_within as f64)?;
    Ok(AnovaResult {
        f_stat,
        df_between,
        df_within,
        p_value,
    })
}
