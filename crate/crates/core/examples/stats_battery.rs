//! The three comparison tests on samples sized like a two-tablet study:
//! pooled t-test and F-test on 108 friction-range samples per tablet, and a
//! one-way ANOVA on movement times of four tablet × haptic groups.

use haptibench::stats::{
    f_test_variance, incomplete_beta_regularized, one_way_anova, two_sample_t_test,
};
use haptibench::synth::rng_for;
use rand::Rng;
use rand_distr::StandardNormal;

fn normal(seed: u64, n: usize, mean: f64, sd: f64) -> Vec<f64> {
    let mut rng = rng_for(seed, 0);
    (0..n)
        .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn main() {
    let range_a = normal(1, 108, 0.151, 0.13);
    let range_b = normal(2, 108, 0.301, 0.10);
    let t = two_sample_t_test(&range_a, &range_b, true).unwrap();
    println!("t({}) = {:.2}, p = {:.2e}", t.df, t.t_stat, t.p_value);
    let welch = two_sample_t_test(&range_a, &range_b, false).unwrap();
    println!(
        "Welch t({:.1}) = {:.2}, p = {:.2e}",
        welch.df, welch.t_stat, welch.p_value
    );
    let f = f_test_variance(&range_a, &range_b).unwrap();
    println!(
        "F({},{}) = {:.3}, p = {:.3}",
        f.df1, f.df2, f.f_stat, f.p_value
    );

    let groups: Vec<Vec<f64>> = [1700.0, 1650.0, 1600.0, 1450.0]
        .iter()
        .enumerate()
        .map(|(k, &m)| normal(10 + k as u64, 60, m, 400.0))
        .collect();
    let anova = one_way_anova(&groups).unwrap();
    println!(
        "F({},{}) = {:.3}, p = {:.4}",
        anova.df_between, anova.df_within, anova.f_stat, anova.p_value
    );

    println!(
        "I_0.5(2, 3) = {:.6} (closed form 11/16 = 0.6875)",
        incomplete_beta_regularized(2.0, 3.0, 0.5).unwrap()
    );
}

#[cfg(test)]
#[test]
fn runs() {
    main();
}
