//! Pointing logs through the JSON Lines interface: simulate a session, write
//! it as `.trials.jsonl`, parse it back and fit Fitts' law per condition.

use haptibench::fitts::{index_of_difficulty, pointing_metrics, ConditionKey};
use haptibench::recording::{parse_pointing_log, serialize_pointing_log};
use haptibench::synth::{simulate_pointing_session, PointingSimSpec};

fn main() {
    for w in 1..=8 {
        print!(
            "W={w}: ID {:.3}  ",
            index_of_difficulty(80.0, f64::from(w)).unwrap()
        );
    }
    println!();

    let trials = simulate_pointing_session("tablet", &PointingSimSpec::default(), 3).unwrap();
    let jsonl = serialize_pointing_log(&trials);
    let parsed = parse_pointing_log(jsonl.as_bytes()).unwrap();
    assert_eq!(parsed, trials);
    println!(
        "{} trials, {} bytes of JSON Lines, first line:\n{}",
        parsed.len(),
        jsonl.len(),
        jsonl.lines().next().unwrap()
    );

    for haptic in [false, true] {
        let m = pointing_metrics(&parsed, &ConditionKey::new("tablet", haptic)).unwrap();
        println!(
            "haptic={haptic}: b {:.0} ± {:.0} ms/bit over {} participants, condition fit a {:.0} ms, b {:.0} ms/bit, R² {:.3}; \
             MT at ID {:.2}: {:.0} ± {:.0} ms; error rate {:.1}%",
            m.slope_mean,
            m.slope_std,
            m.n_participants,
            m.condition_fit.intercept_a,
            m.condition_fit.slope_b,
            m.condition_fit.r_squared,
            m.hardest_id,
            m.mt_hardest_mean,
            m.mt_hardest_std,
            100.0 * m.error_rate
        );
    }
}

#[cfg(test)]
#[test]
fn runs() {
    main();
}
