//! Synthesized traces checked against hand-written stream definitions of
//! the corpus contracts, independent of the elaborated transition relation.

mod common;

use agsynth::harness::{run_traces, HarnessConfig, Trace};
use agsynth::logic::{Model, Value};
use num_rational::BigRational;

fn traces(name: &str) -> Vec<Trace> {
    let p = common::problem(name, true);
    let r = common::synthesize(&p);
    let mut cfg = HarnessConfig::new(common::solver());
    cfg.traces = 30;
    cfg.len = 40;
    let (report, traces) = run_traces(&p, &r, &cfg).unwrap();
    assert!(report.pass(), "{name}: {}", report.summary());
    traces
}

fn int(m: &Model, n: &str) -> i64 {
    match m.get(n) {
        Some(Value::Int(i)) => i.try_into().unwrap(),
        other => panic!("{n}: {other:?}"),
    }
}

fn boolean(m: &Model, n: &str) -> bool {
    m.get(n).and_then(Value::as_bool).unwrap_or_else(|| panic!("{n}"))
}

fn real(m: &Model, n: &str) -> BigRational {
    m.get(n).and_then(Value::as_rational).unwrap_or_else(|| panic!("{n}"))
}

/// `(previous state, input, next state)` for every step.
fn steps(t: &Trace) -> impl Iterator<Item = (&Model, &Model, &Model)> {
    let prevs = std::iter::once(&t.init).chain(t.steps.iter().map(|s| &s.state));
    prevs.zip(&t.steps).map(|(prev, s)| (prev, &s.input, &s.state))
}

#[test]
fn fig1_bias_is_the_running_balance() {
    for t in traces("fig1") {
        assert_eq!(int(&t.init, "bias"), 0);
        assert!(!boolean(&t.init, "bias_max"));
        for (prev, i, next) in steps(&t) {
            let delta = if int(i, "x") == 1 { 1 } else { -1 };
            let bias = int(prev, "bias") + delta;
            assert_eq!(int(next, "bias"), bias);
            let bias_max = bias.abs() >= 2 || boolean(prev, "bias_max");
            assert_eq!(boolean(next, "bias_max"), bias_max);
            if bias_max {
                assert_eq!(int(next, "state"), 3);
            }
            if int(prev, "state") == 0 {
                assert_eq!(int(next, "state"), if int(i, "x") == 1 { 2 } else { 1 });
            }
        }
    }
}

#[test]
fn toggle_flips_on_press() {
    for t in traces("toggle") {
        assert!(!boolean(&t.init, "light"));
        for (prev, i, next) in steps(&t) {
            assert_eq!(boolean(next, "light"), boolean(prev, "light") ^ boolean(i, "press"));
        }
    }
}

#[test]
fn integrator_is_exact() {
    let half = BigRational::new(1.into(), 2.into());
    for t in traces("integrator") {
        assert_eq!(real(&t.init, "y"), BigRational::from_integer(0.into()));
        for (prev, i, next) in steps(&t) {
            assert_eq!(real(next, "y"), &half * real(prev, "y") + real(i, "u"));
        }
    }
}

#[test]
fn counter_counts_and_resets() {
    for t in traces("counter") {
        assert_eq!(int(&t.init, "n"), 0);
        for (prev, i, next) in steps(&t) {
            let n = int(next, "n");
            assert!((0..=10).contains(&n));
            if boolean(i, "reset") {
                assert_eq!(n, 0);
            } else if int(prev, "n") < 10 {
                assert_eq!(n, int(prev, "n") + 1);
            }
        }
    }
}

#[test]
fn thermostat_has_hysteresis() {
    for t in traces("thermostat") {
        for (prev, i, next) in steps(&t) {
            let temp = real(i, "temp");
            let heat = boolean(next, "heat");
            if temp < BigRational::from_integer(18.into()) {
                assert!(heat);
            } else if temp > BigRational::from_integer(22.into()) {
                assert!(!heat);
            } else {
                assert_eq!(heat, boolean(prev, "heat"));
            }
        }
    }
}

#[test]
fn max_tracker_is_monotone_and_bounded() {
    for t in traces("max_tracker") {
        for (prev, i, next) in steps(&t) {
            let m = int(next, "m");
            assert!(m >= int(i, "x") && m >= int(prev, "m") && m <= 10);
        }
    }
}

#[test]
fn avoidance_contracts_avoid() {
    for t in traces("int_avoid") {
        for (_, i, next) in steps(&t) {
            let v = int(next, "v");
            assert!((0..=5).contains(&v) && v != int(i, "a") && v != int(i, "b"));
        }
    }
    let (zero, one) = (BigRational::from_integer(0.into()), BigRational::from_integer(1.into()));
    for t in traces("real_gap") {
        for (_, i, next) in steps(&t) {
            let r = real(next, "r");
            assert!(r > zero && r < one && r != real(i, "h"));
        }
    }
}

#[test]
fn arbiter_grants_exclusively() {
    for t in traces("arbiter") {
        for (prev, i, next) in steps(&t) {
            let (r1, r2) = (boolean(i, "r1"), boolean(i, "r2"));
            let (g1, g2) = (boolean(next, "g1"), boolean(next, "g2"));
            assert!(!(g1 && g2) && (!g1 || r1) && (!g2 || r2));
            if r1 != r2 {
                assert_eq!((g1, g2), (r1, r2));
            }
            if r1 && r2 && boolean(prev, "g1") {
                assert!(g2);
            }
        }
    }
}

#[test]
fn mode_switch_obeys_commands() {
    for t in traces("mode_switch") {
        assert_eq!(int(&t.init, "mode"), 0);
        for (prev, i, next) in steps(&t) {
            let (before, after) = (int(prev, "mode"), int(next, "mode"));
            assert!((0..=2).contains(&after));
            match int(i, "cmd") {
                0 => assert_eq!(after, before),
                1 => assert_ne!(after, before),
                _ => {}
            }
        }
    }
}
