mod common;

use agsynth::engine::Realization;
use agsynth::frontend::{load, ElabOptions};
use agsynth::harness::{interpret_step, run_traces, violated_transition, HarnessConfig, HarnessError, Sampler};
use agsynth::logic::{Formula, Model, Term, Value};
use agsynth::skolem::{CheckTag, GuardedSkolem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn harness(traces: usize, len: usize, seed: u64) -> HarnessConfig {
    let mut cfg = HarnessConfig::new(common::solver());
    cfg.traces = traces;
    cfg.len = len;
    cfg.seed = seed;
    cfg
}

fn x(v: i64) -> Model {
    Model::new().with("x", Value::int(v))
}

#[test]
fn fig1_two_ones_force_state_three() {
    let p = common::problem("fig1", true);
    let r = common::synthesize(&p);
    let mut states = vec![r.init_model.clone()];
    let mut inputs = Vec::new();
    for _ in 0..2 {
        let next = interpret_step(&p, &r, &states, &inputs, &x(1)).unwrap();
        assert!(violated_transition(&p, states.last().unwrap(), &x(1), &next).unwrap().is_empty());
        states.push(next);
        inputs.push(x(1));
    }
    assert_eq!(states[1].get("bias"), Some(&Value::int(1)));
    assert_eq!(states[1].get("state"), Some(&Value::int(2)));
    assert_eq!(states[2].get("bias"), Some(&Value::int(2)));
    assert_eq!(states[2].get("bias_max"), Some(&Value::Bool(true)));
    assert_eq!(states[2].get("state"), Some(&Value::int(3)));
}

#[test]
fn vacuous_skolem_is_a_coverage_hole() {
    let p = common::problem("toggle", true);
    let mut r = common::synthesize(&p);
    r.skolems.last_mut().unwrap().cases.clear();
    let input = Model::new().with("press", Value::Bool(true));
    let err = interpret_step(&p, &r, &[r.init_model.clone()], &[], &input).unwrap_err();
    assert!(matches!(err, HarnessError::CoverageHole { ref check, .. } if check == "extend 0"), "{err}");
}

#[test]
fn sampler_covers_a_finite_assumption() {
    let p = load("node s(x: int) returns (); let assert x = 0 or x = 1; tel", ElabOptions::default()).unwrap();
    let mut sampler = Sampler::new(&p, common::solver());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let seen: std::collections::BTreeSet<String> =
        (0..100).map(|_| sampler.sample(&p, &Model::new(), &mut rng).unwrap().unwrap().get("x").unwrap().to_string()).collect();
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), ["0", "1"]);
}

#[test]
fn sampler_respects_disequality() {
    let p = load("node s(x: int; y: int) returns (); let assert x <> y; tel", ElabOptions::default()).unwrap();
    let mut sampler = Sampler::new(&p, common::solver());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let m = sampler.sample(&p, &Model::new(), &mut rng).unwrap().unwrap();
        assert_ne!(m.get("x"), m.get("y"));
    }
}

#[test]
fn sampler_falls_back_to_the_solver_and_reports_dead_ends() {
    let p = load("node s(x: real) returns (); let assert x > 1000.0 and x < 1000.5; tel", ElabOptions::default()).unwrap();
    let mut sampler = Sampler::new(&p, common::solver());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = sampler.sample(&p, &Model::new(), &mut rng).unwrap().unwrap();
    let v = m.get("x").unwrap().as_rational().unwrap();
    assert!(v > common::rat(1000, 1) && v < common::rat(2001, 2));
    let dead = load("node s(x: int) returns (); let assert x > x; tel", ElabOptions::default()).unwrap();
    let mut sampler = Sampler::new(&dead, common::solver());
    assert_eq!(sampler.sample(&dead, &Model::new(), &mut rng).unwrap(), None);
}

#[test]
fn fig1_thousand_traces_conform() {
    let p = common::problem("fig1", true);
    let r = common::synthesize(&p);
    let (report, traces) = run_traces(&p, &r, &harness(1000, 50, 42)).unwrap();
    assert!(report.pass(), "{}", report.summary());
    assert_eq!(report.coverage_holes, 0);
    assert_eq!(report.traces, 1000);
    assert_eq!(traces.len(), 1000);
}

#[test]
fn comparator_output_is_the_ordering() {
    let p = common::problem("xy", true);
    let r = common::synthesize(&p);
    let (report, traces) = run_traces(&p, &r, &harness(20, 50, 42)).unwrap();
    assert!(report.pass(), "{}", report.summary());
    let mut steps = 0;
    for t in &traces {
        for s in &t.steps {
            let (x, y) = (s.input.get("x").unwrap(), s.input.get("y").unwrap());
            assert_ne!(x, y);
            let lt = x.as_rational().unwrap() < y.as_rational().unwrap();
            assert_eq!(s.state.get("z"), Some(&Value::Bool(lt)));
            steps += 1;
        }
    }
    assert_eq!(steps, 1000);
}

fn corrupt(r: &mut Realization, var: &str, term: impl Fn(&Term) -> Term) {
    for g in &mut r.skolems {
        for case in &mut g.cases {
            for (v, t) in &mut case.assigns {
                if v.name.starts_with(&format!("{var}@")) {
                    *t = term(t);
                }
            }
        }
    }
}

#[test]
fn corrupted_skolems_are_caught() {
    let p = common::problem("xy", true);
    let mut r = common::synthesize(&p);
    corrupt(&mut r, "z", |t| Term::from_formula(&Formula::not(t.to_formula().unwrap())));
    let (report, _) = run_traces(&p, &r, &harness(10, 10, 42)).unwrap();
    assert!(!report.pass());
    assert!(report.violations.iter().all(|v| v.conjunct.contains("guarantee")), "{:?}", report.violations[0]);

    let p = common::problem("fig1", true);
    let mut r = common::synthesize(&p);
    corrupt(&mut r, "state", |_| Term::int(7));
    let (report, _) = run_traces(&p, &r, &harness(10, 10, 42)).unwrap();
    assert!(report.violations.len() >= 1, "{}", report.summary());
}

#[test]
fn reports_are_deterministic() {
    let p = common::problem("mode_switch", true);
    let r = common::synthesize(&p);
    let mut cfg = harness(40, 30, 9);
    let (a, ta) = run_traces(&p, &r, &cfg).unwrap();
    cfg.threads = 1;
    let (b, tb) = run_traces(&p, &r, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    cfg.seed = 10;
    let (_, tc) = run_traces(&p, &r, &cfg).unwrap();
    assert_ne!(ta, tc);
}

#[test]
fn skolem_tags_select_base_then_extend() {
    let p = common::problem("delay2", true);
    let r = common::synthesize(&p);
    let tags: Vec<CheckTag> = r.skolems.iter().map(|g: &GuardedSkolem| g.tag).collect();
    assert_eq!(tags, [CheckTag::Base(0), CheckTag::Base(1), CheckTag::Extend(2)]);
    let (report, traces) = run_traces(&p, &r, &harness(5, 8, 1)).unwrap();
    assert!(report.pass(), "{}", report.summary());
    for t in &traces {
        for (i, s) in t.steps.iter().enumerate().skip(2) {
            let x = t.steps[i - 2].input.get("x").unwrap().as_rational().unwrap();
            assert_eq!(s.state.get("c").unwrap().as_rational().unwrap(), num_traits::Signed::abs(&x));
        }
    }
}
