mod common;

use agsynth::codegen::{emit, CodegenError};
use agsynth::engine::{build_extend_check, Realization};
use agsynth::frontend::{load, ElabOptions};
use agsynth::harness::{run_traces, HarnessConfig};
use agsynth::logic::smtlib::{parse_formula, SortTable};
use agsynth::logic::{Formula, Sort, Term, Value};
use agsynth::skolem::GuardedSkolem;
use agsynth::smt::{SolverHandle, Validity};

/// Literals of the guard in the published reference C snippet, written in the
/// operand order the emitter uses.
const REFERENCE_LITERALS: &[&str] =
    &["(x[1] == 1)", "(bias[0] == -1)", "(x[1] == 0)", "(bias[0] == 1)", "!bias_max[0]", "(state[0] != 0)", "(state[0] == 0)"];

/// The reference guard over extend-check names (`[0]` is slot 1, `x[1]` is
/// the current input `x@2`). `!state[0] != 0` parses in C as
/// `(!state[0]) != 0`, that is `state[0] == 0`.
const REFERENCE_GUARD: &str = "(and (or (and (= x@2 1) (= (- 1) bias@1)) (and (= x@2 0) (= 1 bias@1))) \
     (not bias_max@1) (or (not (= state@1 0)) (= x@2 0)) (or (= state@1 0) (= x@2 1)))";

fn cascade(g: &GuardedSkolem, var: &str, sort: Sort) -> Term {
    let mut acc = Term::Const(sort.default_value());
    for case in g.cases.iter().rev() {
        let (_, t) = case.assigns.iter().find(|(v, _)| v.name == var).unwrap();
        acc = Term::ite(case.guard.clone(), t.clone(), acc);
    }
    acc
}

#[test]
fn fig1_contains_the_reference_reset_branch() {
    let p = common::problem("fig1", true);
    let r = common::synthesize(&p);
    let prog = emit(&p, &r).unwrap();
    let zero = ["next_state = 0;", "next_bias = 0;", "next_bias_max = 0;"];
    let lines: Vec<&str> = prog.source.lines().map(str::trim).collect();
    let branch = lines
        .windows(5)
        .find(|w| w[0].contains("if (") && zero.iter().all(|z| w[1..4].contains(z)))
        .expect("a branch assigning state = bias = bias_max = 0");
    let guard = branch[0].trim_start_matches("} else ").trim_start_matches("if (").trim_end_matches(") {");
    let guard = guard.strip_prefix('(').and_then(|g| g.strip_suffix(')')).unwrap_or(guard);
    for lit in guard.split(" && ") {
        assert!(REFERENCE_LITERALS.contains(&lit), "literal {lit} of `{guard}` is not in the reference guard");
    }

    // Every valuation in the reference region that the extend check admits is
    // sent to state = bias = 0, bias_max = false by our cascade.
    let check = build_extend_check(&p, 1);
    let table: SortTable = check.universals.iter().map(|v| (v.name.clone(), v.sort)).collect();
    let region = parse_formula(REFERENCE_GUARD, &table).unwrap();
    let ext = r.extend();
    let target = Formula::and(vec![
        Formula::eq(cascade(ext, "state@2", Sort::Int), Term::int(0)),
        Formula::eq(cascade(ext, "bias@2", Sort::Int), Term::int(0)),
        Formula::not(cascade(ext, "bias_max@2", Sort::Bool).to_formula().unwrap()),
    ]);
    let mut h = SolverHandle::start(&common::solver()).unwrap();
    let claim = Formula::implies(Formula::and(vec![check.s.clone(), region]), target);
    assert_eq!(h.check_valid(&claim).unwrap(), Validity::Valid);
}

#[test]
fn layout_and_interface() {
    let p = common::problem("fig1", true);
    let r = common::synthesize(&p);
    let prog = emit(&p, &r).unwrap();
    assert!(prog.source.starts_with("/* top: implementation synthesized by agsynth"));
    assert!(prog.source.contains("(k = 1)"));
    assert!(prog.source.contains("void top_init(void)"));
    assert!(prog.source.contains("void top_step(int64_t in_x)"));
    assert!(prog.source.contains("int64_t bias[2];"));
    assert!(prog.source.contains("int bias_max[2];"));
    assert!(prog.source.contains("#ifdef DRIVER"));
    assert_eq!(prog.k, 1);
    assert_eq!(prog.inputs.iter().map(|v| v.name.as_str()).collect::<Vec<_>>(), ["x"]);
    assert!(!prog.source.contains("floor_div"), "helper emitted without a use");
}

#[test]
fn k0_updates_in_place() {
    let p = common::problem("xy", true);
    let r = common::synthesize(&p);
    assert_eq!(r.k, 0);
    let prog = emit(&p, &r).unwrap();
    assert!(!prog.source.contains("for (j"));
    assert!(prog.source.contains("z[w] = next_z;"));
    assert!(prog.source.contains("w = 0;"));
    assert!(prog.source.contains("x[w] = in_x;"));
}

#[test]
fn empty_cascade_is_only_the_diagnostic() {
    let p = common::problem("toggle", true);
    let mut r = common::synthesize(&p);
    r.skolems.last_mut().unwrap().cases.clear();
    let prog = emit(&p, &r).unwrap();
    assert!(prog.source.contains("    toggle_fail(\"extend 0\");\n"));
    assert!(!prog.source.contains("} else {\n        toggle_fail"));
    if common::has_cc() {
        let dir = tempfile::tempdir().unwrap();
        let bin = common::compile(&prog, dir.path()).unwrap();
        let (code, out) = common::run_driver(&bin, "1\n");
        assert_eq!((code, out.lines().count()), (2, 1));
    }
}

#[test]
fn oversized_constants_are_rejected() {
    let p = common::problem("counter", true);
    let mut r: Realization = common::synthesize(&p);
    let big: num_bigint::BigInt = num_bigint::BigInt::from(1u8) << 70;
    r.init_model.insert("n", Value::Int(big.clone()));
    assert_eq!(emit(&p, &r).unwrap_err(), CodegenError::Overflow(big));
}

#[test]
fn names_are_mangled_into_c_identifiers() {
    let src = "node main(x: int) returns (double: int; y: int); \
               let double = x + x; y = 0 -> pre(double) + pre(x); --%REALIZABLE x; tel";
    let p = load(src, ElabOptions::default()).unwrap();
    let r = common::synthesize(&p);
    let prog = emit(&p, &r).unwrap();
    let names: Vec<&str> = prog.state.iter().map(|v| v.c_name.as_str()).collect();
    assert!(names.contains(&"double_"), "{names:?}");
    assert!(names.contains(&"pre_x"), "{names:?}");
    assert_eq!(prog.node, "main_");
    if common::has_cc() {
        let dir = tempfile::tempdir().unwrap();
        let bin = common::compile(&prog, dir.path()).unwrap();
        let (code, out) = common::run_driver(&bin, "3\n4\n");
        assert_eq!(code, 0);
        let last: Vec<&str> = out.lines().last().unwrap().split_whitespace().collect();
        // After inputs 3 then 4: double = 8 and y = 6 + 3.
        let value = |c: &str| last[prog.state.iter().position(|v| v.c_name == c).unwrap()];
        assert_eq!((value("double_"), value("y")), ("8", "9"));
    }
}

#[test]
fn driver_protocol() {
    if !common::has_cc() {
        eprintln!("skipped: no C compiler");
        return;
    }
    let p = common::problem("fig1", true);
    let r = common::synthesize(&p);
    let prog = emit(&p, &r).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bin = common::compile(&prog, dir.path()).unwrap();
    let state_col = prog.state.iter().position(|v| v.name == "state").unwrap();

    let (code, out) = common::run_driver(&bin, "1\n1\n");
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2].split_whitespace().nth(state_col), Some("3"));

    let (code, out) = common::run_driver(&bin, "");
    assert_eq!((code, out.lines().count()), (0, 1));

    let (code, _) = common::run_driver(&bin, "1\nbanana\n");
    assert_eq!(code, 1);
}

#[test]
fn compiled_output_matches_the_interpreter() {
    if !common::has_cc() {
        eprintln!("skipped: no C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    for &(name, _) in common::REALIZABLE {
        let p = common::problem(name, true);
        let r = common::synthesize(&p);
        let prog = emit(&p, &r).unwrap();
        let bin = common::compile(&prog, dir.path()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut cfg = HarnessConfig::new(common::solver());
        cfg.traces = 100;
        cfg.len = 50;
        let (_, traces) = run_traces(&p, &r, &cfg).unwrap();
        let tol = if prog.state.iter().any(|v| v.sort == Sort::Real) { 1e-9 } else { 0.0 };
        let lines = common::differential(&prog, &bin, &traces, tol).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(lines >= 100, "{name}: only {lines} states compared");
    }
}
