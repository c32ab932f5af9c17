#![allow(dead_code)]

pub mod appendix;
pub mod mbp;
pub mod refiner;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use agsynth::codegen::EmittedProgram;
use agsynth::engine::{run, EngineConfig, EngineReport, Realization, SynthesisResult};
use agsynth::frontend::{load, ElabOptions, SynthesisProblem};
use agsynth::harness::Trace;
use agsynth::logic::{CmpOp, Formula, Model, Sort, Term, Value, Var};
use agsynth::skolem::QuantifiedCheck;
use agsynth::smt::SolverConfig;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Realizable corpus contracts with their expected k.
pub const REALIZABLE: &[(&str, usize)] = &[
    ("arbiter", 0),
    ("counter", 1),
    ("delay2", 2),
    ("fig1", 1),
    ("int_avoid", 0),
    ("integrator", 1),
    ("max_tracker", 1),
    ("mode_switch", 1),
    ("real_gap", 0),
    ("thermostat", 0),
    ("toggle", 0),
    ("xy", 0),
];

/// Unrealizable corpus contracts with the depth of the failing base check.
pub const UNREALIZABLE: &[(&str, usize)] = &[("ramp_unreal", 3), ("xy_unreal", 0)];

pub fn corpus_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.lus"))
}

pub fn problem(name: &str, inline: bool) -> SynthesisProblem {
    let src = std::fs::read_to_string(corpus_path(name)).unwrap();
    load(&src, ElabOptions { inline_booleans: inline }).unwrap()
}

pub fn solver() -> SolverConfig {
    SolverConfig::new(None)
}

pub fn engine(certify: bool) -> EngineConfig {
    let mut cfg = EngineConfig::new(solver());
    cfg.certify = certify;
    cfg
}

pub fn report(p: &SynthesisProblem) -> EngineReport {
    run(p, &engine(true)).unwrap()
}

pub fn synthesize(p: &SynthesisProblem) -> Realization {
    match report(p).result {
        SynthesisResult::Realizable(r) => r,
        other => panic!("{}: expected realizable, got {other:?}", p.name),
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn has_cc() -> bool {
    Command::new("cc").arg("--version").stdout(Stdio::null()).stderr(Stdio::null()).status().is_ok_and(|s| s.success())
}

/// Compiles `prog` with its driver; returns the binary path or the
/// compiler's diagnostics.
pub fn compile(prog: &EmittedProgram, dir: &Path) -> Result<PathBuf, String> {
    let src = dir.join(format!("{}.c", prog.node));
    let bin = dir.join(&prog.node);
    std::fs::write(&src, &prog.source).unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-pedantic", "-Werror", "-DDRIVER", "-o"])
        .arg(&bin)
        .arg(&src)
        .output()
        .unwrap();
    if out.status.success() {
        Ok(bin)
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

pub fn run_driver(bin: &Path, stdin: &str) -> (i32, String) {
    let mut child = Command::new(bin).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Bool(b) => u8::from(*b).to_string(),
        Value::Int(i) => i.to_string(),
        Value::Real(_) => format!("{:e}", v.to_f64()),
    }
}

/// Driver stdin reproducing the inputs of `trace`.
pub fn driver_input(prog: &EmittedProgram, trace: &Trace) -> String {
    let mut s = String::new();
    for step in &trace.steps {
        let vals: Vec<String> = prog.inputs.iter().map(|v| value_text(step.input.get(&v.name).unwrap())).collect();
        s.push_str(&vals.join(" "));
        s.push('\n');
    }
    s
}

/// Compares one printed state line with the exact state. Integers and
/// booleans must match exactly, reals within `tol`.
pub fn compare_line(prog: &EmittedProgram, line: &str, exact: &Model, tol: f64) -> Result<(), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != prog.state.len() {
        return Err(format!("expected {} fields, got `{line}`", prog.state.len()));
    }
    for (v, f) in prog.state.iter().zip(fields) {
        let want = exact.get(&v.name).ok_or_else(|| format!("no exact value for {}", v.name))?;
        let ok = match (v.sort, want) {
            (Sort::Real, w) => f.parse::<f64>().is_ok_and(|c| (c - w.to_f64()).abs() <= tol),
            (_, w) => value_text(w) == f,
        };
        if !ok {
            return Err(format!("{}: C printed {f}, exact value {want}", v.name));
        }
    }
    Ok(())
}

/// Compiled output against the exact traces; returns the number of
/// compared state lines.
pub fn differential(prog: &EmittedProgram, bin: &Path, traces: &[Trace], tol: f64) -> Result<usize, String> {
    let mut lines = 0;
    for t in traces {
        let (code, out) = run_driver(bin, &driver_input(prog, t));
        if code != 0 {
            return Err(format!("trace {}: driver exited with {code}", t.index));
        }
        let printed: Vec<&str> = out.lines().collect();
        let exact: Vec<&Model> = std::iter::once(&t.init).chain(t.steps.iter().map(|s| &s.state)).collect();
        if printed.len() != exact.len() {
            return Err(format!("trace {}: {} lines printed, {} expected", t.index, printed.len(), exact.len()));
        }
        for (i, (line, m)) in printed.iter().zip(exact).enumerate() {
            compare_line(prog, line, m, tol).map_err(|e| format!("trace {} step {i}: {e}", t.index))?;
            lines += 1;
        }
    }
    Ok(lines)
}

fn lin(rng: &mut ChaCha8Rng, vars: &[Var], sort: Sort) -> Term {
    let mut parts = Vec::new();
    for v in vars {
        let c = rng.random_range(-2i64..=2);
        if c != 0 {
            parts.push(Term::scale(rat(c, 1), Term::var(v)));
        }
    }
    parts.push(Term::constant(sort, rat(rng.random_range(-4i64..=4), 1)));
    parts.into_iter().reduce(Term::add).unwrap()
}

fn atom(rng: &mut ChaCha8Rng, ys: &[Var], xs: &[Var], sort: Sort) -> Formula {
    let bools: Vec<&Var> = ys.iter().filter(|v| v.sort == Sort::Bool).collect();
    if !bools.is_empty() && rng.random_bool(0.2) {
        let b = Formula::var(bools[rng.random_range(0..bools.len())]);
        return if rng.random_bool(0.5) { b } else { Formula::not(b) };
    }
    let nums: Vec<Var> = ys.iter().chain(xs).filter(|v| v.sort == sort).cloned().collect();
    let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
    let op = ops[rng.random_range(0..ops.len())];
    Formula::cmp(op, lin(rng, &nums, sort), Term::zero(sort))
}

/// A random `forall x. -5 <= x <= 5 => exists y. T(x, y)` over at most three
/// existentials, all numeric ones of one sort, plus possibly one boolean.
pub fn mbp_instance(seed: u64) -> QuantifiedCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sort = if rng.random_bool(0.5) { Sort::Int } else { Sort::Real };
    let n = rng.random_range(1..=3usize);
    let mut ys: Vec<Var> = (0..n).map(|i| Var::new(format!("y{i}"), sort)).collect();
    if n < 3 && rng.random_bool(0.3) {
        ys.push(Var::bool("yb"));
    }
    let xs: Vec<Var> = (0..2).map(|i| Var::new(format!("x{i}"), sort)).collect();
    let clauses = rng.random_range(1..=3usize);
    let t = Formula::and((0..clauses).map(|_| {
        let width = rng.random_range(1..=2usize);
        Formula::or((0..width).map(|_| atom(&mut rng, &ys, &xs, sort)).collect::<Vec<_>>())
    }));
    let five = Term::constant(sort, rat(5, 1));
    let s = Formula::and(xs.iter().flat_map(|x| {
        [
            Formula::cmp(CmpOp::Le, Term::var(x), five.clone()),
            Formula::cmp(CmpOp::Ge, Term::var(x), Term::neg(five.clone())),
        ]
    }));
    QuantifiedCheck { tag: agsynth::skolem::CheckTag::Extend(0), universals: xs, existentials: ys, s, t }
}
