//! Exact interpretation of synthesized implementations on random valid input
//! traces, checking every guarantee conjunct along the way.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::Realization;
use crate::frontend::{prime, slot, SynthesisProblem};
use crate::logic::smtlib::value_to_string;
use crate::logic::{eval_formula, substitute, Formula, LogicError, Model, Sort, Subst, Term, Value};
use crate::skolem::GuardedSkolem;
use crate::smt::{SatResult, SmtError, SolverConfig, SolverHandle};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("coverage hole in the {check} Skolem at {valuation}")]
    CoverageHole { check: String, valuation: Model },
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub traces: usize,
    pub len: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    /// Worker threads; each owns its own solver session.
    pub threads: usize,
}

impl HarnessConfig {
    pub fn new(solver: SolverConfig) -> Self {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
        HarnessConfig { traces: 1000, len: 50, seed: 42, solver, threads }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub input: Model,
    pub state: Model,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub index: usize,
    pub seed: u64,
    pub init: Model,
    pub steps: Vec<Step>,
    /// The trace stopped early because no input satisfied the assumption.
    pub dead_end: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub trace: usize,
    /// 0 for the initial state, `t` for the transition producing state `t`.
    pub step: usize,
    pub conjunct: String,
    pub valuation: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformanceReport {
    pub traces: usize,
    pub steps: usize,
    pub passed: usize,
    pub dead_ends: usize,
    pub coverage_holes: usize,
    pub violations: Vec<Violation>,
}

impl ConformanceReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}/{} ({} steps, {} violations, {} coverage holes, {} dead ends)",
            if self.pass() { "PASS" } else { "FAIL" },
            self.passed,
            self.traces,
            self.steps,
            self.violations.len(),
            self.coverage_holes,
            self.dead_ends
        )
    }
}

fn valuation(m: &Model) -> BTreeMap<String, String> {
    m.iter().map(|(k, v)| (k.clone(), value_to_string(v))).collect()
}

/// The Skolem used for the transition out of state `prev`, with the slot
/// of the first history entry it reads.
fn skolem_for(r: &Realization, prev: usize) -> (&GuardedSkolem, usize, usize) {
    if prev < r.k {
        (r.base(prev), 0, prev)
    } else {
        (r.extend(), prev - r.k, r.k)
    }
}

/// Next state from the history `states[0..=t]`, `inputs[0..t]` (inputs
/// of transitions `1..=t`) and the current input.
pub fn interpret_step(
    p: &SynthesisProblem,
    r: &Realization,
    states: &[Model],
    inputs: &[Model],
    input: &Model,
) -> Result<Model, HarnessError> {
    let prev = states.len() - 1;
    let (skolem, offset, depth) = skolem_for(r, prev);
    let mut m = Model::new();
    for j in 0..=depth {
        for v in p.state_vars() {
            m.insert(slot(&v.name, j), states[offset + j].get(&v.name).cloned().ok_or_else(|| LogicError::Unbound(v.name.clone()))?);
        }
        if j >= 1 {
            for v in &p.inputs {
                m.insert(slot(&v.name, j), inputs[offset + j - 1].get(&v.name).cloned().ok_or_else(|| LogicError::Unbound(v.name.clone()))?);
            }
        }
    }
    for v in &p.inputs {
        m.insert(slot(&v.name, depth + 1), input.get(&v.name).cloned().ok_or_else(|| LogicError::Unbound(v.name.clone()))?);
    }
    let next = skolem
        .apply(&m)?
        .ok_or_else(|| HarnessError::CoverageHole { check: skolem.tag.to_string(), valuation: m.clone() })?;
    Ok(p.state_vars()
        .iter()
        .map(|v| (v.name.clone(), next.get(&slot(&v.name, depth + 1)).cloned().unwrap_or_else(|| v.sort.default_value())))
        .collect())
}

/// Labels of the `G_T` conjuncts violated by a transition.
pub fn violated_transition(p: &SynthesisProblem, prev: &Model, input: &Model, next: &Model) -> Result<Vec<String>, LogicError> {
    let mut m = prev.clone();
    m.extend(input);
    for (k, v) in next.iter() {
        m.insert(prime(k), v.clone());
    }
    let mut out = Vec::new();
    for c in &p.trans {
        if !eval_formula(&c.formula, &m)? {
            out.push(c.label.clone());
        }
    }
    Ok(out)
}

/// Labels of the `G_I` conjuncts violated by an initial state.
pub fn violated_init(p: &SynthesisProblem, init: &Model) -> Result<Vec<String>, LogicError> {
    let mut out = Vec::new();
    for c in &p.init {
        if !eval_formula(&c.formula, init)? {
            out.push(c.label.clone());
        }
    }
    Ok(out)
}

fn collect_constants(f: &Formula, out: &mut BTreeSet<BigRational>) {
    fn term(t: &Term, out: &mut BTreeSet<BigRational>) {
        match t {
            Term::Const(v) => {
                if let Some(r) = v.as_rational() {
                    out.insert(r);
                }
            }
            Term::Var(_) => {}
            Term::Neg(a) | Term::Mul(_, a) | Term::Div(a, _) => term(a, out),
            Term::Add(ts) => ts.iter().for_each(|a| term(a, out)),
            Term::Sub(a, b) => {
                term(a, out);
                term(b, out);
            }
            Term::Ite(c, a, b) => {
                collect_constants(c, out);
                term(a, out);
                term(b, out);
            }
        }
    }
    match f {
        Formula::Const(_) | Formula::Var(_) => {}
        Formula::Cmp(_, a, b) => {
            term(a, out);
            term(b, out);
        }
        Formula::Not(g) => collect_constants(g, out),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| collect_constants(g, out)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_constants(a, out);
            collect_constants(b, out);
        }
        Formula::Ite(c, a, b) => {
            collect_constants(c, out);
            collect_constants(a, out);
            collect_constants(b, out);
        }
    }
}

/// Draws inputs satisfying the assumption: random candidates biased toward
/// constants of the assumption and values of the current state, then a
/// solver query with random value hints when no candidate fits.
pub struct Sampler {
    solver_cfg: SolverConfig,
    solver: Option<SolverHandle>,
    constants: Vec<BigRational>,
    /// Random candidates tried before asking the solver.
    pub attempts: usize,
}

impl Sampler {
    pub fn new(p: &SynthesisProblem, solver_cfg: SolverConfig) -> Self {
        let mut set = BTreeSet::new();
        collect_constants(&p.assumption, &mut set);
        let one = BigRational::from_integer(1.into());
        let mut constants: BTreeSet<BigRational> = BTreeSet::new();
        constants.insert(BigRational::from_integer(0.into()));
        for c in set {
            constants.insert(&c - &one);
            constants.insert(&c + &one);
            constants.insert(c);
        }
        Sampler { solver_cfg, solver: None, constants: constants.into_iter().collect(), attempts: 64 }
    }

    fn pool(&self, state: &Model) -> Vec<BigRational> {
        let one = BigRational::from_integer(1.into());
        let mut pool = self.constants.clone();
        for (_, v) in state.iter() {
            if let Some(r) = v.as_rational() {
                pool.push(&r - &one);
                pool.push(&r + &one);
                pool.push(r);
            }
        }
        pool
    }

    fn candidate(rng: &mut ChaCha8Rng, sort: Sort, pool: &[BigRational]) -> Value {
        if sort == Sort::Bool {
            return Value::Bool(rng.random_bool(0.5));
        }
        let from_pool = !pool.is_empty() && rng.random_bool(0.5);
        let r = if from_pool {
            pool[rng.random_range(0..pool.len())].clone()
        } else if sort == Sort::Int {
            BigRational::from_integer(rng.random_range(-20i64..=20).into())
        } else {
            let d: i64 = [1, 2, 3, 4, 10][rng.random_range(0..5)];
            BigRational::new(rng.random_range(-20 * d..=20 * d).into(), d.into())
        };
        match sort {
            Sort::Int => Value::Int(r.floor().to_integer()),
            _ => Value::Real(r),
        }
    }

    /// Inputs satisfying `A(state, ·)`, or `None` when there are none.
    pub fn sample(&mut self, p: &SynthesisProblem, state: &Model, rng: &mut ChaCha8Rng) -> Result<Option<Model>, HarnessError> {
        let pool = self.pool(state);
        for _ in 0..self.attempts {
            let mut m = state.clone();
            let mut input = Model::new();
            for v in &p.inputs {
                let val = Self::candidate(rng, v.sort, &pool);
                m.insert(v.name.clone(), val.clone());
                input.insert(v.name.clone(), val);
            }
            if eval_formula(&p.assumption, &m)? {
                return Ok(Some(input));
            }
        }
        self.solve(p, state, rng, &pool)
    }

    fn solve(&mut self, p: &SynthesisProblem, state: &Model, rng: &mut ChaCha8Rng, pool: &[BigRational]) -> Result<Option<Model>, HarnessError> {
        if self.solver.is_none() {
            self.solver = Some(SolverHandle::start(&self.solver_cfg)?);
        }
        let h = self.solver.as_mut().unwrap();
        let fixed: Subst = state.iter().map(|(k, v)| (k.clone(), Term::Const(v.clone()))).collect();
        let a = substitute(&p.assumption, &fixed)?;
        h.push()?;
        h.assert_formula(&a)?;
        let result = (|| -> Result<Option<Model>, HarnessError> {
            match h.check_sat() {
                SatResult::Unsat => return Ok(None),
                SatResult::Unknown(why) => return Err(SmtError::Protocol(format!("sampling: {why}")).into()),
                SatResult::Sat(_) => {}
            }
            let mut pushed = 0;
            for v in &p.inputs {
                let target = Term::Const(Self::candidate(rng, v.sort, pool));
                let hints = if v.sort == Sort::Bool {
                    vec![Formula::iff(Formula::var(v), target.to_formula()?)]
                } else {
                    let dir = if rng.random_bool(0.5) { crate::logic::CmpOp::Ge } else { crate::logic::CmpOp::Le };
                    vec![Formula::eq(Term::var(v), target.clone()), Formula::cmp(dir, Term::var(v), target)]
                };
                for hint in hints {
                    h.push()?;
                    h.assert_formula(&hint)?;
                    if matches!(h.check_sat(), SatResult::Sat(_)) {
                        pushed += 1;
                        break;
                    }
                    h.pop()?;
                }
            }
            let m = match h.check_sat() {
                SatResult::Sat(m) => m,
                other => return Err(SmtError::Protocol(format!("sampling lost its model: {other:?}")).into()),
            };
            for _ in 0..pushed {
                h.pop()?;
            }
            Ok(Some(p.inputs.iter().map(|v| (v.name.clone(), m.get(&v.name).cloned().unwrap_or_else(|| v.sort.default_value()))).collect()))
        })();
        if h.is_alive() {
            while h.depth() > 0 {
                h.pop()?;
            }
        }
        result
    }
}

fn trace_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs one trace, returning it with its violations.
pub fn run_trace(
    p: &SynthesisProblem,
    r: &Realization,
    len: usize,
    seed: u64,
    index: usize,
    sampler: &mut Sampler,
) -> Result<(Trace, Vec<Violation>, bool), HarnessError> {
    let mut rng = trace_rng(seed, index);
    let init = r.init_model.clone();
    let mut violations = Vec::new();
    for c in violated_init(p, &init)? {
        violations.push(Violation { trace: index, step: 0, conjunct: c, valuation: valuation(&init) });
    }
    let mut states = vec![init.clone()];
    let mut inputs: Vec<Model> = Vec::new();
    let mut trace = Trace { index, seed, init, steps: Vec::new(), dead_end: false };
    let mut hole = false;
    for t in 1..=len {
        let prev = states.last().unwrap().clone();
        let Some(input) = sampler.sample(p, &prev, &mut rng)? else {
            trace.dead_end = true;
            break;
        };
        let next = match interpret_step(p, r, &states, &inputs, &input) {
            Ok(n) => n,
            Err(HarnessError::CoverageHole { check, valuation: v }) => {
                violations.push(Violation {
                    trace: index,
                    step: t,
                    conjunct: format!("coverage hole ({check})"),
                    valuation: valuation(&v),
                });
                hole = true;
                break;
            }
            Err(e) => return Err(e),
        };
        for c in violated_transition(p, &prev, &input, &next)? {
            let mut v = prev.clone();
            v.extend(&input);
            for (k, val) in next.iter() {
                v.insert(prime(k), val.clone());
            }
            violations.push(Violation { trace: index, step: t, conjunct: c, valuation: valuation(&v) });
        }
        trace.steps.push(Step { input: input.clone(), state: next.clone() });
        inputs.push(input);
        states.push(next);
    }
    Ok((trace, violations, hole))
}

/// Generates `cfg.traces` traces and checks them; deterministic in the
/// configuration.
pub fn run_traces(p: &SynthesisProblem, r: &Realization, cfg: &HarnessConfig) -> Result<(ConformanceReport, Vec<Trace>), HarnessError> {
    let threads = cfg.threads.max(1).min(cfg.traces.max(1));
    let chunks: Vec<Vec<usize>> = (0..threads).map(|w| (w..cfg.traces).step_by(threads).collect()).collect();
    let results: Vec<Result<Vec<(Trace, Vec<Violation>, bool)>, HarnessError>> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|idx| {
                s.spawn(move || {
                    let mut sampler = Sampler::new(p, cfg.solver.clone());
                    idx.iter().map(|&i| run_trace(p, r, cfg.len, cfg.seed, i, &mut sampler)).collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("harness worker panicked")).collect()
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    all.sort_by_key(|(t, _, _)| t.index);
    let mut report = ConformanceReport { traces: all.len(), steps: 0, passed: 0, dead_ends: 0, coverage_holes: 0, violations: Vec::new() };
    let mut traces = Vec::new();
    for (t, v, hole) in all {
        report.steps += t.steps.len();
        report.dead_ends += usize::from(t.dead_end);
        report.coverage_holes += usize::from(hole);
        report.passed += usize::from(v.is_empty());
        report.violations.extend(v);
        traces.push(t);
    }
    Ok((report, traces))
}
