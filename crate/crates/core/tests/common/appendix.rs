//! The published ExtendCheck encoding of the fig1 contract, transcribed into extend-check
//! names. Re-indexing: the appendix's `_-1` state is slot 0, its `_0` state
//! and input `x_0` are slot 1, its `x_1` is the current input `x@2` and
//! its `_2` block is the existential state at slot 2. The appendix's
//! separate `bias_1` block (which reuses `x_0`) is the documented indexing
//! discrepancy and is not transcribed. `guarantee4_2` uses `state = 3` as
//! in the fig1 contract. The input shadow `pre(x)` is conjoined on both sides since
//! the appendix encoding has no such variable.

use agsynth::engine::{build_extend_check, complete};
use agsynth::frontend::SynthesisProblem;
use agsynth::logic::smtlib::{parse_formula, SortTable};
use agsynth::logic::{eval_formula, eval_term, simplify_term, Formula, Value};
use agsynth::refine::refine;
use agsynth::skolem::mbp::mbp;
use agsynth::smt::{SatResult, SolverHandle, Validity};

pub const UNIVERSAL_PART: &str = "(and
  (or (= x@1 0) (= x@1 1))
  (= bias@1 (ite false 0 (+ (ite (= x@1 1) 1 (- 1)) bias@0)))
  (= bias_max@1 (ite false false (or (or (>= bias@1 2) (<= bias@1 (- 2))) bias_max@0)))
  (= guarantee1@1 (=> (= state@1 0) (= bias@1 0)))
  (= guarantee2@1 (ite false true (=> (and (= state@0 0) (= x@1 1)) (= state@1 2))))
  (= guarantee3@1 (ite false true (=> (and (= state@0 0) (= x@1 0)) (= state@1 1))))
  (= guarantee4@1 (=> bias_max@1 (= state@1 3)))
  (= guarantee5@1 (or (= state@1 0) (= state@1 1) (= state@1 2) (= state@1 3)))
  (= guarantee_all@1 (and guarantee1@1 guarantee2@1 guarantee3@1 guarantee4@1 guarantee5@1))
  guarantee_all@1
  (or (= x@2 0) (= x@2 1))
  (= |pre(x)@1| x@1))";

pub const EXISTENTIAL_PART: &str = "(and
  (= bias@2 (ite false 0 (+ (ite (= x@2 1) 1 (- 1)) bias@1)))
  (= bias_max@2 (ite false false (or (or (>= bias@2 2) (<= bias@2 (- 2))) bias_max@1)))
  (= guarantee1@2 (=> (= state@2 0) (= bias@2 0)))
  (= guarantee2@2 (ite false true (=> (and (= state@1 0) (= x@2 1)) (= state@2 2))))
  (= guarantee3@2 (ite false true (=> (and (= state@1 0) (= x@2 0)) (= state@2 1))))
  (= guarantee4@2 (=> bias_max@2 (= state@2 3)))
  (= guarantee5@2 (or (= state@2 0) (= state@2 1) (= state@2 2) (= state@2 3)))
  (= guarantee_all@2 (and guarantee1@2 guarantee2@2 guarantee3@2 guarantee4@2 guarantee5@2))
  guarantee_all@2
  (= |pre(x)@2| x@2))";

/// The appendix's MBP region over slot-1 state and the current input.
pub const MBP_REGION: &str = "(and
  (or (and (= x@2 1) (= (- 1) bias@1)) (and (= x@2 0) (= 1 bias@1)))
  (not bias_max@1)
  (or (not (= state@1 0)) (= x@2 0))
  (or (not (= state@1 0)) (= x@2 1)))";

#[derive(Debug)]
pub struct AppendixOutcome {
    pub s_equivalent: bool,
    pub t_equivalent: bool,
    /// The projection, together with S, lies inside the appendix region.
    pub inside_region: bool,
    /// `(state@2, bias@2, bias_max@2)` chosen by one projection/refinement.
    pub local_skolem: (Value, Value, Value),
}

/// `p` must be the fig1 contract elaborated with boolean inlining off.
pub fn check(p: &SynthesisProblem, h: &mut SolverHandle) -> Result<AppendixOutcome, String> {
    let q = build_extend_check(p, 1);
    let table: SortTable = q.universals.iter().chain(&q.existentials).map(|v| (v.name.clone(), v.sort)).collect();
    let parse = |s: &str| parse_formula(s, &table).map_err(|e| e.to_string());
    let (s_app, t_app, region) = (parse(UNIVERSAL_PART)?, parse(EXISTENTIAL_PART)?, parse(MBP_REGION)?);
    let valid = |h: &mut SolverHandle, f: Formula| -> Result<bool, String> {
        Ok(matches!(h.check_valid(&f).map_err(|e| e.to_string())?, Validity::Valid))
    };
    let s_equivalent = valid(h, Formula::iff(q.s.clone(), s_app))?;
    let t_equivalent = valid(h, Formula::iff(q.t.clone(), t_app))?;

    // A model in the appendix region whose successor is state 0.
    h.push().map_err(|e| e.to_string())?;
    let pin = parse("(and (= x@2 1) (= bias@1 (- 1)) (not bias_max@1) (not (= state@1 0)) (= state@2 0))")?;
    for f in [&q.s, &q.t, &pin] {
        h.assert_formula(f).map_err(|e| e.to_string())?;
    }
    let m = match h.check_sat() {
        SatResult::Sat(m) => m,
        other => return Err(format!("no model in the appendix region: {other:?}")),
    };
    h.pop().map_err(|e| e.to_string())?;
    let proj = mbp(&m, &q.existentials, &q.t).map_err(|e| e.to_string())?;
    if !eval_formula(&proj.formula, &m).map_err(|e| e.to_string())? {
        return Err("projection is false in its model".into());
    }
    let inside_region = valid(h, Formula::implies(Formula::and(vec![q.s.clone(), proj.formula.clone()]), region))?;
    let f = refine(&proj.relation).map_err(|e| e.to_string())?;
    let value = |name: &str| -> Result<Value, String> {
        let (_, t) = f.iter().find(|(v, _)| v.name == name).ok_or_else(|| format!("no Skolem for {name}"))?;
        eval_term(&simplify_term(t), &complete(&m, &q.universals)).map_err(|e| e.to_string())
    };
    Ok(AppendixOutcome {
        s_equivalent,
        t_equivalent,
        inside_region,
        local_skolem: (value("state@2")?, value("bias@2")?, value("bias_max@2")?),
    })
}

/// The Skolem values the appendix reports for this region.
pub fn expected() -> (Value, Value, Value) {
    (Value::int(0), Value::int(0), Value::Bool(false))
}
