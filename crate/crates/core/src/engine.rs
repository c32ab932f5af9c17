//! k-inductive realizability: alternates extend and base checks, collecting
//! a Skolem cascade for each.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::SynthesisProblem;
use crate::logic::smtlib::{parse_formula, parse_term, value_to_string, SortTable};
use crate::logic::{eval_formula, eval_term, Formula, Model, Sort, Value, Var};
use crate::skolem::{
    ae_val, certify, AeValConfig, AeValOutcome, Certificate, CheckTag, GuardedSkolem, QuantifiedCheck, SkolemDto,
    SkolemError,
};
use crate::smt::{SatResult, SmtError, SolverConfig, SolverHandle};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error(transparent)]
    Skolem(#[from] SkolemError),
    #[error("cannot write query dump {path}: {source}")]
    Dump { path: PathBuf, source: std::io::Error },
    #[error("certificate check failed for the {0} Skolem")]
    Certificate(CheckTag),
    #[error("unrealizability witness for the {0} check does not refute it")]
    Witness(CheckTag),
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub max_k: usize,
    pub solver: SolverConfig,
    pub aeval: AeValConfig,
    /// Run the SMT certificate checks on every Skolem.
    pub certify: bool,
    /// Directory receiving one SMT-LIB2 file per quantified check.
    pub dump_queries: Option<PathBuf>,
}

impl EngineConfig {
    pub fn new(solver: SolverConfig) -> Self {
        EngineConfig { max_k: 8, solver, aeval: AeValConfig::default(), certify: false, dump_queries: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub k: usize,
    /// Initial state: a model of `G_I` over the state variables.
    pub init_model: Model,
    /// Base Skolems `0..k` followed by the extend Skolem for `k`.
    pub skolems: Vec<GuardedSkolem>,
}

impl Realization {
    pub fn extend(&self) -> &GuardedSkolem {
        self.skolems.last().expect("realization has an extend Skolem")
    }

    pub fn base(&self, j: usize) -> &GuardedSkolem {
        &self.skolems[j]
    }

    pub fn to_dto(&self, contract: &str) -> RealizationDto {
        RealizationDto {
            contract: contract.to_string(),
            k: self.k,
            init: self.init_model.iter().map(|(n, v)| (n.clone(), value_to_string(v))).collect(),
            skolems: self.skolems.iter().map(GuardedSkolem::to_dto).collect(),
        }
    }

    /// Rebuilds a realization of `p`, checking that the Skolem tags are
    /// `base 0 .. base k-1, extend k`.
    pub fn from_dto(d: &RealizationDto, p: &SynthesisProblem) -> Result<Self, SkolemError> {
        let mut init_model = Model::new();
        let table = SortTable::new();
        for v in p.state_vars() {
            let src = d.init.get(&v.name).ok_or_else(|| SkolemError::Format(format!("no initial value for `{}`", v.name)))?;
            let value = if v.sort == Sort::Bool {
                Value::Bool(eval_formula(&parse_formula(src, &table)?, &Model::new())?)
            } else {
                let r = eval_term(&parse_term(src, &table)?, &Model::new())?.as_rational();
                r.and_then(|r| Value::from_rational(v.sort, r))
                    .ok_or_else(|| SkolemError::Format(format!("`{src}` is not a {} value", v.sort.smt_name())))?
            };
            init_model.insert(v.name.clone(), value);
        }
        let skolems = d.skolems.iter().map(GuardedSkolem::from_dto).collect::<Result<Vec<_>, _>>()?;
        let expected: Vec<CheckTag> = (0..d.k).map(CheckTag::Base).chain([CheckTag::Extend(d.k)]).collect();
        let found: Vec<CheckTag> = skolems.iter().map(|g| g.tag).collect();
        if found != expected {
            return Err(SkolemError::Format(format!("expected Skolems {expected:?} for k = {}, found {found:?}", d.k)));
        }
        Ok(Realization { k: d.k, init_model, skolems })
    }
}

/// Serialized form of a [`Realization`] (`--dump-skolem`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RealizationDto {
    pub contract: String,
    pub k: usize,
    pub init: BTreeMap<String, String>,
    pub skolems: Vec<SkolemDto>,
}

/// The quantified check a Skolem with this tag witnesses.
pub fn build_check(p: &SynthesisProblem, tag: CheckTag) -> QuantifiedCheck {
    match tag {
        CheckTag::Base(i) => build_base_check(p, i),
        CheckTag::Extend(i) => build_extend_check(p, i),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthesisResult {
    Realizable(Realization),
    /// Valuation of the failing base check's universals with no valid
    /// next state. Depth 0 with an empty witness means `G_I` is empty.
    Unrealizable { depth: usize, witness: Model },
    Unknown { stage: String, reason: String },
}

/// Per-check record for diagnostics and tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRecord {
    pub tag: CheckTag,
    pub valid: Option<bool>,
    pub cases: usize,
    pub models: Vec<Model>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineReport {
    pub result: SynthesisResult,
    pub checks: Vec<CheckRecord>,
    pub certificates: Vec<(CheckTag, Certificate)>,
}

fn build(p: &SynthesisProblem, n: usize, tag: CheckTag) -> QuantifiedCheck {
    let mut universals = p.state_at(0);
    let mut s = Vec::new();
    if let CheckTag::Base(_) = tag {
        s.push(p.init_at(0));
    }
    for j in 1..=n {
        universals.extend(p.inputs_at(j));
        universals.extend(p.state_at(j));
        s.push(p.assumption_at(j - 1, j));
        s.push(p.trans_at(j - 1, j, j));
    }
    universals.extend(p.inputs_at(n + 1));
    s.push(p.assumption_at(n, n + 1));
    QuantifiedCheck {
        tag,
        universals,
        existentials: p.state_at(n + 1),
        s: Formula::and(s),
        t: p.trans_at(n, n + 1, n + 1),
    }
}

/// `forall path of length n. A(s_n, i) => exists s'. G_T(s_n, i, s')`.
pub fn build_extend_check(p: &SynthesisProblem, n: usize) -> QuantifiedCheck {
    build(p, n, CheckTag::Extend(n))
}

/// As [`build_extend_check`] with the path starting in `G_I`.
pub fn build_base_check(p: &SynthesisProblem, i: usize) -> QuantifiedCheck {
    build(p, i, CheckTag::Base(i))
}

/// A model of `G_I` over every state variable, or `None` when it is empty.
pub fn check_initial_nonempty(h: &mut SolverHandle, p: &SynthesisProblem) -> Result<Result<Option<Model>, String>, SmtError> {
    h.push()?;
    h.assert_formula(&p.init_formula())?;
    let r = h.check_sat();
    if h.is_alive() {
        h.pop()?;
    }
    Ok(match r {
        SatResult::Sat(m) => Ok(Some(complete(&m, &p.state_vars()))),
        SatResult::Unsat => Ok(None),
        SatResult::Unknown(why) => Err(why),
    })
}

/// Restriction of `m` to `vars`, with defaults for unassigned ones.
pub fn complete(m: &Model, vars: &[Var]) -> Model {
    vars.iter()
        .map(|v| (v.name.clone(), m.get(&v.name).cloned().unwrap_or_else(|| v.sort.default_value())))
        .collect()
}

fn dump(cfg: &EngineConfig, check: &QuantifiedCheck) -> Result<(), EngineError> {
    let Some(dir) = &cfg.dump_queries else { return Ok(()) };
    let name = check.tag.to_string().replace(' ', "_");
    let path = dir.join(format!("{name}.smt2"));
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, check.to_smtlib()))
        .map_err(|source| EngineError::Dump { path, source })
}

/// Outcome of one quantified check, after optional certification.
enum Step {
    Valid(GuardedSkolem),
    Invalid(Model),
    Unknown(String),
}

fn decide(
    h: &mut SolverHandle,
    check: &QuantifiedCheck,
    cfg: &EngineConfig,
    report: &mut EngineReport,
) -> Result<Step, EngineError> {
    dump(cfg, check)?;
    let run = ae_val(h, check, cfg.aeval)?;
    let (valid, cases) = match &run.outcome {
        AeValOutcome::Valid(g) => (Some(true), g.cases.len()),
        AeValOutcome::Invalid(_) => (Some(false), 0),
        AeValOutcome::Unknown(_) => (None, 0),
    };
    report.checks.push(CheckRecord { tag: check.tag, valid, cases, models: run.models });
    Ok(match run.outcome {
        AeValOutcome::Valid(g) => {
            if cfg.certify {
                let cert = certify(h, check, &g)?;
                let ok = cert.passed();
                report.certificates.push((check.tag, cert));
                if !ok {
                    return Err(EngineError::Certificate(check.tag));
                }
            }
            Step::Valid(g)
        }
        AeValOutcome::Invalid(w) => Step::Invalid(w),
        AeValOutcome::Unknown(r) => Step::Unknown(r),
    })
}

/// Confirms that `T` has no solution under the witness and that the witness
/// satisfies `S`.
pub fn confirm_witness(h: &mut SolverHandle, check: &QuantifiedCheck, w: &Model) -> Result<bool, EngineError> {
    if !eval_formula(&check.s, w).map_err(SkolemError::from)? {
        return Ok(false);
    }
    h.push()?;
    h.assert_formula(&w.as_formula(&check.universals))?;
    h.assert_formula(&check.t)?;
    let r = h.check_sat();
    if h.is_alive() {
        h.pop()?;
    }
    Ok(matches!(r, SatResult::Unsat))
}

/// Runs the extend/base alternation up to `cfg.max_k`.
pub fn run(p: &SynthesisProblem, cfg: &EngineConfig) -> Result<EngineReport, EngineError> {
    let mut report = EngineReport {
        result: SynthesisResult::Unknown { stage: "init".into(), reason: "not started".into() },
        checks: Vec::new(),
        certificates: Vec::new(),
    };
    let mut ext = SolverHandle::start(&cfg.solver)?;
    let mut base = SolverHandle::start(&cfg.solver)?;
    let init_model = match check_initial_nonempty(&mut base, p)? {
        Ok(Some(m)) => m,
        Ok(None) => {
            report.result = SynthesisResult::Unrealizable { depth: 0, witness: Model::new() };
            return Ok(report);
        }
        Err(reason) => {
            report.result = SynthesisResult::Unknown { stage: "init".into(), reason };
            return Ok(report);
        }
    };
    let mut skolems = Vec::new();
    for i in 0..=cfg.max_k {
        let check = build_extend_check(p, i);
        match decide(&mut ext, &check, cfg, &mut report)? {
            Step::Valid(g) => {
                skolems.push(g);
                report.result = SynthesisResult::Realizable(Realization { k: i, init_model, skolems });
                return Ok(report);
            }
            Step::Invalid(_) => {}
            Step::Unknown(reason) => {
                report.result = SynthesisResult::Unknown { stage: check.tag.to_string(), reason };
                return Ok(report);
            }
        }
        let check = build_base_check(p, i);
        match decide(&mut base, &check, cfg, &mut report)? {
            Step::Valid(g) => skolems.push(g),
            Step::Invalid(witness) => {
                if !confirm_witness(&mut base, &check, &witness)? {
                    return Err(EngineError::Witness(check.tag));
                }
                report.result = SynthesisResult::Unrealizable { depth: i, witness };
                return Ok(report);
            }
            Step::Unknown(reason) => {
                report.result = SynthesisResult::Unknown { stage: check.tag.to_string(), reason };
                return Ok(report);
            }
        }
    }
    report.result = SynthesisResult::Unknown { stage: format!("extend {}", cfg.max_k), reason: "bound exhausted".into() };
    Ok(report)
}
