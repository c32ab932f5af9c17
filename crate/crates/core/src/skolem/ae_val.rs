use crate::logic::{eval_formula, simplify, Formula, Model};
use crate::refine::refine;
use crate::smt::{SatResult, SolverHandle};

use super::mbp::mbp;
use super::{GuardedSkolem, QuantifiedCheck, SkolemCase, SkolemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AeValConfig {
    /// Projections computed before giving up with `Unknown`.
    pub max_iterations: usize,
}

impl Default for AeValConfig {
    fn default() -> Self {
        AeValConfig { max_iterations: 512 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AeValOutcome {
    Valid(GuardedSkolem),
    /// Values of the universals for which no existential choice works.
    Invalid(Model),
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AeValRun {
    pub outcome: AeValOutcome,
    /// Models of `S ∧ T` the projections were computed from.
    pub models: Vec<Model>,
}

/// Decides `S(x) => exists y. T(x, y)` by covering `S` with projections of
/// `T`, each carrying its own Skolem assignment. Leaves the solver's
/// assertion stack as it found it.
pub fn ae_val(h: &mut SolverHandle, check: &QuantifiedCheck, cfg: AeValConfig) -> Result<AeValRun, SkolemError> {
    h.push()?;
    let run = ae_val_inner(h, check, cfg);
    if h.is_alive() {
        h.pop()?;
    }
    run
}

fn ae_val_inner(h: &mut SolverHandle, check: &QuantifiedCheck, cfg: AeValConfig) -> Result<AeValRun, SkolemError> {
    let mut cases = Vec::new();
    let mut models = Vec::new();
    h.assert_formula(&check.s)?;
    loop {
        let witness = match h.check_sat() {
            SatResult::Unsat => {
                let skolem = GuardedSkolem {
                    tag: check.tag,
                    universals: check.universals.clone(),
                    existentials: check.existentials.clone(),
                    cases,
                };
                return Ok(AeValRun { outcome: AeValOutcome::Valid(skolem), models });
            }
            SatResult::Unknown(r) => return Ok(AeValRun { outcome: AeValOutcome::Unknown(r), models }),
            SatResult::Sat(m) => m,
        };
        if cases.len() >= cfg.max_iterations {
            return Ok(AeValRun { outcome: AeValOutcome::Unknown("mbp cap".into()), models });
        }
        h.push()?;
        h.assert_formula(&check.t)?;
        let res = h.check_sat();
        if !h.is_alive() {
            let why = match res {
                SatResult::Unknown(r) => r,
                _ => "process terminated".into(),
            };
            return Ok(AeValRun { outcome: AeValOutcome::Unknown(why), models });
        }
        h.pop()?;
        let m = match res {
            SatResult::Unsat => {
                // Universals the solver never saw are unconstrained.
                let cex = check
                    .universals
                    .iter()
                    .map(|v| (v.name.clone(), witness.get(&v.name).cloned().unwrap_or_else(|| v.sort.default_value())))
                    .collect();
                return Ok(AeValRun { outcome: AeValOutcome::Invalid(cex), models });
            }
            SatResult::Unknown(r) => return Ok(AeValRun { outcome: AeValOutcome::Unknown(r), models }),
            SatResult::Sat(m) => m,
        };
        let p = mbp(&m, &check.existentials, &check.t)?;
        let guard = simplify(&p.formula);
        if !eval_formula(&guard, &m)? {
            return Err(SkolemError::Projection(crate::logic::smtlib::formula_to_string(&guard)));
        }
        let refined = refine(&p.relation)?;
        let assigns = check
            .existentials
            .iter()
            .map(|y| {
                let t = refined.iter().find(|(v, _)| v == y).map(|(_, t)| t.clone());
                (y.clone(), t.unwrap_or_else(|| crate::logic::Term::Const(y.sort.default_value())))
            })
            .collect();
        h.assert_formula(&Formula::not(guard.clone()))?;
        cases.push(SkolemCase { guard, assigns, relation: Some(p.relation) });
        models.push(m);
    }
}
