//! Checks on model-based projection over random quantified formulas.

use std::collections::BTreeSet;

use agsynth::logic::{eval_formula, substitute, Formula, Subst};
use agsynth::refine::refine;
use agsynth::skolem::mbp::mbp;
use agsynth::skolem::{ae_val, AeValConfig, AeValOutcome};
use agsynth::smt::{SolverHandle, Validity};

use super::mbp_instance;

#[derive(Debug, Default, Clone, Copy)]
pub struct MbpStats {
    pub instances: usize,
    pub projections: usize,
    pub valid: usize,
    pub invalid: usize,
}

/// Runs AE-VAL on instance `seed`, then re-derives every projection from
/// its generating model and checks it.
pub fn check_instance(h: &mut SolverHandle, seed: u64, stats: &mut MbpStats) -> Result<(), String> {
    let check = mbp_instance(seed);
    let run = ae_val(h, &check, AeValConfig::default()).map_err(|e| format!("seed {seed}: {e}"))?;
    match run.outcome {
        AeValOutcome::Valid(_) => stats.valid += 1,
        AeValOutcome::Invalid(_) => stats.invalid += 1,
        AeValOutcome::Unknown(r) => return Err(format!("seed {seed}: unknown ({r})")),
    }
    let mut seen = BTreeSet::new();
    for m in &run.models {
        let key = check.universals.iter().map(|v| format!("{}", m.get(&v.name).unwrap())).collect::<Vec<_>>();
        if !seen.insert(key.clone()) {
            return Err(format!("seed {seed}: universal model {key:?} repeated"));
        }
        let p = mbp(m, &check.existentials, &check.t).map_err(|e| format!("seed {seed}: {e}"))?;
        if !eval_formula(&p.formula, m).map_err(|e| e.to_string())? {
            return Err(format!("seed {seed}: projection false in its model"));
        }
        let f: Subst = refine(&p.relation).map_err(|e| format!("seed {seed}: {e}"))?.into_iter().map(|(v, t)| (v.name, t)).collect();
        let t = substitute(&check.t, &f).map_err(|e| e.to_string())?;
        match h.check_valid(&Formula::implies(p.formula.clone(), t)).map_err(|e| e.to_string())? {
            Validity::Valid => {}
            other => return Err(format!("seed {seed}: projection does not imply T[f]: {other:?}")),
        }
        stats.projections += 1;
    }
    stats.instances += 1;
    Ok(())
}
