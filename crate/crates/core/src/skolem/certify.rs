use crate::logic::{substitute, Formula};
use crate::smt::{SolverHandle, Validity};

use super::{GuardedSkolem, QuantifiedCheck, SkolemError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseCertificate {
    pub index: usize,
    /// `guard => T[y := f]`.
    pub sound: Validity,
    /// `guard => psi_j[y := f]` for each existential with a recorded relation.
    pub local: Vec<(String, Validity)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub cases: Vec<CaseCertificate>,
    /// `S => guard_1 ∨ ... ∨ guard_n`.
    pub coverage: Validity,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        let ok = |v: &Validity| matches!(v, Validity::Valid);
        ok(&self.coverage) && self.cases.iter().all(|c| ok(&c.sound) && c.local.iter().all(|(_, v)| ok(v)))
    }
}

/// Independent solver checks that a Skolem cascade witnesses `check`.
pub fn certify(h: &mut SolverHandle, check: &QuantifiedCheck, skolem: &GuardedSkolem) -> Result<Certificate, SkolemError> {
    let mut cases = Vec::new();
    for (index, case) in skolem.cases.iter().enumerate() {
        let map = case.substitution();
        let t = substitute(&check.t, &map)?;
        let sound = h.check_valid(&Formula::implies(case.guard.clone(), t))?;
        let mut local = Vec::new();
        if let Some(rel) = &case.relation {
            for y in &rel.order {
                let psi = substitute(&Formula::and(rel.psi(y).iter().cloned()), &map)?;
                local.push((y.name.clone(), h.check_valid(&Formula::implies(case.guard.clone(), psi))?));
            }
        }
        cases.push(CaseCertificate { index, sound, local });
    }
    let cover = Formula::or(skolem.cases.iter().map(|c| c.guard.clone()));
    let coverage = h.check_valid(&Formula::implies(check.s.clone(), cover))?;
    Ok(Certificate { cases, coverage })
}
