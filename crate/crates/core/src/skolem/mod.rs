//! Validity of `S(x) => exists y. T(x, y)` with Skolem extraction.

mod ae_val;
mod certify;
pub mod mbp;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::smtlib::{formula_to_string, parse_formula, parse_term, term_to_string, SortTable};
use crate::logic::{eval_formula, eval_term, Formula, LogicError, Model, Sort, Term, Var};
use crate::refine::RefineError;
use crate::smt::SmtError;

pub use ae_val::{ae_val, AeValConfig, AeValOutcome, AeValRun};
pub use certify::{certify, CaseCertificate, Certificate};

#[derive(Debug, Error)]
pub enum SkolemError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error("projection is not satisfied by its model: {0}")]
    Projection(String),
    #[error("malformed skolem file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckTag {
    Base(usize),
    Extend(usize),
}

impl fmt::Display for CheckTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckTag::Base(i) => write!(f, "base {i}"),
            CheckTag::Extend(i) => write!(f, "extend {i}"),
        }
    }
}

impl std::str::FromStr for CheckTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, n) = s.split_once(' ').ok_or_else(|| format!("bad check tag `{s}`"))?;
        let n: usize = n.parse().map_err(|_| format!("bad check depth in `{s}`"))?;
        match kind {
            "base" => Ok(CheckTag::Base(n)),
            "extend" => Ok(CheckTag::Extend(n)),
            _ => Err(format!("bad check kind in `{s}`")),
        }
    }
}

/// `S(x) => exists y. T(x, y)` with quantifier-free `S` and `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifiedCheck {
    pub tag: CheckTag,
    pub universals: Vec<Var>,
    pub existentials: Vec<Var>,
    pub s: Formula,
    pub t: Formula,
}

impl QuantifiedCheck {
    /// SMT-LIB2 script asserting `S` and `forall y. not T`; `unsat` means
    /// the check is valid. Only for offline inspection.
    pub fn to_smtlib(&self) -> String {
        use crate::logic::smtlib::{declare, symbol};
        let mut out = format!("; {} check\n(set-logic ALL)\n", self.tag);
        for v in &self.universals {
            out.push_str(&declare(v));
            out.push('\n');
        }
        out.push_str(&format!("(assert {})\n", formula_to_string(&self.s)));
        let binders: Vec<String> = self
            .existentials
            .iter()
            .map(|v| format!("({} {})", symbol(&v.name), v.sort.smt_name()))
            .collect();
        out.push_str(&format!(
            "(assert (forall ({}) (not {})))\n(check-sat)\n",
            binders.join(" "),
            formula_to_string(&self.t)
        ));
        out
    }
}

/// Per-existential conjunctions of literals chosen by projection.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalRelation {
    /// Existentials in the order they were eliminated. `psi` of a variable
    /// may mention only variables eliminated after it.
    pub order: Vec<Var>,
    pub psi: BTreeMap<String, Vec<Formula>>,
}

impl LocalRelation {
    pub fn psi(&self, v: &Var) -> &[Formula] {
        self.psi.get(&v.name).map_or(&[], Vec::as_slice)
    }

    pub fn as_formula(&self) -> Formula {
        Formula::and(self.order.iter().flat_map(|v| self.psi(v).iter().cloned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemCase {
    pub guard: Formula,
    /// Assignment for every existential, over universals only.
    pub assigns: Vec<(Var, Term)>,
    /// The relation the assignments were refined from, when known.
    pub relation: Option<LocalRelation>,
}

impl SkolemCase {
    pub fn substitution(&self) -> crate::logic::Subst {
        self.assigns.iter().map(|(v, t)| (v.name.clone(), t.clone())).collect()
    }
}

/// Ordered if/else-if cascade of guarded assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedSkolem {
    pub tag: CheckTag,
    pub universals: Vec<Var>,
    pub existentials: Vec<Var>,
    pub cases: Vec<SkolemCase>,
}

impl GuardedSkolem {
    /// Index of the first case whose guard holds.
    pub fn select(&self, m: &Model) -> Result<Option<usize>, LogicError> {
        for (i, c) in self.cases.iter().enumerate() {
            if eval_formula(&c.guard, m)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Values of the existentials under the first matching case.
    pub fn apply(&self, m: &Model) -> Result<Option<Model>, LogicError> {
        let Some(i) = self.select(m)? else { return Ok(None) };
        let mut out = Model::new();
        for (v, t) in &self.cases[i].assigns {
            out.insert(v.name.clone(), eval_term(t, m)?);
        }
        Ok(Some(out))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SymbolDto {
    pub name: String,
    pub sort: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CaseDto {
    pub guard: String,
    pub assigns: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SkolemDto {
    pub check: String,
    pub universals: Vec<SymbolDto>,
    pub existentials: Vec<SymbolDto>,
    pub cases: Vec<CaseDto>,
}

fn sort_from_name(s: &str) -> Result<Sort, SkolemError> {
    match s {
        "Bool" => Ok(Sort::Bool),
        "Int" => Ok(Sort::Int),
        "Real" => Ok(Sort::Real),
        other => Err(SkolemError::Format(format!("unknown sort `{other}`"))),
    }
}

fn symbols(vs: &[Var]) -> Vec<SymbolDto> {
    vs.iter()
        .map(|v| SymbolDto { name: v.name.clone(), sort: v.sort.smt_name().to_string() })
        .collect()
}

fn vars(ds: &[SymbolDto]) -> Result<Vec<Var>, SkolemError> {
    ds.iter().map(|d| Ok(Var::new(d.name.clone(), sort_from_name(&d.sort)?))).collect()
}

impl GuardedSkolem {
    pub fn to_dto(&self) -> SkolemDto {
        SkolemDto {
            check: self.tag.to_string(),
            universals: symbols(&self.universals),
            existentials: symbols(&self.existentials),
            cases: self
                .cases
                .iter()
                .map(|c| CaseDto {
                    guard: formula_to_string(&c.guard),
                    assigns: c.assigns.iter().map(|(v, t)| (v.name.clone(), term_to_string(t))).collect(),
                })
                .collect(),
        }
    }

    pub fn from_dto(d: &SkolemDto) -> Result<Self, SkolemError> {
        let universals = vars(&d.universals)?;
        let existentials = vars(&d.existentials)?;
        let table: SortTable = universals.iter().map(|v| (v.name.clone(), v.sort)).collect();
        let mut cases = Vec::new();
        for c in &d.cases {
            let guard = parse_formula(&c.guard, &table)?;
            let mut assigns = Vec::new();
            for y in &existentials {
                let src = c
                    .assigns
                    .get(&y.name)
                    .ok_or_else(|| SkolemError::Format(format!("no assignment for `{}`", y.name)))?;
                let t = if y.sort == Sort::Bool {
                    Term::from_formula(&parse_formula(src, &table)?)
                } else {
                    parse_term(src, &table)?
                };
                assigns.push((y.clone(), t));
            }
            cases.push(SkolemCase { guard, assigns, relation: None });
        }
        Ok(GuardedSkolem {
            tag: d.check.parse().map_err(SkolemError::Format)?,
            universals,
            existentials,
            cases,
        })
    }
}
