use std::collections::BTreeMap;

use crate::logic::{rename, Formula, Var};

use super::elaborate::prime;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateKind {
    /// Declared variable with a defining equation.
    Defined,
    /// Declared non-input variable without an equation (a free output).
    Free,
    /// Copy of the named input, so that `pre` of an input is expressible.
    Shadow(String),
    /// Holds the value of a `pre` argument that is not a plain state read.
    Aux,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVar {
    pub var: Var,
    pub kind: StateKind,
}

/// A named conjunct of `G_I` or `G_T`, kept separate for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjunct {
    pub label: String,
    pub formula: Formula,
}

/// An elaborated contract as a transition system.
///
/// Formulas use plain names for the previous state and for inputs, and
/// primed names (`v'`) for the next state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisProblem {
    pub name: String,
    pub inputs: Vec<Var>,
    pub state: Vec<StateVar>,
    /// `A(s, i)`.
    pub assumption: Formula,
    /// Conjuncts of `G_I(s)`.
    pub init: Vec<Conjunct>,
    /// Conjuncts of `G_T(s, i, s')`.
    pub trans: Vec<Conjunct>,
    /// Boolean variables whose definitions were substituted away.
    pub inlined: Vec<String>,
}

/// Name of the copy of `name` at time slot `j` in an unrolled check.
pub fn slot(name: &str, j: usize) -> String {
    format!("{name}@{j}")
}

impl SynthesisProblem {
    pub fn state_vars(&self) -> Vec<Var> {
        self.state.iter().map(|s| s.var.clone()).collect()
    }

    pub fn primed_state(&self) -> Vec<Var> {
        self.state.iter().map(|s| Var::new(prime(&s.var.name), s.var.sort)).collect()
    }

    pub fn init_formula(&self) -> Formula {
        Formula::and(self.init.iter().map(|c| c.formula.clone()))
    }

    pub fn trans_formula(&self) -> Formula {
        Formula::and(self.trans.iter().map(|c| c.formula.clone()))
    }

    pub fn state_at(&self, j: usize) -> Vec<Var> {
        self.state.iter().map(|s| Var::new(slot(&s.var.name, j), s.var.sort)).collect()
    }

    pub fn inputs_at(&self, j: usize) -> Vec<Var> {
        self.inputs.iter().map(|v| Var::new(slot(&v.name, j), v.sort)).collect()
    }

    fn renaming(&self, prev: usize, input: usize, next: usize) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        for s in &self.state {
            m.insert(s.var.name.clone(), slot(&s.var.name, prev));
            m.insert(prime(&s.var.name), slot(&s.var.name, next));
        }
        for v in &self.inputs {
            m.insert(v.name.clone(), slot(&v.name, input));
        }
        m
    }

    /// `A(s_prev, i_input)`.
    pub fn assumption_at(&self, prev: usize, input: usize) -> Formula {
        rename(&self.assumption, &self.renaming(prev, input, input))
    }

    /// `G_T(s_prev, i_input, s_next)`.
    pub fn trans_at(&self, prev: usize, input: usize, next: usize) -> Formula {
        rename(&self.trans_formula(), &self.renaming(prev, input, next))
    }

    /// `G_I(s_j)`.
    pub fn init_at(&self, j: usize) -> Formula {
        rename(&self.init_formula(), &self.renaming(j, j, j))
    }
}
