//! Model-based projection that also records, per existential, the literals
//! it was eliminated from.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Signed;

use crate::logic::linear::LinExpr;
use crate::logic::{
    eval_formula, eval_term, simplify, substitute, CmpOp, Formula, LogicError, Model, Sort, Subst, Term, Var,
};

use super::LocalRelation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    /// Quantifier-free formula over the universals, true in the model.
    pub formula: Formula,
    /// Literals selected from the input formula before elimination.
    pub literals: Vec<Formula>,
    pub relation: LocalRelation,
}

/// Projects `exists y. t` around the model `m`, which must satisfy `t` and
/// assign every free variable.
pub fn mbp(m: &Model, existentials: &[Var], t: &Formula) -> Result<Projection, LogicError> {
    let ys: BTreeSet<String> = existentials.iter().map(|v| v.name.clone()).collect();
    let mut sel = Selector { m, ys: &ys, out: Vec::new() };
    if !eval_formula(t, m)? {
        return Err(LogicError::Parse("model does not satisfy the projected formula".into()));
    }
    sel.select(t, true)?;
    let literals = dedup(sel.out);
    let mut lits = literals.clone();
    let mut relation = LocalRelation::default();
    for y in existentials.iter().rev() {
        let psi = eliminate(y, m, &mut lits)?;
        relation.order.push(y.clone());
        relation.psi.insert(y.name.clone(), psi);
    }
    let formula = simplify(&Formula::and(lits));
    Ok(Projection { formula, literals, relation })
}

fn dedup(lits: Vec<Formula>) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    lits.into_iter()
        .filter(|l| !matches!(l, Formula::Const(true)) && seen.insert(l.clone()))
        .collect()
}

struct Selector<'a> {
    m: &'a Model,
    ys: &'a BTreeSet<String>,
    out: Vec<Formula>,
}

impl Selector<'_> {
    fn mentions_y(&self, f: &Formula) -> bool {
        f.free_vars().iter().any(|v| self.ys.contains(&v.name))
    }

    /// Among formulas evaluating to `want`, the first that mentions an
    /// existential, else the first one.
    fn choose<'f>(&self, fs: &[&'f Formula], want: bool) -> Result<&'f Formula, LogicError> {
        let mut first = None;
        for f in fs {
            if eval_formula(f, self.m)? == want {
                if self.mentions_y(f) {
                    return Ok(f);
                }
                first.get_or_insert(*f);
            }
        }
        first.ok_or_else(|| LogicError::Parse("no disjunct agrees with the model".into()))
    }

    /// Records literals, true in the model, implying `f == want`.
    fn select(&mut self, f: &Formula, want: bool) -> Result<(), LogicError> {
        match f {
            Formula::Const(_) => {}
            Formula::Var(_) => self.out.push(if want { f.clone() } else { Formula::not(f.clone()) }),
            Formula::Cmp(op, a, b) => {
                let a = self.lift(a)?;
                let b = self.lift(b)?;
                let op = if want { *op } else { op.negate() };
                self.out.push(simplify(&Formula::Cmp(op, a, b)));
            }
            Formula::Not(g) => self.select(g, !want)?,
            Formula::And(fs) if want => fs.iter().try_for_each(|g| self.select(g, true))?,
            Formula::Or(fs) if !want => fs.iter().try_for_each(|g| self.select(g, false))?,
            Formula::And(fs) => {
                let g = self.choose(&fs.iter().collect::<Vec<_>>(), false)?;
                self.select(g, false)?;
            }
            Formula::Or(fs) => {
                let g = self.choose(&fs.iter().collect::<Vec<_>>(), true)?;
                self.select(g, true)?;
            }
            Formula::Implies(a, b) => {
                if !want {
                    self.select(a, true)?;
                    self.select(b, false)?;
                } else {
                    let na = Formula::not((**a).clone());
                    let g = self.choose(&[&na, b], true)?.clone();
                    self.select(&g, true)?;
                }
            }
            Formula::Iff(a, b) => {
                let va = eval_formula(a, self.m)?;
                self.select(a, va)?;
                self.select(b, va == want)?;
            }
            Formula::Ite(c, a, b) => {
                let vc = eval_formula(c, self.m)?;
                self.select(c, vc)?;
                self.select(if vc { a } else { b }, want)?;
            }
        }
        Ok(())
    }

    /// Replaces each term-level `ite` by the branch the model takes.
    fn lift(&mut self, t: &Term) -> Result<Term, LogicError> {
        Ok(match t {
            Term::Const(_) | Term::Var(_) => t.clone(),
            Term::Neg(a) => Term::Neg(Box::new(self.lift(a)?)),
            Term::Add(ts) => Term::Add(ts.iter().map(|a| self.lift(a)).collect::<Result<_, _>>()?),
            Term::Sub(a, b) => Term::sub(self.lift(a)?, self.lift(b)?),
            Term::Mul(c, a) => Term::Mul(c.clone(), Box::new(self.lift(a)?)),
            Term::Div(a, k) => Term::Div(Box::new(self.lift(a)?), k.clone()),
            Term::Ite(c, a, b) => {
                let vc = eval_formula(c, self.m)?;
                self.select(c, vc)?;
                self.lift(if vc { a } else { b })?
            }
        })
    }
}

/// A literal `lin ⋈ 0`.
struct Atom {
    lin: LinExpr,
    op: CmpOp,
}

/// A bound `y ⋈ t` with its value under the model.
struct Bound {
    t: LinExpr,
    strict: bool,
    value: BigRational,
}

fn as_atom(f: &Formula) -> Option<Atom> {
    match f {
        Formula::Cmp(op, a, b) if a.sort().is_numeric() => {
            LinExpr::from_cmp(a, b).ok().map(|lin| Atom { lin, op: *op })
        }
        _ => None,
    }
}

fn value_term(y: &Var, m: &Model) -> Result<Term, LogicError> {
    Ok(Term::Const(m.get(&y.name).cloned().ok_or_else(|| LogicError::Unbound(y.name.clone()))?))
}

fn push_lit(lits: &mut Vec<Formula>, f: Formula) {
    let f = simplify(&f);
    if !matches!(f, Formula::Const(true)) && !lits.contains(&f) {
        lits.push(f);
    }
}

/// Fixes `y` to its model value.
fn pin(y: &Var, m: &Model, ylits: Vec<Formula>, lits: &mut Vec<Formula>) -> Result<Vec<Formula>, LogicError> {
    let v = value_term(y, m)?;
    let map: Subst = [(y.name.clone(), v.clone())].into();
    for l in ylits {
        push_lit(lits, substitute(&l, &map)?);
    }
    let psi = if y.sort == Sort::Bool {
        let b = Formula::var(y);
        if eval_term(&v, m)?.as_bool() == Some(true) { b } else { Formula::not(b) }
    } else {
        Formula::eq(Term::var(y), v)
    };
    Ok(vec![psi])
}

/// Removes `y` from `lits`, returning the literals it was eliminated from.
fn eliminate(y: &Var, m: &Model, lits: &mut Vec<Formula>) -> Result<Vec<Formula>, LogicError> {
    let (ylits, rest): (Vec<Formula>, Vec<Formula>) =
        std::mem::take(lits).into_iter().partition(|l| l.free_vars().contains(y));
    *lits = rest;
    if ylits.is_empty() {
        return Ok(Vec::new());
    }
    if y.sort == Sort::Bool {
        return pin(y, m, ylits, lits);
    }
    let atoms: Option<Vec<Atom>> = ylits.iter().map(as_atom).collect();
    let Some(atoms) = atoms else { return pin(y, m, ylits, lits) };
    let solvable = atoms.iter().all(|a| {
        !a.lin.mentions_opaquely(y) && (y.sort == Sort::Real || (a.lin.coeff(y).abs() == BigRational::from_integer(1.into())))
    });
    if !solvable {
        return pin(y, m, ylits, lits);
    }

    let solution = |a: &Atom| a.lin.without(y).scale(&(-a.lin.coeff(y).recip()));
    let best_eq = atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.op == CmpOp::Eq)
        .min_by_key(|(_, a)| a.lin.coeffs.len());
    if let Some((i, eq)) = best_eq {
        let sol = solution(eq);
        for (j, a) in atoms.iter().enumerate() {
            if j != i {
                push_lit(lits, a.lin.substitute_var(y, &sol).to_formula(a.op));
            }
        }
        return Ok(vec![Formula::eq(Term::var(y), sol.to_term())]);
    }

    let int = y.sort == Sort::Int;
    let one = BigRational::from_integer(1.into());
    let (mut lowers, mut uppers, mut diseqs) = (Vec::new(), Vec::new(), Vec::new());
    let mut psi = Vec::new();
    for a in &atoms {
        let c = a.lin.coeff(y);
        let op = if c.is_negative() { a.op.flip() } else { a.op };
        let mut t = solution(a);
        let (op, strict) = match op {
            CmpOp::Gt if int => {
                t = t.add_constant(&one);
                (CmpOp::Ge, false)
            }
            CmpOp::Lt if int => {
                t = t.add_constant(&-one.clone());
                (CmpOp::Le, false)
            }
            op => (op, matches!(op, CmpOp::Gt | CmpOp::Lt)),
        };
        psi.push(Formula::cmp(op, Term::var(y), t.to_term()));
        let value = t.eval(m)?;
        let b = Bound { t, strict, value };
        match op {
            CmpOp::Gt | CmpOp::Ge => lowers.push(b),
            CmpOp::Lt | CmpOp::Le => uppers.push(b),
            _ => diseqs.push(b),
        }
    }

    // Model-greatest lower bound, strict on ties; symmetric for uppers.
    let best = |bs: &[Bound], greatest: bool| {
        (0..bs.len()).reduce(|i, j| {
            let (a, b) = (&bs[i], &bs[j]);
            let better = if greatest { b.value > a.value } else { b.value < a.value };
            if better || (b.value == a.value && b.strict && !a.strict) { j } else { i }
        })
    };
    let cmp = |a: &LinExpr, b: &LinExpr, strict: bool| a.sub(b).to_formula(if strict { CmpOp::Lt } else { CmpOp::Le });

    if let Some(li) = best(&lowers, true) {
        let l = &lowers[li];
        for (j, o) in lowers.iter().enumerate() {
            if j != li {
                push_lit(lits, cmp(&o.t, &l.t, o.strict && !l.strict));
            }
        }
        if !uppers.is_empty() {
            let least = uppers.iter().map(|u| &u.value).min().unwrap();
            if diseqs.is_empty() {
                for u in &uppers {
                    push_lit(lits, cmp(&l.t, &u.t, l.strict || u.strict));
                }
            } else if int {
                let k = BigRational::from_integer((diseqs.len() as i64).into());
                if least - &l.value >= k {
                    let shifted = l.t.add_constant(&k);
                    for u in &uppers {
                        push_lit(lits, cmp(&shifted, &u.t, false));
                    }
                } else {
                    return pin(y, m, ylits, lits);
                }
            } else if l.value < *least {
                for u in &uppers {
                    push_lit(lits, cmp(&l.t, &u.t, true));
                }
            } else {
                // The model pins `y` to the lower bound.
                for u in &uppers {
                    push_lit(lits, cmp(&l.t, &u.t, l.strict || u.strict));
                }
                for h in &diseqs {
                    push_lit(lits, l.t.sub(&h.t).to_formula(CmpOp::Ne));
                }
            }
        }
    } else if let Some(ui) = best(&uppers, false) {
        let u = &uppers[ui];
        for (j, o) in uppers.iter().enumerate() {
            if j != ui {
                push_lit(lits, cmp(&u.t, &o.t, o.strict && !u.strict));
            }
        }
    }
    debug_assert!(lits.iter().all(|l| eval_formula(l, m).unwrap_or(false)));
    Ok(psi)
}
