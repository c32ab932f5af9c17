use std::collections::BTreeMap;

use super::{Formula, LogicError, Term, Var};

/// Symbol name to replacement term.
pub type Subst = BTreeMap<String, Term>;

fn replacement<'a>(v: &Var, map: &'a Subst) -> Result<Option<&'a Term>, LogicError> {
    match map.get(&v.name) {
        None => Ok(None),
        Some(t) => {
            let s = t.check_sorts()?;
            if s != v.sort {
                return Err(LogicError::SortMismatch(format!(
                    "cannot replace `{}` of sort {} by a term of sort {s}",
                    v.name, v.sort
                )));
            }
            Ok(Some(t))
        }
    }
}

/// Replaces every occurrence of each mapped symbol. Formulas have no
/// binders, so capture cannot happen.
pub fn substitute(f: &Formula, map: &Subst) -> Result<Formula, LogicError> {
    if map.is_empty() {
        return Ok(f.clone());
    }
    Ok(match f {
        Formula::Const(_) => f.clone(),
        Formula::Var(v) => match replacement(v, map)? {
            Some(t) => t.to_formula()?,
            None => f.clone(),
        },
        Formula::Cmp(op, a, b) => {
            Formula::Cmp(*op, substitute_term(a, map)?, substitute_term(b, map)?)
        }
        Formula::Not(g) => Formula::not(substitute(g, map)?),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| substitute(g, map)).collect::<Result<_, _>>()?),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| substitute(g, map)).collect::<Result<_, _>>()?),
        Formula::Implies(a, b) => Formula::implies(substitute(a, map)?, substitute(b, map)?),
        Formula::Iff(a, b) => Formula::iff(substitute(a, map)?, substitute(b, map)?),
        Formula::Ite(c, a, b) => {
            Formula::ite(substitute(c, map)?, substitute(a, map)?, substitute(b, map)?)
        }
    })
}

pub fn substitute_term(t: &Term, map: &Subst) -> Result<Term, LogicError> {
    Ok(match t {
        Term::Const(_) => t.clone(),
        Term::Var(v) => match replacement(v, map)? {
            Some(r) => r.clone(),
            None => t.clone(),
        },
        Term::Neg(a) => Term::Neg(Box::new(substitute_term(a, map)?)),
        Term::Add(ts) => Term::Add(ts.iter().map(|a| substitute_term(a, map)).collect::<Result<_, _>>()?),
        Term::Sub(a, b) => Term::sub(substitute_term(a, map)?, substitute_term(b, map)?),
        Term::Mul(c, a) => Term::Mul(c.clone(), Box::new(substitute_term(a, map)?)),
        Term::Div(a, k) => Term::Div(Box::new(substitute_term(a, map)?), k.clone()),
        Term::Ite(c, a, b) => Term::ite(
            substitute(c, map)?,
            substitute_term(a, map)?,
            substitute_term(b, map)?,
        ),
    })
}

/// Symbol-to-symbol renaming; the renamed variable keeps its sort.
pub fn rename(f: &Formula, names: &BTreeMap<String, String>) -> Formula {
    let map: Subst = f
        .free_vars()
        .into_iter()
        .filter_map(|v| {
            let to = names.get(&v.name)?;
            Some((v.name.clone(), Term::Var(Var::new(to.clone(), v.sort))))
        })
        .collect();
    substitute(f, &map).expect("renaming preserves sorts")
}
