//! Turning local Skolem relations into Skolem functions.
//!
//! Each existential's relation is a conjunction of literals `y ⋈ t`. Bounds
//! are folded with `max`/`min` and a witness is picked by `mid`, `gt`, `lt`,
//! or a chain of midpoints that dodges the disequalities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::logic::linear::LinExpr;
use crate::logic::{simplify_term, substitute, CmpOp, Formula, LogicError, Sort, Subst, Term, Var};
use crate::skolem::LocalRelation;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("cannot read `{atom}` as a bound on `{var}`")]
    Unsupported { var: String, atom: String },
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `t + k`, kept in linear normal form when possible.
pub fn shift(t: &Term, k: i64) -> Term {
    match LinExpr::from_term(t) {
        Ok(e) => e.add_constant(&rat(k)).to_term(),
        Err(_) => Term::add(t.clone(), Term::constant(t.sort(), rat(k))),
    }
}

pub fn max(a: Term, b: Term) -> Term {
    Term::ite(Formula::cmp(CmpOp::Lt, a.clone(), b.clone()), b, a)
}

pub fn min(a: Term, b: Term) -> Term {
    Term::ite(Formula::cmp(CmpOp::Lt, a.clone(), b.clone()), a, b)
}

/// Midpoint; floor of the midpoint on integers.
pub fn mid(a: Term, b: Term) -> Term {
    match a.sort() {
        Sort::Int => Term::Div(Box::new(Term::add(a, b)), BigInt::from(2)),
        _ => Term::scale(BigRational::new(1.into(), 2.into()), Term::add(a, b)),
    }
}

/// Witness above a lower bound.
pub fn gt(lo: &Term, strict: bool) -> Term {
    if strict {
        shift(lo, 1)
    } else {
        lo.clone()
    }
}

/// Witness below an upper bound.
pub fn lt(hi: &Term, strict: bool) -> Term {
    if strict {
        shift(hi, -1)
    } else {
        hi.clone()
    }
}

/// Midpoint of `(lo, hi)` avoiding `h`: `ite(mid = h, mid(lo, mid), mid)`.
pub fn fmid(lo: Term, hi: Term, h: Term) -> Term {
    let m = mid(lo.clone(), hi);
    Term::ite(Formula::eq(m.clone(), h), mid(lo, m.clone()), m)
}

/// First candidate distinct from every `h`; the last one is the fallback.
fn pick(candidates: Vec<Term>, hs: &[Term]) -> Term {
    let mut it = candidates.into_iter().rev();
    let mut acc = it.next().expect("at least one candidate");
    for c in it {
        let avoid = Formula::and(hs.iter().map(|h| Formula::cmp(CmpOp::Ne, c.clone(), h.clone())));
        acc = Term::ite(avoid, c, acc);
    }
    acc
}

/// Literals of a local relation sorted by how they bound `y`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundClasses {
    pub strict_lower: Vec<Term>,
    pub lower: Vec<Term>,
    pub strict_upper: Vec<Term>,
    pub upper: Vec<Term>,
    pub eq: Vec<Term>,
    pub ne: Vec<Term>,
}

impl BoundClasses {
    pub fn classify(y: &Var, atoms: &[Formula]) -> Result<Self, RefineError> {
        let mut out = BoundClasses::default();
        for a in atoms {
            out.add(y, a)?;
        }
        Ok(out)
    }

    fn add(&mut self, y: &Var, atom: &Formula) -> Result<(), RefineError> {
        let unsupported = || RefineError::Unsupported {
            var: y.name.clone(),
            atom: crate::logic::smtlib::formula_to_string(atom),
        };
        if !atom.free_vars().contains(y) {
            return Ok(());
        }
        if y.sort == Sort::Bool {
            let t = match atom {
                Formula::Var(_) => Term::bool(true),
                Formula::Not(g) if matches!(**g, Formula::Var(_)) => Term::bool(false),
                Formula::Iff(a, b) => match (&**a, &**b) {
                    (Formula::Var(v), g) | (g, Formula::Var(v)) if v == y && !g.free_vars().contains(y) => {
                        Term::from_formula(g)
                    }
                    _ => return Err(unsupported()),
                },
                _ => return Err(unsupported()),
            };
            self.eq.push(t);
            return Ok(());
        }
        let (op, a, b) = match atom {
            Formula::Cmp(op, a, b) => (*op, a, b),
            Formula::Not(g) => match &**g {
                Formula::Cmp(op, a, b) => (op.negate(), a, b),
                _ => return Err(unsupported()),
            },
            _ => return Err(unsupported()),
        };
        let lin = LinExpr::from_cmp(a, b)?;
        let c = lin.coeff(y);
        if c.is_zero() || lin.mentions_opaquely(y) {
            return Err(unsupported());
        }
        let bound = lin.without(y).scale(&(-c.recip()));
        if y.sort == Sort::Int && !bound.is_integral() {
            return Err(unsupported());
        }
        let op = if c.is_negative() { op.flip() } else { op };
        let t = bound.to_term();
        match op {
            CmpOp::Eq => self.eq.push(t),
            CmpOp::Ne => self.ne.push(t),
            CmpOp::Gt => self.strict_lower.push(t),
            CmpOp::Ge => self.lower.push(t),
            CmpOp::Lt => self.strict_upper.push(t),
            CmpOp::Le => self.upper.push(t),
        }
        Ok(())
    }

    /// Rewrites `y > t` as `y >= t + 1` and `y < t` as `y <= t - 1`.
    fn integral(mut self) -> Self {
        let sl = std::mem::take(&mut self.strict_lower);
        let su = std::mem::take(&mut self.strict_upper);
        self.lower.extend(sl.iter().map(|t| shift(t, 1)));
        self.upper.extend(su.iter().map(|t| shift(t, -1)));
        self
    }
}

fn fold(ts: Vec<Term>, f: fn(Term, Term) -> Term) -> Option<Term> {
    ts.into_iter().rev().reduce(|acc, t| f(t, acc))
}

/// Skolem term for `y` from the literals constraining it.
pub fn extract(y: &Var, atoms: &[Formula]) -> Result<Term, RefineError> {
    let mut classes = BoundClasses::classify(y, atoms)?;
    if let Some(e) = classes.eq.first() {
        return Ok(e.clone());
    }
    if y.sort == Sort::Bool {
        return Ok(Term::bool(false));
    }
    if y.sort == Sort::Int {
        classes = classes.integral();
    }
    let lo_strict = !classes.strict_lower.is_empty();
    let hi_strict = !classes.strict_upper.is_empty();
    let lo = fold([classes.strict_lower, classes.lower].concat(), max);
    let hi = fold([classes.strict_upper, classes.upper].concat(), min);
    let hs = classes.ne;
    let m = hs.len() as i64;
    let sort = y.sort;
    Ok(match (lo, hi) {
        (Some(lo), Some(hi)) if hs.is_empty() => mid(lo, hi),
        (Some(lo), Some(hi)) => {
            if sort == Sort::Int {
                if hs.len() == 1 {
                    let h = hs[0].clone();
                    let c = mid(lo, hi.clone());
                    let up = shift(&h, 1);
                    Term::ite(
                        Formula::cmp(CmpOp::Ne, c.clone(), h.clone()),
                        c,
                        Term::ite(Formula::cmp(CmpOp::Le, up.clone(), hi), up, shift(&h, -1)),
                    )
                } else {
                    pick((0..=m).map(|i| shift(&lo, i)).collect(), &hs)
                }
            } else {
                midpoints(lo, hi, &hs)
            }
        }
        (Some(lo), None) if hs.is_empty() => gt(&lo, lo_strict),
        (Some(lo), None) => {
            if sort == Sort::Int {
                pick((0..=m).map(|i| shift(&lo, i)).collect(), &hs)
            } else {
                let hi = shift(&lo, 1);
                midpoints(lo, hi, &hs)
            }
        }
        (None, Some(hi)) if hs.is_empty() => lt(&hi, hi_strict),
        (None, Some(hi)) => {
            if sort == Sort::Int {
                pick((0..=m).map(|i| shift(&hi, -i)).collect(), &hs)
            } else {
                let lo = shift(&hi, -1);
                midpoints(lo, hi, &hs)
            }
        }
        (None, None) if hs.is_empty() => Term::zero(sort),
        (None, None) => pick((1..=m + 1).map(|i| shift(&hs[0], i)).collect(), &hs),
    })
}

/// `mid(lo, hi)`, `mid(lo, mid(lo, hi))`, ... until one avoids every `h`.
fn midpoints(lo: Term, hi: Term, hs: &[Term]) -> Term {
    if hs.len() == 1 {
        return fmid(lo, hi, hs[0].clone());
    }
    let mut cands = vec![mid(lo.clone(), hi)];
    for _ in 0..hs.len() {
        let last = cands.last().unwrap().clone();
        cands.push(mid(lo.clone(), last));
    }
    pick(cands, hs)
}

/// Skolem terms for every variable of a local relation, refined in reverse
/// elimination order so each term mentions universals only.
pub fn refine(rel: &LocalRelation) -> Result<Vec<(Var, Term)>, RefineError> {
    let mut map = Subst::new();
    let mut out = Vec::new();
    for y in rel.order.iter().rev() {
        let atoms: Vec<Formula> = rel
            .psi(y)
            .iter()
            .map(|a| substitute(a, &map))
            .collect::<Result<_, _>>()?;
        let f = simplify_term(&extract(y, &atoms)?);
        map.insert(y.name.clone(), f.clone());
        out.push((y.clone(), f));
    }
    Ok(out)
}
