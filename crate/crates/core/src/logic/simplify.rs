use num_traits::{One, Zero};

use super::linear::LinExpr;
use super::{eval_formula, eval_term, Formula, Model, Term};

fn fold(t: Term) -> Term {
    match eval_term(&t, &Model::new()) {
        Ok(v) => Term::Const(v),
        Err(_) => t,
    }
}

/// Equivalence-preserving cleanup of a term: constant folding, collapsing
/// `ite` on constant conditions or equal branches.
pub fn simplify_term(t: &Term) -> Term {
    match t {
        Term::Const(_) | Term::Var(_) => t.clone(),
        Term::Neg(a) => match simplify_term(a) {
            Term::Neg(inner) => *inner,
            a if a.is_const() => fold(Term::Neg(Box::new(a))),
            a => Term::Neg(Box::new(a)),
        },
        Term::Add(ts) => {
            let parts: Vec<Term> = ts.iter().map(simplify_term).collect();
            if parts.iter().all(Term::is_const) {
                return fold(Term::Add(parts));
            }
            let mut kept: Vec<Term> = parts
                .into_iter()
                .filter(|p| !matches!(p, Term::Const(v) if v.as_rational().is_some_and(|r| r.is_zero())))
                .collect();
            if kept.len() == 1 {
                kept.pop().unwrap()
            } else {
                Term::Add(kept)
            }
        }
        Term::Sub(a, b) => {
            let (a, b) = (simplify_term(a), simplify_term(b));
            if a.is_const() && b.is_const() {
                fold(Term::sub(a, b))
            } else if matches!(&b, Term::Const(v) if v.as_rational().is_some_and(|r| r.is_zero())) {
                a
            } else {
                Term::sub(a, b)
            }
        }
        Term::Mul(c, a) => {
            let a = simplify_term(a);
            if c.is_one() {
                a
            } else if c.is_zero() {
                Term::zero(a.sort())
            } else if a.is_const() {
                fold(Term::scale(c.clone(), a))
            } else {
                Term::scale(c.clone(), a)
            }
        }
        Term::Div(a, k) => {
            let a = simplify_term(a);
            let d = Term::Div(Box::new(a), k.clone());
            if matches!(&d, Term::Div(a, _) if a.is_const()) {
                fold(d)
            } else {
                d
            }
        }
        Term::Ite(c, a, b) => {
            let c = simplify(c);
            match c {
                Formula::Const(true) => simplify_term(a),
                Formula::Const(false) => simplify_term(b),
                c => {
                    let (a, b) = (simplify_term(a), simplify_term(b));
                    if a == b {
                        a
                    } else {
                        Term::ite(c, a, b)
                    }
                }
            }
        }
    }
}

/// Equivalence-preserving cleanup of a formula. Guaranteed rewrites:
/// constant comparisons fold, `ite` with a constant condition collapses,
/// boolean constants are absorbed by `and`/`or`, double negation goes away.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Const(_) | Formula::Var(_) => f.clone(),
        Formula::Cmp(op, a, b) => {
            let (a, b) = (simplify_term(a), simplify_term(b));
            let cmp = Formula::Cmp(*op, a, b);
            if let Formula::Cmp(_, a, b) = &cmp {
                if a.is_const() && b.is_const() {
                    if let Ok(v) = eval_formula(&cmp, &Model::new()) {
                        return Formula::Const(v);
                    }
                }
                if a.sort().is_numeric() {
                    if let Ok(lin) = LinExpr::from_cmp(a, b) {
                        if lin.is_constant() {
                            return lin.to_formula(*op);
                        }
                    }
                }
            }
            cmp
        }
        Formula::Not(g) => match simplify(g) {
            Formula::Const(b) => Formula::Const(!b),
            Formula::Not(inner) => *inner,
            g => Formula::not(g),
        },
        Formula::And(fs) => Formula::and(fs.iter().map(simplify)),
        Formula::Or(fs) => Formula::or(fs.iter().map(simplify)),
        Formula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Const(false), _) | (_, Formula::Const(true)) => Formula::tt(),
            (Formula::Const(true), b) => b,
            (a, Formula::Const(false)) => simplify(&Formula::not(a)),
            (a, b) => Formula::implies(a, b),
        },
        Formula::Iff(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Const(x), Formula::Const(y)) => Formula::Const(x == y),
            (Formula::Const(true), g) | (g, Formula::Const(true)) => g,
            (Formula::Const(false), g) | (g, Formula::Const(false)) => simplify(&Formula::not(g)),
            (a, b) => Formula::iff(a, b),
        },
        Formula::Ite(c, a, b) => match simplify(c) {
            Formula::Const(true) => simplify(a),
            Formula::Const(false) => simplify(b),
            c => match (simplify(a), simplify(b)) {
                (a, b) if a == b => a,
                (Formula::Const(true), Formula::Const(false)) => c,
                (Formula::Const(false), Formula::Const(true)) => simplify(&Formula::not(c)),
                (a, b) => Formula::ite(c, a, b),
            },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{CmpOp, Var};
    use num_rational::BigRational;

    #[test]
    fn ite_with_true_condition_picks_then() {
        let (a, b) = (Var::bool("a"), Var::bool("b"));
        let f = Formula::ite(Formula::tt(), Formula::var(&a), Formula::var(&b));
        assert_eq!(simplify(&f), Formula::var(&a));
    }

    #[test]
    fn constant_equality_is_absorbed() {
        let p = Var::bool("p");
        let f = Formula::And(vec![Formula::eq(Term::int(0), Term::int(0)), Formula::var(&p)]);
        assert_eq!(simplify(&f), Formula::var(&p));
    }

    #[test]
    fn fmid_instance_collapses_to_one() {
        // ite(MID(0,4) = 2, MID(0, MID(0,4)), MID(0,4)) over the reals
        let half = BigRational::new(1.into(), 2.into());
        let mid = |l: Term, u: Term| Term::scale(half.clone(), Term::add(l, u));
        let m04 = mid(Term::real(0, 1), Term::real(4, 1));
        let t = Term::ite(
            Formula::eq(m04.clone(), Term::real(2, 1)),
            mid(Term::real(0, 1), m04.clone()),
            m04,
        );
        assert_eq!(simplify_term(&t), Term::real(1, 1));
    }

    #[test]
    fn double_negation_removed() {
        let p = Var::bool("p");
        let f = Formula::not(Formula::not(Formula::var(&p)));
        assert_eq!(simplify(&f), Formula::var(&p));
    }

    #[test]
    fn linear_tautology_folds() {
        let x = Var::real("x");
        let f = Formula::cmp(
            CmpOp::Lt,
            Term::var(&x),
            Term::add(Term::var(&x), Term::real(2, 1)),
        );
        assert_eq!(simplify(&f), Formula::tt());
    }
}
