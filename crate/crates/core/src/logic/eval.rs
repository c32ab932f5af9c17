use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Formula, LogicError, Model, Sort, Term, Value};

fn numeric(v: Value, ctx: &Term) -> Result<BigRational, LogicError> {
    v.as_rational().ok_or_else(|| {
        LogicError::SortMismatch(format!("boolean value in arithmetic: {ctx}"))
    })
}

fn repack(sort: Sort, r: BigRational, ctx: &Term) -> Result<Value, LogicError> {
    Value::from_rational(sort, r)
        .ok_or_else(|| LogicError::SortMismatch(format!("non-integral integer result in {ctx}")))
}

/// Exact evaluation of a term under a model.
pub fn eval_term(t: &Term, m: &Model) -> Result<Value, LogicError> {
    match t {
        Term::Const(v) => Ok(v.clone()),
        Term::Var(v) => m
            .get(&v.name)
            .cloned()
            .ok_or_else(|| LogicError::Unbound(v.name.clone())),
        Term::Neg(a) => {
            let r = numeric(eval_term(a, m)?, t)?;
            repack(a.sort(), -r, t)
        }
        Term::Add(ts) => {
            let mut acc = BigRational::zero();
            for a in ts {
                acc += numeric(eval_term(a, m)?, t)?;
            }
            repack(t.sort(), acc, t)
        }
        Term::Sub(a, b) => {
            let r = numeric(eval_term(a, m)?, t)? - numeric(eval_term(b, m)?, t)?;
            repack(a.sort(), r, t)
        }
        Term::Mul(c, a) => {
            let r = c * numeric(eval_term(a, m)?, t)?;
            repack(a.sort(), r, t)
        }
        Term::Div(a, k) => match eval_term(a, m)? {
            Value::Int(i) => Ok(Value::Int(i.div_floor(k))),
            _ => Err(LogicError::SortMismatch(format!("integer division of non-integer: {t}"))),
        },
        Term::Ite(c, a, b) => {
            if eval_formula(c, m)? {
                eval_term(a, m)
            } else {
                eval_term(b, m)
            }
        }
    }
}

/// Exact evaluation of a formula under a model.
pub fn eval_formula(f: &Formula, m: &Model) -> Result<bool, LogicError> {
    match f {
        Formula::Const(b) => Ok(*b),
        Formula::Var(v) => match m.get(&v.name) {
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(LogicError::SortMismatch(format!(
                "`{}` bound to non-boolean {other}",
                v.name
            ))),
            None => Err(LogicError::Unbound(v.name.clone())),
        },
        Formula::Cmp(op, a, b) => {
            let (va, vb) = (eval_term(a, m)?, eval_term(b, m)?);
            match (&va, &vb) {
                (Value::Bool(x), Value::Bool(y)) if !op.is_ordering() => Ok(op.holds(x, y)),
                _ => {
                    let ra = numeric(va, a)?;
                    let rb = numeric(vb, b)?;
                    Ok(op.holds(&ra, &rb))
                }
            }
        }
        Formula::Not(g) => Ok(!eval_formula(g, m)?),
        Formula::And(fs) => {
            for g in fs {
                if !eval_formula(g, m)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for g in fs {
                if eval_formula(g, m)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Implies(a, b) => Ok(!eval_formula(a, m)? || eval_formula(b, m)?),
        Formula::Iff(a, b) => Ok(eval_formula(a, m)? == eval_formula(b, m)?),
        Formula::Ite(c, a, b) => {
            if eval_formula(c, m)? {
                eval_formula(a, m)
            } else {
                eval_formula(b, m)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{CmpOp, Var};

    #[test]
    fn disequality_on_equal_values_is_false() {
        let (x, y) = (Var::int("x"), Var::int("y"));
        let f = Formula::cmp(CmpOp::Ne, Term::var(&x), Term::var(&y));
        let m = Model::new().with("x", Value::int(0)).with("y", Value::int(0));
        assert!(!eval_formula(&f, &m).unwrap());
    }

    #[test]
    fn bias_update_from_running_example() {
        // (if x = 1 then 1 else -1) + b
        let (x, b) = (Var::int("x"), Var::int("b"));
        let t = Term::add(
            Term::ite(
                Formula::eq(Term::var(&x), Term::int(1)),
                Term::int(1),
                Term::int(-1),
            ),
            Term::var(&b),
        );
        let m = Model::new().with("x", Value::int(1)).with("b", Value::int(1));
        assert_eq!(eval_term(&t, &m).unwrap(), Value::int(2));
    }

    #[test]
    fn midpoint_of_zero_and_four() {
        let t = Term::scale(
            BigRational::new(1.into(), 2.into()),
            Term::add(Term::real(0, 1), Term::real(4, 1)),
        );
        assert_eq!(eval_term(&t, &Model::new()).unwrap(), Value::real(2, 1));
    }

    #[test]
    fn unbound_symbol_is_rejected() {
        let f = Formula::var(&Var::bool("p"));
        assert_eq!(
            eval_formula(&f, &Model::new()),
            Err(LogicError::Unbound("p".into()))
        );
    }

    #[test]
    fn floor_division_rounds_down_for_negatives() {
        let t = Term::Div(Box::new(Term::int(-3)), 2.into());
        assert_eq!(eval_term(&t, &Model::new()).unwrap(), Value::int(-2));
    }

    #[test]
    fn thirds_are_exact() {
        let third = Term::real(1, 3);
        let t = Term::Add(vec![third.clone(), third.clone(), third]);
        assert_eq!(eval_term(&t, &Model::new()).unwrap(), Value::real(1, 1));
    }
}
