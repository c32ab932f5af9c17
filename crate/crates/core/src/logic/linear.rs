//! Linear normal form: `Σ cᵢ·aᵢ + c` where each atom `aᵢ` is a variable or
//! an opaque non-linear-looking subterm (`ite`, `div`).

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{eval_term, CmpOp, Formula, LogicError, Model, Sort, Term, Value, Var};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinExpr {
    pub sort: Sort,
    pub coeffs: BTreeMap<Term, BigRational>,
    pub constant: BigRational,
}

impl LinExpr {
    pub fn constant(sort: Sort, c: BigRational) -> Self {
        LinExpr {
            sort,
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn atom(t: Term) -> Self {
        let sort = t.sort();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(t, BigRational::one());
        LinExpr {
            sort,
            coeffs,
            constant: BigRational::zero(),
        }
    }

    pub fn var(v: &Var) -> Self {
        LinExpr::atom(Term::Var(v.clone()))
    }

    pub fn from_term(t: &Term) -> Result<Self, LogicError> {
        let sort = t.sort();
        if !sort.is_numeric() {
            return Err(LogicError::SortMismatch(format!("boolean term {t} in arithmetic")));
        }
        Ok(match t {
            Term::Const(v) => LinExpr::constant(sort, v.as_rational().expect("numeric constant")),
            Term::Var(_) | Term::Ite(..) | Term::Div(..) => LinExpr::atom(t.clone()),
            Term::Neg(a) => LinExpr::from_term(a)?.scale(&-BigRational::one()),
            Term::Add(ts) => {
                let mut acc = LinExpr::constant(sort, BigRational::zero());
                for a in ts {
                    acc = acc.add(&LinExpr::from_term(a)?);
                }
                acc
            }
            Term::Sub(a, b) => LinExpr::from_term(a)?.sub(&LinExpr::from_term(b)?),
            Term::Mul(c, a) => LinExpr::from_term(a)?.scale(c),
        })
    }

    /// `a - b` for the two sides of a comparison.
    pub fn from_cmp(a: &Term, b: &Term) -> Result<Self, LogicError> {
        Ok(LinExpr::from_term(a)?.sub(&LinExpr::from_term(b)?))
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let e = out.coeffs.entry(k.clone()).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                out.coeffs.remove(k);
            }
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> LinExpr {
        if c.is_zero() {
            return LinExpr::constant(self.sort, BigRational::zero());
        }
        LinExpr {
            sort: self.sort,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            constant: &self.constant * c,
        }
    }

    pub fn add_constant(&self, c: &BigRational) -> LinExpr {
        let mut out = self.clone();
        out.constant += c;
        out
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: &Var) -> BigRational {
        self.coeffs
            .get(&Term::Var(v.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Whether `v` occurs anywhere, including inside opaque atoms.
    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.keys().any(|k| k.free_vars().contains(v))
    }

    /// Whether `v` occurs inside an opaque atom (so it cannot be solved for).
    pub fn mentions_opaquely(&self, v: &Var) -> bool {
        self.coeffs
            .keys()
            .any(|k| !matches!(k, Term::Var(_)) && k.free_vars().contains(v))
    }

    pub fn without(&self, v: &Var) -> LinExpr {
        let mut out = self.clone();
        out.coeffs.remove(&Term::Var(v.clone()));
        out
    }

    /// Replaces the variable `v` (as a direct atom) by `e`.
    pub fn substitute_var(&self, v: &Var, e: &LinExpr) -> LinExpr {
        let c = self.coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        self.without(v).add(&e.scale(&c))
    }

    pub fn eval(&self, m: &Model) -> Result<BigRational, LogicError> {
        let mut acc = self.constant.clone();
        for (k, c) in &self.coeffs {
            let v = eval_term(k, m)?;
            acc += c * v.as_rational().expect("numeric atom");
        }
        Ok(acc)
    }

    /// Whether all coefficients and the constant are integers.
    pub fn is_integral(&self) -> bool {
        self.constant.is_integer() && self.coeffs.values().all(BigRational::is_integer)
    }

    pub fn to_term(&self) -> Term {
        let mut parts: Vec<Term> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                if c.is_one() {
                    k.clone()
                } else if (-c).is_one() {
                    Term::Neg(Box::new(k.clone()))
                } else {
                    Term::scale(c.clone(), k.clone())
                }
            })
            .collect();
        if parts.is_empty() {
            return Term::constant(self.sort, self.constant.clone());
        }
        if !self.constant.is_zero() {
            parts.push(Term::constant(self.sort, self.constant.clone()));
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Add(parts)
        }
    }

    /// Renders `self ⋈ 0` with the constant moved to the right-hand side.
    pub fn to_formula(&self, op: CmpOp) -> Formula {
        if self.is_constant() {
            return Formula::Const(op.holds(&self.constant, &BigRational::zero()));
        }
        let (expr, op) = if self.coeffs.values().all(Signed::is_negative) {
            (self.scale(&-BigRational::one()), op.flip())
        } else {
            (self.clone(), op)
        };
        let lhs = LinExpr {
            constant: BigRational::zero(),
            ..expr.clone()
        };
        let rhs = Term::Const(
            Value::from_rational(expr.sort, -expr.constant.clone())
                .unwrap_or_else(|| Value::Real(-expr.constant.clone())),
        );
        Formula::Cmp(op, lhs.to_term(), rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancels_to_constant() {
        let x = Var::real("x");
        let e = LinExpr::from_cmp(&Term::var(&x), &Term::add(Term::var(&x), Term::real(2, 1))).unwrap();
        assert!(e.is_constant());
        assert_eq!(e.to_formula(CmpOp::Lt), Formula::tt());
    }

    #[test]
    fn moves_constant_right() {
        let b = Var::int("b");
        let e = LinExpr::from_cmp(&Term::add(Term::int(1), Term::var(&b)), &Term::int(0)).unwrap();
        assert_eq!(
            e.to_formula(CmpOp::Eq),
            Formula::eq(Term::var(&b), Term::int(-1))
        );
    }

    #[test]
    fn substitution_of_solved_variable() {
        let (x, y) = (Var::real("x"), Var::real("y"));
        let e = LinExpr::from_cmp(&Term::var(&y), &Term::var(&x)).unwrap();
        let sol = LinExpr::var(&x).add_constant(&BigRational::one());
        let r = e.substitute_var(&y, &sol);
        assert!(r.is_constant());
        assert_eq!(r.constant, BigRational::one());
    }
}
