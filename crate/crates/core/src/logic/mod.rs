//! Quantifier-free formulas and terms over linear integer/real arithmetic
//! and booleans.
//!
//! Everything in here is exact: integers are arbitrary precision and reals
//! are reduced fractions. Floating point only shows up in the C backend.

mod eval;
pub mod linear;
pub mod sexp;
mod simplify;
pub mod smtlib;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use eval::{eval_formula, eval_term};
pub use simplify::{simplify, simplify_term};
pub use subst::{rename, substitute, substitute_term, Subst};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("non-linear term: {0}")]
    NonLinear(String),
    #[error("smt-lib parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Int,
    Real,
}

impl Sort {
    pub fn is_numeric(self) -> bool {
        !matches!(self, Sort::Bool)
    }

    pub fn smt_name(self) -> &'static str {
        match self {
            Sort::Bool => "Bool",
            Sort::Int => "Int",
            Sort::Real => "Real",
        }
    }

    /// Value used to complete partial models.
    pub fn default_value(self) -> Value {
        match self {
            Sort::Bool => Value::Bool(false),
            Sort::Int => Value::Int(BigInt::zero()),
            Sort::Real => Value::Real(BigRational::zero()),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.smt_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Bool(_) => Sort::Bool,
            Value::Int(_) => Sort::Int,
            Value::Real(_) => Sort::Real,
        }
    }

    pub fn int(v: i64) -> Value {
        Value::Int(BigInt::from(v))
    }

    pub fn real(num: i64, den: i64) -> Value {
        Value::Real(BigRational::new(num.into(), den.into()))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Numeric value as a fraction; `None` for booleans.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(i) => Some(BigRational::from_integer(i.clone())),
            Value::Real(r) => Some(r.clone()),
            Value::Bool(_) => None,
        }
    }

    /// Builds a numeric value of `sort` from a fraction. Integer sorts
    /// require an integral fraction.
    pub fn from_rational(sort: Sort, r: BigRational) -> Option<Value> {
        match sort {
            Sort::Int if r.is_integer() => Some(Value::Int(r.to_integer())),
            Sort::Int => None,
            Sort::Real => Some(Value::Real(r)),
            Sort::Bool => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            Value::Bool(b) => f64::from(u8::from(*b)),
            Value::Int(i) => i.to_f64().unwrap_or(f64::NAN),
            Value::Real(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) if r.is_integer() => write!(f, "{}.0", r.numer()),
            Value::Real(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Var { name: name.into(), sort }
    }

    pub fn int(name: impl Into<String>) -> Self {
        Var::new(name, Sort::Int)
    }

    pub fn real(name: impl Into<String>) -> Self {
        Var::new(name, Sort::Real)
    }

    pub fn bool(name: impl Into<String>) -> Self {
        Var::new(name, Sort::Bool)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    /// The operator obtained by swapping the operands.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            op => op,
        }
    }

    pub fn holds<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

/// Arithmetic (or, for values only, boolean) terms.
///
/// Boolean-sorted terms are limited to constants, variables and `Ite`; they
/// exist so that substitutions and Skolem assignments can be uniform over
/// all sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Value),
    Var(Var),
    Neg(Box<Term>),
    Add(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    /// Constant coefficient times a term.
    Mul(BigRational, Box<Term>),
    /// Floor division by a positive integer constant (integer sort only).
    Div(Box<Term>, BigInt),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(bool),
    Var(Var),
    Cmp(CmpOp, Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Ite(Box<Formula>, Box<Formula>, Box<Formula>),
}

impl Term {
    pub fn int(v: i64) -> Term {
        Term::Const(Value::int(v))
    }

    pub fn real(num: i64, den: i64) -> Term {
        Term::Const(Value::real(num, den))
    }

    pub fn bool(b: bool) -> Term {
        Term::Const(Value::Bool(b))
    }

    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn constant(sort: Sort, r: BigRational) -> Term {
        match sort {
            Sort::Int => Term::Const(Value::Int(r.to_integer())),
            _ => Term::Const(Value::Real(r)),
        }
    }

    pub fn zero(sort: Sort) -> Term {
        Term::constant(sort, BigRational::zero())
    }

    pub fn one(sort: Sort) -> Term {
        Term::constant(sort, BigRational::one())
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Const(v) => v.sort(),
            Term::Var(v) => v.sort,
            Term::Neg(t) | Term::Mul(_, t) => t.sort(),
            Term::Sub(a, _) => a.sort(),
            Term::Add(ts) => ts.first().map_or(Sort::Int, Term::sort),
            Term::Div(..) => Sort::Int,
            Term::Ite(_, t, _) => t.sort(),
        }
    }

    /// Negation that folds literals, so `-(3)` is the constant `-3`.
    pub fn neg(t: Term) -> Term {
        match t {
            Term::Const(Value::Int(i)) => Term::Const(Value::Int(-i)),
            Term::Const(Value::Real(r)) => Term::Const(Value::Real(-r)),
            Term::Neg(inner) => *inner,
            t => Term::Neg(Box::new(t)),
        }
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(vec![a, b])
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn scale(c: BigRational, t: Term) -> Term {
        Term::Mul(c, Box::new(t))
    }

    pub fn ite(c: Formula, a: Term, b: Term) -> Term {
        Term::Ite(Box::new(c), Box::new(a), Box::new(b))
    }

    /// View a boolean-sorted term as a formula.
    pub fn to_formula(&self) -> Result<Formula, LogicError> {
        match self {
            Term::Const(Value::Bool(b)) => Ok(Formula::Const(*b)),
            Term::Var(v) if v.sort == Sort::Bool => Ok(Formula::Var(v.clone())),
            Term::Ite(c, a, b) => Ok(Formula::ite(
                (**c).clone(),
                a.to_formula()?,
                b.to_formula()?,
            )),
            other => Err(LogicError::SortMismatch(format!(
                "expected a boolean term, found {}",
                smtlib::term_to_string(other)
            ))),
        }
    }

    /// Boolean term equivalent to a formula.
    pub fn from_formula(f: &Formula) -> Term {
        match f {
            Formula::Const(b) => Term::bool(*b),
            Formula::Var(v) => Term::Var(v.clone()),
            f => Term::ite(f.clone(), Term::bool(true), Term::bool(false)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Neg(t) | Term::Mul(_, t) | Term::Div(t, _) => t.collect_vars(out),
            Term::Add(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Term::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Ite(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Const(_))
    }
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::Const(true)
    }

    pub fn ff() -> Formula {
        Formula::Const(false)
    }

    pub fn var(v: &Var) -> Formula {
        Formula::Var(v.clone())
    }

    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Formula {
        Formula::Cmp(op, a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Cmp(CmpOp::Eq, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn ite(c: Formula, a: Formula, b: Formula) -> Formula {
        Formula::Ite(Box::new(c), Box::new(a), Box::new(b))
    }

    /// Flattening conjunction; drops `true`, collapses on `false`.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::Const(true) => {}
                Formula::Const(false) => return Formula::ff(),
                Formula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::tt(),
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Flattening disjunction; drops `false`, collapses on `true`.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::Const(false) => {}
                Formula::Const(true) => return Formula::tt(),
                Formula::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::ff(),
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        self.free_vars().into_iter().map(|v| v.name).collect()
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Ite(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Top-level conjuncts (a non-conjunction is its own single conjunct).
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(fs) => fs.iter().flat_map(Formula::conjuncts).collect(),
            Formula::Const(true) => Vec::new(),
            f => vec![f],
        }
    }

    /// Checks that comparisons relate same-sort numeric terms and that
    /// arithmetic never mixes integer and real leaves.
    pub fn check_sorts(&self) -> Result<(), LogicError> {
        match self {
            Formula::Const(_) => Ok(()),
            Formula::Var(v) if v.sort == Sort::Bool => Ok(()),
            Formula::Var(v) => Err(LogicError::SortMismatch(format!(
                "`{}` of sort {} used as a formula",
                v.name, v.sort
            ))),
            Formula::Cmp(_, a, b) => {
                let sa = a.check_sorts()?;
                let sb = b.check_sorts()?;
                if sa != sb || !sa.is_numeric() {
                    return Err(LogicError::SortMismatch(format!(
                        "comparison between {sa} and {sb}"
                    )));
                }
                Ok(())
            }
            Formula::Not(f) => f.check_sorts(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(Formula::check_sorts),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.check_sorts()?;
                b.check_sorts()
            }
            Formula::Ite(c, a, b) => {
                c.check_sorts()?;
                a.check_sorts()?;
                b.check_sorts()
            }
        }
    }
}

impl Term {
    /// Returns the sort of a well-sorted term, or an error naming the
    /// offending subterm.
    pub fn check_sorts(&self) -> Result<Sort, LogicError> {
        let mismatch = |what: &str| {
            Err(LogicError::SortMismatch(format!(
                "{what} in {}",
                smtlib::term_to_string(self)
            )))
        };
        match self {
            Term::Const(v) => Ok(v.sort()),
            Term::Var(v) => Ok(v.sort),
            Term::Neg(t) => {
                let s = t.check_sorts()?;
                if s.is_numeric() {
                    Ok(s)
                } else {
                    mismatch("negation of a boolean")
                }
            }
            Term::Add(ts) => {
                let mut sort = None;
                for t in ts {
                    let s = t.check_sorts()?;
                    if !s.is_numeric() || sort.is_some_and(|prev| prev != s) {
                        return mismatch("mixed sorts");
                    }
                    sort = Some(s);
                }
                sort.map_or_else(|| mismatch("empty sum"), Ok)
            }
            Term::Sub(a, b) => {
                let (sa, sb) = (a.check_sorts()?, b.check_sorts()?);
                if sa != sb || !sa.is_numeric() {
                    return mismatch("mixed sorts");
                }
                Ok(sa)
            }
            Term::Mul(c, t) => {
                let s = t.check_sorts()?;
                match s {
                    Sort::Int if !c.is_integer() => mismatch("fractional coefficient"),
                    Sort::Bool => mismatch("scaled boolean"),
                    s => Ok(s),
                }
            }
            Term::Div(t, k) => {
                if t.check_sorts()? != Sort::Int || !k.is_positive() {
                    return mismatch("bad integer division");
                }
                Ok(Sort::Int)
            }
            Term::Ite(c, a, b) => {
                c.check_sorts()?;
                let (sa, sb) = (a.check_sorts()?, b.check_sorts()?);
                if sa != sb {
                    return mismatch("ite branches of different sorts");
                }
                Ok(sa)
            }
        }
    }
}

/// Total assignment of exact values to symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    values: BTreeMap<String, Value>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) {
        self.values.insert(name.into(), value);
    }

    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        self.insert(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn extend(&mut self, other: &Model) {
        for (k, v) in other.iter() {
            self.values.insert(k.clone(), v.clone());
        }
    }

    /// Keeps only the listed symbols.
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Model {
        let mut out = Model::new();
        for n in names {
            if let Some(v) = self.values.get(n) {
                out.insert(n, v.clone());
            }
        }
        out
    }

    /// Equalities pinning each listed variable to its value in this model.
    pub fn as_formula(&self, vars: &[Var]) -> Formula {
        Formula::and(vars.iter().filter_map(|v| {
            let val = self.get(&v.name)?;
            Some(match val {
                Value::Bool(true) => Formula::var(v),
                Value::Bool(false) => Formula::not(Formula::var(v)),
                val => Formula::eq(Term::var(v), Term::Const(val.clone())),
            })
        }))
    }
}

impl FromIterator<(String, Value)> for Model {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Model {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&smtlib::term_to_string(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&smtlib::formula_to_string(self))
    }
}
