//! SMT-LIB2 printing and parsing of terms and formulas.
//!
//! Printing then parsing yields a structurally equal value for terms built
//! through the smart constructors (in particular, negated literals are
//! folded into negative constants).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::sexp::{self, Sexp};
use super::{CmpOp, Formula, LogicError, Sort, Term, Value, Var};

/// Symbol name to sort, used to type free symbols while parsing.
pub type SortTable = BTreeMap<String, Sort>;

const RESERVED: &[&str] = &[
    "true", "false", "ite", "and", "or", "not", "=>", "=", "distinct", "let", "forall", "exists",
    "par", "as", "_", "!", "div", "mod", "abs", "to_real", "to_int",
];

fn is_simple_symbol(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || "_@.$~".contains(c))
        && !RESERVED.contains(&name)
}

pub fn symbol(name: &str) -> String {
    if is_simple_symbol(name) {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn unsigned_literal(sort: Sort, r: &BigRational) -> String {
    match sort {
        Sort::Int => r.to_integer().to_string(),
        _ if r.is_integer() => format!("{}.0", r.numer()),
        _ => format!("(/ {}.0 {}.0)", r.numer(), r.denom()),
    }
}

/// SMT-LIB2 literal for a numeric constant of the given sort.
pub fn numeric_literal(sort: Sort, r: &BigRational) -> String {
    if r.is_negative() {
        format!("(- {})", unsigned_literal(sort, &-r))
    } else {
        unsigned_literal(sort, r)
    }
}

pub fn value_to_string(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        v => numeric_literal(v.sort(), &v.as_rational().unwrap()),
    }
}

pub fn term_to_string(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

pub fn formula_to_string(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_list<T>(out: &mut String, head: &str, items: &[T], each: impl Fn(&T, &mut String)) {
    out.push('(');
    out.push_str(head);
    for it in items {
        out.push(' ');
        each(it, out);
    }
    out.push(')');
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Const(v) => out.push_str(&value_to_string(v)),
        Term::Var(v) => out.push_str(&symbol(&v.name)),
        Term::Neg(a) => write_list(out, "-", std::slice::from_ref(a.as_ref()), write_term),
        Term::Add(ts) => write_list(out, "+", ts, write_term),
        Term::Sub(a, b) => write_list(out, "-", &[a.as_ref(), b.as_ref()], |t, o| write_term(t, o)),
        Term::Mul(c, a) => {
            out.push_str("(* ");
            out.push_str(&numeric_literal(a.sort(), c));
            out.push(' ');
            write_term(a, out);
            out.push(')');
        }
        Term::Div(a, k) => {
            out.push_str("(div ");
            write_term(a, out);
            out.push_str(&format!(" {k})"));
        }
        Term::Ite(c, a, b) => {
            out.push_str("(ite ");
            write_formula(c, out);
            out.push(' ');
            write_term(a, out);
            out.push(' ');
            write_term(b, out);
            out.push(')');
        }
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Const(b) => out.push_str(if *b { "true" } else { "false" }),
        Formula::Var(v) => out.push_str(&symbol(&v.name)),
        Formula::Cmp(op, a, b) => {
            let head = match op {
                CmpOp::Eq => "=",
                CmpOp::Ne => "distinct",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            write_list(out, head, &[a, b], |t, o| write_term(t, o));
        }
        Formula::Not(g) => write_list(out, "not", std::slice::from_ref(g.as_ref()), write_formula),
        Formula::And(fs) if fs.is_empty() => out.push_str("true"),
        Formula::Or(fs) if fs.is_empty() => out.push_str("false"),
        Formula::And(fs) => write_list(out, "and", fs, write_formula),
        Formula::Or(fs) => write_list(out, "or", fs, write_formula),
        Formula::Implies(a, b) => write_list(out, "=>", &[a.as_ref(), b.as_ref()], |f, o| write_formula(f, o)),
        Formula::Iff(a, b) => write_list(out, "=", &[a.as_ref(), b.as_ref()], |f, o| write_formula(f, o)),
        Formula::Ite(c, a, b) => {
            write_list(out, "ite", &[c.as_ref(), a.as_ref(), b.as_ref()], |f, o| write_formula(f, o))
        }
    }
}

fn perr(msg: impl Into<String>) -> LogicError {
    LogicError::Parse(msg.into())
}

fn parse_numeral(s: &str) -> Option<Value> {
    if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
        return Some(Value::Int(s.parse::<BigInt>().ok()?));
    }
    let (int, frac) = s.split_once('.')?;
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Some(Value::Real(BigRational::new(digits, scale)))
}

/// Sort of an s-expression, as far as it can be told syntactically.
fn infer_sort(e: &Sexp, table: &SortTable) -> Option<Sort> {
    match e {
        Sexp::Atom(a) if a == "true" || a == "false" => Some(Sort::Bool),
        Sexp::Atom(a) => parse_numeral(a)
            .map(|v| v.sort())
            .or_else(|| table.get(a.as_str()).copied()),
        Sexp::Quoted(q) => table.get(q.as_str()).copied(),
        Sexp::Str(_) => None,
        Sexp::List(items) => {
            let head = items.first()?.atom()?;
            match head {
                "not" | "and" | "or" | "=>" | "=" | "distinct" | "<" | "<=" | ">" | ">=" => Some(Sort::Bool),
                "ite" => infer_sort(items.get(2)?, table).or_else(|| infer_sort(items.get(3)?, table)),
                "div" | "mod" => Some(Sort::Int),
                "/" => Some(Sort::Real),
                "+" | "-" | "*" => {
                    let sorts: Vec<Sort> = items[1..].iter().filter_map(|a| infer_sort(a, table)).collect();
                    if sorts.contains(&Sort::Real) {
                        Some(Sort::Real)
                    } else {
                        sorts.first().copied()
                    }
                }
                _ => None,
            }
        }
    }
}

/// Promotes integer literals so that mixed literal/real arithmetic typechecks.
fn unify(terms: &mut [Term]) {
    if terms.iter().any(|t| t.sort() == Sort::Real) {
        for t in terms.iter_mut() {
            if let Term::Const(Value::Int(i)) = t {
                *t = Term::Const(Value::Real(BigRational::from_integer(i.clone())));
            }
        }
    }
}

fn lookup(name: &str, table: &SortTable) -> Result<Var, LogicError> {
    table
        .get(name)
        .map(|s| Var::new(name, *s))
        .ok_or_else(|| perr(format!("undeclared symbol `{name}`")))
}

fn constant_of(t: &Term) -> Option<BigRational> {
    match t {
        Term::Const(v) => v.as_rational(),
        _ => None,
    }
}

pub fn sexp_to_term(e: &Sexp, table: &SortTable) -> Result<Term, LogicError> {
    match e {
        Sexp::Atom(a) if a == "true" => Ok(Term::bool(true)),
        Sexp::Atom(a) if a == "false" => Ok(Term::bool(false)),
        Sexp::Atom(a) => match parse_numeral(a) {
            Some(v) => Ok(Term::Const(v)),
            None => Ok(Term::Var(lookup(a, table)?)),
        },
        Sexp::Quoted(q) => Ok(Term::Var(lookup(q, table)?)),
        Sexp::Str(s) => Err(perr(format!("unexpected string \"{s}\""))),
        Sexp::List(items) => {
            let head = items
                .first()
                .and_then(Sexp::atom)
                .ok_or_else(|| perr(format!("bad term {e}")))?;
            let args = &items[1..];
            let terms = || -> Result<Vec<Term>, LogicError> {
                let mut ts = args.iter().map(|a| sexp_to_term(a, table)).collect::<Result<Vec<_>, _>>()?;
                unify(&mut ts);
                Ok(ts)
            };
            match head {
                "-" if args.len() == 1 => {
                    let t = sexp_to_term(&args[0], table)?;
                    Ok(match t {
                        Term::Const(_) => Term::neg(t),
                        t => Term::Neg(Box::new(t)),
                    })
                }
                "-" if args.len() >= 2 => {
                    let mut ts = terms()?.into_iter();
                    let first = ts.next().unwrap();
                    Ok(ts.fold(first, Term::sub))
                }
                "+" if !args.is_empty() => Ok(Term::Add(terms()?)),
                "*" if args.len() == 2 => {
                    let ts = terms()?;
                    match (constant_of(&ts[0]), constant_of(&ts[1])) {
                        (Some(c), _) => Ok(Term::scale(c, ts[1].clone())),
                        (None, Some(c)) => Ok(Term::scale(c, ts[0].clone())),
                        _ => Err(LogicError::NonLinear(e.to_string())),
                    }
                }
                "/" if args.len() == 2 => {
                    let ts = terms()?;
                    match (constant_of(&ts[0]), constant_of(&ts[1])) {
                        (_, Some(d)) if d.is_zero() => Err(perr("division by zero")),
                        (Some(n), Some(d)) => Ok(Term::Const(Value::Real(n / d))),
                        (None, Some(d)) if ts[0].sort() == Sort::Real => {
                            Ok(Term::scale(BigRational::one() / d, ts[0].clone()))
                        }
                        _ => Err(LogicError::NonLinear(e.to_string())),
                    }
                }
                "div" if args.len() == 2 => {
                    let t = sexp_to_term(&args[0], table)?;
                    match sexp_to_term(&args[1], table)? {
                        Term::Const(Value::Int(k)) if k.is_positive() => Ok(Term::Div(Box::new(t), k)),
                        _ => Err(LogicError::NonLinear(e.to_string())),
                    }
                }
                "ite" if args.len() == 3 => {
                    let c = sexp_to_formula(&args[0], table)?;
                    let mut branches = vec![sexp_to_term(&args[1], table)?, sexp_to_term(&args[2], table)?];
                    unify(&mut branches);
                    let b = branches.pop().unwrap();
                    let a = branches.pop().unwrap();
                    Ok(Term::ite(c, a, b))
                }
                _ => Err(perr(format!("unsupported term {e}"))),
            }
        }
    }
}

pub fn sexp_to_formula(e: &Sexp, table: &SortTable) -> Result<Formula, LogicError> {
    match e {
        Sexp::Atom(a) if a == "true" => Ok(Formula::tt()),
        Sexp::Atom(a) if a == "false" => Ok(Formula::ff()),
        Sexp::Atom(a) | Sexp::Quoted(a) => {
            let v = lookup(a, table)?;
            if v.sort != Sort::Bool {
                return Err(LogicError::SortMismatch(format!("`{a}` is not boolean")));
            }
            Ok(Formula::Var(v))
        }
        Sexp::Str(s) => Err(perr(format!("unexpected string \"{s}\""))),
        Sexp::List(items) => {
            let head = items
                .first()
                .and_then(Sexp::atom)
                .ok_or_else(|| perr(format!("bad formula {e}")))?;
            let args = &items[1..];
            let formulas = || args.iter().map(|a| sexp_to_formula(a, table)).collect::<Result<Vec<_>, _>>();
            let binary_terms = || -> Result<(Term, Term), LogicError> {
                if args.len() != 2 {
                    return Err(perr(format!("expected two arguments in {e}")));
                }
                let mut ts = vec![sexp_to_term(&args[0], table)?, sexp_to_term(&args[1], table)?];
                unify(&mut ts);
                let b = ts.pop().unwrap();
                Ok((ts.pop().unwrap(), b))
            };
            let is_bool = args.first().and_then(|a| infer_sort(a, table)) == Some(Sort::Bool);
            match head {
                "not" if args.len() == 1 => Ok(Formula::not(sexp_to_formula(&args[0], table)?)),
                "and" => Ok(Formula::And(formulas()?)),
                "or" => Ok(Formula::Or(formulas()?)),
                "=>" if args.len() >= 2 => {
                    let mut fs = formulas()?;
                    let last = fs.pop().unwrap();
                    Ok(fs.into_iter().rev().fold(last, |acc, f| Formula::implies(f, acc)))
                }
                "ite" if args.len() == 3 => {
                    let fs = formulas()?;
                    let [c, a, b]: [Formula; 3] = fs.try_into().unwrap();
                    Ok(Formula::ite(c, a, b))
                }
                "=" if is_bool && args.len() == 2 => {
                    let fs = formulas()?;
                    let [a, b]: [Formula; 2] = fs.try_into().unwrap();
                    Ok(Formula::iff(a, b))
                }
                "distinct" if is_bool && args.len() == 2 => {
                    let fs = formulas()?;
                    let [a, b]: [Formula; 2] = fs.try_into().unwrap();
                    Ok(Formula::not(Formula::iff(a, b)))
                }
                "=" | "distinct" | "<" | "<=" | ">" | ">=" => {
                    let op = match head {
                        "=" => CmpOp::Eq,
                        "distinct" => CmpOp::Ne,
                        "<" => CmpOp::Lt,
                        "<=" => CmpOp::Le,
                        ">" => CmpOp::Gt,
                        _ => CmpOp::Ge,
                    };
                    let (a, b) = binary_terms()?;
                    Ok(Formula::Cmp(op, a, b))
                }
                _ => Err(perr(format!("unsupported formula {e}"))),
            }
        }
    }
}

fn single(src: &str) -> Result<Sexp, LogicError> {
    let mut all = sexp::parse_all(src).map_err(perr)?;
    if all.len() != 1 {
        return Err(perr(format!("expected one expression, found {}", all.len())));
    }
    Ok(all.pop().unwrap())
}

pub fn parse_formula(src: &str, table: &SortTable) -> Result<Formula, LogicError> {
    let f = sexp_to_formula(&single(src)?, table)?;
    f.check_sorts()?;
    Ok(f)
}

pub fn parse_term(src: &str, table: &SortTable) -> Result<Term, LogicError> {
    let t = sexp_to_term(&single(src)?, table)?;
    t.check_sorts()?;
    Ok(t)
}

/// Parses a value of a known sort, as printed by a solver in a model.
pub fn parse_value(e: &Sexp, sort: Sort) -> Result<Value, LogicError> {
    let t = sexp_to_term(e, &SortTable::new())?;
    let v = match t {
        Term::Const(v) => v,
        other => super::eval_term(&other, &super::Model::new())?,
    };
    match (sort, v) {
        (Sort::Bool, v @ Value::Bool(_)) => Ok(v),
        (Sort::Int, Value::Int(i)) => Ok(Value::Int(i)),
        (Sort::Int, Value::Real(r)) if r.is_integer() => Ok(Value::Int(r.to_integer())),
        (Sort::Real, Value::Int(i)) => Ok(Value::Real(BigRational::from_integer(i))),
        (Sort::Real, v @ Value::Real(_)) => Ok(v),
        (s, v) => Err(LogicError::SortMismatch(format!("value {v} for sort {s}"))),
    }
}

/// `(declare-fun name () Sort)`.
pub fn declare(v: &Var) -> String {
    format!("(declare-fun {} () {})", symbol(&v.name), v.sort.smt_name())
}
