//! Static checks run after parsing: scoping, definitions, initialization of
//! `pre`, and typing.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::logic::Sort;

use super::ast::*;
use super::FrontendError;

pub fn check(ast: &ContractAst) -> Result<(), FrontendError> {
    let mut seen = BTreeSet::new();
    for d in ast.decls() {
        if !seen.insert(d.name.as_str()) {
            return Err(FrontendError::Duplicate { pos: d.pos, name: d.name.clone() });
        }
    }
    for (name, pos) in &ast.realizable {
        if ast.decl(name).is_none() {
            return Err(FrontendError::Unknown { pos: *pos, name: name.clone() });
        }
    }
    let mut defined = BTreeSet::new();
    for eq in &ast.equations {
        if ast.decl(&eq.lhs).is_none() {
            return Err(FrontendError::Unknown { pos: eq.pos, name: eq.lhs.clone() });
        }
        if ast.is_input(&eq.lhs) || !defined.insert(eq.lhs.as_str()) {
            return Err(FrontendError::Duplicate { pos: eq.pos, name: eq.lhs.clone() });
        }
    }
    let exprs = ast
        .equations
        .iter()
        .map(|e| (&e.rhs, e.pos))
        .chain(ast.asserts.iter().map(|a| (&a.expr, a.pos)));
    for (e, _) in exprs.clone() {
        for (name, pos) in e.idents() {
            if ast.decl(name).is_none() {
                return Err(FrontendError::Unknown { pos, name: name.to_string() });
            }
        }
    }
    for (e, _) in exprs {
        check_initialized(e, false)?;
    }
    for (name, pos) in &ast.properties {
        match ast.decl(name) {
            None => return Err(FrontendError::Unknown { pos: *pos, name: name.clone() }),
            Some(d) if d.sort != Sort::Bool => {
                return Err(FrontendError::Type {
                    pos: *pos,
                    msg: format!("property `{name}` must be boolean"),
                })
            }
            _ => {}
        }
    }
    for eq in &ast.equations {
        let want = ast.decl(&eq.lhs).unwrap().sort;
        let got = sort_of(ast, &eq.rhs, eq.pos)?;
        if !compatible(got, want) {
            return Err(FrontendError::Type {
                pos: eq.pos,
                msg: format!("`{}` has type {} but its equation has type {}", eq.lhs, want, show(got)),
            });
        }
    }
    for a in &ast.asserts {
        if sort_of(ast, &a.expr, a.pos)? != Some(Sort::Bool) {
            return Err(FrontendError::Type { pos: a.pos, msg: "assertion must be boolean".into() });
        }
    }
    Ok(())
}

/// Every `pre` must sit under the right arm of some `->`, and a `pre`
/// argument restarts the obligation (it is read one step earlier).
fn check_initialized(e: &Expr, guarded: bool) -> Result<(), FrontendError> {
    match e {
        Expr::Int(_) | Expr::Real(_) | Expr::Bool(_) | Expr::Ident(..) => Ok(()),
        Expr::Pre(inner, pos) => {
            if !guarded {
                return Err(FrontendError::PreOutsideArrow { pos: *pos });
            }
            check_initialized(inner, false)
        }
        Expr::Arrow(a, b) => {
            check_initialized(a, guarded)?;
            check_initialized(b, true)
        }
        Expr::If(c, a, b) => {
            check_initialized(c, guarded)?;
            check_initialized(a, guarded)?;
            check_initialized(b, guarded)
        }
        Expr::Unary(_, a) => check_initialized(a, guarded),
        Expr::Binary(_, a, b, _) => {
            check_initialized(a, guarded)?;
            check_initialized(b, guarded)
        }
    }
}

fn show(s: Option<Sort>) -> String {
    s.map_or_else(|| "integer literal".to_string(), |s| s.to_string())
}

/// A bare integer literal (`None`) fits either numeric sort.
fn compatible(got: Option<Sort>, want: Sort) -> bool {
    match got {
        Some(s) => s == want,
        None => want.is_numeric(),
    }
}

fn unify(a: Option<Sort>, b: Option<Sort>, pos: Pos) -> Result<Option<Sort>, FrontendError> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(FrontendError::Type {
            pos,
            msg: format!("operands of types {x} and {y}"),
        }),
        _ => Ok(a.or(b)),
    }
}

fn expect_bool(ast: &ContractAst, e: &Expr, pos: Pos) -> Result<(), FrontendError> {
    match sort_of(ast, e, pos)? {
        Some(Sort::Bool) => Ok(()),
        s => Err(FrontendError::Type { pos, msg: format!("expected bool, found {}", show(s)) }),
    }
}

fn expect_numeric(ast: &ContractAst, e: &Expr, pos: Pos) -> Result<Option<Sort>, FrontendError> {
    match sort_of(ast, e, pos)? {
        Some(Sort::Bool) => Err(FrontendError::Type { pos, msg: "expected a number, found bool".into() }),
        s => Ok(s),
    }
}

/// Whether `e` is built from literals only, so it can scale a term.
pub fn is_constant(e: &Expr) -> bool {
    match e {
        Expr::Int(_) | Expr::Real(_) => true,
        Expr::Unary(UnOp::Neg, a) => is_constant(a),
        Expr::Binary(op, a, b, _) if op.is_arith() => is_constant(a) && is_constant(b),
        _ => false,
    }
}

/// Sort of a well-scoped expression; `None` for integer-literal arithmetic,
/// which adopts the sort of its context.
pub fn sort_of(ast: &ContractAst, e: &Expr, at: Pos) -> Result<Option<Sort>, FrontendError> {
    Ok(match e {
        Expr::Int(_) => None,
        Expr::Real(_) => Some(Sort::Real),
        Expr::Bool(_) => Some(Sort::Bool),
        Expr::Ident(n, pos) => Some(
            ast.decl(n)
                .ok_or_else(|| FrontendError::Unknown { pos: *pos, name: n.clone() })?
                .sort,
        ),
        Expr::Pre(a, _) => sort_of(ast, a, at)?,
        Expr::Arrow(a, b) => unify(sort_of(ast, a, at)?, sort_of(ast, b, at)?, at)?,
        Expr::If(c, a, b) => {
            expect_bool(ast, c, at)?;
            unify(sort_of(ast, a, at)?, sort_of(ast, b, at)?, at)?
        }
        Expr::Unary(UnOp::Not, a) => {
            expect_bool(ast, a, at)?;
            Some(Sort::Bool)
        }
        Expr::Unary(UnOp::Neg, a) => expect_numeric(ast, a, at)?,
        Expr::Binary(op, a, b, pos) => {
            let pos = *pos;
            if op.is_logical() {
                expect_bool(ast, a, pos)?;
                expect_bool(ast, b, pos)?;
                return Ok(Some(Sort::Bool));
            }
            if op.is_relational() {
                let s = unify(sort_of(ast, a, pos)?, sort_of(ast, b, pos)?, pos)?;
                if s == Some(Sort::Bool) && !matches!(op, BinOp::Eq | BinOp::Ne) {
                    return Err(FrontendError::Type { pos, msg: "ordering on booleans".into() });
                }
                return Ok(Some(Sort::Bool));
            }
            let s = unify(expect_numeric(ast, a, pos)?, expect_numeric(ast, b, pos)?, pos)?;
            match op {
                BinOp::Mul if !is_constant(a) && !is_constant(b) => {
                    return Err(FrontendError::Type {
                        pos,
                        msg: "multiplication needs a constant operand (linear arithmetic only)".into(),
                    })
                }
                BinOp::Div => {
                    if !is_constant(b) || constant_value(b).is_some_and(|v| v.is_zero()) {
                        return Err(FrontendError::Type {
                            pos,
                            msg: "division needs a non-zero constant divisor".into(),
                        });
                    }
                    if s == Some(Sort::Int) {
                        return Err(FrontendError::Type { pos, msg: "`/` is real division".into() });
                    }
                    Some(Sort::Real)
                }
                _ => s,
            }
        }
    })
}

/// Value of a constant expression.
pub fn constant_value(e: &Expr) -> Option<num_rational::BigRational> {
    use num_rational::BigRational;
    match e {
        Expr::Int(i) => Some(BigRational::from_integer(i.clone())),
        Expr::Real(r) => Some(r.clone()),
        Expr::Unary(UnOp::Neg, a) => constant_value(a).map(|v| -v),
        Expr::Binary(op, a, b, _) => {
            let (a, b) = (constant_value(a)?, constant_value(b)?);
            match op {
                BinOp::Add => Some(a + b),
                BinOp::Sub => Some(a - b),
                BinOp::Mul => Some(a * b),
                BinOp::Div if !b.is_zero() => Some(a / b),
                _ => None,
            }
        }
        _ => None,
    }
}
