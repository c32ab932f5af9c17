//! Translation of a checked contract into a transition-system problem.
//!
//! Three evaluation contexts are used. `Step` is a non-initial instant:
//! current variables are primed, inputs are the input symbols, `pre(e)` reads
//! the unprimed state and `a -> b` is `b`. `Init` is the initial instant over
//! the unprimed state: `a -> b` is `a` and inputs read their state shadow.
//! `Prev` evaluates a `pre` argument over the unprimed state.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;

use crate::logic::{CmpOp, Formula, Sort, Term, Var};

use super::ast::*;
use super::check::{constant_value, is_constant, sort_of};
use super::problem::{Conjunct, StateKind, StateVar, SynthesisProblem};
use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElabOptions {
    /// Substitute definitions of boolean variables that are never read
    /// through `pre`, shrinking the existential vector.
    pub inline_booleans: bool,
}

impl Default for ElabOptions {
    fn default() -> Self {
        ElabOptions { inline_booleans: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Step,
    Init,
    Prev,
}

pub fn shadow_name(input: &str) -> String {
    format!("pre({input})")
}

pub fn prime(name: &str) -> String {
    format!("{name}'")
}

struct Elab<'a> {
    ast: &'a ContractAst,
    inputs: BTreeSet<String>,
    inlined: BTreeSet<String>,
    expanding: Vec<String>,
    aux: Vec<(Var, &'a Expr)>,
}

impl<'a> Elab<'a> {
    fn sort_hint(&self, e: &Expr) -> Result<Option<Sort>, FrontendError> {
        sort_of(self.ast, e, Pos::default())
    }

    fn unreachable(&self, what: &str, pos: Pos) -> FrontendError {
        FrontendError::Internal { pos, msg: what.to_string() }
    }

    fn var_ref(&mut self, name: &str, pos: Pos, ctx: Ctx) -> Result<Var, FrontendError> {
        let d = self.ast.decl(name).expect("checked");
        if self.inputs.contains(name) {
            return Ok(match ctx {
                Ctx::Step => Var::new(name, d.sort),
                Ctx::Init | Ctx::Prev => Var::new(shadow_name(name), d.sort),
            });
        }
        if self.inlined.contains(name) {
            return Err(self.unreachable("inlined variable used as a symbol", pos));
        }
        Ok(match ctx {
            Ctx::Step => Var::new(prime(name), d.sort),
            Ctx::Init | Ctx::Prev => Var::new(name, d.sort),
        })
    }

    /// Expands an inlined boolean variable in place.
    fn expand(&mut self, name: &str, pos: Pos, ctx: Ctx) -> Result<Formula, FrontendError> {
        if ctx == Ctx::Prev {
            return Err(self.unreachable("inlined variable under pre", pos));
        }
        if self.expanding.iter().any(|n| n == name) {
            return Err(FrontendError::Cycle { pos, name: name.to_string() });
        }
        let eq = self.ast.equation(name).expect("inlined variables have equations");
        self.expanding.push(name.to_string());
        let f = self.formula(&eq.rhs, ctx);
        self.expanding.pop();
        f
    }

    fn pre_symbol(&mut self, inner: &'a Expr, sort: Sort) -> Var {
        // One symbol per source occurrence, however often it is expanded.
        if let Some((v, _)) = self.aux.iter().find(|(v, e)| std::ptr::eq(*e, inner) && v.sort == sort) {
            return v.clone();
        }
        let v = Var::new(format!("_pre{}", self.aux.len() + 1), sort);
        self.aux.push((v.clone(), inner));
        v
    }

    fn term(&mut self, e: &'a Expr, ctx: Ctx, sort: Sort) -> Result<Term, FrontendError> {
        Ok(match e {
            Expr::Int(i) => Term::constant(sort, BigRational::from_integer(i.clone())),
            Expr::Real(r) => Term::constant(Sort::Real, r.clone()),
            Expr::Bool(b) => Term::bool(*b),
            Expr::Ident(n, pos) => {
                if self.inlined.contains(n) {
                    Term::from_formula(&self.expand(n, *pos, ctx)?)
                } else {
                    Term::Var(self.var_ref(n, *pos, ctx)?)
                }
            }
            Expr::Pre(inner, pos) => match ctx {
                Ctx::Step if !inner.has_pre() && !inner.has_arrow() => self.term(inner, Ctx::Prev, sort)?,
                Ctx::Step => Term::Var(self.pre_symbol(inner, sort)),
                _ => return Err(self.unreachable("pre outside a step context", *pos)),
            },
            Expr::Arrow(a, b) => match ctx {
                Ctx::Step => self.term(b, ctx, sort)?,
                Ctx::Init => self.term(a, ctx, sort)?,
                Ctx::Prev => return Err(self.unreachable("arrow under pre", Pos::default())),
            },
            Expr::If(c, a, b) => {
                let c = self.formula(c, ctx)?;
                Term::ite(c, self.term(a, ctx, sort)?, self.term(b, ctx, sort)?)
            }
            Expr::Unary(UnOp::Neg, a) => Term::neg(self.term(a, ctx, sort)?),
            Expr::Unary(UnOp::Not, _) => Term::from_formula(&self.formula(e, ctx)?),
            Expr::Binary(op, a, b, _) => match op {
                BinOp::Add => Term::add(self.term(a, ctx, sort)?, self.term(b, ctx, sort)?),
                BinOp::Sub => Term::sub(self.term(a, ctx, sort)?, self.term(b, ctx, sort)?),
                BinOp::Mul if is_constant(a) => {
                    Term::scale(constant_value(a).expect("constant"), self.term(b, ctx, sort)?)
                }
                BinOp::Mul => Term::scale(constant_value(b).expect("constant"), self.term(a, ctx, sort)?),
                BinOp::Div => {
                    let c = constant_value(b).expect("constant divisor");
                    if is_constant(a) {
                        Term::constant(sort, constant_value(a).expect("constant") / c)
                    } else {
                        Term::scale(BigRational::one() / c, self.term(a, ctx, sort)?)
                    }
                }
                _ => Term::from_formula(&self.formula(e, ctx)?),
            },
        })
    }

    fn formula(&mut self, e: &'a Expr, ctx: Ctx) -> Result<Formula, FrontendError> {
        Ok(match e {
            Expr::Bool(b) => Formula::Const(*b),
            Expr::Ident(n, pos) => {
                if self.inlined.contains(n) {
                    self.expand(n, *pos, ctx)?
                } else {
                    Formula::Var(self.var_ref(n, *pos, ctx)?)
                }
            }
            Expr::Pre(inner, pos) => match ctx {
                Ctx::Step if !inner.has_pre() && !inner.has_arrow() => self.formula(inner, Ctx::Prev)?,
                Ctx::Step => Formula::Var(self.pre_symbol(inner, Sort::Bool)),
                _ => return Err(self.unreachable("pre outside a step context", *pos)),
            },
            Expr::Arrow(a, b) => match ctx {
                Ctx::Step => self.formula(b, ctx)?,
                Ctx::Init => self.formula(a, ctx)?,
                Ctx::Prev => return Err(self.unreachable("arrow under pre", Pos::default())),
            },
            Expr::If(c, a, b) => {
                let c = self.formula(c, ctx)?;
                Formula::ite(c, self.formula(a, ctx)?, self.formula(b, ctx)?)
            }
            Expr::Unary(UnOp::Not, a) => Formula::not(self.formula(a, ctx)?),
            Expr::Binary(op, a, b, pos) => {
                if op.is_logical() {
                    let (fa, fb) = (self.formula(a, ctx)?, self.formula(b, ctx)?);
                    return Ok(match op {
                        BinOp::And => Formula::And(vec![fa, fb]),
                        BinOp::Or => Formula::Or(vec![fa, fb]),
                        BinOp::Xor => Formula::not(Formula::iff(fa, fb)),
                        _ => Formula::implies(fa, fb),
                    });
                }
                let sort = match (self.sort_hint(a)?, self.sort_hint(b)?) {
                    (Some(s), _) | (None, Some(s)) => s,
                    (None, None) => Sort::Int,
                };
                if sort == Sort::Bool {
                    let (fa, fb) = (self.formula(a, ctx)?, self.formula(b, ctx)?);
                    return Ok(match op {
                        BinOp::Eq => Formula::iff(fa, fb),
                        BinOp::Ne => Formula::not(Formula::iff(fa, fb)),
                        _ => return Err(FrontendError::Type { pos: *pos, msg: "ordering on booleans".into() }),
                    });
                }
                let cmp = match op {
                    BinOp::Eq => CmpOp::Eq,
                    BinOp::Ne => CmpOp::Ne,
                    BinOp::Lt => CmpOp::Lt,
                    BinOp::Le => CmpOp::Le,
                    BinOp::Gt => CmpOp::Gt,
                    BinOp::Ge => CmpOp::Ge,
                    _ => return Err(FrontendError::Type { pos: *pos, msg: "expected a boolean".into() }),
                };
                Formula::cmp(cmp, self.term(a, ctx, sort)?, self.term(b, ctx, sort)?)
            }
            Expr::Int(_) | Expr::Real(_) | Expr::Unary(UnOp::Neg, _) => {
                return Err(FrontendError::Type { pos: Pos::default(), msg: "expected a boolean".into() })
            }
        })
    }

    /// `v = rhs` in the given context, with `v` primed in `Step`.
    fn definition(&mut self, eq: &'a Equation, ctx: Ctx) -> Result<Formula, FrontendError> {
        let d = self.ast.decl(&eq.lhs).expect("checked");
        let lhs = self.var_ref(&eq.lhs, eq.pos, ctx)?;
        Ok(if d.sort == Sort::Bool {
            Formula::iff(Formula::Var(lhs), self.formula(&eq.rhs, ctx)?)
        } else {
            Formula::eq(Term::Var(lhs), self.term(&eq.rhs, ctx, d.sort)?)
        })
    }
}

/// Identifiers read at the current instant of an assertion (outside `pre`,
/// right arm of arrows).
fn current_reads<'e>(e: &'e Expr, out: &mut Vec<(&'e str, Pos)>) {
    match e {
        Expr::Ident(n, p) => out.push((n, *p)),
        Expr::Int(_) | Expr::Real(_) | Expr::Bool(_) | Expr::Pre(..) => {}
        Expr::Arrow(_, b) => current_reads(b, out),
        Expr::If(c, a, b) => {
            current_reads(c, out);
            current_reads(a, out);
            current_reads(b, out);
        }
        Expr::Unary(_, a) => current_reads(a, out),
        Expr::Binary(_, a, b, _) => {
            current_reads(a, out);
            current_reads(b, out);
        }
    }
}

fn read_under_pre(ast: &ContractAst) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let all = ast.equations.iter().map(|e| &e.rhs).chain(ast.asserts.iter().map(|a| &a.expr));
    for e in all {
        e.walk(&mut |sub| {
            if let Expr::Pre(inner, _) = sub {
                for (n, _) in inner.idents() {
                    out.insert(n.to_string());
                }
            }
        });
    }
    out
}

pub fn elaborate(ast: &ContractAst, opts: ElabOptions) -> Result<SynthesisProblem, FrontendError> {
    let inputs: Vec<&Decl> = ast.inputs();
    let input_names: BTreeSet<String> = inputs.iter().map(|d| d.name.clone()).collect();

    for a in &ast.asserts {
        let mut reads = Vec::new();
        current_reads(&a.expr, &mut reads);
        if let Some((name, pos)) = reads.into_iter().find(|(n, _)| !input_names.contains(*n)) {
            return Err(FrontendError::AssumptionOnOutput { pos, name: name.to_string() });
        }
    }

    let inlined: BTreeSet<String> = if opts.inline_booleans {
        let under_pre = read_under_pre(ast);
        ast.equations
            .iter()
            .filter(|eq| ast.decl(&eq.lhs).is_some_and(|d| d.sort == Sort::Bool) && !under_pre.contains(&eq.lhs))
            .map(|eq| eq.lhs.clone())
            .collect()
    } else {
        BTreeSet::new()
    };

    let mut el = Elab {
        ast,
        inputs: input_names.clone(),
        inlined: inlined.clone(),
        expanding: Vec::new(),
        aux: Vec::new(),
    };

    let mut trans = Vec::new();
    let mut init = Vec::new();
    for eq in &ast.equations {
        if inlined.contains(&eq.lhs) {
            // Still expand once so that definitional cycles are reported.
            el.expand(&eq.lhs, eq.pos, Ctx::Step)?;
            continue;
        }
        trans.push((format!("equation {}", eq.lhs), el.definition(eq, Ctx::Step)?));
        init.push((format!("equation {}", eq.lhs), el.definition(eq, Ctx::Init)?));
    }
    for (p, pos) in &ast.properties {
        let (step, first) = if inlined.contains(p) {
            (el.expand(p, *pos, Ctx::Step)?, el.expand(p, *pos, Ctx::Init)?)
        } else {
            (
                Formula::Var(el.var_ref(p, *pos, Ctx::Step)?),
                Formula::Var(el.var_ref(p, *pos, Ctx::Init)?),
            )
        };
        trans.push((format!("property {p}"), step));
        init.push((format!("property {p}"), first));
    }
    for d in &inputs {
        let shadow = Var::new(shadow_name(&d.name), d.sort);
        let primed = Var::new(prime(&shadow.name), d.sort);
        let current = Var::new(d.name.clone(), d.sort);
        let f = if d.sort == Sort::Bool {
            Formula::iff(Formula::Var(primed), Formula::Var(current))
        } else {
            Formula::eq(Term::Var(primed), Term::Var(current))
        };
        trans.push((format!("history {}", d.name), f));
    }
    for a in &ast.asserts {
        init.push(("assumption".to_string(), el.formula(&a.expr, Ctx::Init)?));
    }
    let assumption = Formula::and(
        ast.asserts
            .iter()
            .map(|a| el.formula(&a.expr, Ctx::Step))
            .collect::<Result<Vec<_>, _>>()?,
    );

    // Auxiliary `pre` symbols may themselves introduce further ones.
    let mut done = 0;
    while done < el.aux.len() {
        let (v, e) = el.aux[done].clone();
        let next = Var::new(prime(&v.name), v.sort);
        let (step, first) = if v.sort == Sort::Bool {
            (
                Formula::iff(Formula::Var(next), el.formula(e, Ctx::Step)?),
                Formula::iff(Formula::Var(v.clone()), el.formula(e, Ctx::Init)?),
            )
        } else {
            (
                Formula::eq(Term::Var(next), el.term(e, Ctx::Step, v.sort)?),
                Formula::eq(Term::Var(v.clone()), el.term(e, Ctx::Init, v.sort)?),
            )
        };
        trans.push((format!("history {}", v.name), step));
        init.push((format!("history {}", v.name), first));
        done += 1;
    }

    let mut state = Vec::new();
    for d in ast.decls() {
        if !input_names.contains(&d.name) && !inlined.contains(&d.name) {
            let kind = if ast.equation(&d.name).is_some() { StateKind::Defined } else { StateKind::Free };
            state.push(StateVar { var: Var::new(d.name.clone(), d.sort), kind });
        }
    }
    for d in &inputs {
        state.push(StateVar {
            var: Var::new(shadow_name(&d.name), d.sort),
            kind: StateKind::Shadow(d.name.clone()),
        });
    }
    for (v, _) in &el.aux {
        state.push(StateVar { var: v.clone(), kind: StateKind::Aux });
    }

    let conj = |parts: Vec<(String, Formula)>| {
        parts.into_iter().map(|(label, formula)| Conjunct { label, formula }).collect()
    };
    Ok(SynthesisProblem {
        name: ast.node.clone(),
        inputs: inputs.iter().map(|d| Var::new(d.name.clone(), d.sort)).collect(),
        state,
        assumption,
        init: conj(init),
        trans: conj(trans),
        inlined: inlined.into_iter().collect(),
    })
}
