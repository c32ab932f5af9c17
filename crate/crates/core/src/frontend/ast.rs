use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::logic::Sort;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub sort: Sort,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Xor,
    Implies,
}

impl BinOp {
    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_relational(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Xor | BinOp::Implies)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Real(BigRational),
    Bool(bool),
    Ident(String, Pos),
    Pre(Box<Expr>, Pos),
    Arrow(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>, Pos),
}

impl Expr {
    /// Identifiers referenced anywhere in the expression.
    pub fn idents(&self) -> Vec<(&str, Pos)> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Ident(n, p) = e {
                out.push((n.as_str(), *p));
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Int(_) | Expr::Real(_) | Expr::Bool(_) | Expr::Ident(..) => {}
            Expr::Pre(e, _) | Expr::Unary(_, e) => e.walk(f),
            Expr::Arrow(a, b) | Expr::Binary(_, a, b, _) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::If(c, a, b) => {
                c.walk(f);
                a.walk(f);
                b.walk(f);
            }
        }
    }

    pub fn has_pre(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::Pre(..)));
        found
    }

    pub fn has_arrow(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::Arrow(..)));
        found
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: String,
    pub rhs: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assertion {
    pub expr: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractAst {
    pub node: String,
    pub params: Vec<Decl>,
    pub returns: Vec<Decl>,
    pub locals: Vec<Decl>,
    pub equations: Vec<Equation>,
    pub asserts: Vec<Assertion>,
    pub properties: Vec<(String, Pos)>,
    pub realizable: Vec<(String, Pos)>,
}

impl ContractAst {
    /// Every declaration in source order: parameters, returns, locals.
    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.params.iter().chain(&self.returns).chain(&self.locals)
    }

    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls().find(|d| d.name == name)
    }

    pub fn equation(&self, name: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.lhs == name)
    }

    /// System inputs: the `--%REALIZABLE` ids, or every node parameter when
    /// the directive is absent.
    pub fn inputs(&self) -> Vec<&Decl> {
        if self.realizable.is_empty() {
            self.params.iter().collect()
        } else {
            self.decls()
                .filter(|d| self.realizable.iter().any(|(n, _)| *n == d.name))
                .collect()
        }
    }

    pub fn is_input(&self, name: &str) -> bool {
        self.inputs().iter().any(|d| d.name == name)
    }
}
