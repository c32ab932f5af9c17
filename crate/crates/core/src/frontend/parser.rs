use crate::logic::Sort;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::FrontendError;

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(FrontendError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(n) => format!("identifier `{n}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Real(r) => format!("`{r}`"),
            Tok::Directive(d) => format!("`--%{d}`"),
            Tok::Kw(k) | Tok::Sym(k) => format!("`{k}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.is_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", Self::describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(format!("expected `{k}`, found {}", Self::describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(n) => {
                self.bump();
                Ok((n, pos))
            }
            other => self.error(format!("expected identifier, found {}", Self::describe(&other))),
        }
    }

    fn sort(&mut self) -> PResult<Sort> {
        let s = match self.peek() {
            Tok::Kw("int") => Sort::Int,
            Tok::Kw("real") => Sort::Real,
            Tok::Kw("bool") => Sort::Bool,
            other => return self.error(format!("expected a type, found {}", Self::describe(other))),
        };
        self.bump();
        Ok(s)
    }

    /// `a, b : int` groups.
    fn decl_group(&mut self, out: &mut Vec<Decl>) -> PResult<()> {
        let mut names = vec![self.ident()?];
        while self.eat_sym(",") {
            names.push(self.ident()?);
        }
        self.expect_sym(":")?;
        let sort = self.sort()?;
        out.extend(names.into_iter().map(|(name, pos)| Decl { name, sort, pos }));
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Decl>> {
        let mut out = Vec::new();
        self.expect_sym("(")?;
        while !self.is_sym(")") {
            self.decl_group(&mut out)?;
            if !self.eat_sym(";") {
                break;
            }
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn contract(&mut self) -> PResult<ContractAst> {
        let mut ast = ContractAst::default();
        self.expect_kw("node")?;
        ast.node = self.ident()?.0;
        ast.params = self.params()?;
        self.expect_kw("returns")?;
        ast.returns = self.params()?;
        self.eat_sym(";");
        if self.eat_kw("var") {
            while matches!(self.peek(), Tok::Ident(_)) {
                self.decl_group(&mut ast.locals)?;
                self.expect_sym(";")?;
            }
        }
        self.expect_kw("let")?;
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Kw("tel") => {
                    self.bump();
                    break;
                }
                Tok::Kw("assert") => {
                    self.bump();
                    let expr = self.expr()?;
                    self.expect_sym(";")?;
                    ast.asserts.push(Assertion { expr, pos });
                }
                Tok::Directive(d) if d == "PROPERTY" => {
                    self.bump();
                    ast.properties.push(self.ident()?);
                    self.expect_sym(";")?;
                }
                Tok::Directive(d) if d == "REALIZABLE" => {
                    self.bump();
                    ast.realizable.push(self.ident()?);
                    while self.eat_sym(",") {
                        ast.realizable.push(self.ident()?);
                    }
                    self.expect_sym(";")?;
                }
                Tok::Directive(d) => return self.error(format!("unknown directive `--%{d}`")),
                Tok::Ident(lhs) => {
                    self.bump();
                    self.expect_sym("=")?;
                    let rhs = self.expr()?;
                    self.expect_sym(";")?;
                    ast.equations.push(Equation { lhs, rhs, pos });
                }
                other => {
                    return self.error(format!(
                        "expected an equation, `assert` or `tel`, found {}",
                        Self::describe(&other)
                    ))
                }
            }
        }
        self.eat_sym(";");
        if *self.peek() != Tok::Eof {
            return self.error(format!("trailing input: {}", Self::describe(self.peek())));
        }
        Ok(ast)
    }

    fn expr(&mut self) -> PResult<Expr> {
        if self.eat_kw("if") {
            let c = self.expr()?;
            self.expect_kw("then")?;
            let a = self.expr()?;
            self.expect_kw("else")?;
            let b = self.expr()?;
            return Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)));
        }
        self.arrow()
    }

    fn arrow(&mut self) -> PResult<Expr> {
        let lhs = self.implies()?;
        if self.eat_sym("->") {
            let rhs = self.expr()?;
            return Ok(Expr::Arrow(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        let pos = self.pos();
        if self.eat_sym("=>") {
            let rhs = if self.is_kw("if") { self.expr()? } else { self.implies()? };
            return Ok(Expr::Binary(BinOp::Implies, Box::new(lhs), Box::new(rhs), pos));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        loop {
            let pos = self.pos();
            let op = if self.eat_kw("or") {
                BinOp::Or
            } else if self.eat_kw("xor") {
                BinOp::Xor
            } else {
                return Ok(lhs);
            };
            let rhs = self.and()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.not()?;
        loop {
            let pos = self.pos();
            if !self.eat_kw("and") {
                return Ok(lhs);
            }
            let rhs = self.not()?;
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn not(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.not()?)));
        }
        self.relational()
    }

    fn relational(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let pos = self.pos();
        let op = match self.peek() {
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("<>") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs), pos))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let pos = self.pos();
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.multiplicative()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let op = if self.eat_sym("*") {
                BinOp::Mul
            } else if self.eat_sym("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        if self.eat_sym("-") {
            return Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)));
        }
        if self.eat_kw("pre") {
            return Ok(Expr::Pre(Box::new(self.unary()?), pos));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::Int(i))
            }
            Tok::Real(r) => {
                self.bump();
                Ok(Expr::Real(r))
            }
            Tok::Kw("true") => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Ident(n) => {
                self.bump();
                Ok(Expr::Ident(n, pos))
            }
            Tok::Kw("if") => self.expr(),
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            other => self.error(format!("expected an expression, found {}", Self::describe(&other))),
        }
    }
}

/// Syntax only; see [`super::parse_contract`] for the checked entry point.
pub fn parse_syntax(src: &str) -> Result<ContractAst, FrontendError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    p.contract()
}
