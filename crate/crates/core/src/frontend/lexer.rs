use num_bigint::BigInt;
use num_rational::BigRational;

use super::ast::Pos;
use super::FrontendError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Real(BigRational),
    /// `--%NAME` directive.
    Directive(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

const KEYWORDS: &[&str] = &[
    "node", "returns", "var", "let", "tel", "assert", "pre", "if", "then", "else", "and", "or",
    "xor", "not", "true", "false", "int", "real", "bool",
];

// Longest first so that `->` wins over `-`.
const SYMBOLS: &[&str] = &[
    "->", "=>", "<>", "<=", ">=", "(", ")", ":", ";", ",", "=", "<", ">", "+", "-", "*", "/",
];

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn lex(src: &str) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    let starts = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c));

    while i < chars.len() {
        let pos = Pos { line, col };
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if starts(i, "--%") {
            advance(&mut i, &mut line, &mut col, 3);
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let name: String = chars[start..i].iter().collect();
            if name.is_empty() {
                return Err(FrontendError::Syntax { pos, msg: "empty directive".into() });
            }
            out.push(Token { tok: Tok::Directive(name), pos });
        } else if starts(i, "--") {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if starts(i, "(*") {
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i >= chars.len() {
                    return Err(FrontendError::Syntax { pos, msg: "unterminated comment".into() });
                }
                if starts(i, "*)") {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, pos });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let int: String = chars[start..i].iter().collect();
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
                let fstart = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col, 1);
                }
                let frac: String = chars[fstart..i].iter().collect();
                let digits: BigInt = format!("{int}{frac}").parse().expect("digits");
                let scale = num_traits::pow(BigInt::from(10), frac.len());
                out.push(Token { tok: Tok::Real(BigRational::new(digits, scale)), pos });
            } else if i < chars.len() && chars[i] == '.' {
                // `1.` is a real literal too.
                advance(&mut i, &mut line, &mut col, 1);
                let v: BigInt = int.parse().expect("digits");
                out.push(Token { tok: Tok::Real(BigRational::from_integer(v)), pos });
            } else {
                out.push(Token { tok: Tok::Int(int.parse().expect("digits")), pos });
            }
        } else if let Some(s) = SYMBOLS.iter().find(|s| starts(i, s)) {
            advance(&mut i, &mut line, &mut col, s.len());
            out.push(Token { tok: Tok::Sym(s), pos });
        } else {
            return Err(FrontendError::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrow_and_comments() {
        assert_eq!(
            toks("a -> b -- trailing\n(* block *) --%PROPERTY p;"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("->"),
                Tok::Ident("b".into()),
                Tok::Directive("PROPERTY".into()),
                Tok::Ident("p".into()),
                Tok::Sym(";"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn decimal_literal_is_exact() {
        assert_eq!(toks("0.1")[0], Tok::Real(BigRational::new(1.into(), 10.into())));
    }

    #[test]
    fn positions_track_lines() {
        let t = lex("x\n  y").unwrap();
        assert_eq!(t[1].pos, Pos { line: 2, col: 3 });
    }
}
