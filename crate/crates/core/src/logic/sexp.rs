//! Minimal s-expression reader for SMT-LIB2 text.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    /// `|...|` symbol, stored without the bars.
    Quoted(String),
    /// `"..."` string literal, stored without quotes.
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn symbol(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) | Sexp::Quoted(s) => Some(s),
            _ => None,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s) => f.write_str(s),
            Sexp::Quoted(s) => write!(f, "|{s}|"),
            Sexp::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

enum Step {
    Done(Sexp, usize),
    Incomplete,
}

fn skip_ws(b: &[u8], mut i: usize) -> usize {
    while i < b.len() {
        match b[i] {
            c if c.is_ascii_whitespace() => i += 1,
            b';' => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            _ => break,
        }
    }
    i
}

fn read_at(src: &str, start: usize) -> Result<Step, String> {
    let b = src.as_bytes();
    let i = skip_ws(b, start);
    if i >= b.len() {
        return Ok(Step::Incomplete);
    }
    match b[i] {
        b'(' => {
            let mut items = Vec::new();
            let mut j = i + 1;
            loop {
                j = skip_ws(b, j);
                if j >= b.len() {
                    return Ok(Step::Incomplete);
                }
                if b[j] == b')' {
                    return Ok(Step::Done(Sexp::List(items), j + 1));
                }
                match read_at(src, j)? {
                    Step::Done(s, next) => {
                        items.push(s);
                        j = next;
                    }
                    Step::Incomplete => return Ok(Step::Incomplete),
                }
            }
        }
        b')' => Err(format!("unexpected `)` at offset {i}")),
        b'|' => match src[i + 1..].find('|') {
            Some(end) => Ok(Step::Done(
                Sexp::Quoted(src[i + 1..i + 1 + end].to_string()),
                i + end + 2,
            )),
            None => Ok(Step::Incomplete),
        },
        b'"' => {
            let mut j = i + 1;
            let mut out = String::new();
            while j < b.len() {
                if b[j] == b'"' {
                    if j + 1 < b.len() && b[j + 1] == b'"' {
                        out.push('"');
                        j += 2;
                        continue;
                    }
                    return Ok(Step::Done(Sexp::Str(out), j + 1));
                }
                let ch = src[j..].chars().next().unwrap();
                out.push(ch);
                j += ch.len_utf8();
            }
            Ok(Step::Incomplete)
        }
        _ => {
            let mut j = i;
            while j < b.len() && !b[j].is_ascii_whitespace() && !matches!(b[j], b'(' | b')' | b';' | b'"' | b'|') {
                j += 1;
            }
            Ok(Step::Done(Sexp::Atom(src[i..j].to_string()), j))
        }
    }
}

/// Reads one s-expression from the start of `src`. Returns `None` when the
/// text is a strict prefix of an s-expression (more input is needed).
pub fn parse_one(src: &str) -> Result<Option<(Sexp, usize)>, String> {
    match read_at(src, 0)? {
        Step::Done(s, n) => {
            // A bare atom at the very end of the buffer may still be growing.
            if matches!(s, Sexp::Atom(_)) && n == src.len() {
                return Ok(None);
            }
            Ok(Some((s, n)))
        }
        Step::Incomplete => Ok(None),
    }
}

/// Reads every s-expression in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, String> {
    let mut out = Vec::new();
    let mut pos = 0;
    loop {
        if skip_ws(src.as_bytes(), pos) >= src.len() {
            return Ok(out);
        }
        match read_at(src, pos)? {
            Step::Done(s, next) => {
                out.push(s);
                pos = next;
            }
            Step::Incomplete => return Err("unbalanced s-expression".into()),
        }
    }
}
