//! C99 emission of a realization: history arrays of length `k + 1`, an init
//! function writing the initial state, and a step function running the
//! Skolem cascades.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::engine::Realization;
use crate::frontend::SynthesisProblem;
use crate::logic::{CmpOp, Formula, Sort, Term, Value};
use crate::skolem::GuardedSkolem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodegenError {
    #[error("integer constant {0} does not fit in 64 bits")]
    Overflow(BigInt),
    #[error("the {check} Skolem reads `{name}`, which is outside the stored history")]
    History { check: String, name: String },
    #[error("unknown symbol `{0}` in a Skolem term")]
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CVar {
    pub name: String,
    pub c_name: String,
    pub sort: Sort,
}

impl CVar {
    fn c_type(&self) -> &'static str {
        c_type(self.sort)
    }
}

fn c_type(s: Sort) -> &'static str {
    match s {
        Sort::Bool => "int",
        Sort::Int => "int64_t",
        Sort::Real => "double",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedProgram {
    pub node: String,
    pub k: usize,
    pub inputs: Vec<CVar>,
    /// State variables in the order the driver prints them.
    pub state: Vec<CVar>,
    pub source: String,
}

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum", "extern",
    "float", "for", "goto", "if", "inline", "int", "long", "register", "restrict", "return", "short", "signed",
    "sizeof", "static", "struct", "switch", "typedef", "union", "unsigned", "void", "volatile", "while", "main",
    "floor_div", "int64_t", "printf", "scanf", "exit",
];

/// A C identifier for a contract name, unique among `taken`.
fn mangle(name: &str, taken: &mut BTreeSet<String>) -> String {
    let mut s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    while s.ends_with('_') && s.len() > 1 && !name.ends_with('_') {
        s.pop();
    }
    if s.starts_with('_') || s.starts_with(|c: char| c.is_ascii_digit()) || s.is_empty() {
        s = format!("v{s}");
    }
    while C_KEYWORDS.contains(&s.as_str()) || taken.contains(&s) {
        s.push('_');
    }
    taken.insert(s.clone());
    s
}

fn split_slot(name: &str) -> Option<(&str, usize)> {
    let (base, n) = name.rsplit_once('@')?;
    Some((base, n.parse().ok()?))
}

struct Emitter<'a> {
    vars: BTreeMap<String, (String, bool)>,
    uses_div: bool,
    realization: &'a Realization,
}

/// How slot names of one Skolem map onto array indices.
#[derive(Clone, Copy)]
enum Window {
    /// Base Skolem `j`: slot `m` is index `m`.
    Base,
    /// Extend Skolem after the shift: slot `m` is index `m - 1`, except
    /// that with `k = 0` the previous state is updated in place.
    Extend { k: usize },
}

impl Emitter<'_> {
    fn var(&self, name: &str, window: Window, check: &str) -> Result<String, CodegenError> {
        let (base, m) = split_slot(name).ok_or_else(|| CodegenError::Unknown(name.to_string()))?;
        let (c, is_state) = self.vars.get(base).ok_or_else(|| CodegenError::Unknown(name.to_string()))?;
        let idx = match window {
            Window::Base => m as isize,
            Window::Extend { k } => m as isize - 1 + isize::from(k == 0 && *is_state),
        };
        if idx < 0 || idx as usize > self.realization.k {
            return Err(CodegenError::History { check: check.to_string(), name: name.to_string() });
        }
        Ok(format!("{c}[{idx}]"))
    }

    fn int_lit(v: &BigInt) -> Result<String, CodegenError> {
        let n = v.to_i64().ok_or_else(|| CodegenError::Overflow(v.clone()))?;
        Ok(if i32::try_from(n).is_ok() { n.to_string() } else { format!("INT64_C({n})") })
    }

    fn real_lit(r: &BigRational) -> String {
        if r.is_integer() {
            format!("{}.0", r.numer())
        } else {
            format!("({}.0 / {}.0)", r.numer(), r.denom())
        }
    }

    fn value(v: &Value) -> Result<String, CodegenError> {
        Ok(match v {
            Value::Bool(b) => (if *b { "1" } else { "0" }).to_string(),
            Value::Int(i) => Self::int_lit(i)?,
            Value::Real(r) => Self::real_lit(r),
        })
    }

    fn term(&mut self, t: &Term, w: Window, check: &str) -> Result<String, CodegenError> {
        Ok(match t {
            Term::Const(v) => Self::value(v)?,
            Term::Var(v) => self.var(&v.name, w, check)?,
            Term::Neg(a) => format!("(-{})", self.term(a, w, check)?),
            Term::Add(ts) => {
                let parts = ts.iter().map(|a| self.term(a, w, check)).collect::<Result<Vec<_>, _>>()?;
                format!("({})", parts.join(" + "))
            }
            Term::Sub(a, b) => format!("({} - {})", self.term(a, w, check)?, self.term(b, w, check)?),
            Term::Mul(c, a) => {
                let lit = if a.sort() == Sort::Int { Self::int_lit(&c.to_integer())? } else { Self::real_lit(c) };
                if c.is_one() {
                    self.term(a, w, check)?
                } else {
                    format!("({lit} * {})", self.term(a, w, check)?)
                }
            }
            Term::Div(a, k) => {
                self.uses_div = true;
                format!("floor_div({}, {})", self.term(a, w, check)?, Self::int_lit(k)?)
            }
            Term::Ite(c, a, b) => {
                format!("({} ? {} : {})", self.formula(c, w, check)?, self.term(a, w, check)?, self.term(b, w, check)?)
            }
        })
    }

    fn formula(&mut self, f: &Formula, w: Window, check: &str) -> Result<String, CodegenError> {
        Ok(match f {
            Formula::Const(b) => (if *b { "1" } else { "0" }).to_string(),
            Formula::Var(v) => self.var(&v.name, w, check)?,
            Formula::Cmp(op, a, b) => {
                let op = match op {
                    CmpOp::Eq => "==",
                    CmpOp::Ne => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                format!("({} {op} {})", self.term(a, w, check)?, self.term(b, w, check)?)
            }
            Formula::Not(g) => format!("!{}", self.formula(g, w, check)?),
            Formula::And(fs) if fs.is_empty() => "1".into(),
            Formula::Or(fs) if fs.is_empty() => "0".into(),
            Formula::And(fs) | Formula::Or(fs) => {
                let sep = if matches!(f, Formula::And(_)) { " && " } else { " || " };
                let parts = fs.iter().map(|g| self.formula(g, w, check)).collect::<Result<Vec<_>, _>>()?;
                format!("({})", parts.join(sep))
            }
            Formula::Implies(a, b) => format!("(!{} || {})", self.formula(a, w, check)?, self.formula(b, w, check)?),
            Formula::Iff(a, b) => format!("(!{} == !{})", self.formula(a, w, check)?, self.formula(b, w, check)?),
            Formula::Ite(c, a, b) => {
                format!("({} ? {} : {})", self.formula(c, w, check)?, self.formula(a, w, check)?, self.formula(b, w, check)?)
            }
        })
    }

    /// The if/else-if chain of one Skolem, assigning the `next_` temporaries.
    fn cascade(&mut self, g: &GuardedSkolem, w: Window, indent: &str, fail: &str, out: &mut String) -> Result<(), CodegenError> {
        let check = g.tag.to_string();
        for (i, case) in g.cases.iter().enumerate() {
            let guard = self.formula(&case.guard, w, &check)?;
            let kw = if i == 0 { "if" } else { "} else if" };
            let _ = writeln!(out, "{indent}{kw} ({guard}) {{");
            for (y, t) in &case.assigns {
                let (base, _) = split_slot(&y.name).ok_or_else(|| CodegenError::Unknown(y.name.clone()))?;
                let c = self.vars[base].0.clone();
                let rhs = self.term(t, w, &check)?;
                let _ = writeln!(out, "{indent}    next_{c} = {rhs};");
            }
        }
        if g.cases.is_empty() {
            let _ = writeln!(out, "{indent}{fail}(\"{check}\");");
        } else {
            let _ = writeln!(out, "{indent}}} else {{\n{indent}    {fail}(\"{check}\");\n{indent}}}");
        }
        Ok(())
    }
}

fn print_format(s: Sort) -> &'static str {
    match s {
        Sort::Bool => "%d",
        Sort::Int => "%lld",
        Sort::Real => "%.17g",
    }
}

/// Emits the init/step implementation plus a stdin/stdout driver behind
/// `#ifdef DRIVER`.
pub fn emit(p: &SynthesisProblem, r: &Realization) -> Result<EmittedProgram, CodegenError> {
    let node = {
        let mut t = BTreeSet::new();
        mangle(&p.name, &mut t)
    };
    let mut taken: BTreeSet<String> =
        ["init", "step", "fail", "t", "cur", "print"].iter().map(|s| format!("{node}_{s}")).collect();
    let state: Vec<CVar> = p
        .state_vars()
        .iter()
        .map(|v| CVar { name: v.name.clone(), c_name: mangle(&v.name, &mut taken), sort: v.sort })
        .collect();
    let inputs: Vec<CVar> = p
        .inputs
        .iter()
        .map(|v| CVar { name: v.name.clone(), c_name: mangle(&v.name, &mut taken), sort: v.sort })
        .collect();
    let vars: BTreeMap<String, (String, bool)> = state
        .iter()
        .map(|v| (v.name.clone(), (v.c_name.clone(), true)))
        .chain(inputs.iter().map(|v| (v.name.clone(), (v.c_name.clone(), false))))
        .collect();
    let mut em = Emitter { vars, uses_div: false, realization: r };
    let k = r.k;
    let fail = format!("{node}_fail");

    let mut body = String::new();
    let _ = writeln!(body, "void {node}_init(void)\n{{");
    for v in &state {
        let val = r.init_model.get(&v.name).cloned().unwrap_or_else(|| v.sort.default_value());
        let _ = writeln!(body, "    {}[0] = {};", v.c_name, Emitter::value(&val)?);
    }
    let _ = writeln!(body, "    {node}_t = 0;\n    {node}_cur = 0;\n}}\n");

    let params: Vec<String> = inputs.iter().map(|v| format!("{} in_{}", v.c_type(), v.c_name)).collect();
    let params = if params.is_empty() { "void".to_string() } else { params.join(", ") };
    let _ = writeln!(body, "void {node}_step({params})\n{{");
    for v in &state {
        let _ = writeln!(body, "    {} next_{} = 0;", v.c_type(), v.c_name);
    }
    let _ = writeln!(body, "    int w;");
    if k == 0 {
        let _ = writeln!(body, "    w = 0;");
    } else {
        let _ = writeln!(body, "    if ({node}_t < {k}) {{\n        w = {node}_t + 1;\n    }} else {{\n        int j;");
        let _ = writeln!(body, "        for (j = 0; j < {k}; j++) {{");
        for v in state.iter().chain(&inputs) {
            let _ = writeln!(body, "            {0}[j] = {0}[j + 1];", v.c_name);
        }
        let _ = writeln!(body, "        }}\n        w = {k};\n    }}");
    }
    for v in &inputs {
        let _ = writeln!(body, "    {0}[w] = in_{0};", v.c_name);
    }
    let mut first = true;
    for j in 0..k {
        let kw = if first { "if" } else { "} else if" };
        first = false;
        let _ = writeln!(body, "    {kw} ({node}_t == {j}) {{");
        em.cascade(r.base(j), Window::Base, "        ", &fail, &mut body)?;
    }
    if k > 0 {
        let _ = writeln!(body, "    }} else {{");
        em.cascade(r.extend(), Window::Extend { k }, "        ", &fail, &mut body)?;
        let _ = writeln!(body, "    }}");
    } else {
        em.cascade(r.extend(), Window::Extend { k }, "    ", &fail, &mut body)?;
    }
    for v in &state {
        let _ = writeln!(body, "    {0}[w] = next_{0};", v.c_name);
    }
    let _ = writeln!(body, "    {node}_cur = w;");
    if k > 0 {
        let _ = writeln!(body, "    if ({node}_t < {k}) {{\n        {node}_t++;\n    }}");
    }
    let _ = writeln!(body, "}}");

    let mut src = String::new();
    let _ = writeln!(
        src,
        "/* {}: implementation synthesized by agsynth {} (k = {k}). */\n",
        p.name,
        env!("CARGO_PKG_VERSION")
    );
    src.push_str("#include <stdint.h>\n#include <stdio.h>\n#include <stdlib.h>\n\n");
    for v in state.iter().chain(&inputs) {
        let _ = writeln!(src, "{} {}[{}];", v.c_type(), v.c_name, k + 1);
    }
    let _ = writeln!(src, "int {node}_t;\nint {node}_cur;\n");
    if em.uses_div {
        src.push_str(
            "static int64_t floor_div(int64_t a, int64_t b)\n{\n    int64_t q = a / b;\n    if ((a % b != 0) && ((a < 0) != (b < 0))) {\n        q--;\n    }\n    return q;\n}\n\n",
        );
    }
    let _ = writeln!(
        src,
        "static void {fail}(const char *check)\n{{\n    fprintf(stderr, \"{}: no Skolem case applies (%s)\\n\", check);\n    exit(2);\n}}\n",
        p.name
    );
    src.push_str(&body);
    src.push_str(&driver(&node, &state, &inputs));
    Ok(EmittedProgram { node, k, inputs, state, source: src })
}

fn driver(node: &str, state: &[CVar], inputs: &[CVar]) -> String {
    let mut d = String::new();
    let _ = writeln!(d, "\n#ifdef DRIVER\nstatic void {node}_print(void)\n{{");
    let fmt: Vec<&str> = state.iter().map(|v| print_format(v.sort)).collect();
    let args: Vec<String> = state
        .iter()
        .map(|v| match v.sort {
            Sort::Int => format!("(long long){}[{node}_cur]", v.c_name),
            _ => format!("{}[{node}_cur]", v.c_name),
        })
        .collect();
    if state.is_empty() {
        let _ = writeln!(d, "    printf(\"\\n\");");
    } else {
        let _ = writeln!(d, "    printf(\"{}\\n\", {});", fmt.join(" "), args.join(", "));
    }
    let _ = writeln!(d, "}}\n\nint main(void)\n{{\n    {node}_init();\n    {node}_print();\n    for (;;) {{");
    if inputs.is_empty() {
        let _ = writeln!(d, "        long long tick;\n        int r = scanf(\"%lld\", &tick);\n        if (r == EOF) {{\n            return 0;\n        }}\n        if (r != 1) {{\n            fprintf(stderr, \"malformed input\\n\");\n            return 1;\n        }}");
        let _ = writeln!(d, "        {node}_step();");
    } else {
        for (i, v) in inputs.iter().enumerate() {
            let (ty, fmt) = if v.sort == Sort::Real { ("double", "%lf") } else { ("long long", "%lld") };
            let _ = writeln!(d, "        {ty} raw_{0};\n        int r_{0} = scanf(\"{fmt}\", &raw_{0});", v.c_name);
            if i == 0 {
                let _ = writeln!(d, "        if (r_{} == EOF) {{\n            return 0;\n        }}", v.c_name);
            }
            let _ = writeln!(d, "        if (r_{} != 1) {{\n            fprintf(stderr, \"malformed input\\n\");\n            return 1;\n        }}", v.c_name);
        }
        let args: Vec<String> = inputs
            .iter()
            .map(|v| match v.sort {
                Sort::Bool => format!("raw_{} != 0", v.c_name),
                Sort::Int => format!("(int64_t)raw_{}", v.c_name),
                Sort::Real => format!("raw_{}", v.c_name),
            })
            .collect();
        let _ = writeln!(d, "        {node}_step({});", args.join(", "));
    }
    let _ = writeln!(d, "        {node}_print();\n    }}\n}}\n#endif");
    d
}
