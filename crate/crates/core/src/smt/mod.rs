//! Incremental SMT-LIB2 sessions with an external solver process.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::logic::sexp::{self, Sexp};
use crate::logic::smtlib::{declare, formula_to_string, parse_value};
use crate::logic::{eval_formula, Formula, LogicError, Model, Sort, Var};

/// Environment variable consulted when no solver command is given.
pub const SOLVER_ENV: &str = "SYNT_SOLVER";
pub const DEFAULT_SOLVER: &str = "z3 -in -smt2";

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("cannot start solver `{command}`: {source}. Install an SMT-LIB2 solver (e.g. z3) or pass --solver / set {SOLVER_ENV}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver rejected command: {0}")]
    Protocol(String),
    #[error("scope error: {0}")]
    Scope(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    Lra,
    Lia,
    All,
}

impl Logic {
    fn name(self) -> &'static str {
        match self {
            Logic::Lra => "QF_LRA",
            Logic::Lia => "QF_LIA",
            Logic::All => "ALL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Program and arguments, e.g. `["z3", "-in", "-smt2"]`.
    pub command: Vec<String>,
    pub timeout_ms: u64,
    pub logic: Logic,
    /// Re-evaluate every assertion on each returned model.
    pub verify_models: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(None)
    }
}

impl SolverConfig {
    /// Uses `command` if given, else `$SYNT_SOLVER`, else `z3 -in -smt2`.
    pub fn new(command: Option<&str>) -> Self {
        let cmd = command
            .map(str::to_string)
            .or_else(|| std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty()))
            .unwrap_or_else(|| DEFAULT_SOLVER.to_string());
        SolverConfig {
            command: cmd.split_whitespace().map(str::to_string).collect(),
            timeout_ms: 30_000,
            logic: Logic::All,
            verify_models: true,
        }
    }

    pub fn with_timeout(mut self, ms: u64) -> Self {
        self.timeout_ms = ms;
        self
    }

    pub fn command_line(&self) -> String {
        self.command.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// A model of the negation.
    Invalid(Model),
    Unknown(String),
}

#[derive(Debug, Default)]
struct Scope {
    declared: BTreeMap<String, Sort>,
    assertions: Vec<Formula>,
}

pub struct SolverHandle {
    config: SolverConfig,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    scopes: Vec<Scope>,
    dead: Option<String>,
    queries: usize,
}

impl SolverHandle {
    pub fn start(config: &SolverConfig) -> Result<Self, SmtError> {
        let (prog, args) = config.command.split_first().ok_or_else(|| SmtError::Spawn {
            command: String::new(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty solver command"),
        })?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SmtError::Spawn { command: config.command_line(), source })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut h = SolverHandle {
            config: config.clone(),
            child,
            stdin,
            lines: rx,
            scopes: vec![Scope::default()],
            dead: None,
            queries: 0,
        };
        h.command("(set-option :print-success true)")?;
        h.command("(set-option :produce-models true)")?;
        h.command(&format!("(set-option :timeout {})", config.timeout_ms))?;
        h.command(&format!("(set-logic {})", config.logic.name()))?;
        if let Some(reason) = &h.dead {
            return Err(SmtError::Spawn {
                command: config.command_line(),
                source: std::io::Error::new(std::io::ErrorKind::BrokenPipe, reason.clone()),
            });
        }
        Ok(h)
    }

    pub fn depth(&self) -> usize {
        self.scopes.len() - 1
    }

    /// Number of `check-sat` calls issued so far.
    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn is_alive(&self) -> bool {
        self.dead.is_none()
    }

    /// Terminates the solver process; later queries answer `Unknown`.
    pub fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
        self.dead = Some("process terminated".into());
    }

    fn send(&mut self, text: &str) {
        if self.dead.is_some() {
            return;
        }
        let ok = self.stdin.write_all(text.as_bytes()).is_ok()
            && self.stdin.write_all(b"\n").is_ok()
            && self.stdin.flush().is_ok();
        if !ok {
            self.dead = Some("process terminated".into());
        }
    }

    fn read_response(&mut self, wait: Duration) -> Option<Sexp> {
        if self.dead.is_some() {
            return None;
        }
        let deadline = Instant::now() + wait;
        let mut buf = String::new();
        loop {
            if let Ok(Some((s, _))) = sexp::parse_one(&buf) {
                return Some(s);
            }
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(line) => {
                    buf.push_str(&line);
                    buf.push('\n');
                }
                Err(RecvTimeoutError::Timeout) => {
                    self.kill();
                    self.dead = Some("timeout".into());
                    return None;
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.kill();
                    return None;
                }
            }
        }
    }

    fn wait(&self) -> Duration {
        Duration::from_millis(self.config.timeout_ms.saturating_add(5_000))
    }

    /// Sends a command that answers `success`.
    fn command(&mut self, text: &str) -> Result<(), SmtError> {
        self.send(text);
        match self.read_response(self.wait()) {
            None => Ok(()),
            Some(Sexp::Atom(a)) if a == "success" => Ok(()),
            Some(other) => Err(SmtError::Protocol(format!("{text} -> {other}"))),
        }
    }

    fn lookup(&self, name: &str) -> Option<Sort> {
        self.scopes.iter().rev().find_map(|s| s.declared.get(name).copied())
    }

    pub fn declare(&mut self, v: &Var) -> Result<(), SmtError> {
        if self.lookup(&v.name).is_some() {
            return Err(SmtError::Scope(format!("`{}` is already declared", v.name)));
        }
        self.command(&declare(v))?;
        self.scopes.last_mut().unwrap().declared.insert(v.name.clone(), v.sort);
        Ok(())
    }

    /// Asserts `f`, declaring its free symbols on first use.
    pub fn assert_formula(&mut self, f: &Formula) -> Result<(), SmtError> {
        f.check_sorts()?;
        for v in f.free_vars() {
            match self.lookup(&v.name) {
                None => self.declare(&v)?,
                Some(s) if s != v.sort => {
                    return Err(SmtError::Scope(format!("`{}` declared as {s}, used as {}", v.name, v.sort)))
                }
                Some(_) => {}
            }
        }
        self.command(&format!("(assert {})", formula_to_string(f)))?;
        self.scopes.last_mut().unwrap().assertions.push(f.clone());
        Ok(())
    }

    pub fn push(&mut self) -> Result<(), SmtError> {
        self.command("(push 1)")?;
        self.scopes.push(Scope::default());
        Ok(())
    }

    pub fn pop(&mut self) -> Result<(), SmtError> {
        if self.depth() == 0 {
            return Err(SmtError::Scope("pop at depth 0".into()));
        }
        self.command("(pop 1)")?;
        self.scopes.pop();
        Ok(())
    }

    pub fn declared(&self) -> Vec<Var> {
        self.scopes
            .iter()
            .flat_map(|s| s.declared.iter().map(|(n, s)| Var::new(n.clone(), *s)))
            .collect()
    }

    pub fn assertions(&self) -> impl Iterator<Item = &Formula> {
        self.scopes.iter().flat_map(|s| s.assertions.iter())
    }

    pub fn check_sat(&mut self) -> SatResult {
        if let Some(reason) = &self.dead {
            return SatResult::Unknown(reason.clone());
        }
        self.queries += 1;
        self.send("(check-sat)");
        let answer = match self.read_response(self.wait()) {
            Some(a) => a,
            None => return SatResult::Unknown(self.dead.clone().unwrap_or_default()),
        };
        match answer.atom() {
            Some("unsat") => SatResult::Unsat,
            Some("sat") => match self.model() {
                Ok(m) => self.checked(m),
                Err(e) => SatResult::Unknown(e),
            },
            Some("unknown") => {
                self.send("(get-info :reason-unknown)");
                let why = self
                    .read_response(self.wait())
                    .map_or_else(|| "unknown".to_string(), |s| reason_text(&s));
                SatResult::Unknown(why)
            }
            _ => SatResult::Unknown(format!("unexpected solver answer {answer}")),
        }
    }

    fn checked(&self, m: Model) -> SatResult {
        if self.config.verify_models {
            for f in self.assertions() {
                match eval_formula(f, &m) {
                    Ok(true) => {}
                    Ok(false) => return SatResult::Unknown(format!("solver model violates assertion {f}")),
                    Err(e) => return SatResult::Unknown(format!("cannot evaluate model: {e}")),
                }
            }
        }
        SatResult::Sat(m)
    }

    fn model(&mut self) -> Result<Model, String> {
        self.send("(get-model)");
        let reply = self
            .read_response(self.wait())
            .ok_or_else(|| self.dead.clone().unwrap_or_default())?;
        let declared = self.declared();
        parse_model(&reply, &declared).map_err(|e| e.to_string())
    }

    /// Validity of `f` under the current assertions, by refutation in a
    /// temporary scope.
    pub fn check_valid(&mut self, f: &Formula) -> Result<Validity, SmtError> {
        self.push()?;
        self.assert_formula(&Formula::not(f.clone()))?;
        let r = self.check_sat();
        if self.is_alive() {
            self.pop()?;
        } else {
            self.scopes.pop();
        }
        Ok(match r {
            SatResult::Unsat => Validity::Valid,
            SatResult::Sat(m) => Validity::Invalid(m),
            SatResult::Unknown(why) => Validity::Unknown(why),
        })
    }
}

impl Drop for SolverHandle {
    fn drop(&mut self) {
        if self.dead.is_none() {
            self.send("(exit)");
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn reason_text(s: &Sexp) -> String {
    match s {
        Sexp::List(items) => items.last().map_or_else(|| s.to_string(), reason_text),
        Sexp::Str(t) | Sexp::Atom(t) | Sexp::Quoted(t) => t.clone(),
    }
}

/// Parses a `get-model` reply. Symbols the solver omitted get their sort's
/// default value so that the model is total over `declared`.
pub fn parse_model(reply: &Sexp, declared: &[Var]) -> Result<Model, LogicError> {
    let sorts: BTreeMap<&str, Sort> = declared.iter().map(|v| (v.name.as_str(), v.sort)).collect();
    let mut items = reply
        .list()
        .ok_or_else(|| LogicError::Parse(format!("model expected, got {reply}")))?;
    if items.first().and_then(Sexp::atom) == Some("model") {
        items = &items[1..];
    }
    if let Some(Sexp::Atom(a)) = items.first() {
        if a == "error" {
            return Err(LogicError::Parse(reply.to_string()));
        }
    }
    let mut m = Model::new();
    for def in items {
        let Some(parts) = def.list() else { continue };
        if parts.len() != 5 || parts[0].atom() != Some("define-fun") {
            continue;
        }
        let name = parts[1].symbol().unwrap_or_default();
        let Some(sort) = sorts.get(name) else { continue };
        if parts[2].list().is_some_and(|a| !a.is_empty()) {
            continue;
        }
        m.insert(name, parse_value(&parts[4], *sort)?);
    }
    for v in declared {
        if !m.contains(&v.name) {
            m.insert(v.name.clone(), v.sort.default_value());
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Value;

    #[test]
    fn parses_both_model_layouts() {
        let declared = [Var::real("x"), Var::bool("b"), Var::int("unused")];
        let reply = &sexp::parse_all(
            "((define-fun b () Bool true) (define-fun x () Real (- (/ 4.0 3.0))))",
        )
        .unwrap()[0];
        let m = parse_model(reply, &declared).unwrap();
        assert_eq!(m.get("x"), Some(&Value::real(-4, 3)));
        assert_eq!(m.get("b"), Some(&Value::Bool(true)));
        assert_eq!(m.get("unused"), Some(&Value::int(0)));
        let old = &sexp::parse_all("(model (define-fun |pre(x)| () Int 7))").unwrap()[0];
        let m = parse_model(old, &[Var::int("pre(x)")]).unwrap();
        assert_eq!(m.get("pre(x)"), Some(&Value::int(7)));
    }

    #[test]
    fn missing_binary_is_reported() {
        let cfg = SolverConfig::new(Some("definitely-not-a-solver-binary -in"));
        assert!(matches!(SolverHandle::start(&cfg), Err(SmtError::Spawn { .. })));
    }

    #[test]
    fn command_line_is_split_on_whitespace() {
        let cfg = SolverConfig::new(Some("z3   -in  -smt2"));
        assert_eq!(cfg.command, ["z3", "-in", "-smt2"]);
    }
}
