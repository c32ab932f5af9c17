//! Lustre-subset contracts: parsing, static checks and elaboration into a
//! transition-system problem.

pub mod ast;
mod check;
mod elaborate;
mod lexer;
mod parser;
mod problem;

use thiserror::Error;

pub use ast::{ContractAst, Pos};
pub use elaborate::{elaborate, prime, shadow_name, ElabOptions};
pub use problem::{slot, Conjunct, StateKind, StateVar, SynthesisProblem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: duplicate definition of `{name}`")]
    Duplicate { pos: Pos, name: String },
    #[error("{pos}: unknown identifier `{name}`")]
    Unknown { pos: Pos, name: String },
    #[error("{pos}: `pre` is not guarded by `->` (uninitialized at the first instant)")]
    PreOutsideArrow { pos: Pos },
    #[error("{pos}: type error: {msg}")]
    Type { pos: Pos, msg: String },
    #[error("{pos}: assumption constrains outputs: `{name}` is read at the current instant")]
    AssumptionOnOutput { pos: Pos, name: String },
    #[error("{pos}: definition of `{name}` depends on itself at the same instant")]
    Cycle { pos: Pos, name: String },
    #[error("{pos}: internal elaboration error: {msg}")]
    Internal { pos: Pos, msg: String },
}

impl FrontendError {
    pub fn pos(&self) -> Pos {
        match self {
            FrontendError::Syntax { pos, .. }
            | FrontendError::Duplicate { pos, .. }
            | FrontendError::Unknown { pos, .. }
            | FrontendError::PreOutsideArrow { pos }
            | FrontendError::Type { pos, .. }
            | FrontendError::AssumptionOnOutput { pos, .. }
            | FrontendError::Cycle { pos, .. }
            | FrontendError::Internal { pos, .. } => *pos,
        }
    }
}

/// Parses and statically checks a contract.
pub fn parse_contract(src: &str) -> Result<ContractAst, FrontendError> {
    let ast = parser::parse_syntax(src)?;
    check::check(&ast)?;
    Ok(ast)
}

/// Parses, checks and elaborates a contract.
pub fn load(src: &str, opts: ElabOptions) -> Result<SynthesisProblem, FrontendError> {
    elaborate(&parse_contract(src)?, opts)
}
