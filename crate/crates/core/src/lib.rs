//! Synthesis of reactive implementations from assume-guarantee contracts.

pub mod cli;
pub mod codegen;
pub mod engine;
pub mod frontend;
pub mod harness;
pub mod logic;
pub mod refine;
pub mod skolem;
pub mod smt;
