//! Synthesizes a contract and prints the generated C implementation.
//!
//! `cargo run --example emit_c -- corpus/fig1.lus`

use agsynth::codegen::emit;
use agsynth::engine::{run, EngineConfig, SynthesisResult};
use agsynth::frontend::{load, ElabOptions};
use agsynth::smt::SolverConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/fig1.lus").into());
    let p = load(&std::fs::read_to_string(path)?, ElabOptions::default())?;
    let report = run(&p, &EngineConfig::new(SolverConfig::new(None)))?;
    match report.result {
        SynthesisResult::Realizable(r) => print!("{}", emit(&p, &r)?.source),
        other => eprintln!("not realizable: {other:?}"),
    }
    Ok(())
}
