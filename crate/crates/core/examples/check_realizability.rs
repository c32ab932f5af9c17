//! Decides realizability and lists every base and extend check the engine
//! discharged on the way.
//!
//! `cargo run --example check_realizability -- corpus/delay2.lus`

use agsynth::engine::{run, EngineConfig, SynthesisResult};
use agsynth::frontend::{load, ElabOptions};
use agsynth::smt::SolverConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/delay2.lus").into());
    let p = load(&std::fs::read_to_string(path)?, ElabOptions::default())?;
    let report = run(&p, &EngineConfig::new(SolverConfig::new(None)))?;
    for c in &report.checks {
        let verdict = match c.valid {
            Some(true) => "valid",
            Some(false) => "invalid",
            None => "unknown",
        };
        println!("{:<10} {verdict:<8} {} cases from {} models", c.tag.to_string(), c.cases, c.models.len());
    }
    match &report.result {
        SynthesisResult::Realizable(r) => println!("{}: realizable with k = {}", p.name, r.k),
        SynthesisResult::Unrealizable { depth, witness } => println!("{}: unrealizable at depth {depth}, witness {witness}", p.name),
        SynthesisResult::Unknown { stage, reason } => println!("{}: unknown at {stage}: {reason}", p.name),
    }
    Ok(())
}
