//! Runs randomized conformance traces of a synthesized contract against its
//! guarantees using exact arithmetic, and prints the first trace.
//!
//! `cargo run --example simulate -- corpus/integrator.lus`

use agsynth::engine::{run, EngineConfig, SynthesisResult};
use agsynth::frontend::{load, ElabOptions};
use agsynth::harness::{run_traces, HarnessConfig};
use agsynth::smt::SolverConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/integrator.lus").into());
    let p = load(&std::fs::read_to_string(path)?, ElabOptions::default())?;
    let solver = SolverConfig::new(None);
    let SynthesisResult::Realizable(r) = run(&p, &EngineConfig::new(solver.clone()))?.result else {
        eprintln!("{} is not realizable", p.name);
        std::process::exit(1);
    };
    let mut cfg = HarnessConfig::new(solver);
    cfg.traces = 100;
    cfg.len = 20;
    let (report, traces) = run_traces(&p, &r, &cfg)?;
    println!("{}", report.summary());
    if let Some(t) = traces.first() {
        println!("trace 0, init: {}", t.init);
        for (i, s) in t.steps.iter().enumerate() {
            println!("  step {}: input {} -> {}", i + 1, s.input, s.state);
        }
    }
    Ok(())
}
