//! Synthesizes a contract, prints each guarded Skolem cascade and re-checks
//! it with fresh soundness and coverage queries.
//!
//! `cargo run --example certify_skolems -- corpus/fig1.lus`

use agsynth::engine::{build_check, run, EngineConfig, SynthesisResult};
use agsynth::frontend::{load, ElabOptions};
use agsynth::skolem::certify;
use agsynth::smt::{SolverConfig, SolverHandle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/fig1.lus").into());
    let p = load(&std::fs::read_to_string(path)?, ElabOptions::default())?;
    let solver = SolverConfig::new(None);
    let SynthesisResult::Realizable(r) = run(&p, &EngineConfig::new(solver.clone()))?.result else {
        eprintln!("{} is not realizable", p.name);
        std::process::exit(1);
    };
    let mut h = SolverHandle::start(&solver)?;
    for g in &r.skolems {
        println!("{}:", g.tag);
        for (i, c) in g.cases.iter().enumerate() {
            println!("  case {i}: if {}", c.guard);
            for (v, t) in &c.assigns {
                println!("    {} := {t}", v.name);
            }
        }
        let cert = certify(&mut h, &build_check(&p, g.tag), g)?;
        println!("  certificate: {}", if cert.passed() { "passed" } else { "FAILED" });
    }
    Ok(())
}
