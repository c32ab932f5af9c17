//! Decides a small forall-exists formula with AE-VAL: each solver model of
//! the uncovered region is projected with MBP, and the projection becomes
//! the guard of one Skolem case.
//!
//! `cargo run --example ae_val_skolem`

use agsynth::logic::smtlib::{parse_formula, SortTable};
use agsynth::logic::{Sort, Var};
use agsynth::skolem::{ae_val, AeValConfig, AeValOutcome, CheckTag, QuantifiedCheck};
use agsynth::smt::{SolverConfig, SolverHandle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // forall x in [-10, 10]. exists y. y > x and (x >= 0 or y < 0)
    let (x, y) = (Var::new("x", Sort::Real), Var::new("y", Sort::Real));
    let table: SortTable = [("x".to_string(), Sort::Real), ("y".to_string(), Sort::Real)].into();
    let check = QuantifiedCheck {
        tag: CheckTag::Extend(0),
        universals: vec![x],
        existentials: vec![y],
        s: parse_formula("(and (>= x (- 10.0)) (<= x 10.0))", &table)?,
        t: parse_formula("(and (> y x) (or (>= x 0.0) (< y 0.0)))", &table)?,
    };
    let mut h = SolverHandle::start(&SolverConfig::new(None))?;
    let run = ae_val(&mut h, &check, AeValConfig::default())?;
    for m in &run.models {
        println!("model: {m}");
    }
    match run.outcome {
        AeValOutcome::Valid(g) => {
            for c in &g.cases {
                let assigns: Vec<String> = c.assigns.iter().map(|(v, t)| format!("{} := {t}", v.name)).collect();
                println!("if {} then {}", c.guard, assigns.join(", "));
            }
        }
        AeValOutcome::Invalid(w) => println!("invalid, counterexample {w}"),
        AeValOutcome::Unknown(why) => println!("unknown: {why}"),
    }
    Ok(())
}
