//! Prints the elaborated transition system of a contract and one of its
//! quantified checks in SMT-LIB2.
//!
//! `cargo run --example inspect_check -- corpus/fig1.lus extend 1 [--no-inline]`

use agsynth::engine::build_check;
use agsynth::frontend::{load, ElabOptions};
use agsynth::logic::smtlib::formula_to_string;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().cloned().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/fig1.lus").into());
    let tag = match (args.get(1), args.get(2)) {
        (Some(kind), Some(n)) => format!("{kind} {n}").parse()?,
        _ => "extend 1".parse()?,
    };
    let inline = !args.iter().any(|a| a == "--no-inline");
    let p = load(&std::fs::read_to_string(path)?, ElabOptions { inline_booleans: inline })?;
    println!("; inputs: {:?}", p.inputs.iter().map(|v| &v.name).collect::<Vec<_>>());
    println!("; state:  {:?}", p.state_vars().iter().map(|v| &v.name).collect::<Vec<_>>());
    println!("; A   = {}", formula_to_string(&p.assumption));
    println!("; G_I = {}", formula_to_string(&p.init_formula()));
    println!("; G_T = {}", formula_to_string(&p.trans_formula()));
    print!("{}", build_check(&p, tag).to_smtlib());
    Ok(())
}
