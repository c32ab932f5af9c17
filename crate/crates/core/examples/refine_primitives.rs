//! Shows how the refiner turns bound literals on an existential into a
//! closed term, one literal set per primitive.
//!
//! `cargo run --example refine_primitives`

use agsynth::logic::smtlib::{parse_formula, SortTable};
use agsynth::logic::{simplify_term, Sort, Var};
use agsynth::refine::extract;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases: [(&str, Sort, &[&str]); 6] = [
        ("MAX of lower bounds", Sort::Int, &["(>= y a)", "(>= y b)"]),
        ("MIN of upper bounds", Sort::Int, &["(<= y a)", "(< y b)"]),
        ("MID of an integer interval", Sort::Int, &["(> y a)", "(< y b)"]),
        ("GT of a strict real bound", Sort::Real, &["(> y a)"]),
        ("LT of a strict real bound", Sort::Real, &["(< y b)"]),
        ("FMID avoiding a disequality", Sort::Real, &["(> y a)", "(< y b)", "(not (= y c))"]),
    ];
    for (label, sort, lits) in cases {
        let table: SortTable = ["y", "a", "b", "c"].into_iter().map(|n| (n.to_string(), sort)).collect();
        let atoms = lits.iter().map(|s| parse_formula(s, &table)).collect::<Result<Vec<_>, _>>()?;
        let t = extract(&Var::new("y", sort), &atoms)?;
        println!("{label}: {} gives y := {}", lits.join(" "), simplify_term(&t));
    }
    Ok(())
}
