//! Semantic checks on the refiner primitives, shared by the property tests
//! and the acceptance run. Each returns a description of the first failure.

use agsynth::logic::{eval_formula, eval_term, CmpOp, Formula, Model, Sort, Term, Value, Var};
use agsynth::refine::{extract, fmid, gt, lt, max, min, mid};
use num_rational::BigRational;

fn lo_var(sort: Sort) -> Var {
    Var::new("lo", sort)
}

fn hi_var(sort: Sort) -> Var {
    Var::new("hi", sort)
}

fn value(sort: Sort, r: &BigRational) -> Value {
    Value::from_rational(sort, r.clone()).unwrap()
}

fn eval(t: &Term, m: &Model) -> Result<BigRational, String> {
    eval_term(t, m).map_err(|e| e.to_string())?.as_rational().ok_or_else(|| "non-numeric result".to_string())
}

/// MID of two strict bounds lies strictly between them. For integers the
/// strict bounds are first normalized to `lo + 1 <= y <= hi - 1`.
pub fn check_mid(sort: Sort, lo: BigRational, hi: BigRational) -> Result<(), String> {
    let (l, h) = (lo_var(sort), hi_var(sort));
    let m = Model::new().with("lo", value(sort, &lo)).with("hi", value(sort, &hi));
    let t = match sort {
        Sort::Int => mid(agsynth::refine::shift(&Term::var(&l), 1), agsynth::refine::shift(&Term::var(&h), -1)),
        _ => mid(Term::var(&l), Term::var(&h)),
    };
    let v = eval(&t, &m)?;
    if lo < v && v < hi {
        Ok(())
    } else {
        Err(format!("mid of ({lo}, {hi}) over {sort:?} gave {v}"))
    }
}

/// GT lands above the bound (strictly when asked), LT below it.
pub fn check_gt_lt(sort: Sort, bound: BigRational, strict: bool) -> Result<(), String> {
    let b = lo_var(sort);
    let m = Model::new().with("lo", value(sort, &bound));
    let up = eval(&gt(&Term::var(&b), strict), &m)?;
    let down = eval(&lt(&Term::var(&b), strict), &m)?;
    let ok_up = if strict { up > bound } else { up >= bound };
    let ok_down = if strict { down < bound } else { down <= bound };
    if ok_up && ok_down {
        Ok(())
    } else {
        Err(format!("bound {bound} strict={strict}: gt gave {up}, lt gave {down}"))
    }
}

/// FMID stays strictly inside `(lo, hi)` and differs from `h`.
pub fn check_fmid(lo: BigRational, hi: BigRational, h: BigRational) -> Result<(), String> {
    let s = Sort::Real;
    let m = Model::new().with("lo", Value::Real(lo.clone())).with("hi", Value::Real(hi.clone())).with("h", Value::Real(h.clone()));
    let t = fmid(Term::var(&lo_var(s)), Term::var(&hi_var(s)), Term::var(&Var::real("h")));
    let v = eval(&t, &m)?;
    if lo < v && v < hi && v != h {
        Ok(())
    } else {
        Err(format!("fmid({lo}, {hi}, {h}) gave {v}"))
    }
}

/// MAX/MIN agree with the numeric maximum/minimum, and a sample `v`
/// satisfies every lower (upper) bound exactly when it clears the folded
/// maximum (minimum).
pub fn check_fold(sort: Sort, bounds: &[BigRational], sample: BigRational) -> Result<(), String> {
    let vars: Vec<Var> = (0..bounds.len()).map(|i| Var::new(format!("b{i}"), sort)).collect();
    let mut m = Model::new();
    for (v, b) in vars.iter().zip(bounds) {
        m.insert(v.name.clone(), value(sort, b));
    }
    let terms: Vec<Term> = vars.iter().map(Term::var).collect();
    let hi = eval(&terms.iter().cloned().reduce(max).unwrap(), &m)?;
    let lo = eval(&terms.iter().cloned().reduce(min).unwrap(), &m)?;
    let want_hi = bounds.iter().max().unwrap();
    let want_lo = bounds.iter().min().unwrap();
    if &hi != want_hi || &lo != want_lo {
        return Err(format!("fold of {bounds:?}: max {hi}, min {lo}"));
    }
    if (sample >= hi) != bounds.iter().all(|b| &sample >= b) || (sample <= lo) != bounds.iter().all(|b| &sample <= b) {
        return Err(format!("sample {sample} disagrees with folded bounds of {bounds:?}"));
    }
    // The refiner's own fold: y >= b_i for all i yields a value meeting each.
    let y = Var::new("y", sort);
    let atoms: Vec<Formula> = terms.iter().map(|t| Formula::cmp(CmpOp::Ge, Term::var(&y), t.clone())).collect();
    let got = eval(&extract(&y, &atoms).map_err(|e| e.to_string())?, &m)?;
    if &got != want_hi {
        return Err(format!("extract over lower bounds {bounds:?} gave {got}"));
    }
    Ok(())
}

/// Literal `y op c` on an integer `y`.
pub type IntAtom = (CmpOp, i64);

fn atoms_formulas(y: &Var, atoms: &[IntAtom]) -> Vec<Formula> {
    atoms.iter().map(|(op, c)| Formula::cmp(*op, Term::var(y), Term::int(*c))).collect()
}

/// Whether the refiner is entitled to succeed: the normalized interval has
/// room for every disequality (the side condition projection guarantees).
fn entitled(atoms: &[IntAtom]) -> bool {
    let lo = atoms
        .iter()
        .filter_map(|(op, c)| match op {
            CmpOp::Gt => Some(c + 1),
            CmpOp::Ge => Some(*c),
            _ => None,
        })
        .max();
    let hi = atoms
        .iter()
        .filter_map(|(op, c)| match op {
            CmpOp::Lt => Some(c - 1),
            CmpOp::Le => Some(*c),
            _ => None,
        })
        .min();
    let n = atoms.iter().filter(|(op, _)| *op == CmpOp::Ne).count() as i64;
    match (lo, hi) {
        (Some(l), Some(h)) => h - l >= n,
        _ => true,
    }
}

/// Enumerates `y` over `domain` to decide the literals, then checks the
/// extracted witness whenever the refiner is entitled to one.
pub fn check_int_enumeration(atoms: &[IntAtom], domain: std::ops::RangeInclusive<i64>) -> Result<bool, String> {
    let y = Var::int("y");
    let fs = atoms_formulas(&y, atoms);
    let sat_at = |v: i64| -> bool {
        let m = Model::new().with("y", Value::int(v));
        fs.iter().all(|f| eval_formula(f, &m).unwrap())
    };
    let solutions: Vec<i64> = domain.filter(|v| sat_at(*v)).collect();
    if solutions.is_empty() || !entitled(atoms) {
        return Ok(false);
    }
    let t = extract(&y, &fs).map_err(|e| e.to_string())?;
    let v = eval(&t, &Model::new())?;
    if !v.is_integer() {
        return Err(format!("non-integral witness {v} for {atoms:?}"));
    }
    let v: i64 = v.to_integer().try_into().unwrap();
    if sat_at(v) {
        Ok(true)
    } else {
        Err(format!("witness {v} violates {atoms:?}; solutions {solutions:?}"))
    }
}
