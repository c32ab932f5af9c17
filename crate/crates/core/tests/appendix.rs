mod common;

use agsynth::smt::SolverHandle;

#[test]
fn extend_check_matches_the_appendix_and_reproduces_its_local_skolem() {
    let p = common::problem("fig1", false);
    let mut h = SolverHandle::start(&common::solver()).unwrap();
    let out = common::appendix::check(&p, &mut h).unwrap();
    assert!(out.s_equivalent, "universal part differs");
    assert!(out.t_equivalent, "existential part differs");
    assert!(out.inside_region, "projection leaves the appendix region");
    assert_eq!(out.local_skolem, common::appendix::expected());
}

#[test]
fn verbatim_guarantee4_typo_is_not_equivalent() {
    use agsynth::engine::build_extend_check;
    use agsynth::logic::smtlib::{parse_formula, SortTable};
    use agsynth::logic::Formula;
    use agsynth::smt::Validity;

    let p = common::problem("fig1", false);
    let q = build_extend_check(&p, 1);
    let table: SortTable = q.universals.iter().chain(&q.existentials).map(|v| (v.name.clone(), v.sort)).collect();
    let verbatim = common::appendix::EXISTENTIAL_PART
        .replace("(=> bias_max@2 (= state@2 3))", "(=> bias_max@2 (= state@2 2))");
    let t = parse_formula(&verbatim, &table).unwrap();
    let mut h = SolverHandle::start(&common::solver()).unwrap();
    assert!(matches!(h.check_valid(&Formula::iff(q.t.clone(), t)).unwrap(), Validity::Invalid(_)));
}
