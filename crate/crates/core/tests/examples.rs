use infinir::engine::{close_universe, decide, search_proof, RelationKind, SearchBudget, Universe};
use infinir::proof::{extract_prefix, validate, ProofError};
use infinir::syntax::{parse_trs_file, Mode, Workspace};
use infinir::term::truncate;

fn ws(text: &str) -> Workspace {
    parse_trs_file(text).unwrap()
}

#[test]
fn rule_files() {
    let w = ws("C(a) -> a");
    assert_eq!((w.trs.rules.len(), w.mode), (1, Some(Mode::Rewriting)));
    let w = ws("C(a) = a\nterm cw = rec X = C(X) in X");
    assert_eq!((w.trs.rules.len(), w.mode), (1, Some(Mode::Equational)));
    assert!(w.terms.contains_key("cw"));
    let w = ws("f(x,x) -> D\na -> C(a)\nb -> C(b)");
    assert_eq!(w.trs.rules.len(), 3);
    assert!(!w.trs.is_left_linear());
}

#[test]
fn limit_reduction_has_every_finite_prefix() {
    let w = ws("a -> C(a)\nterm cw = rec X = C(X) in X");
    let a = w.resolve_term("a").unwrap();
    let v = search_proof(&a, &w.terms["cw"], RelationKind::Ired, &w.trs, SearchBudget::default());
    let p = v.certificate().unwrap();
    for n in 0..10 {
        let red = extract_prefix(p, &w.trs, n).unwrap();
        let last = red.last_term(&w.trs).unwrap();
        assert_eq!(truncate(&last, n), truncate(&w.terms["cw"], n));
        assert!(red.len() >= n.saturating_sub(1));
    }
}

#[test]
fn doubling_reduction_has_no_finite_prefix() {
    let w = ws("f(x,x) -> D\na -> C(a)\nb -> C(b)");
    let s = w.resolve_term("f(a,b)").unwrap();
    let t = w.resolve_term("D").unwrap();
    let v = search_proof(&s, &t, RelationKind::Ired, &w.trs, SearchBudget::default());
    let p = v.certificate().unwrap();
    assert!(validate(p, &w.trs).ok);
    assert!(extract_prefix(p, &w.trs, 0).unwrap().is_empty());
    assert!(matches!(extract_prefix(p, &w.trs, 1), Err(ProofError::InvalidCertificate(_))));
}

#[test]
fn limit_pair_in_exact_solver() {
    let w = ws("a -> C(a)\nterm cw = rec X = C(X) in X");
    let ts: Vec<_> = ["a", "C(a)", "cw"].iter().map(|s| w.resolve_term(s).unwrap()).collect();
    let u = Universe::from_terms(ts.clone(), &w.trs, RelationKind::Ired);
    let r = decide(&u, RelationKind::Ired).unwrap();
    assert!(r.contains(u.index_of(&ts[0]).unwrap(), u.index_of(&ts[2]).unwrap()));
    assert!(!r.contains(u.index_of(&ts[2]).unwrap(), u.index_of(&ts[0]).unwrap()));
}

#[test]
fn growing_system_exhausts_the_universe_budget() {
    let w = ws("C(x) -> C(C(x))");
    let u = close_universe(&[w.resolve_term("C(a)").unwrap()], &w.trs, RelationKind::Bi, 10);
    assert!(!u.closed);
    assert_eq!(u.len(), 10);
}
