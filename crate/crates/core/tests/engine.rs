//! Reduction, reachability and derivation replay.

use ctrs::corpus::load;
use ctrs::engine::{reachable, verify_derivation, Bounds, Engine, Policy};
use ctrs::format::parse_term_in;
use ctrs::gen;
use ctrs::term::{Subst, Term};
use proptest::prelude::*;

fn ground(t: Term) -> Term {
    let mut s = Subst::new();
    for x in t.vars() {
        s.insert(x, Term::constant("a"));
    }
    t.apply(&s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reach_is_monotone_and_replays(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let sys = gen::deterministic_system(&mut rng, 3, 1, 2);
        let start = ground(gen::term(&mut rng, 2, &[]));
        let small = Bounds { steps: 3, term_size: 20, ..Bounds::default() };
        let big = Bounds { steps: 4, ..small };
        let a = reachable(&sys, &start, small);
        let b = reachable(&sys, &start, big);
        for t in a.terms() {
            prop_assert!(b.contains(t));
            let d = a.derivation(t).unwrap();
            prop_assert_eq!(d.end(), t);
            prop_assert!(verify_derivation(&d, &sys, &Policy::full(), small).is_ok());
        }
    }
}

#[test]
fn r0_reaches_e_in_two_steps() {
    let r0 = load("R0").unwrap();
    let r = reachable(&r0, &Term::constant("a"), Bounds::default());
    assert_eq!(r.distance(&Term::constant("e")), Some(2));
    assert!(!r.contains(&Term::constant("b")));
}

#[test]
fn conditions_need_a_level() {
    let r7 = load("R7").unwrap();
    let t = parse_term_in("split(s(0),cons(0,cons(s(s(0)),nil)))", &r7).unwrap();
    let nf = parse_term_in("tp2(cons(0,nil),cons(s(s(0)),nil))", &r7).unwrap();
    let at = |level| {
        let b = Bounds { level, steps: 8, ..Bounds::default() };
        Engine::simple(&r7, b).reach(&t).contains(&nf)
    };
    assert!(!at(0));
    assert!(at(4));
}

#[test]
fn tampered_derivations_are_rejected() {
    let r0 = load("R0").unwrap();
    let r = reachable(&r0, &Term::constant("a"), Bounds::default());
    let mut d = r.derivation(&Term::constant("e")).unwrap();
    d.steps[1].result = Term::constant("l");
    assert!(verify_derivation(&d, &r0, &Policy::full(), Bounds::default()).is_err());
}
