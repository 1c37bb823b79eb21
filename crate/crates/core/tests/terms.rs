//! Properties of terms, positions, matching and unification.

use std::collections::BTreeSet;

use ctrs::format::parse_term;
use ctrs::term::{match_term, sym, unify, PosKind, Subst, Term};
use proptest::prelude::*;

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::app("f", vec![l, r])),
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
        ]
    })
}

fn arb_ground() -> impl Strategy<Value = Term> {
    arb_term().prop_map(|t| {
        let mut s = Subst::new();
        for x in t.vars() {
            s.insert(x, Term::constant("a"));
        }
        t.apply(&s)
    })
}

fn vars() -> BTreeSet<ctrs::term::Sym> {
    ["x", "y", "z"].iter().map(|v| sym(v)).collect()
}

proptest! {
    #[test]
    fn display_parses_back(t in arb_term()) {
        prop_assert_eq!(parse_term(&t.to_string(), &vars()).unwrap(), t);
    }

    #[test]
    fn positions_cover_every_node(t in arb_term()) {
        let all = t.positions(PosKind::All);
        prop_assert_eq!(all.len(), t.size());
        for p in &all {
            let u = t.subterm(p).unwrap().clone();
            prop_assert_eq!(t.replace_at(p, u).unwrap(), t.clone());
        }
    }

    #[test]
    fn instances_are_matched(p in arb_term(), a in arb_ground(), b in arb_ground()) {
        let mut s = Subst::new();
        s.insert(sym("x"), a);
        s.insert(sym("y"), b);
        s.insert(sym("z"), Term::constant("b"));
        let inst = p.apply(&s);
        let m = match_term(&p, &inst);
        prop_assert!(m.is_some());
        prop_assert_eq!(p.apply(&m.unwrap()), inst);
    }

    #[test]
    fn unifiers_unify_and_are_idempotent(s in arb_term(), t in arb_term()) {
        let t = t.map_vars(&mut |x| sym(&format!("{x}2")));
        if let Some(th) = unify(&s, &t) {
            prop_assert_eq!(s.apply(&th), t.apply(&th));
            prop_assert_eq!(s.apply(&th).apply(&th), s.apply(&th));
        }
    }

    #[test]
    fn ground_terms_unify_iff_equal(s in arb_ground(), t in arb_ground()) {
        prop_assert_eq!(unify(&s, &t).is_some(), s == t);
    }
}

#[test]
fn occurs_check() {
    let x = Term::var("x");
    assert!(unify(&x, &Term::app("g", vec![x.clone()])).is_none());
}
