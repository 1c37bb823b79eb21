//! The SR transformation on the corpus.

use ctrs::corpus::load;
use ctrs::engine::{Bounds, Engine};
use ctrs::format::parse_term_in;
use ctrs::sr::{curly, sr_transform};
use proptest::prelude::*;

fn num(n: usize) -> String {
    (0..n).fold("0".to_string(), |t, _| format!("s({t})"))
}

fn list(xs: &[usize]) -> String {
    xs.iter().rev().fold("nil".to_string(), |t, x| format!("cons({},{t})", num(*x)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hat_inverts_phi(m in 0usize..3, xs in prop::collection::vec(0usize..3, 0..3)) {
        let r7 = load("R7").unwrap();
        let (_, ctx) = sr_transform(&r7).unwrap();
        let t = parse_term_in(&format!("split({},{})", num(m), list(&xs)), &r7).unwrap();
        prop_assert_eq!(ctx.hat(&ctx.phi(&t).unwrap()), Some(t));
    }

    #[test]
    fn sr_normal_forms_decode_to_r7_normal_forms(m in 0usize..3, xs in prop::collection::vec(0usize..3, 0..3)) {
        let r7 = load("R7").unwrap();
        let (sr, ctx) = sr_transform(&r7).unwrap();
        let t = parse_term_in(&format!("split({},{})", num(m), list(&xs)), &r7).unwrap();
        let b = Bounds { steps: 60, term_size: 80, ..Bounds::default() };
        let mut e = Engine::simple(&sr, b);
        let mut cur = ctx.phi(&t).unwrap();
        while let Some(s) = e.successors(&cur).into_iter().next() {
            cur = s.result;
        }
        let nf = ctx.hat(&cur).expect("decodes");
        prop_assert!(Engine::simple(&r7, Bounds::default()).reach(&t).contains(&nf));
        prop_assert_eq!(cur, curly(ctx.overline(&nf).unwrap()));
    }
}

#[test]
fn sr_output_is_unconditional() {
    for name in ["R6", "R7"] {
        let (sr, _) = sr_transform(&load(name).unwrap()).unwrap();
        assert!(!sr.is_conditional(), "{name}");
    }
}

#[test]
fn join_systems_are_rejected() {
    assert!(sr_transform(&load("R12").unwrap()).is_err());
}
