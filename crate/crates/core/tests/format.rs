//! Parsing and rendering of the corpus.

use ctrs::alpha::equal_modulo_vars;
use ctrs::corpus::{load, names, GOLDEN};
use ctrs::format::{parse_system, render_system};

#[test]
fn corpus_round_trips() {
    for n in names() {
        let s = load(n).unwrap();
        let back = parse_system(&render_system(&s)).unwrap_or_else(|e| panic!("{n}: {e}"));
        assert!(equal_modulo_vars(&s, &back), "{n}");
        assert_eq!(s.flavor, back.flavor, "{n}");
    }
    for (n, text) in GOLDEN {
        let s = parse_system(text).unwrap();
        assert!(equal_modulo_vars(&s, &parse_system(&render_system(&s)).unwrap()), "{n}");
    }
}

#[test]
fn malformed_input_is_rejected() {
    for bad in ["(RULES f(x) -> )", "(VAR x) (RULES f(x -> x)", "(RULES f(a) -> a f(a,a) -> a)"] {
        assert!(parse_system(bad).is_err(), "{bad}");
    }
}

#[test]
fn critical_pairs_of_r0() {
    let cps = ctrs::cp::critical_pairs(&load("R0").unwrap());
    assert!(cps.iter().all(|c| c.position.is_root()));
    assert!(cps.iter().any(|c| c.pair.0.to_string() == "l" || c.pair.1.to_string() == "l"));
}
