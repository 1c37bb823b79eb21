//! Bounded soundness search beyond the pinned acceptance cases.

use ctrs::corpus::load;
use ctrs::engine::{build_universe, Bounds, UniverseMode};
use ctrs::lab::{search_unsoundness, soundness_condition_report, SearchConfig, Status, TransformKind, TransformationHandle};
use ctrs::suite::{run_pinned, PinnedSearch};
use ctrs::term::Term;

#[test]
fn u_is_also_unsound_for_r8_and_inverse_r10() {
    for p in [
        PinnedSearch { system: "R8", kind: TransformKind::U, start: "f(a)", target: Some("c(b,h(b))"), steps: 12, policy: "none", ev_safe: false, extra: &[] },
        PinnedSearch { system: "R10inv", kind: TransformKind::U, start: "A", target: Some("h(f(a),f(b))"), steps: 12, policy: "none", ev_safe: false, extra: &["a", "b"] },
    ] {
        let (ok, msg) = run_pinned(&p);
        assert!(ok, "{msg}");
    }
}

fn small_starts(name: &str) -> Vec<Term> {
    let r = load(name).unwrap();
    build_universe(&r.sig(), 1, UniverseMode::Original, &[]).into_iter().filter(|t| t.depth() <= 1).collect()
}

#[test]
fn positive_instances_have_no_counterexample() {
    let cfg = SearchConfig { bounds: Bounds { steps: 6, ..Bounds::default() }, ..SearchConfig::default() };
    for (name, kinds) in [
        ("R2", vec![TransformKind::Uopt, TransformKind::U]),
        ("R7", vec![TransformKind::Uopt, TransformKind::U, TransformKind::Sr]),
        ("R10p", vec![TransformKind::Uopt]),
        ("R12", vec![TransformKind::Uj, TransformKind::UDet]),
    ] {
        let r = load(name).unwrap();
        for k in kinds {
            let h = TransformationHandle::build(k, &r).unwrap();
            let v = search_unsoundness(&h, &small_starts(name), &cfg).unwrap();
            assert_eq!(v.status, Status::NoneWithinBounds, "{name} {}", k.name());
            assert!(v.unconfirmed.is_empty(), "{name} {}: {:?}", k.name(), v.unconfirmed);
        }
    }
}

#[test]
fn open_and_unsound_families_are_tagged() {
    let r3p = soundness_condition_report(&load("R3p").unwrap());
    assert!(r3p.registry.unwrap().contains("open question"));
    let r3 = soundness_condition_report(&load("R3").unwrap());
    assert!(r3.applies.values().all(|v| v.is_empty()));
}

#[test]
fn verdicts_are_deterministic() {
    let r = load("R10").unwrap();
    let h = TransformationHandle::build(TransformKind::Uopt, &r).unwrap();
    let starts = small_starts("R10");
    let a = search_unsoundness(&h, &starts, &SearchConfig::default()).unwrap();
    let mut rev = starts.clone();
    rev.reverse();
    let b = search_unsoundness(&h, &rev, &SearchConfig::default()).unwrap();
    assert_eq!(ctrs::format::emit_json(&a), ctrs::format::emit_json(&b));
}
