//! The corpus verification suite: one check per acceptance criterion, with
//! deterministic text output shared by `corpus-verify` and the acceptance test.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::Serialize;

use crate::alpha::{alpha_u_equal, equal_under_pairing};
use crate::classify::classify;
use crate::corpus::{check_goldens, load};
use crate::engine::{
    build_universe, verify_derivation, Bounds, Engine, Policy, Strategy, Universe, UniverseMode,
};
use crate::format::parse_term_in;
use crate::homo::{canonical_phi, check_simulation, det_transform, norm_transform, Construction};
use crate::lab::{
    search_unsoundness, soundness_condition_report, verify_counterexample, SearchConfig, Status, TransformKind,
    TransformationHandle,
};
use crate::sr::{curly, sr_simulate_u_derivation, sr_transform};
use crate::system::{Flavor, System};
use crate::term::Term;
use crate::unravel::{
    sort_u_vectors, u_symbol, ultra_check, unravel_u, unravel_uj, unravel_un, unravel_un_assuming_normal, unravel_uopt,
    Method, Property, Unraveling, Vector,
};

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub pass: bool,
    pub detail: String,
    /// Sub-checks that fail; each is explained in the detail.
    pub failures: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("{tag} criterion {:>2}: {} ({})", self.id, self.title, self.detail)
    }
}

fn result(id: usize, title: &str, failures: Vec<String>, detail: String) -> CriterionResult {
    CriterionResult { id, title: title.to_string(), pass: failures.is_empty(), detail, failures }
}

fn sys(name: &str) -> System {
    load(name).unwrap_or_else(|| panic!("corpus system {name}"))
}

fn term(s: &str, in_sys: &System) -> Term {
    parse_term_in(s, in_sys).unwrap_or_else(|e| panic!("term {s}: {e}"))
}

/// Golden transformations.
pub fn criterion_1() -> CriterionResult {
    let checks = check_goldens();
    let failures: Vec<String> = checks.iter().filter(|c| !c.equal).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    let detail = format!("{}/{} golden files equal modulo renaming", checks.len() - failures.len(), checks.len());
    result(1, "golden transformations", failures, detail)
}

/// Ultra-property report of R2.
pub fn criterion_2() -> CriterionResult {
    let c = classify(&sys("R2"));
    let want = [
        ("non-LV", c.non_lv, true),
        ("non-RV", c.non_rv, true),
        ("U-LL", c.u_ll, false),
        ("U-RL", c.u_rl, false),
        ("U-NE", c.u_ne, false),
        ("Uopt-RL", c.uopt_rl, true),
        ("Uopt-NE", c.uopt_ne, true),
        ("Uopt-LL", c.uopt_ll, false),
    ];
    let failures = want.iter().filter(|(_, got, exp)| got != exp).map(|(n, got, _)| format!("{n} = {got}")).collect();
    result(2, "ultra-properties of R2", failures, "8 exact booleans".into())
}

const PROPS: [Property; 5] = [Property::LL, Property::RL, Property::NE, Property::NonLV, Property::NonRV];
const MODES: [Unraveling; 2] = [Unraveling::U, Unraveling::Uopt];

/// Random rules checked by the characterization cross-check.
pub const RANDOM_RULES: usize = 1000;

/// Direct and syntactic ultra-checks agree.
pub fn criterion_3() -> CriterionResult {
    let mut rules = Vec::new();
    for name in crate::corpus::names() {
        let s = sys(name);
        if s.flavor == Flavor::Oriented {
            rules.extend(s.rules.into_iter().filter(|r| r.is_deterministic() && !r.lhs.is_var()));
        }
    }
    let corpus_rules = rules.len();
    let mut rng = crate::gen::rng(3);
    rules.extend((0..RANDOM_RULES).map(|i| crate::gen::deterministic_rule(&mut rng, &format!("r{i}"), 3, 3)));
    let mut failures = Vec::new();
    let mut checks = 0;
    for r in &rules {
        for p in PROPS {
            for m in MODES {
                checks += 1;
                if ultra_check(r, p, Method::Direct, m) != ultra_check(r, p, Method::Syntactic, m) {
                    failures.push(format!("{} {:?} {:?}: {r}", p.name(), m, r.label));
                }
            }
        }
    }
    failures.truncate(5);
    let detail = format!("{checks} checks over {corpus_rules} corpus and {RANDOM_RULES} random rules");
    result(3, "characterization cross-check", failures, detail)
}

/// A pinned counterexample search.
#[derive(Clone, Debug)]
pub struct PinnedSearch {
    pub system: &'static str,
    pub kind: TransformKind,
    pub start: &'static str,
    /// Expected target, or `None` when no counterexample is expected.
    pub target: Option<&'static str>,
    pub steps: usize,
    pub policy: &'static str,
    pub ev_safe: bool,
    pub extra: &'static [&'static str],
}

/// The corpus-pinned searches, with the T-side step bounds each witness needs.
pub const PINNED: &[PinnedSearch] = &[
    PinnedSearch { system: "R3", kind: TransformKind::Uopt, start: "h(f(a),f(b))", target: Some("A"), steps: 16, policy: "none", ev_safe: false, extra: &[] },
    PinnedSearch { system: "R6", kind: TransformKind::U, start: "h(f(a),f(b))", target: Some("A"), steps: 20, policy: "none", ev_safe: false, extra: &[] },
    PinnedSearch { system: "R6", kind: TransformKind::Uopt, start: "h(f(a),f(b))", target: Some("A"), steps: 20, policy: "none", ev_safe: false, extra: &[] },
    PinnedSearch { system: "R8", kind: TransformKind::Uopt, start: "f(a)", target: Some("c(b,h(b))"), steps: 12, policy: "none", ev_safe: false, extra: &[] },
    PinnedSearch { system: "R10", kind: TransformKind::Uopt, start: "h(f(a),f(b))", target: Some("A"), steps: 12, policy: "none", ev_safe: false, extra: &[] },
    PinnedSearch { system: "R10inv", kind: TransformKind::Uopt, start: "A", target: Some("h(f(a),f(b))"), steps: 12, policy: "none", ev_safe: false, extra: &["a", "b"] },
    PinnedSearch { system: "R4", kind: TransformKind::Uopt, start: "f(a,b)", target: Some("a"), steps: 12, policy: "cs", ev_safe: false, extra: &[] },
    PinnedSearch { system: "R5", kind: TransformKind::Uopt, start: "f(a)", target: Some("b"), steps: 12, policy: "membership", ev_safe: false, extra: &[] },
    PinnedSearch { system: "R10", kind: TransformKind::U, start: "h(f(a),f(b))", target: None, steps: 12, policy: "none", ev_safe: false, extra: &[] },
];

/// Runs a pinned search and checks its expectation; returns (ok, description).
pub fn run_pinned(p: &PinnedSearch) -> (bool, String) {
    let r = sys(p.system);
    let h = match TransformationHandle::build(p.kind, &r) {
        Ok(h) => h,
        Err(e) => return (false, format!("{}/{}: {e}", p.system, p.kind.name())),
    };
    let policy = match p.policy {
        "cs" => Policy::u_context_sensitive(&h.system),
        "membership" => Policy::membership(),
        _ => Policy::full(),
    };
    let mut probe = r.clone();
    probe.vars.clear();
    let cfg = SearchConfig {
        bounds: Bounds { steps: p.steps, ..Bounds::default() },
        policy,
        ev_safe: p.ev_safe,
        extra_constants: p.extra.iter().map(|c| Term::constant(c)).collect(),
        targets: p.target.map(|t| vec![term(t, &probe)]).unwrap_or_default(),
        ..SearchConfig::default()
    };
    let name = format!("({}, {}{}{})", p.system, p.kind.name(), if p.policy != "none" { format!(", {}", p.policy) } else { String::new() }, if p.ev_safe { ", ev-safe" } else { "" });
    let v = match search_unsoundness(&h, &[term(p.start, &probe)], &cfg) {
        Ok(v) => v,
        Err(e) => return (false, format!("{name}: {e}")),
    };
    match (p.target, v.status, &v.counterexample) {
        (Some(t), Status::CounterexampleFound, Some(c)) => match verify_counterexample(&h, c, &cfg) {
            Ok(()) => (true, format!("{name}: {} ->* {t} in {} steps, reference closure {} terms", p.start, c.witness.len(), c.absence.closure.len())),
            Err(e) => (false, format!("{name}: certificate rejected: {e}")),
        },
        (None, Status::NoneWithinBounds, _) => (true, format!("{name}: none within bounds ({} candidates)", v.candidates)),
        (Some(t), Status::NoneWithinBounds, _) => {
            let t = term(t, &probe);
            let s = term(p.start, &probe);
            match crate::lab::reference_check(&r, &s, &t, cfg.r_bounds, &cfg.extra_constants) {
                Ok(()) => (false, format!("{name}: the original system itself reaches {t} from {s}, so the pair is no counterexample")),
                Err(_) => (false, format!("{name}: none within bounds ({} candidates)", v.candidates)),
            }
        }
        _ => (false, format!("{name}: unexpected status {} (unconfirmed {})", v.status.as_str(), v.unconfirmed.len())),
    }
}

/// Counterexample replays.
pub fn criterion_4() -> CriterionResult {
    let runs: Vec<(bool, String)> = PINNED.iter().map(run_pinned).collect();
    let failures = runs.iter().filter(|(ok, _)| !ok).map(|(_, d)| d.clone()).collect();
    let detail = format!("{}/{} pinned searches as expected", runs.iter().filter(|r| r.0).count(), runs.len());
    result(4, "counterexample replays", failures, detail)
}

/// EV-safe reduction flips the inverse-of-R10 verdict.
pub fn criterion_5() -> CriterionResult {
    let r = sys("R10inv");
    let h = TransformationHandle::build(TransformKind::Uopt, &r).expect("Uopt of R10inv");
    let mut probe = r.clone();
    probe.vars.clear();
    let base = SearchConfig {
        extra_constants: vec![Term::constant("a"), Term::constant("b")],
        ..SearchConfig::default()
    };
    let start = [term("A", &probe)];
    let plain = search_unsoundness(&h, &start, &base).map(|v| v.status);
    let safe = search_unsoundness(&h, &start, &SearchConfig { ev_safe: true, ..base.clone() }).map(|v| v.status);
    let mut failures = Vec::new();
    if plain.as_ref().ok() != Some(&Status::CounterexampleFound) {
        failures.push(format!("plain mode: {:?}", plain.as_ref().map(|x| x.as_str())));
    }
    if safe.as_ref().ok() != Some(&Status::NoneWithinBounds) {
        failures.push(format!("ev-safe mode: {:?}", safe.as_ref().map(|x| x.as_str())));
    }
    let show = |s: &Result<Status, crate::lab::LabError>| s.as_ref().map(|x| x.as_str().to_string()).unwrap_or_else(|e| e.to_string());
    result(5, "EV-safe flip", failures, format!("plain {}, ev-safe {}", show(&plain), show(&safe)))
}

/// Random Uopt-NE systems whose inverse can be unraveled.
pub const RANDOM_SYSTEMS: usize = 200;

/// Uopt(R⁻¹) equals Uopt(R)⁻¹ under the pairing U_ρ,i ↔ U_ρ,k−i+1.
pub fn inversion_dual(r: &System) -> Result<bool, String> {
    let inv = r.invert().map_err(|e| e.to_string())?;
    let a = sort_u_vectors(&unravel_uopt(&inv).map_err(|e| e.to_string())?);
    let b = sort_u_vectors(&unravel_uopt(r).map_err(|e| e.to_string())?.invert().map_err(|e| e.to_string())?);
    let mut pairing = BTreeMap::new();
    for rule in r.rules.iter().filter(|x| x.is_conditional()) {
        let k = rule.conds.len();
        for i in 1..=k {
            pairing.insert(u_symbol(&rule.label, i), u_symbol(&rule.label, k - i + 1));
        }
    }
    Ok(equal_under_pairing(&a, &b, &pairing))
}

pub fn criterion_6() -> CriterionResult {
    let mut failures = Vec::new();
    let r8 = sys("R8");
    match inversion_dual(&r8) {
        Ok(true) => {}
        other => failures.push(format!("R8 Uopt duality: {other:?}")),
    }
    let u_dual = (|| -> Result<bool, String> {
        let a = unravel_u(&r8.invert().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let b = unravel_u(&r8).map_err(|e| e.to_string())?.invert().map_err(|e| e.to_string())?;
        Ok(alpha_u_equal(&a, &b))
    })();
    if u_dual != Ok(false) {
        failures.push(format!("R8 U duality should fail: {u_dual:?}"));
    }
    let mut rng = crate::gen::rng(6);
    let (mut found, mut tried) = (0, 0);
    while found < RANDOM_SYSTEMS && tried < 200_000 {
        tried += 1;
        let n = 1 + (tried % 2);
        let s = crate::gen::deterministic_system(&mut rng, n, 3, 2);
        if !s.is_conditional() || !classify(&s).uopt_ne {
            continue;
        }
        match inversion_dual(&s) {
            Err(_) => continue,
            Ok(ok) => {
                found += 1;
                if !ok && failures.len() < 5 {
                    failures.push(format!("random system not dual:\n{}", crate::format::render_system(&s)));
                }
            }
        }
    }
    if found < RANDOM_SYSTEMS {
        failures.push(format!("only {found} random Uopt-NE systems generated"));
    }
    result(6, "inversion duality", failures, format!("R8 plus {found} random Uopt-NE systems ({tried} drawn)"))
}

/// A single simulation equality check.
pub fn simulation(lhs: &System, rhs: &System, c: Construction, phi_src: &System, modulo_identity: bool) -> Result<(), String> {
    let phi = canonical_phi(c, phi_src).map_err(|e| e.to_string())?;
    let v = check_simulation(lhs, rhs, &phi, modulo_identity).map_err(|e| e.to_string())?;
    if !v.equal {
        return Err(format!("{} rules missing, {} extra", v.missing.len(), v.extra.len()));
    }
    if !c.required(&v.flags) {
        return Err(format!("flags {:?}", v.flags));
    }
    Ok(())
}

pub fn criterion_7() -> CriterionResult {
    let mut failures = Vec::new();
    let mut dctrs = 0;
    for name in crate::corpus::names() {
        let r = sys(name);
        if r.flavor != Flavor::Oriented || !r.rules.iter().all(|x| x.is_deterministic()) {
            continue;
        }
        dctrs += 1;
        let res = unravel_uopt(&r)
            .and_then(|a| unravel_u(&r).map(|b| (a, b)))
            .map_err(|e| e.to_string())
            .and_then(|(a, b)| simulation(&a, &b, Construction::UToUopt, &r, false));
        if let Err(e) = res {
            failures.push(format!("u_to_uopt on {name}: {e}"));
        }
    }
    let r12 = sys("R12");
    let r12p = sys("R12p");
    let checks: [(&str, Result<(), String>); 4] = [
        (
            "uj_to_unnorm on R12",
            (|| {
                let lhs = unravel_un_assuming_normal(&norm_transform(&r12).map_err(|e| e.to_string())?, Vector::Lhs)
                    .map_err(|e| e.to_string())?;
                simulation(&lhs, &unravel_uj(&r12).map_err(|e| e.to_string())?, Construction::UjToUnNorm, &r12, false)
            })(),
        ),
        (
            "un_to_uj on R12",
            (|| {
                let lhs = unravel_uj(&r12).map_err(|e| e.to_string())?;
                simulation(&lhs, &unravel_un(&r12p).map_err(|e| e.to_string())?, Construction::UnToUj, &r12p, false)
            })(),
        ),
        (
            "uj_to_udet on R12",
            (|| {
                let lhs = unravel_u(&det_transform(&r12).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                simulation(&lhs, &unravel_uj(&r12).map_err(|e| e.to_string())?, Construction::UjToUdet, &r12, false)
            })(),
        ),
        (
            "u_to_un on R12p",
            (|| {
                let lhs = unravel_un(&r12p).map_err(|e| e.to_string())?;
                simulation(&lhs, &unravel_u(&r12p).map_err(|e| e.to_string())?, Construction::UToUn, &r12p, true)
            })(),
        ),
    ];
    for (name, res) in checks {
        if let Err(e) = res {
            failures.push(format!("{name}: {e}"));
        }
    }
    result(7, "simulation equalities", failures, format!("u_to_uopt over {dctrs} deterministic systems plus 4 R12 checks"))
}

/// The leftmost-innermost SR run on R7.
pub fn criterion_8() -> CriterionResult {
    let r7 = sys("R7");
    let (sr, ctx) = sr_transform(&r7).expect("SR of R7");
    let start = ctx.phi(&term("split(s(0),cons(0,cons(s(s(0)),nil)))", &r7)).expect("phi");
    let nf = term("tp2(cons(0,nil),cons(s(s(0)),nil))", &r7);
    let policy = Policy::full().with_strategy(Strategy::LeftmostInnermostFirstRule);
    let bounds = Bounds { steps: 60, term_size: 80, ..Bounds::default() };
    let mut eng = Engine::new(&sr, bounds, policy.clone(), Universe::default());
    let mut cur = start.clone();
    let mut steps = Vec::new();
    while steps.len() < 60 {
        let Some(s) = eng.successors(&cur).into_iter().next() else { break };
        cur = s.result.clone();
        steps.push(s);
    }
    let d = crate::engine::Derivation { start, steps, start_basic: None };
    let mut failures = Vec::new();
    if !eng.successors(&cur).is_empty() {
        failures.push("no normal form within 60 steps".into());
    }
    if cur != curly(ctx.overline(&nf).expect("overline")) {
        failures.push(format!("ended at {cur}"));
    }
    if ctx.hat(&cur).as_ref() != Some(&nf) || !Engine::simple(&r7, Bounds::default()).successors(&nf).is_empty() {
        failures.push("hat is not the R7 normal form".into());
    }
    if let Err(e) = verify_derivation(&d, &sr, &policy, bounds) {
        failures.push(format!("replay: {e}"));
    }
    result(8, "SR execution on R7", failures, format!("{} leftmost-innermost steps to {cur}", d.len()))
}

/// Start terms split(m, list) for the SR simulation check.
pub fn sr_starts(r7: &System) -> Vec<Term> {
    let nums = ["0", "s(0)", "s(s(0))"];
    let mut lists = vec!["nil".to_string()];
    for a in nums {
        lists.push(format!("cons({a},nil)"));
        for b in nums {
            lists.push(format!("cons({a},cons({b},nil))"));
        }
    }
    nums.iter().flat_map(|m| lists.iter().map(move |l| format!("split({m},{l})"))).map(|s| term(&s, r7)).collect()
}

pub fn criterion_9() -> CriterionResult {
    let r7 = sys("R7");
    let u = unravel_u(&r7).expect("U of R7");
    let (sr, ctx) = sr_transform(&r7).expect("SR of R7");
    let bounds = Bounds { steps: 24, term_size: 60, ..Bounds::default() };
    let h = TransformationHandle::build(TransformKind::U, &r7).expect("U of R7");
    let mut eng = Engine::simple(&u, bounds);
    let (mut total, mut failures) = (0, Vec::new());
    for s in sr_starts(&r7) {
        let reach = eng.reach(&s);
        let targets: Vec<&Term> = reach.terms().filter(|t| h.is_original(t) && **t != s).collect();
        for t in targets {
            total += 1;
            let d = reach.derivation(t).expect("reached");
            if let Err(e) = sr_simulate_u_derivation(&ctx, &sr, &u, &d, bounds) {
                failures.push(format!("{s} ->* {t}: {e}"));
            }
        }
    }
    failures.truncate(5);
    result(9, "SR simulates U on R7", failures, format!("{total} U derivations mapped and verified"))
}

fn original_reach(eng: &mut Engine, start: &Term, original: &BTreeSet<crate::term::Sym>) -> BTreeSet<Term> {
    eng.reach(start).terms().filter(|t| !t.contains_symbol(&|f| !original.contains(f))).cloned().collect()
}

pub fn criterion_10() -> CriterionResult {
    let r12 = sys("R12");
    let norm = norm_transform(&r12).expect("Norm");
    let det = det_transform(&r12).expect("Det");
    let sig = r12.sig();
    let original: BTreeSet<_> = sig.keys().cloned().collect();
    let starts: Vec<Term> = build_universe(&sig, 3, UniverseMode::Original, &[]).into_iter().filter(|t| t.depth() <= 3).collect();
    let bounds = Bounds { steps: 8, ..Bounds::default() };
    let mut er = Engine::simple(&r12, bounds);
    let mut en = Engine::simple(&norm, bounds);
    let mut ed = Engine::simple(&det, bounds);
    let mut failures = Vec::new();
    for s in &starts {
        let a = original_reach(&mut er, s, &original);
        if original_reach(&mut en, s, &original) != a {
            failures.push(format!("Norm differs from {s}"));
        }
        if original_reach(&mut ed, s, &original) != a {
            failures.push(format!("Det differs from {s}"));
        }
    }
    failures.truncate(5);
    result(10, "bounded semantic equalities", failures, format!("{} start terms, steps 8", starts.len()))
}

pub fn criterion_11() -> CriterionResult {
    let r7 = sys("R7");
    let (sr, ctx) = sr_transform(&r7).expect("SR of R7");
    let t = term(
        "curly(split^bar(s(0),cons(0,cons(s(s(0)),nil)),stk2(curly(split^bar(s(0),cons(s(s(0)),nil),bot,bot)),bot),bot))",
        &sr,
    );
    let want = ["1", "1.1", "1.1.1", "1.2", "1.2.1", "1.2.2", "1.2.2.1", "1.2.2.1.1", "1.2.2.1.1.1", "1.2.2.2"];
    let want: BTreeSet<String> = want.iter().map(|s| s.to_string()).collect();
    let got: Option<BTreeSet<String>> = ctx.structural_positions(&t).map(|ps| ps.iter().map(|p| p.to_string()).collect());
    let failures = if got.as_ref() == Some(&want) { vec![] } else { vec![format!("got {got:?}")] };
    result(11, "structural positions", failures, format!("{} positions", got.map_or(0, |g| g.len())))
}

pub fn criterion_12() -> CriterionResult {
    let cases = [
        ("R2", vec!["uopt.sound.ultra-rlne", "u.sound.from-uopt"]),
        ("R7", vec!["uopt.sound.ultra-ll"]),
        ("R10p", vec!["uopt.sound.ultra-rlne"]),
    ];
    let mut failures = Vec::new();
    for (name, ids) in &cases {
        let rep = soundness_condition_report(&sys(name));
        for id in ids {
            if !rep.cites(id) {
                failures.push(format!("{name} does not cite {id}"));
            }
        }
    }
    result(12, "condition report", failures, "R2, R7 and R10p theorem identifiers".into())
}

/// Sub-check failures that are genuine properties of the corpus, keyed by criterion and
/// failure prefix. Each is explained in the decisions ledger.
pub const KNOWN_FAILURES: &[(usize, &str)] = &[
    (4, "(R6, U)"),
    (4, "(R6, Uopt)"),
    (7, "uj_to_unnorm on R12"),
    (7, "un_to_uj on R12"),
];

/// Failures not listed in [`KNOWN_FAILURES`].
pub fn undocumented(results: &[CriterionResult]) -> Vec<String> {
    results
        .iter()
        .flat_map(|r| r.failures.iter().map(move |f| (r.id, f)))
        .filter(|(id, f)| !KNOWN_FAILURES.iter().any(|(k, p)| k == id && f.starts_with(p)))
        .map(|(id, f)| format!("criterion {id}: {f}"))
        .collect()
}

/// Wall-time budget of the whole suite, in seconds.
pub const BUDGET_SECS: f64 = 300.0;

/// Runs criteria 1 to 13 in order; `on_result` sees each result as soon as it is ready.
pub fn run_all(on_result: &mut dyn FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let t0 = Instant::now();
    let checks: [fn() -> CriterionResult; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut out = Vec::new();
    for c in checks {
        let r = c();
        on_result(&r);
        out.push(r);
    }
    let secs = t0.elapsed().as_secs_f64();
    let mut failures = Vec::new();
    if secs > BUDGET_SECS {
        failures.push(format!("took {secs:.0} s"));
    }
    // Wall time is reported separately so the output itself stays deterministic.
    let r = result(13, "suite runs within budget", failures, format!("{} criteria ran", out.len()));
    on_result(&r);
    out.push(r);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria() {
        for c in [criterion_1(), criterion_2(), criterion_8(), criterion_11(), criterion_12()] {
            assert!(c.pass, "{}", c.line());
        }
    }

    #[test]
    fn starts_for_sr() {
        assert_eq!(sr_starts(&sys("R7")).len(), 39);
    }
}
