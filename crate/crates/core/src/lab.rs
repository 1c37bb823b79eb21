//! Bounded soundness experiments: counterexample search with certificates on
//! both sides, comparison of transformations, and the soundness-condition report.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify, ClassificationReport};
use crate::engine::{
    verify_derivation, Bounds, Derivation, Engine, EvState, Policy, Universe, UniverseMode, MAX_STATES,
};
use crate::homo::{det_transform, norm_transform, HomoError};
use crate::sr::{sr_simulate_u_derivation, sr_transform, SrContext, SrError};
use crate::system::{Flavor, Signature, System, SystemError};
use crate::term::{Sym, Term};
use crate::unravel::{unravel_u, unravel_uj, unravel_un, unravel_un_assuming_normal, unravel_uopt, UnravelError, Vector};

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Unravel(#[from] UnravelError),
    #[error(transparent)]
    Homo(#[from] HomoError),
    #[error(transparent)]
    Sr(#[from] SrError),
    #[error("unknown transformation `{0}`")]
    UnknownTransformation(String),
    #[error("start term `{0}` is not over the original signature")]
    BadStart(String),
    #[error("transformations are built from different systems")]
    DifferentOrigin,
    #[error("EV-safe search requires an unconditional transformed system")]
    EvSafeConditional,
}

/// The transformations the lab can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum TransformKind {
    U,
    Uopt,
    Uj,
    Un,
    UnNorm,
    UDet,
    Sr,
}

impl TransformKind {
    pub const ALL: [TransformKind; 7] = [
        TransformKind::U,
        TransformKind::Uopt,
        TransformKind::Uj,
        TransformKind::Un,
        TransformKind::UnNorm,
        TransformKind::UDet,
        TransformKind::Sr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::U => "U",
            TransformKind::Uopt => "Uopt",
            TransformKind::Uj => "UJ",
            TransformKind::Un => "UN",
            TransformKind::UnNorm => "UN-Norm",
            TransformKind::UDet => "U-Det",
            TransformKind::Sr => "SR",
        }
    }

    pub fn parse(s: &str) -> Option<TransformKind> {
        let k = s.to_ascii_lowercase().replace(['_', '∘'], "-");
        Some(match k.as_str() {
            "u" => TransformKind::U,
            "uopt" => TransformKind::Uopt,
            "uj" => TransformKind::Uj,
            "un" => TransformKind::Un,
            "un-norm" | "unnorm" => TransformKind::UnNorm,
            "u-det" | "udet" => TransformKind::UDet,
            "sr" => TransformKind::Sr,
            _ => return None,
        })
    }
}

/// A transformed system together with its translation of original terms.
#[derive(Clone, Debug)]
pub struct TransformationHandle {
    pub kind: TransformKind,
    pub original: System,
    pub system: System,
    pub sr: Option<SrContext>,
    pub sig: Signature,
}

impl TransformationHandle {
    pub fn build(kind: TransformKind, original: &System) -> Result<TransformationHandle, LabError> {
        let mut sr = None;
        let system = match kind {
            TransformKind::U => unravel_u(original)?,
            TransformKind::Uopt => unravel_uopt(original)?,
            TransformKind::Uj => unravel_uj(original)?,
            TransformKind::Un => unravel_un(original)?,
            TransformKind::UnNorm => unravel_un_assuming_normal(&norm_transform(original)?, Vector::Lhs)?,
            TransformKind::UDet => unravel_u(&det_transform(original)?)?,
            TransformKind::Sr => {
                let (s, ctx) = sr_transform(original)?;
                sr = Some(ctx);
                s
            }
        };
        Ok(TransformationHandle { kind, original: original.clone(), sig: original.signature()?, system, sr })
    }

    /// φ: identity, or φ_SR for SR.
    pub fn translate(&self, t: &Term) -> Result<Term, LabError> {
        match &self.sr {
            Some(ctx) => Ok(ctx.phi(t)?),
            None => Ok(t.clone()),
        }
    }

    /// The original term whose translation is `u`, if any.
    pub fn preimage(&self, u: &Term) -> Option<Term> {
        match &self.sr {
            Some(ctx) => {
                let t = ctx.hat(u)?;
                (ctx.phi(&t).ok()? == *u).then_some(t)
            }
            None => self.is_original(u).then(|| u.clone()),
        }
    }

    /// No symbol introduced by the transformation occurs in `t`.
    pub fn is_original(&self, t: &Term) -> bool {
        let sig = self.system.sig();
        !t.contains_symbol(&|f| sig.contains_key(f) && !self.sig.contains_key(f))
    }
}

/// Search configuration; `r_bounds` govern the reference closure of the original system.
#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub bounds: Bounds,
    pub r_bounds: Bounds,
    pub policy: Policy,
    pub ev_safe: bool,
    /// Constants outside the signature available to extra variables on both sides.
    pub extra_constants: Vec<Term>,
    /// When non-empty, only these original terms are considered as targets.
    pub targets: Vec<Term>,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            bounds: Bounds::default(),
            r_bounds: Bounds { level: 6, steps: 24, term_size: 40, ev_depth: 1 },
            policy: Policy::full(),
            ev_safe: false,
            extra_constants: Vec::new(),
            targets: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CounterexampleFound,
    NoneWithinBounds,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::CounterexampleFound => "counterexample_found",
            Status::NoneWithinBounds => "none_within_bounds",
        }
    }
}

/// The explored reference closure of `s` in the original system.
#[derive(Clone, Debug, Serialize)]
pub struct AbsenceCertificate {
    pub closure: Vec<Term>,
    /// No frontier was cut by any bound.
    pub exhaustive: bool,
    /// States discarded because a constructor prefix clashes with the target.
    pub pruned: usize,
    /// The depth-first oracle produced the same closure.
    pub oracle_agrees: bool,
    /// Some condition closure was truncated or drew unbound variables from the universe.
    pub best_effort: bool,
    pub bounds: Bounds,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub start: Term,
    pub target: Term,
    /// A derivation in the transformed system from φ(start) to φ(target).
    pub witness: Derivation,
    pub absence: AbsenceCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessVerdict {
    pub transformation: String,
    pub status: Status,
    pub counterexample: Option<Counterexample>,
    pub bounds: Bounds,
    pub r_bounds: Bounds,
    pub ev_safe: bool,
    pub starts: usize,
    pub candidates: usize,
    /// Candidates absent from a non-exhaustive reference closure; not reported as counterexamples.
    pub unconfirmed: Vec<(Term, Term)>,
    pub truncated: bool,
}

fn foreign_constants(t: &Term, sig: &Signature, out: &mut BTreeSet<Term>) {
    if let Term::App(f, args) = t {
        if args.is_empty() && !sig.contains_key(f) {
            out.insert(t.clone());
        }
        for a in args {
            foreign_constants(a, sig, out);
        }
    }
}

/// Whether `u` can never reach `target`: a constructor prefix of `u` disagrees with it.
fn constructor_clash(u: &Term, target: &Term, defined: &BTreeSet<Sym>) -> bool {
    match (u, target) {
        (Term::App(f, xs), Term::App(g, ys)) if !defined.contains(f) => {
            f != g || xs.len() != ys.len() || xs.iter().zip(ys).any(|(a, b)| constructor_clash(a, b, defined))
        }
        _ => false,
    }
}

struct RefSearch<'a> {
    eng: Engine<'a>,
    defined: BTreeSet<Sym>,
    prune: bool,
}

impl RefSearch<'_> {
    fn keep(&self, u: &Term, target: &Term) -> bool {
        !(self.prune && constructor_clash(u, target, &self.defined))
    }

    /// Breadth-first closure; stops early only when `target` is reached.
    fn bfs(&mut self, s: &Term, target: &Term) -> (Vec<Term>, bool, bool, usize) {
        let b = self.eng.bounds;
        let mut depth: HashMap<Term, usize> = HashMap::from([(s.clone(), 0)]);
        let mut order = vec![s.clone()];
        let mut queue = std::collections::VecDeque::from([s.clone()]);
        let (mut truncated, mut pruned) = (false, 0);
        if s == target {
            return (order, true, false, 0);
        }
        while let Some(t) = queue.pop_front() {
            let d = depth[&t];
            let succ = self.eng.successors(&t);
            if d >= b.steps {
                truncated |= !succ.is_empty();
                continue;
            }
            for st in succ {
                let u = st.result;
                if u.size() > b.term_size {
                    truncated = true;
                    continue;
                }
                if depth.contains_key(&u) {
                    continue;
                }
                if !self.keep(&u, target) {
                    pruned += 1;
                    continue;
                }
                if order.len() >= MAX_STATES {
                    return (order, false, true, pruned);
                }
                depth.insert(u.clone(), d + 1);
                order.push(u.clone());
                if u == *target {
                    return (order, true, truncated, pruned);
                }
                queue.push_back(u);
            }
        }
        (order, false, truncated, pruned)
    }

    /// Depth-first closure with depth relaxation; the independent oracle.
    fn dfs(&mut self, s: &Term, target: &Term) -> BTreeSet<Term> {
        let b = self.eng.bounds;
        let mut best: HashMap<Term, usize> = HashMap::new();
        let mut stack = vec![(s.clone(), 0usize)];
        while let Some((t, d)) = stack.pop() {
            if best.get(&t).is_some_and(|&e| e <= d) {
                continue;
            }
            best.insert(t.clone(), d);
            if d == b.steps || best.len() > MAX_STATES {
                continue;
            }
            for st in self.eng.successors(&t).into_iter().rev() {
                if st.result.size() <= b.term_size && self.keep(&st.result, target) {
                    stack.push((st.result, d + 1));
                }
            }
        }
        best.into_keys().collect()
    }
}

/// Checks whether `target` is reachable from `s` in `sys`; on absence, returns the certificate.
pub fn reference_check(
    sys: &System,
    s: &Term,
    target: &Term,
    bounds: Bounds,
    extra: &[Term],
) -> Result<(), AbsenceCertificate> {
    let universe = Universe::for_system(sys, bounds.ev_depth, UniverseMode::Original, extra);
    let prune = !sys.extended;
    let mut rs = RefSearch { eng: Engine::new(sys, bounds, Policy::full(), universe), defined: sys.defined(), prune };
    let (closure, found, truncated, pruned) = rs.bfs(s, target);
    if found {
        return Ok(());
    }
    let oracle = rs.dfs(s, target);
    let mine: BTreeSet<Term> = closure.iter().cloned().collect();
    Err(AbsenceCertificate {
        oracle_agrees: oracle == mine && !oracle.contains(target),
        exhaustive: !truncated,
        pruned,
        best_effort: rs.eng.best_effort,
        closure,
        bounds,
    })
}

/// Bounded search for (s, t) with φ(s) →* φ(t) in the transformed system but s ↛* t in R.
pub fn search_unsoundness(
    h: &TransformationHandle,
    starts: &[Term],
    cfg: &SearchConfig,
) -> Result<SoundnessVerdict, LabError> {
    let mut starts = starts.to_vec();
    starts.sort();
    starts.dedup();
    let mut extra: BTreeSet<Term> = cfg.extra_constants.iter().cloned().collect();
    for s in starts.iter().chain(&cfg.targets) {
        foreign_constants(s, &h.sig, &mut extra);
    }
    for s in &starts {
        if !h.is_original(s) || s.contains_symbol(&|f| crate::alpha::is_generated(f)) {
            return Err(LabError::BadStart(s.to_string()));
        }
    }
    let extra: Vec<Term> = extra.into_iter().collect();
    let universe = Universe::for_system(&h.system, cfg.bounds.ev_depth, UniverseMode::Full, &extra);
    let mut eng = Engine::new(&h.system, cfg.bounds, cfg.policy.clone(), universe);
    let mut verdict = SoundnessVerdict {
        transformation: h.kind.name().to_string(),
        status: Status::NoneWithinBounds,
        counterexample: None,
        bounds: cfg.bounds,
        r_bounds: cfg.r_bounds,
        ev_safe: cfg.ev_safe,
        starts: starts.len(),
        candidates: 0,
        unconfirmed: Vec::new(),
        truncated: false,
    };
    let targets: BTreeSet<Term> = cfg.targets.iter().cloned().collect();
    let wanted = |u: &Term| -> Option<Term> {
        let t = h.preimage(u)?;
        (targets.is_empty() || targets.contains(&t)).then_some(t)
    };
    let single_target = targets.len() == 1;
    for s in &starts {
        let phi_s = h.translate(s)?;
        let stop = |u: &Term| single_target && wanted(u).is_some_and(|t| t != *s);
        // (image term, derivation) candidates in canonical order
        let mut found: BTreeMap<Term, Derivation> = BTreeMap::new();
        if cfg.ev_safe {
            if h.system.is_conditional() {
                return Err(LabError::EvSafeConditional);
            }
            let r = eng.ev_safe_reach(&EvState::initial(&phi_s), Some(&stop)).map_err(|_| LabError::EvSafeConditional)?;
            verdict.truncated |= r.truncated;
            for u in r.terms() {
                if let Some(t) = wanted(&u).filter(|t| t != s) {
                    found.entry(t).or_insert_with(|| r.derivation(&u).expect("reached term"));
                }
            }
        } else {
            let r = eng.reach_until(&phi_s, &stop);
            verdict.truncated |= r.truncated;
            for u in r.terms() {
                if let Some(t) = wanted(u).filter(|t| t != s) {
                    found.entry(t).or_insert_with(|| r.derivation(u).expect("reached term"));
                }
            }
        }
        for (t, witness) in found {
            verdict.candidates += 1;
            match reference_check(&h.original, s, &t, cfg.r_bounds, &extra) {
                Ok(()) => {}
                Err(cert) if cert.exhaustive => {
                    verdict.status = Status::CounterexampleFound;
                    verdict.counterexample = Some(Counterexample { start: s.clone(), target: t, witness, absence: cert });
                    return Ok(verdict);
                }
                Err(_) => verdict.unconfirmed.push((s.clone(), t)),
            }
        }
    }
    Ok(verdict)
}

/// Re-checks a counterexample: the witness replays and the certificate is exhaustive and oracle-confirmed.
pub fn verify_counterexample(h: &TransformationHandle, c: &Counterexample, cfg: &SearchConfig) -> Result<(), String> {
    if c.witness.start != h.translate(&c.start).map_err(|e| e.to_string())? {
        return Err("witness does not start at the translated start term".into());
    }
    if h.preimage(c.witness.end()).as_ref() != Some(&c.target) {
        return Err("witness does not end at the translated target".into());
    }
    verify_derivation(&c.witness, &h.system, &cfg.policy, cfg.bounds).map_err(|e| e.to_string())?;
    if !c.absence.exhaustive || !c.absence.oracle_agrees || c.absence.closure.contains(&c.target) {
        return Err("absence certificate is not exhaustive or not confirmed".into());
    }
    Ok(())
}

/// One original-term pair realized by the first transformation but not by the second.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub start: Term,
    pub target: Term,
    pub witness: Derivation,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub first: String,
    pub second: String,
    pub pairs: usize,
    pub violations: Vec<Violation>,
    /// Pairs established by mapping a U derivation into SR.
    pub simulated: usize,
    pub truncated: bool,
}

/// Bounded check that every original pair realized by `t1` is realized by `t2`
/// (the second side gets twice the step bound).
pub fn compare_transformations(
    t1: &TransformationHandle,
    t2: &TransformationHandle,
    starts: &[Term],
    bounds: Bounds,
) -> Result<ComparisonReport, LabError> {
    if !crate::alpha::equal_modulo_vars(&t1.original, &t2.original) {
        return Err(LabError::DifferentOrigin);
    }
    let b2 = Bounds { steps: bounds.steps * 2, ..bounds };
    let mut e1 = Engine::new(&t1.system, bounds, Policy::full(), Universe::for_system(&t1.system, bounds.ev_depth, UniverseMode::Full, &[]));
    let mut e2 = Engine::new(&t2.system, b2, Policy::full(), Universe::for_system(&t2.system, b2.ev_depth, UniverseMode::Full, &[]));
    let mut report = ComparisonReport {
        first: t1.kind.name().into(),
        second: t2.kind.name().into(),
        pairs: 0,
        violations: Vec::new(),
        simulated: 0,
        truncated: false,
    };
    for s in starts {
        let r1 = e1.reach(&t1.translate(s)?);
        let r2 = e2.reach(&t2.translate(s)?);
        report.truncated |= r1.truncated || r2.truncated;
        let mut targets: Vec<(Term, &Term)> = r1.terms().filter_map(|u| t1.preimage(u).map(|t| (t, u))).collect();
        targets.sort();
        for (t, u) in targets {
            report.pairs += 1;
            if r2.contains(&t2.translate(&t)?) {
                continue;
            }
            let witness = r1.derivation(u).expect("reached term");
            if let (TransformKind::U, Some(ctx)) = (t1.kind, &t2.sr) {
                if sr_simulate_u_derivation(ctx, &t2.system, &t1.system, &witness, b2).is_ok() {
                    report.simulated += 1;
                    continue;
                }
            }
            report.violations.push(Violation { start: s.clone(), target: t, witness });
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Holds,
    Fails,
    Undecided,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    /// The condition guarantees soundness.
    Sufficient,
    /// The condition is known not to guarantee soundness on its own.
    Insufficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionRow {
    pub transformation: &'static str,
    pub kind: RowKind,
    pub id: &'static str,
    pub condition: &'static str,
    pub status: RowStatus,
}

/// Advisory evidence for the confluence rows: bounded joinability of unconditional critical pairs.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPairEvidence {
    pub total: usize,
    pub unconditional: usize,
    pub joinable_within_bounds: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub classification: ClassificationReport,
    pub rows: Vec<ConditionRow>,
    /// Per transformation, the sufficient rows whose condition holds.
    pub applies: BTreeMap<String, Vec<String>>,
    /// Per transformation, the insufficient rows whose condition holds.
    pub insufficient_matches: BTreeMap<String, Vec<String>>,
    pub registry: Option<String>,
    pub critical_pairs: CriticalPairEvidence,
}

impl ConditionReport {
    pub fn cites(&self, id: &str) -> bool {
        self.applies.values().any(|v| v.iter().any(|x| x == id))
    }
}

/// Corpus systems with a known soundness status, matched modulo renaming.
pub const REGISTRY: &[(&str, &str)] = &[
    ("R3", "known unsound family: neither U nor Uopt is sound"),
    ("R3p", "open question: soundness of U is not known; UN is unsound"),
    ("R4", "Uopt unsound even under context-sensitive reduction"),
    ("R5", "Uopt unsound even under the membership restriction"),
    ("R6", "known unsound family: left-linear, neither U nor Uopt is sound"),
    ("R8", "known unsound family: neither U nor Uopt is sound"),
    ("R10", "Uopt unsound, U sound"),
    ("R10inv", "Uopt unsound unless reduction is EV-safe"),
];

fn registry_tag(sys: &System) -> Option<String> {
    REGISTRY.iter().find_map(|(name, tag)| {
        let known = crate::corpus::load(name)?;
        crate::alpha::equal_modulo_vars(&known, sys).then(|| format!("{name}: {tag}"))
    })
}

fn cp_evidence(sys: &System) -> CriticalPairEvidence {
    let cps = crate::cp::critical_pairs(sys);
    let ru = sys.underlying();
    let bounds = Bounds { level: 1, steps: 6, term_size: 30, ev_depth: 0 };
    let mut eng = Engine::simple(&ru, bounds);
    let unconditional: Vec<_> = cps.iter().filter(|c| c.conds.is_empty()).collect();
    let joinable = unconditional
        .iter()
        .filter(|c| {
            let a: BTreeSet<Term> = eng.reach(&c.pair.0).terms().cloned().collect();
            eng.reach(&c.pair.1).terms().any(|t| a.contains(t))
        })
        .count();
    CriticalPairEvidence { total: cps.len(), unconditional: unconditional.len(), joinable_within_bounds: joinable }
}

/// Evaluates the decidable soundness conditions and lists which results apply.
pub fn soundness_condition_report(sys: &System) -> ConditionReport {
    use RowKind::*;
    let c = classify(sys);
    let det = c.deterministic;
    let oriented = sys.flavor == Flavor::Oriented;
    let join = sys.flavor == Flavor::Join;
    let st = |b: bool| if b { RowStatus::Holds } else { RowStatus::Fails };
    let when = |applicable: bool, s: RowStatus| if applicable { s } else { RowStatus::NotApplicable };
    let undecided_if = |b: bool| if b { RowStatus::Undecided } else { RowStatus::Fails };
    let row = |transformation, kind, id, condition, status| ConditionRow { transformation, kind, id, condition, status };
    let dctrs = oriented && det;

    let mut rows = vec![
        row("Uopt", Sufficient, "uopt.sound.ultra-ll", "Uopt-LL 3-DCTRS", when(dctrs, st(c.uopt_ll && c.system_type <= 3))),
        row(
            "Uopt",
            Sufficient,
            "uopt.sound.ultra-rlne",
            "Uopt-RL and Uopt-NE, non-LV or non-RV",
            when(dctrs, st(c.uopt_rl && c.uopt_ne && (c.non_lv || c.non_rv))),
        ),
        row(
            "Uopt",
            Sufficient,
            "uopt.sound.ne-rsep-type2",
            "Uopt-NE, right-separated, 2-DCTRS",
            when(dctrs, st(c.uopt_ne && c.right_separated && c.system_type <= 2)),
        ),
        row("Uopt", Insufficient, "uopt.insufficient.ll", "left-linear", when(dctrs, st(c.ll))),
        row("Uopt", Insufficient, "uopt.insufficient.ultra-ne", "Uopt-NE", when(dctrs, st(c.uopt_ne))),
        row("Uopt", Insufficient, "uopt.insufficient.wll", "weakly left-linear", when(dctrs, st(c.wll_3dctrs))),
        row("Uopt", Insufficient, "uopt.insufficient.ultra-rl", "Uopt-RL", when(dctrs, st(c.uopt_rl))),
        row("Uopt", Insufficient, "uopt.insufficient.confluence", "confluent", when(dctrs, RowStatus::Undecided)),
    ];
    let uopt_applies = rows.iter().any(|r| r.kind == Sufficient && r.status == RowStatus::Holds);

    let normal = oriented && c.normal;
    let un_rows = [
        row("UN", Sufficient, "un.sound.wll-normal1", "weakly left-linear normal 1-CTRS", when(normal, st(c.wll_normal1))),
        row("UN", Sufficient, "un.sound.ll", "left-linear", when(normal, st(c.ll))),
        row("UN", Sufficient, "un.sound.ne", "non-erasing", when(normal, st(c.ne))),
        row("UN", Sufficient, "un.sound.ground-conditional", "ground conditional", when(normal, st(c.ground_conditional))),
        row("UN", Sufficient, "un.sound.confluence", "confluent", when(normal, RowStatus::Undecided)),
        row("UN", Sufficient, "un.sound.from-uj", "UJ sound for the join reading", when(normal, RowStatus::Undecided)),
        row("UN", Insufficient, "un.insufficient.constructor", "constructor system", when(normal, st(c.constructor_system))),
        row("UN", Insufficient, "un.insufficient.overlay", "overlay system", when(normal, st(c.overlay))),
        row("UN", Insufficient, "un.insufficient.non-rv", "non-RV", when(normal, st(c.non_rv))),
        row("UN", Insufficient, "un.insufficient.rl", "right-linear", when(normal, st(c.rl))),
        row("UN", Insufficient, "un.insufficient.non-overlapping", "non-overlapping", when(normal, st(c.non_overlapping))),
    ];
    let un_applies = un_rows.iter().any(|r| r.kind == Sufficient && r.status == RowStatus::Holds);

    let sr_ok = dctrs && !sys.extended;
    let sr_rows = [
        row("SR", Sufficient, "sr.sound.ultra-ll", "Uopt-LL 3-DCTRS", when(sr_ok, st(c.uopt_ll && c.system_type <= 3))),
        row("SR", Sufficient, "sr.sound.confluence", "confluent", when(sr_ok, RowStatus::Undecided)),
        row("SR", Insufficient, "sr.insufficient.ll", "left-linear", when(sr_ok, st(c.ll))),
    ];
    let sr_applies = sr_rows.iter().any(|r| r.kind == Sufficient && r.status == RowStatus::Holds);

    rows.extend([
        row("U", Sufficient, "u.sound.from-uopt", "Uopt sound by a sufficient row", when(dctrs, st(uopt_applies))),
        row("U", Sufficient, "u.sound.ultra-ll", "Uopt-LL 3-DCTRS", when(dctrs, st(c.uopt_ll && c.system_type <= 3))),
        row("U", Sufficient, "u.sound.ultra-rl", "U-RL", when(dctrs, st(c.u_rl))),
        row("U", Sufficient, "u.sound.wll", "weakly left-linear 3-DCTRS", when(dctrs, st(c.wll_3dctrs && c.system_type <= 3))),
        row("U", Sufficient, "u.sound.confluence-right-stable", "confluent and right-stable", when(dctrs, undecided_if(c.right_stable))),
        row("U", Sufficient, "u.sound.from-un", "normal and UN sound by a sufficient row", when(dctrs, st(normal && un_applies))),
        row("U", Sufficient, "u.sound.from-sr", "SR sound by a sufficient row", when(dctrs, st(sr_applies))),
        row("U", Insufficient, "u.insufficient.confluence", "confluent", when(dctrs, RowStatus::Undecided)),
        row("U", Insufficient, "u.insufficient.ultra-ne", "U-NE", when(dctrs, st(c.u_ne))),
    ]);
    rows.extend([
        row("UJ", Sufficient, "uj.sound.ll-join3", "left-linear join 3-CTRS", when(join, st(c.ll && c.system_type <= 3))),
        row("UJ", Sufficient, "uj.sound.from-un-norm", "UN sound for Norm(R)", when(join, RowStatus::Undecided)),
        row("UJ", Sufficient, "uj.sound.from-un", "UN sound for the oriented reading", when(join, RowStatus::Undecided)),
        row("UJ", Sufficient, "uj.sound.from-udet", "U sound for Det(R)", when(join, RowStatus::Undecided)),
    ]);
    rows.extend(un_rows);
    rows.extend(sr_rows);

    let mut applies: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut insufficient_matches: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in &rows {
        if r.status == RowStatus::Holds {
            let m = if r.kind == Sufficient { &mut applies } else { &mut insufficient_matches };
            m.entry(r.transformation.to_string()).or_default().push(r.id.to_string());
        }
    }
    ConditionReport {
        classification: c,
        rows,
        applies,
        insufficient_matches,
        registry: registry_tag(sys),
        critical_pairs: cp_evidence(sys),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load;
    use crate::format::parse_term_in;

    fn t(s: &str, sys: &System) -> Term {
        parse_term_in(s, sys).unwrap()
    }

    #[test]
    fn r3_uopt_counterexample() {
        let r3 = load("R3").unwrap();
        let h = TransformationHandle::build(TransformKind::Uopt, &r3).unwrap();
        let bounds = Bounds { steps: 16, ..Bounds::default() };
        let cfg = SearchConfig { bounds, targets: vec![t("A", &r3)], ..SearchConfig::default() };
        let v = search_unsoundness(&h, &[t("h(f(a),f(b))", &r3)], &cfg).unwrap();
        assert_eq!(v.status, Status::CounterexampleFound, "{:?}", v.unconfirmed);
        assert_eq!(v.counterexample.as_ref().unwrap().witness.len(), 15);
        let c = v.counterexample.as_ref().unwrap();
        verify_counterexample(&h, c, &cfg).unwrap();
    }

    #[test]
    fn r10_u_has_none() {
        let r10 = load("R10").unwrap();
        let h = TransformationHandle::build(TransformKind::U, &r10).unwrap();
        let v = search_unsoundness(&h, &[t("h(f(a),f(b))", &r10)], &SearchConfig::default()).unwrap();
        assert_eq!(v.status, Status::NoneWithinBounds);
    }

    #[test]
    fn compare_same_is_clean() {
        let r7 = load("R7").unwrap();
        let h = TransformationHandle::build(TransformKind::Uopt, &r7).unwrap();
        let rep = compare_transformations(&h, &h, &[t("split(0,cons(0,nil))", &r7)], Bounds::default()).unwrap();
        assert!(rep.violations.is_empty());
        assert!(rep.pairs > 0);
    }

    #[test]
    fn empty_system_report() {
        let rep = soundness_condition_report(&System::default());
        for r in rep.rows.iter().filter(|r| r.kind == RowKind::Sufficient && r.status != RowStatus::Undecided) {
            if r.status != RowStatus::NotApplicable && r.id != "u.sound.from-un" {
                assert_eq!(r.status, RowStatus::Holds, "{}", r.id);
            }
        }
    }

    #[test]
    fn constructor_clash_pruning() {
        let r = load("R7").unwrap();
        let d = r.defined();
        assert!(constructor_clash(&t("cons(0,nil)", &r), &t("nil", &r), &d));
        assert!(!constructor_clash(&t("split(0,nil)", &r), &t("nil", &r), &d));
        assert!(constructor_clash(&t("tp2(s(0),nil)", &r), &t("tp2(0,nil)", &r), &d));
    }
}
