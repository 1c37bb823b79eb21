//! Bounded reduction: unconditional rewriting with extra-variable instantiation,
//! level-bounded conditional rewriting, parallel and EV-safe reduction, and replay.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

use crate::alpha::is_generated;
use crate::system::{Flavor, Rule, Signature, System};
use crate::term::{match_into, match_term, PosKind, Position, Subst, Sym, Term};
use crate::unravel::is_u_symbol;

/// Search limits; every search terminates within them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// The n of →₍ₙ₎: conditional rules need level ≥ 1 and evaluate conditions at n − 1.
    pub level: usize,
    /// Maximum number of rewrite steps per search.
    pub steps: usize,
    /// Maximum node count of any explored term.
    pub term_size: usize,
    /// Depth of the universe used to instantiate unbound variables.
    pub ev_depth: usize,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { level: 4, steps: 12, term_size: 40, ev_depth: 1 }
    }
}

/// A search node: state, (parent index, step from the parent), distance.
type Node<S> = (S, Option<(usize, Step)>, usize);

/// A memoized condition closure and whether it was truncated.
type Closure = (Vec<Term>, bool);

/// Cap on explored states per closure, a safety net below the other bounds.
pub const MAX_STATES: usize = 400_000;

/// Where rewriting may take place.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Restriction {
    #[default]
    None,
    /// Replacement map μ: argument indices (1-based) that may be descended into; unlisted symbols allow all.
    ContextSensitive(BTreeMap<Sym, BTreeSet<usize>>),
    /// Forbid redexes with a proper subterm containing a U symbol.
    Membership,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Strategy {
    #[default]
    Full,
    /// Only the leftmost-innermost redex is contracted (by any applicable rule).
    LeftmostInnermost,
    /// Leftmost-innermost, contracting with the first applicable rule in rule order.
    LeftmostInnermostFirstRule,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Policy {
    pub restriction: Restriction,
    pub strategy: Strategy,
}

impl Policy {
    pub fn full() -> Policy {
        Policy::default()
    }

    /// μ(U) = {1} for every U symbol of `sys`.
    pub fn u_context_sensitive(sys: &System) -> Policy {
        let map = sys
            .sig()
            .into_keys()
            .filter(|f| is_u_symbol(f))
            .map(|f| (f, BTreeSet::from([1])))
            .collect();
        Policy { restriction: Restriction::ContextSensitive(map), strategy: Strategy::Full }
    }

    pub fn membership() -> Policy {
        Policy { restriction: Restriction::Membership, strategy: Strategy::Full }
    }

    pub fn with_strategy(mut self, s: Strategy) -> Policy {
        self.strategy = s;
        self
    }

    /// Whether `p` in `t` lies on an allowed path.
    pub fn position_allowed(&self, t: &Term, p: &Position) -> bool {
        match &self.restriction {
            Restriction::ContextSensitive(mu) => {
                let mut cur = t;
                for &i in &p.0 {
                    let Term::App(f, args) = cur else { return false };
                    if let Some(allowed) = mu.get(f) {
                        if !allowed.contains(&i) {
                            return false;
                        }
                    }
                    match args.get(i - 1) {
                        Some(a) => cur = a,
                        None => return false,
                    }
                }
                true
            }
            _ => true,
        }
    }

    /// Whether the redex `r` may be contracted.
    pub fn redex_allowed(&self, r: &Term) -> bool {
        match self.restriction {
            Restriction::Membership => !r.args().iter().any(|a| a.contains_symbol(&is_u_symbol)),
            _ => true,
        }
    }
}

/// Which symbols populate the universe for unbound variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum UniverseMode {
    /// Symbols of the original signature (generated symbols excluded).
    #[default]
    Original,
    /// Every symbol of the system, generated ones included.
    Full,
}

/// Ground terms up to `depth` over a signature, plus extra constants, in canonical order.
pub fn build_universe(sig: &Signature, depth: usize, mode: UniverseMode, extra: &[Term]) -> Vec<Term> {
    const CAP: usize = 5000;
    let syms: Vec<(&Sym, usize)> = sig
        .iter()
        .filter(|(f, _)| mode == UniverseMode::Full || !is_generated(f))
        .map(|(f, n)| (f, *n))
        .collect();
    let mut all: BTreeSet<Term> = extra.iter().cloned().collect();
    all.extend(syms.iter().filter(|(_, n)| *n == 0).map(|(f, _)| Term::App((*f).clone(), vec![])));
    for _ in 0..depth {
        let base: Vec<Term> = all.iter().cloned().collect();
        for (f, n) in &syms {
            if *n == 0 {
                continue;
            }
            let mut tuples: Vec<Vec<Term>> = vec![vec![]];
            for _ in 0..*n {
                let mut next = Vec::new();
                for t in &tuples {
                    for b in &base {
                        let mut u = t.clone();
                        u.push(b.clone());
                        next.push(u);
                        if next.len() > CAP {
                            break;
                        }
                    }
                }
                tuples = next;
            }
            for args in tuples {
                all.insert(Term::App((*f).clone(), args));
                if all.len() > CAP {
                    break;
                }
            }
        }
    }
    let mut v: Vec<Term> = all.into_iter().collect();
    v.sort_by(|a, b| a.size().cmp(&b.size()).then(a.cmp(b)));
    v
}

/// Universe configuration carried by an engine.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    pub terms: Vec<Term>,
}

impl Universe {
    pub fn for_system(sys: &System, depth: usize, mode: UniverseMode, extra: &[Term]) -> Universe {
        Universe { terms: build_universe(&sys.sig(), depth, mode, extra) }
    }
}

/// One recorded rewrite step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub term: Term,
    pub pos: Position,
    pub rule: String,
    pub subst: Subst,
    pub result: Term,
    /// Basic positions after the step (EV-safe derivations only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basic: Option<Vec<Position>>,
}

/// A replayable derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub start: Term,
    pub steps: Vec<Step>,
    /// Initial basic positions (EV-safe derivations only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_basic: Option<Vec<Position>>,
}

impl Derivation {
    pub fn empty(start: Term) -> Derivation {
        Derivation { start, steps: Vec::new(), start_basic: None }
    }

    pub fn end(&self) -> &Term {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn terms(&self) -> Vec<&Term> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.result)).collect()
    }
}

/// Result of a bounded closure.
#[derive(Clone, Debug)]
pub struct Reach {
    nodes: Vec<Node<Term>>,
    index: HashMap<Term, usize>,
    /// Some frontier was cut by the step, size or state bound; absence claims are lower-bound only.
    pub truncated: bool,
}

impl Reach {
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.nodes.iter().map(|n| &n.0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }

    /// Number of steps of the shortest recorded path to `t`.
    pub fn distance(&self, t: &Term) -> Option<usize> {
        self.index.get(t).map(|&i| self.nodes[i].2)
    }

    /// The recorded shortest derivation from the start to `t`.
    pub fn derivation(&self, t: &Term) -> Option<Derivation> {
        let mut i = *self.index.get(t)?;
        let mut steps = Vec::new();
        while let Some((p, s)) = &self.nodes[i].1 {
            steps.push(s.clone());
            i = *p;
        }
        steps.reverse();
        Some(Derivation { start: self.nodes[0].0.clone(), steps, start_basic: None })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("operation requires an unconditional system")]
    Conditional,
}

/// A bounded rewriting engine over one system; memoizes condition closures.
pub struct Engine<'a> {
    pub sys: &'a System,
    pub bounds: Bounds,
    pub policy: Policy,
    pub universe: Universe,
    memo: HashMap<(Term, usize), Rc<Closure>>,
    /// Set when a condition closure was truncated or a variable had to be drawn from the universe.
    pub best_effort: bool,
}

fn ev_of(r: &Rule) -> BTreeSet<Sym> {
    r.vars().difference(&r.lhs.vars()).cloned().collect()
}

/// Extends σ to every variable in `vars` using universe elements (cartesian product).
fn instantiate(sigma: Subst, vars: &[Sym], universe: &[Term]) -> Vec<Subst> {
    let mut out = vec![sigma];
    for x in vars {
        let mut next = Vec::new();
        for s in &out {
            if s.get(x).is_some() {
                next.push(s.clone());
                continue;
            }
            for u in universe {
                let mut s2 = s.clone();
                s2.insert(x.clone(), u.clone());
                next.push(s2);
            }
        }
        out = next;
    }
    out
}

fn unbound(t: &Term, s: &Subst) -> Vec<Sym> {
    t.vars_ordered().into_iter().filter(|x| s.get(x).is_none()).collect()
}

impl<'a> Engine<'a> {
    pub fn new(sys: &'a System, bounds: Bounds, policy: Policy, universe: Universe) -> Engine<'a> {
        Engine { sys, bounds, policy, universe, memo: HashMap::new(), best_effort: false }
    }

    /// An engine with the default universe over the system's original signature.
    pub fn simple(sys: &'a System, bounds: Bounds) -> Engine<'a> {
        let u = Universe::for_system(sys, bounds.ev_depth, UniverseMode::Original, &[]);
        Engine::new(sys, bounds, Policy::full(), u)
    }

    fn level_for(&self, r: &Rule, level: usize) -> bool {
        // Unconditional systems are ordinary TRSs: their rules need no level.
        let _ = r;
        !self.sys.is_conditional() || level >= 1
    }

    /// All substitutions under which rule `r` fires on `redex` at `level`.
    fn rule_substs(&mut self, r: &Rule, redex: &Term, level: usize) -> Vec<Subst> {
        if !self.level_for(r, level) {
            return Vec::new();
        }
        let Some(sigma) = match_term(&r.lhs, redex) else { return Vec::new() };
        let mut sols = vec![sigma];
        for c in &r.conds {
            let mut next = Vec::new();
            for s in sols {
                next.extend(self.solve_condition(&c.lhs, &c.rhs, s, level - 1));
            }
            sols = next;
            if sols.is_empty() {
                return sols;
            }
        }
        let ev = ev_of(r);
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for s in sols {
            let free: Vec<Sym> = ev.iter().filter(|x| s.get(x).is_none()).cloned().collect();
            for s2 in instantiate(s, &free, &self.universe.terms) {
                if seen.insert(format!("{s2}")) {
                    out.push(s2);
                }
            }
        }
        out
    }

    fn solve_condition(&mut self, s: &Term, t: &Term, sigma: Subst, level: usize) -> Vec<Subst> {
        let free_s = unbound(s, &sigma);
        if !free_s.is_empty() {
            self.best_effort = true;
        }
        let mut out = Vec::new();
        for s1 in instantiate(sigma, &free_s, &self.universe.terms.clone()) {
            let src = s.apply(&s1);
            let reach = self.closure(&src, level);
            match self.sys.flavor {
                Flavor::Oriented => {
                    for u in &reach.0 {
                        let mut s2 = s1.clone();
                        if match_into(t, u, &mut s2) {
                            out.push(s2);
                        }
                    }
                }
                Flavor::Join => {
                    let free_t = unbound(t, &s1);
                    if !free_t.is_empty() {
                        self.best_effort = true;
                    }
                    for s2 in instantiate(s1.clone(), &free_t, &self.universe.terms.clone()) {
                        let tgt = t.apply(&s2);
                        let other = self.closure(&tgt, level);
                        let mine: HashSet<&Term> = reach.0.iter().collect();
                        if other.0.iter().any(|u| mine.contains(u)) {
                            out.push(s2);
                        }
                    }
                }
            }
        }
        out
    }

    /// Memoized closure at a level, used for conditions.
    fn closure(&mut self, t: &Term, level: usize) -> Rc<(Vec<Term>, bool)> {
        let key = (t.clone(), level);
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        // Conditions are evaluated with unrestricted reduction.
        let saved = std::mem::take(&mut self.policy);
        let r = self.reach_at(t, level, None);
        self.policy = saved;
        if r.truncated {
            self.best_effort = true;
        }
        let out = Rc::new((r.nodes.into_iter().map(|n| n.0).collect(), r.truncated));
        self.memo.insert(key, out.clone());
        out
    }

    /// Successor steps at a single position.
    fn steps_at(&mut self, t: &Term, p: &Position, level: usize, first_rule_only: bool) -> Vec<Step> {
        let redex = t.subterm(p).expect("position of t").clone();
        if redex.is_var() || !self.policy.redex_allowed(&redex) {
            return Vec::new();
        }
        let mut out = Vec::new();
        for r in &self.sys.rules {
            if !r.lhs.is_var() && r.lhs.root() != redex.root() {
                continue;
            }
            let substs = self.rule_substs(r, &redex, level);
            for s in substs {
                let result = t.replace_at(p, r.rhs.apply(&s)).expect("position of t");
                out.push(Step { term: t.clone(), pos: p.clone(), rule: r.label.to_string(), subst: s, result, basic: None });
            }
            if first_rule_only && !out.is_empty() {
                break;
            }
        }
        out
    }

    /// One-step successors of `t` at the engine's level.
    pub fn successors(&mut self, t: &Term) -> Vec<Step> {
        self.successors_at(t, self.bounds.level)
    }

    /// One-step successors of `t` at `level`, honouring the policy.
    pub fn successors_at(&mut self, t: &Term, level: usize) -> Vec<Step> {
        match self.policy.strategy {
            Strategy::Full => {
                let mut out = Vec::new();
                for p in t.positions(PosKind::Function) {
                    if self.policy.position_allowed(t, &p) {
                        out.extend(self.steps_at(t, &p, level, false));
                    }
                }
                out
            }
            Strategy::LeftmostInnermost | Strategy::LeftmostInnermostFirstRule => {
                let first = self.policy.strategy == Strategy::LeftmostInnermostFirstRule;
                for p in innermost_order(t) {
                    if !self.policy.position_allowed(t, &p) {
                        continue;
                    }
                    let s = self.steps_at(t, &p, level, first);
                    if !s.is_empty() {
                        return s;
                    }
                }
                Vec::new()
            }
        }
    }

    /// Bounded breadth-first closure from `from` at the engine's level.
    pub fn reach(&mut self, from: &Term) -> Reach {
        self.reach_at(from, self.bounds.level, None)
    }

    /// Closure that stops as soon as a term satisfying `stop` is found.
    pub fn reach_until(&mut self, from: &Term, stop: &dyn Fn(&Term) -> bool) -> Reach {
        self.reach_at(from, self.bounds.level, Some(stop))
    }

    fn reach_at(&mut self, from: &Term, level: usize, stop: Option<&dyn Fn(&Term) -> bool>) -> Reach {
        let mut reach = Reach { nodes: vec![(from.clone(), None, 0)], index: HashMap::new(), truncated: false };
        reach.index.insert(from.clone(), 0);
        if stop.is_some_and(|f| f(from)) {
            return reach;
        }
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (t, d) = (reach.nodes[i].0.clone(), reach.nodes[i].2);
            let succ = self.successors_at(&t, level);
            if d >= self.bounds.steps {
                if !succ.is_empty() {
                    reach.truncated = true;
                }
                continue;
            }
            for s in succ {
                if s.result.size() > self.bounds.term_size {
                    reach.truncated = true;
                    continue;
                }
                if reach.index.contains_key(&s.result) {
                    continue;
                }
                if reach.nodes.len() >= MAX_STATES {
                    reach.truncated = true;
                    return reach;
                }
                let j = reach.nodes.len();
                let hit = stop.is_some_and(|f| f(&s.result));
                reach.index.insert(s.result.clone(), j);
                reach.nodes.push((s.result.clone(), Some((i, s)), d + 1));
                if hit {
                    return reach;
                }
                queue.push_back(j);
            }
        }
        reach
    }

    /// EV-safe one-step successors: only basic positions are contracted.
    pub fn ev_safe_successors(&mut self, state: &EvState) -> Result<Vec<(EvState, Step)>, EngineError> {
        if self.sys.is_conditional() {
            return Err(EngineError::Conditional);
        }
        let mut out = Vec::new();
        for p in state.term.positions(PosKind::Function) {
            if !state.basic.contains(&p) || !self.policy.position_allowed(&state.term, &p) {
                continue;
            }
            for mut s in self.steps_at(&state.term, &p, self.bounds.level, false) {
                let r = self.sys.rules.iter().find(|r| *r.label == *s.rule).expect("rule of step");
                let basic = next_basic(&state.basic, &p, r);
                s.basic = Some(basic.iter().cloned().collect());
                out.push((EvState { term: s.result.clone(), basic }, s));
            }
        }
        Ok(out)
    }

    /// Bounded EV-safe closure; returns reachable terms (with any basic set) and derivations.
    pub fn ev_safe_reach(&mut self, start: &EvState, stop: Option<&dyn Fn(&Term) -> bool>) -> Result<EvReach, EngineError> {
        let mut nodes: Vec<Node<EvState>> = vec![(start.clone(), None, 0)];
        let mut seen: HashSet<EvState> = HashSet::from([start.clone()]);
        let mut truncated = false;
        let mut queue = VecDeque::from([0usize]);
        let mut hit = stop.is_some_and(|f| f(&start.term)).then_some(0);
        while let (None, Some(i)) = (hit, queue.pop_front()) {
            let (st, d) = (nodes[i].0.clone(), nodes[i].2);
            let succ = self.ev_safe_successors(&st)?;
            if d >= self.bounds.steps {
                truncated |= !succ.is_empty();
                continue;
            }
            for (ns, step) in succ {
                if ns.term.size() > self.bounds.term_size {
                    truncated = true;
                    continue;
                }
                if !seen.insert(ns.clone()) {
                    continue;
                }
                if nodes.len() >= MAX_STATES {
                    truncated = true;
                    queue.clear();
                    break;
                }
                let j = nodes.len();
                let found = stop.is_some_and(|f| f(&ns.term));
                nodes.push((ns, Some((i, step)), d + 1));
                if found {
                    hit = Some(j);
                    break;
                }
                queue.push_back(j);
            }
        }
        Ok(EvReach { nodes, truncated })
    }
}

/// Positions in leftmost-innermost order (children left to right, then the parent).
pub fn innermost_order(t: &Term) -> Vec<Position> {
    fn go(t: &Term, p: Position, out: &mut Vec<Position>) {
        if let Term::App(_, args) = t {
            for (i, a) in args.iter().enumerate() {
                go(a, p.child(i + 1), out);
            }
            out.push(p);
        }
    }
    let mut out = Vec::new();
    go(t, Position::root(), &mut out);
    out
}

/// A term with its basic (contractible) positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EvState {
    pub term: Term,
    pub basic: BTreeSet<Position>,
}

impl EvState {
    /// B₀ = Pos_F(t).
    pub fn initial(t: &Term) -> EvState {
        EvState { term: t.clone(), basic: t.positions(PosKind::Function).into_iter().collect() }
    }
}

/// B' = (B \ {q ≥ p}) ∪ {p·q | q ∈ Pos_F(r)} ∪ {p·p′·q | p·pₓ·q ∈ B, l|pₓ = r|p′ ∈ V}.
pub fn next_basic(basic: &BTreeSet<Position>, p: &Position, r: &Rule) -> BTreeSet<Position> {
    let mut out: BTreeSet<Position> = basic.iter().filter(|q| !p.is_prefix_of(q)).cloned().collect();
    for q in r.rhs.positions(PosKind::Function) {
        out.insert(p.concat(&q));
    }
    for px in r.lhs.positions(PosKind::Variable) {
        let x = r.lhs.subterm(&px).expect("variable position");
        let below: Vec<Position> = basic.iter().filter_map(|b| b.strip_prefix(&p.concat(&px))).collect();
        for pr in r.rhs.positions(PosKind::Variable) {
            if r.rhs.subterm(&pr) == Some(x) {
                for q in &below {
                    out.insert(p.concat(&pr).concat(q));
                }
            }
        }
    }
    out
}

/// Result of an EV-safe closure.
#[derive(Clone, Debug)]
pub struct EvReach {
    nodes: Vec<Node<EvState>>,
    pub truncated: bool,
}

impl EvReach {
    pub fn terms(&self) -> BTreeSet<Term> {
        self.nodes.iter().map(|n| n.0.term.clone()).collect()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.nodes.iter().any(|n| &n.0.term == t)
    }

    /// Derivation (with basic sets) to the first state whose term is `t`.
    pub fn derivation(&self, t: &Term) -> Option<Derivation> {
        let mut i = self.nodes.iter().position(|n| &n.0.term == t)?;
        let mut steps = Vec::new();
        while let Some((p, s)) = &self.nodes[i].1 {
            steps.push(s.clone());
            i = *p;
        }
        steps.reverse();
        let st = &self.nodes[0].0;
        Some(Derivation { start: st.term.clone(), steps, start_basic: Some(st.basic.iter().cloned().collect()) })
    }
}

/// All results of contracting a set of parallel redexes (the empty set included).
pub fn parallel_successors(sys: &System, t: &Term, universe: &Universe) -> Result<Vec<Term>, EngineError> {
    if sys.is_conditional() {
        return Err(EngineError::Conditional);
    }
    let mut eng = Engine::new(sys, Bounds { level: 1, ..Bounds::default() }, Policy::full(), universe.clone());
    let mut out: BTreeSet<Term> = BTreeSet::new();
    par(&mut eng, t, &mut out);
    Ok(out.into_iter().collect())
}

fn par(eng: &mut Engine, t: &Term, out: &mut BTreeSet<Term>) {
    for s in eng.steps_at(t, &Position::root(), 1, false) {
        out.insert(s.result);
    }
    match t {
        Term::Var(_) => {
            out.insert(t.clone());
        }
        Term::App(f, args) => {
            let mut combos: Vec<Vec<Term>> = vec![vec![]];
            for a in args {
                let mut sub = BTreeSet::new();
                par(eng, a, &mut sub);
                let mut next = Vec::new();
                for c in &combos {
                    for u in &sub {
                        let mut c2 = c.clone();
                        c2.push(u.clone());
                        next.push(c2);
                    }
                }
                combos = next;
            }
            out.extend(combos.into_iter().map(|c| Term::App(f.clone(), c)));
        }
    }
}

/// Why a derivation failed to replay.
#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[error("step {index}: {reason}")]
pub struct VerifyError {
    pub index: usize,
    pub reason: String,
}

/// Replays a derivation: redex match, substitution, result, policy and (EV-safe) basic sets.
/// Conditions of conditional rules are re-certified with a bounded search at `bounds`.
pub fn verify_derivation(d: &Derivation, sys: &System, policy: &Policy, bounds: Bounds) -> Result<(), VerifyError> {
    let fail = |index: usize, reason: String| Err(VerifyError { index, reason });
    let mut cur = d.start.clone();
    let mut basic: Option<BTreeSet<Position>> = d.start_basic.as_ref().map(|b| b.iter().cloned().collect());
    let universe = Universe::for_system(sys, bounds.ev_depth, UniverseMode::Full, &[]);
    let mut eng = Engine::new(sys, bounds, Policy::full(), universe);
    for (i, s) in d.steps.iter().enumerate() {
        if s.term != cur {
            return fail(i, format!("source `{}` differs from previous result `{cur}`", s.term));
        }
        let Some(r) = sys.rule(&s.rule) else { return fail(i, format!("unknown rule `{}`", s.rule)) };
        let Some(redex) = cur.subterm(&s.pos) else { return fail(i, format!("position {} not in term", s.pos)) };
        if r.lhs.apply(&s.subst) != *redex {
            return fail(i, format!("rule `{}` does not match at {}", s.rule, s.pos));
        }
        if !policy.position_allowed(&cur, &s.pos) || !policy.redex_allowed(redex) {
            return fail(i, format!("position {} forbidden by the restriction", s.pos));
        }
        if policy.strategy != Strategy::Full {
            let want = eng_first_redex(&mut Engine::new(sys, bounds, policy.clone(), eng.universe.clone()), &cur);
            if want.as_ref() != Some(&s.pos) {
                return fail(i, format!("position {} is not the leftmost-innermost redex", s.pos));
            }
        }
        let expected = cur.replace_at(&s.pos, r.rhs.apply(&s.subst)).expect("position checked");
        if expected != s.result {
            return fail(i, "result differs from the contracted term".to_string());
        }
        for c in &r.conds {
            let (a, b) = (c.lhs.apply(&s.subst), c.rhs.apply(&s.subst));
            let ok = match sys.flavor {
                Flavor::Oriented => eng.reach(&a).contains(&b),
                Flavor::Join => {
                    let ra = eng.reach(&a);
                    eng.reach(&b).terms().any(|u| ra.contains(u))
                }
            };
            if !ok {
                return fail(i, format!("condition {a} == {b} not certified within bounds"));
            }
        }
        if let Some(b) = &basic {
            if !b.contains(&s.pos) {
                return fail(i, format!("position {} is not basic", s.pos));
            }
            let nb = next_basic(b, &s.pos, r);
            if let Some(rec) = &s.basic {
                if rec.iter().cloned().collect::<BTreeSet<_>>() != nb {
                    return fail(i, "recorded basic positions disagree with the recurrence".to_string());
                }
            }
            basic = Some(nb);
        }
        cur = s.result.clone();
    }
    Ok(())
}

fn eng_first_redex(eng: &mut Engine, t: &Term) -> Option<Position> {
    eng.successors(t).first().map(|s| s.pos.clone())
}

/// Convenience: bounded closure of an unconditional or conditional system with default policy.
pub fn reachable(sys: &System, from: &Term, bounds: Bounds) -> Reach {
    Engine::simple(sys, bounds).reach(from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_system, parse_term_in};

    fn r0() -> System {
        parse_system("(RULES a -> c  a -> d  b -> c  b -> d  c -> e  c -> l  k -> l  k -> m  d -> m)").unwrap()
    }

    #[test]
    fn r0_closure() {
        let s = r0();
        let r = reachable(&s, &Term::constant("a"), Bounds { steps: 3, ..Bounds::default() });
        for c in ["a", "c", "d", "e", "l", "m"] {
            assert!(r.contains(&Term::constant(c)), "{c}");
        }
        assert_eq!(r.distance(&Term::constant("e")), Some(2));
        let z = reachable(&s, &Term::constant("a"), Bounds { steps: 0, ..Bounds::default() });
        assert_eq!(z.len(), 1);
    }

    #[test]
    fn parallel_r0() {
        let s = parse_system("(RULES a -> c  a -> d  b -> c  b -> d  c -> e  h(e,e) -> e)").unwrap();
        let t = parse_term_in("h(a,b)", &s).unwrap();
        let ps = parallel_successors(&s, &t, &Universe::default()).unwrap();
        for u in ["h(c,c)", "h(c,d)", "h(d,c)", "h(d,d)", "h(a,b)"] {
            assert!(ps.contains(&parse_term_in(u, &s).unwrap()), "{u}");
        }
        let nf = Term::constant("e");
        assert_eq!(parallel_successors(&s, &nf, &Universe::default()).unwrap(), vec![nf]);
    }

    #[test]
    fn levels() {
        let r3 = parse_system("(VAR x)(RULES f(x) -> x | x == e  a -> c  c -> e)").unwrap();
        let fa = parse_term_in("f(a)", &r3).unwrap();
        let mut e0 = Engine::simple(&r3, Bounds { level: 0, ..Bounds::default() });
        assert!(e0.successors(&fa).is_empty());
        let mut e3 = Engine::simple(&r3, Bounds { level: 3, ..Bounds::default() });
        assert!(e3.successors(&fa).iter().any(|s| s.result == Term::constant("a")));
    }

    #[test]
    fn join_levels() {
        let r12 = parse_system(
            "(CONDITIONTYPE JOIN)(VAR x)(RULES odd(0) -> false  odd(s(x)) -> true | even(x) == true
              odd(s(x)) -> false | even(x) == false  even(0) -> true
              even(s(x)) -> true | odd(x) == true  even(s(x)) -> false | odd(x) == false)",
        )
        .unwrap();
        let t = parse_term_in("odd(s(0))", &r12).unwrap();
        let mut e = Engine::simple(&r12, Bounds { level: 2, ..Bounds::default() });
        let res: Vec<Term> = e.successors(&t).into_iter().map(|s| s.result).collect();
        assert_eq!(res, vec![Term::constant("true")]);
    }

    #[test]
    fn tampered_derivation_fails() {
        let s = r0();
        let r = reachable(&s, &Term::constant("a"), Bounds::default());
        let mut d = r.derivation(&Term::constant("e")).unwrap();
        assert!(verify_derivation(&d, &s, &Policy::full(), Bounds::default()).is_ok());
        assert!(verify_derivation(&Derivation::empty(Term::constant("a")), &s, &Policy::full(), Bounds::default()).is_ok());
        d.steps[1].term = Term::constant("d");
        assert_eq!(verify_derivation(&d, &s, &Policy::full(), Bounds::default()).unwrap_err().index, 1);
    }

    #[test]
    fn ev_safe_basic_sets() {
        let s = parse_system("(VAR x)(RULES A -> h(x,x)  U19(d) -> f(x))").unwrap();
        let mut u = Universe::for_system(&s, 1, UniverseMode::Full, &[]);
        u.terms.retain(|t| t.to_string() == "U19(d)");
        let mut e = Engine::new(&s, Bounds { level: 1, ..Bounds::default() }, Policy::full(), u);
        let st = EvState::initial(&Term::constant("A"));
        let succ = e.ev_safe_successors(&st).unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].0.basic, BTreeSet::from([Position::root()]));
        assert!(e.ev_safe_successors(&succ[0].0).unwrap().is_empty());
    }
}
