//! The SR transformation: barred symbols with condition stacks, braces marking
//! computed values, the translations to and from the original signature,
//! structural positions, and simulation of U derivations.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::engine::{verify_derivation, Bounds, Derivation, Engine, Policy, Universe};
use crate::system::{Flavor, Rule, Signature, System, SystemError};
use crate::term::{sym, FreshVars, Position, Sym, Term};
use crate::unravel::u_symbol;

pub const CURLY: &str = "curly";
pub const BOT: &str = "bot";
pub const BAR_SUFFIX: &str = "^bar";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SrError {
    #[error("{0}")]
    System(#[from] SystemError),
    #[error("symbol `{0}` is not in the original signature")]
    NonOriginal(String),
    #[error("input derivation does not verify: {0}")]
    Unverifiable(String),
    #[error("no SR derivation found within bounds for step {0}")]
    NotSimulated(usize),
}

/// Barred name of a defined symbol.
pub fn bar(f: &str) -> Sym {
    sym(&format!("{f}{BAR_SUFFIX}"))
}

/// Name of the k-ary stack constructor.
pub fn stk(k: usize) -> Sym {
    sym(&format!("stk{k}"))
}

pub fn curly(t: Term) -> Term {
    Term::App(sym(CURLY), vec![t])
}

pub fn bot() -> Term {
    Term::constant(BOT)
}

/// Data shared by the SR construction and its translations.
#[derive(Clone, Debug, Serialize)]
pub struct SrContext {
    pub sig: Signature,
    pub defined: BTreeSet<Sym>,
    pub constructors: BTreeSet<Sym>,
    /// ρ_{f,1}, …, ρ_{f,n_f}: indices into the original rules, in input order.
    pub cond_rules: BTreeMap<Sym, Vec<usize>>,
    /// Number of conditions of each conditional rule, by rule index.
    pub k_of: BTreeMap<usize, usize>,
    /// Labels of the original rules, by index.
    pub labels: Vec<String>,
    /// Original rules, kept for the U-derivation translation.
    #[serde(skip)]
    pub rules: Vec<Rule>,
    /// Whether the input passed the syntactic determinism check (advisory).
    pub syntactically_deterministic: bool,
}

impl SrContext {
    pub fn n_f(&self, f: &str) -> usize {
        self.cond_rules.get(f).map_or(0, Vec::len)
    }

    /// Constructors unchanged, f ↦ f̄(…, ⊥, …, ⊥); errors on non-original symbols.
    pub fn overline(&self, t: &Term) -> Result<Term, SrError> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::App(f, args) => {
                let mut a = args.iter().map(|u| self.overline(u)).collect::<Result<Vec<_>, _>>()?;
                if self.defined.contains(f) {
                    a.extend(std::iter::repeat_n(bot(), self.n_f(f)));
                    Ok(Term::App(bar(f), a))
                } else if self.constructors.contains(f) || !self.sig.contains_key(f) && !is_sr_symbol(f) {
                    // Symbols foreign to R (e.g. extra constants) behave as constructors.
                    Ok(Term::App(f.clone(), a))
                } else {
                    Err(SrError::NonOriginal(f.to_string()))
                }
            }
        }
    }

    /// φ_SR(t) = {t̄}.
    pub fn phi(&self, t: &Term) -> Result<Term, SrError> {
        Ok(curly(self.overline(t)?))
    }

    fn unbar<'a>(&self, f: &'a str) -> Option<&'a str> {
        f.strip_suffix(BAR_SUFFIX).filter(|g| self.defined.contains(*g))
    }

    /// Partial translation back: braces dropped, condition slots erased.
    pub fn hat(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(_) => Some(t.clone()),
            Term::App(f, args) if &**f == CURLY => self.hat(&args[0]),
            Term::App(f, args) => {
                if let Some(g) = self.unbar(f) {
                    let n = self.sig[g];
                    let a = args[..n].iter().map(|u| self.hat(u)).collect::<Option<Vec<_>>>()?;
                    Some(Term::App(sym(g), a))
                } else if is_sr_symbol(f) || self.defined.contains(f) {
                    None
                } else {
                    let a = args.iter().map(|u| self.hat(u)).collect::<Option<Vec<_>>>()?;
                    Some(Term::App(f.clone(), a))
                }
            }
        }
    }

    /// Structural positions; constructors contribute ε as well as their arguments.
    pub fn structural_positions(&self, t: &Term) -> Option<BTreeSet<Position>> {
        let lift = |i: usize, set: BTreeSet<Position>| -> BTreeSet<Position> {
            set.into_iter().map(|p| Position(std::iter::once(i).chain(p.0).collect())).collect()
        };
        match t {
            Term::Var(_) => Some(BTreeSet::from([Position::root()])),
            Term::App(f, args) if &**f == CURLY => Some(lift(1, self.structural_positions(&args[0])?)),
            Term::App(f, _) if &**f == BOT || is_stack(f) => None,
            Term::App(f, args) => {
                let n = match self.unbar(f) {
                    Some(g) => self.sig[g],
                    None if self.defined.contains(f) => return None,
                    None => args.len(),
                };
                let mut out = BTreeSet::from([Position::root()]);
                for (i, a) in args[..n].iter().enumerate() {
                    out.extend(lift(i + 1, self.structural_positions(a)?));
                }
                Some(out)
            }
        }
    }

    /// Necessary condition for reachability: ⊥ and stacks occur only as well-formed condition slots.
    pub fn reachable_shape(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, _) if &**f == BOT || is_stack(f) => false,
            Term::App(f, args) => match self.unbar(f) {
                None => args.iter().all(|a| self.reachable_shape(a)),
                Some(g) => {
                    let n = self.sig[g];
                    let slots = &self.cond_rules[g];
                    args.len() == n + slots.len()
                        && args[..n].iter().all(|a| self.reachable_shape(a))
                        && args[n..].iter().zip(slots).all(|(u, ri)| self.slot_ok(u, self.k_of[ri]))
                }
            },
        }
    }

    fn slot_ok(&self, u: &Term, k: usize) -> bool {
        match u {
            Term::App(f, _) if &**f == BOT => true,
            Term::App(f, elems) if *f == stk(k) => {
                let Some(Term::App(c, inner)) = elems.first() else { return false };
                if &**c != CURLY || !self.reachable_shape(&inner[0]) {
                    return false;
                }
                let rest = &elems[1..];
                let filled = rest.iter().take_while(|e| **e != bot()).count();
                rest[..filled].iter().all(|e| self.reachable_shape(e)) && rest[filled..].iter().all(|e| *e == bot())
            }
            _ => false,
        }
    }

    /// Extended overline for terms of U(R): U_{ρ,i}(u, X⃗) becomes the barred lhs with the
    /// i-th stage of ρ's condition stack, so U derivations have SR counterparts.
    pub fn overline_u(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(_) => Some(t.clone()),
            Term::App(f, args) => {
                let a = args.iter().map(|u| self.overline_u(u)).collect::<Option<Vec<_>>>()?;
                if let Some((ri, i)) = self.u_symbol_of(f) {
                    return self.stage(ri, i, &a);
                }
                if self.defined.contains(f) {
                    let mut a = a;
                    a.extend(std::iter::repeat_n(bot(), self.n_f(f)));
                    Some(Term::App(bar(f), a))
                } else {
                    Some(Term::App(f.clone(), a))
                }
            }
        }
    }

    fn u_symbol_of(&self, f: &str) -> Option<(usize, usize)> {
        for (&ri, &k) in &self.k_of {
            for i in 1..=k {
                if *u_symbol(&self.labels[ri], i) == *f {
                    return Some((ri, i));
                }
            }
        }
        None
    }

    /// f̄(w̄σ, ⊥…, [{u}, t̄_{i−1}σ, …, t̄₁σ, ⊥…]_k, ⊥…) from U_{ρ,i}(u, X⃗ᵢσ) with arguments already translated.
    fn stage(&self, ri: usize, i: usize, a: &[Term]) -> Option<Term> {
        let r = &self.rules[ri];
        let k = r.conds.len();
        let xs: Vec<Sym> = r.x_vec(i);
        let sigma = crate::term::Subst(xs.into_iter().zip(a[1..].iter().cloned()).collect());
        let f = r.lhs.root()?.clone();
        let slot = self.cond_rules[&f].iter().position(|x| *x == ri)?;
        let mut elems = vec![curly(a[0].clone())];
        for j in (1..i).rev() {
            elems.push(self.overline(&r.conds[j - 1].rhs).ok()?.apply(&sigma));
        }
        elems.resize(k, bot());
        let mut args: Vec<Term> =
            r.lhs.args().iter().map(|w| self.overline(w).ok().map(|w| w.apply(&sigma))).collect::<Option<_>>()?;
        for j in 0..self.n_f(&f) {
            args.push(if j == slot { Term::App(stk(k), elems.clone()) } else { bot() });
        }
        Some(Term::App(bar(&f), args))
    }
}

fn is_stack(f: &str) -> bool {
    f.strip_prefix("stk").is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
}

/// Names reserved by SR.
pub fn is_sr_symbol(f: &str) -> bool {
    f == CURLY || f == BOT || is_stack(f) || f.ends_with(BAR_SUFFIX)
}

/// SR→(R) and its context.
pub fn sr_transform(sys: &System) -> Result<(System, SrContext), SrError> {
    if sys.flavor != Flavor::Oriented {
        return Err(SystemError::NotOriented.into());
    }
    if let Some(r) = sys.rules.iter().find(|r| r.lhs.is_var()) {
        return Err(SystemError::VariableLhs(r.label.to_string()).into());
    }
    if let Some(r) = sys.rules.iter().find(|r| !r.is_deterministic()) {
        return Err(SystemError::NotDeterministic(r.label.to_string()).into());
    }
    let sig = sys.signature()?;
    if let Some(f) = sig.keys().find(|f| is_sr_symbol(f)) {
        return Err(SystemError::ReservedCollision(f.to_string()).into());
    }
    let defined = sys.defined();
    let constructors = sys.constructors();
    let mut cond_rules: BTreeMap<Sym, Vec<usize>> = defined.iter().map(|f| (f.clone(), Vec::new())).collect();
    let mut k_of = BTreeMap::new();
    for (i, r) in sys.rules.iter().enumerate() {
        if r.is_conditional() {
            cond_rules.get_mut(r.lhs.root().expect("non-variable lhs")).expect("defined").push(i);
            k_of.insert(i, r.conds.len());
        }
    }
    let ctx = SrContext {
        sig: sig.clone(),
        defined: defined.clone(),
        constructors: constructors.clone(),
        cond_rules,
        k_of,
        labels: sys.rules.iter().map(|r| r.label.to_string()).collect(),
        rules: sys.rules.clone(),
        syntactically_deterministic: crate::classify::classify(sys).syntactically_deterministic,
    };
    let mut rules = Vec::new();
    for (idx, r) in sys.rules.iter().enumerate() {
        rules.extend(sr_rule(&ctx, idx, r)?);
    }
    for f in &defined {
        let n = sig[f];
        let nf = ctx.n_f(f);
        let xs: Vec<Term> = (1..=n).map(|i| Term::var(&format!("x{i}"))).collect();
        let zs: Vec<Term> = (1..=nf).map(|i| Term::var(&format!("z{i}"))).collect();
        for i in 0..n {
            let mut l = xs.clone();
            l[i] = curly(l[i].clone());
            l.extend(zs.iter().cloned());
            let mut r = xs.clone();
            r.extend(std::iter::repeat_n(bot(), nf));
            rules.push(Rule::unconditional(&format!("push_{f}_{}", i + 1), Term::App(bar(f), l), curly(Term::App(bar(f), r))));
        }
    }
    for c in &constructors {
        let n = sig[c];
        let xs: Vec<Term> = (1..=n).map(|i| Term::var(&format!("x{i}"))).collect();
        for i in 0..n {
            let mut l = xs.clone();
            l[i] = curly(l[i].clone());
            rules.push(Rule::unconditional(&format!("push_{c}_{}", i + 1), Term::App(c.clone(), l), curly(Term::App(c.clone(), xs.clone()))));
        }
    }
    let x = Term::var("x");
    rules.push(Rule::unconditional("collapse", curly(curly(x.clone())), curly(x)));
    let mut vars: BTreeSet<Sym> = rules.iter().flat_map(|r| r.vars()).collect();
    vars.extend(sys.vars.iter().cloned());
    let out = System { rules, vars, flavor: Flavor::Oriented, extended: false, origin: sys.origin.clone() };
    Ok((out, ctx))
}

fn sr_rule(ctx: &SrContext, idx: usize, r: &Rule) -> Result<Vec<Rule>, SrError> {
    let f = r.lhs.root().expect("non-variable lhs").clone();
    let nf = ctx.n_f(&f);
    let mut fresh = FreshVars::new(r.vars());
    let zs: Vec<Term> = (1..=nf).map(|i| Term::Var(fresh.readable(&format!("z{i}")))).collect();
    let ws: Vec<Term> = r.lhs.args().iter().map(|w| ctx.overline(w)).collect::<Result<_, _>>()?;
    let rbar = curly(ctx.overline(&r.rhs)?);
    let label = &r.label;
    if !r.is_conditional() {
        let mut a = ws;
        a.extend(zs);
        return Ok(vec![Rule::unconditional(&format!("{label}/sr"), Term::App(bar(&f), a), rbar)]);
    }
    let slot = ctx.cond_rules[&f].iter().position(|i| *i == idx).expect("conditional rule registered");
    let k = r.conds.len();
    let s: Vec<Term> = r.conds.iter().map(|c| ctx.overline(&c.lhs)).collect::<Result<_, _>>()?;
    let t: Vec<Term> = r.conds.iter().map(|c| ctx.overline(&c.rhs)).collect::<Result<_, _>>()?;
    let with_slot = |u: Term| {
        let mut a = ws.clone();
        a.extend(zs.iter().cloned());
        a[ws.len() + slot] = u;
        Term::App(bar(&f), a)
    };
    // [{head}, t_{j}, …, t_1, ⊥, …]_k
    let stack = |head: Term, done: usize| {
        let mut e = vec![curly(head)];
        e.extend((0..done).rev().map(|j| t[j].clone()));
        e.resize(k, bot());
        Term::App(stk(k), e)
    };
    let mut out = vec![Rule::unconditional(&format!("{label}/sr0"), with_slot(bot()), with_slot(stack(s[0].clone(), 0)))];
    for j in 1..k {
        out.push(Rule::unconditional(
            &format!("{label}/sr{j}"),
            with_slot(stack(t[j - 1].clone(), j - 1)),
            with_slot(stack(s[j].clone(), j)),
        ));
    }
    out.push(Rule::unconditional(&format!("{label}/sr{k}"), with_slot(stack(t[k - 1].clone(), k - 1)), rbar));
    Ok(out)
}

/// Maps a verified U(R) derivation to a verified SR→(R) derivation from φ_SR(start).
///
/// Every U term has an SR image (via [`SrContext::overline_u`]); consecutive images are
/// connected by a bounded local search in SR→(R), which the simulation lemma guarantees
/// for steps at structural positions. When an intermediate image is not reached, the
/// search skips ahead to later images, ending at φ_SR of the final term.
pub fn sr_simulate_u_derivation(
    ctx: &SrContext,
    sr_sys: &System,
    u_sys: &System,
    d: &Derivation,
    bounds: Bounds,
) -> Result<Derivation, SrError> {
    verify_derivation(d, u_sys, &Policy::full(), bounds).map_err(|e| SrError::Unverifiable(e.to_string()))?;
    let start = ctx.phi(&d.start)?;
    let images: Vec<Term> = d
        .terms()
        .iter()
        .map(|t| ctx.overline_u(t).map(curly).ok_or_else(|| SrError::NonOriginal(t.to_string())))
        .collect::<Result<_, _>>()?;
    let local = Bounds { level: 1, steps: bounds.steps, term_size: bounds.term_size, ev_depth: 0 };
    let mut eng = Engine::new(sr_sys, local, Policy::full(), Universe::default());
    let mut out = Derivation::empty(start.clone());
    let mut cur = start;
    let mut i = 1;
    while i < images.len() {
        // Prefer the next image; skip ahead to a later one only when it is unreachable.
        let next = (i..images.len()).find_map(|j| {
            let target = &images[j];
            eng.reach_until(&cur, &|u| u == target).derivation(target).map(|seg| (j, seg))
        });
        let Some((j, seg)) = next else {
            return Err(SrError::NotSimulated(i - 1));
        };
        out.steps.extend(seg.steps);
        cur = images[j].clone();
        i = j + 1;
    }
    verify_derivation(&out, sr_sys, &Policy::full(), local).map_err(|e| SrError::Unverifiable(e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_system, parse_term_in};

    fn r7() -> System {
        parse_system(
            "(VAR x y ys zs1 zs2)(RULES
              split(x,nil) -> tp2(nil,nil)
              split(x,cons(y,ys)) -> tp2(zs1,cons(y,zs2)) | split(x,ys) == tp2(zs1,zs2), le(x,y) == true
              split(x,cons(y,ys)) -> tp2(cons(y,zs1),zs2) | split(x,ys) == tp2(zs1,zs2), le(x,y) == false
              le(0,y) -> true
              le(s(x),0) -> false
              le(s(x),s(y)) -> le(x,y))",
        )
        .unwrap()
    }

    #[test]
    fn r7_rules() {
        let (sr, ctx) = sr_transform(&r7()).unwrap();
        let shown: Vec<String> = sr.rules.iter().map(|r| r.to_string()).collect();
        assert!(shown.contains(
            &"split^bar(x,cons(y,ys),bot,z2) -> split^bar(x,cons(y,ys),stk2(curly(split^bar(x,ys,bot,bot)),bot),z2)"
                .to_string()
        ));
        assert!(shown.contains(&"curly(curly(x)) -> curly(x)".to_string()));
        assert_eq!(ctx.n_f("split"), 2);
        let t = parse_term_in("split(s(0),nil)", &r7()).unwrap();
        assert_eq!(ctx.overline(&t).unwrap().to_string(), "split^bar(s(0),nil,bot,bot)");
        assert_eq!(ctx.hat(&ctx.phi(&t).unwrap()), Some(t));
        assert_eq!(ctx.hat(&bot()), None);
    }

    #[test]
    fn structural_positions_example() {
        let (sr, ctx) = sr_transform(&r7()).unwrap();
        let t = parse_term_in(
            "curly(split^bar(s(0),cons(0,cons(s(s(0)),nil)),stk2(curly(split^bar(s(0),cons(s(s(0)),nil),bot,bot)),bot),bot))",
            &sr,
        )
        .unwrap();
        let ps: Vec<String> = ctx.structural_positions(&t).unwrap().iter().map(|p| p.to_string()).collect();
        let mut want = vec!["1", "1.1", "1.1.1", "1.2", "1.2.1", "1.2.2", "1.2.2.1", "1.2.2.1.1", "1.2.2.1.1.1", "1.2.2.2"];
        want.sort();
        let mut got = ps.clone();
        got.sort();
        assert_eq!(got, want);
        assert!(ctx.reachable_shape(&t));
        assert_eq!(ctx.structural_positions(&Term::var("x")).unwrap().len(), 1);
        assert!(ctx.structural_positions(&bot()).is_none());
    }

    #[test]
    fn constructor_only_system() {
        let s = parse_system("(RULES)").unwrap();
        let (sr, _) = sr_transform(&s).unwrap();
        assert_eq!(sr.rules.len(), 1);
    }

    #[test]
    fn r7_leftmost_innermost_derivation() {
        use crate::engine::Strategy;
        let (sr, ctx) = sr_transform(&r7()).unwrap();
        let s = parse_term_in("split(s(0),cons(0,cons(s(s(0)),nil)))", &r7()).unwrap();
        let goal = ctx.phi(&parse_term_in("tp2(cons(0,nil),cons(s(s(0)),nil))", &r7()).unwrap()).unwrap();
        let policy = Policy::full().with_strategy(Strategy::LeftmostInnermostFirstRule);
        let bounds = Bounds { steps: 60, term_size: 80, ..Bounds::default() };
        let mut eng = Engine::new(&sr, bounds, policy.clone(), Universe::default());
        let reach = eng.reach_until(&ctx.phi(&s).unwrap(), &|t| *t == goal);
        let d = reach.derivation(&goal).expect("normal form reached");
        assert_eq!(d.steps.last().unwrap().rule, "collapse");
        assert_eq!(d.steps.last().unwrap().term, curly(goal.clone()));
        verify_derivation(&d, &sr, &policy, bounds).unwrap();
        for t in d.terms() {
            assert!(ctx.reachable_shape(t), "{t}");
        }
    }

    #[test]
    fn simulates_u_derivations() {
        let u = crate::unravel::unravel_u(&r7()).unwrap();
        let (sr, ctx) = sr_transform(&r7()).unwrap();
        let s = parse_term_in("split(s(0),cons(s(s(0)),cons(0,nil)))", &r7()).unwrap();
        let goal = parse_term_in("tp2(cons(0,nil),cons(s(s(0)),nil))", &r7()).unwrap();
        let bounds = Bounds { steps: 30, term_size: 60, ..Bounds::default() };
        let mut eng = Engine::simple(&u, bounds);
        let d = eng.reach_until(&s, &|t| *t == goal).derivation(&goal).expect("U reaches the result");
        let m = sr_simulate_u_derivation(&ctx, &sr, &u, &d, bounds).unwrap();
        assert_eq!(m.start, ctx.phi(&s).unwrap());
        assert_eq!(*m.end(), ctx.phi(&goal).unwrap());
    }
}
