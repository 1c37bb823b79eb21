//! First-order terms, positions, substitutions, matching and unification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Interned identifier shared by variables and function symbols.
pub type Sym = Arc<str>;

/// Builds a [`Sym`] from a string slice.
pub fn sym(name: &str) -> Sym {
    Arc::from(name)
}

/// Separator reserved for internally generated variable names.
pub const FRESH_SEP: char = '#';

/// A first-order term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Sym),
    App(Sym, Vec<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("position {pos} is not a position of {term}")]
    PositionOutOfTerm { pos: Position, term: Term },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(sym(name), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::App(sym(name), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Root symbol, or `None` for a variable.
    pub fn root(&self) -> Option<&Sym> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, a) => a,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, a) => 1 + a.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Height; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, a) => a.iter().map(|t| t.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, a) => a.iter().all(Term::is_ground),
        }
    }

    /// Variables in order of first occurrence (left to right).
    pub fn vars_ordered(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        let mut seen = BTreeSet::new();
        out.retain(|v| seen.insert(v.clone()));
        out
    }

    /// Every variable occurrence, with repetitions.
    pub fn var_occurrences(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Sym>) {
        match self {
            Term::Var(x) => out.push(x.clone()),
            Term::App(_, a) => a.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    /// Function symbols with their arities.
    pub fn symbols(&self, out: &mut BTreeMap<Sym, BTreeSet<usize>>) {
        if let Term::App(f, a) = self {
            out.entry(f.clone()).or_default().insert(a.len());
            a.iter().for_each(|t| t.symbols(out));
        }
    }

    pub fn contains_symbol(&self, pred: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(f, a) => pred(f) || a.iter().any(|t| t.contains_symbol(pred)),
        }
    }

    /// Every variable occurs at most once.
    pub fn is_linear(&self) -> bool {
        let occ = self.var_occurrences();
        let set: BTreeSet<_> = occ.iter().collect();
        set.len() == occ.len()
    }

    pub fn subterm(&self, p: &Position) -> Option<&Term> {
        let mut cur = self;
        for &i in &p.0 {
            match cur {
                Term::App(_, a) if i >= 1 && i <= a.len() => cur = &a[i - 1],
                _ => return None,
            }
        }
        Some(cur)
    }

    /// Replaces the subterm at `p` by `u`.
    pub fn replace_at(&self, p: &Position, u: Term) -> Result<Term, TermError> {
        fn go(t: &Term, p: &[usize], u: Term) -> Option<Term> {
            match p.split_first() {
                None => Some(u),
                Some((&i, rest)) => match t {
                    Term::App(f, a) if i >= 1 && i <= a.len() => {
                        let mut a = a.clone();
                        a[i - 1] = go(&a[i - 1], rest, u)?;
                        Some(Term::App(f.clone(), a))
                    }
                    _ => None,
                },
            }
        }
        go(self, &p.0, u).ok_or_else(|| TermError::PositionOutOfTerm {
            pos: p.clone(),
            term: self.clone(),
        })
    }

    /// Positions of the requested kind, in pre-order.
    pub fn positions(&self, kind: PosKind) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_positions(kind, &mut cur, &mut out);
        out
    }

    fn collect_positions(&self, kind: PosKind, cur: &mut Vec<usize>, out: &mut Vec<Position>) {
        match self {
            Term::Var(_) => {
                if kind != PosKind::Function {
                    out.push(Position(cur.clone()));
                }
            }
            Term::App(_, a) => {
                if kind != PosKind::Variable {
                    out.push(Position(cur.clone()));
                }
                for (i, t) in a.iter().enumerate() {
                    cur.push(i + 1);
                    t.collect_positions(kind, cur, out);
                    cur.pop();
                }
            }
        }
    }

    /// Applies a substitution.
    pub fn apply(&self, s: &Subst) -> Term {
        match self {
            Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, a) => Term::App(f.clone(), a.iter().map(|t| t.apply(s)).collect()),
        }
    }

    /// Renames variables through `f`.
    pub fn map_vars(&self, f: &mut dyn FnMut(&Sym) -> Sym) -> Term {
        match self {
            Term::Var(x) => Term::Var(f(x)),
            Term::App(g, a) => Term::App(g.clone(), a.iter().map(|t| t.map_vars(f)).collect()),
        }
    }

    /// Renames function symbols through `f`.
    pub fn map_syms(&self, f: &dyn Fn(&Sym) -> Sym) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(g, a) => Term::App(f(g), a.iter().map(|t| t.map_syms(f)).collect()),
        }
    }
}

/// Canonical term order: size first, then structure.
pub fn canonical_cmp(a: &Term, b: &Term) -> std::cmp::Ordering {
    a.size().cmp(&b.size()).then_with(|| a.cmp(b))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::App(g, a) if a.is_empty() => write!(f, "{g}"),
            Term::App(g, a) => {
                write!(f, "{g}(")?;
                for (i, t) in a.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(if self.is_var() { 1 } else { 2 }))?;
        match self {
            Term::Var(x) => m.serialize_entry("var", &**x)?,
            Term::App(g, a) => {
                m.serialize_entry("sym", &**g)?;
                m.serialize_entry("args", a)?;
            }
        }
        m.end()
    }
}

/// Which positions to enumerate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PosKind {
    All,
    Function,
    Variable,
}

/// A position: a sequence of 1-based argument indices; empty is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize)]
#[serde(transparent)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` is a prefix of `other` (self ≤ other).
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_parallel_to(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Position(v)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The suffix q with `self` = `prefix`·q.
    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        prefix.is_prefix_of(self).then(|| Position(self.0[prefix.0.len()..].to_vec()))
    }

    pub fn parse(text: &str) -> Option<Position> {
        let t = text.trim();
        if t.is_empty() || t == "e" || t == "ε" {
            return Some(Position::root());
        }
        t.split('.').map(|s| s.parse::<usize>().ok().filter(|&i| i > 0)).collect::<Option<Vec<_>>>().map(Position)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A finite mapping from variables to terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Subst(pub BTreeMap<Sym, Term>);

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn get(&self, x: &Sym) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Sym, t: Term) {
        self.0.insert(x, t);
    }

    pub fn domain(&self) -> BTreeSet<Sym> {
        self.0.keys().cloned().collect()
    }

    pub fn range(&self) -> Vec<Term> {
        self.0.values().cloned().collect()
    }

    /// σ restricted to `keep`.
    pub fn restrict(&self, keep: &BTreeSet<Sym>) -> Subst {
        Subst(self.0.iter().filter(|(k, _)| keep.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect())
    }

    /// Composition σθ with t(σθ) = (tσ)θ.
    pub fn compose(&self, theta: &Subst) -> Subst {
        let mut out: BTreeMap<Sym, Term> = self.0.iter().map(|(k, v)| (k.clone(), v.apply(theta))).collect();
        for (k, v) in &theta.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        out.retain(|k, v| !matches!(v, Term::Var(y) if y == k));
        Subst(out)
    }
}

impl FromIterator<(Sym, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Sym, Term)>>(iter: I) -> Self {
        Subst(iter.into_iter().collect())
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subst {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(&**k, v)?;
        }
        m.end()
    }
}

/// Matches `pattern` against `subject`, extending `sigma`.
pub fn match_into(pattern: &Term, subject: &Term, sigma: &mut Subst) -> bool {
    match pattern {
        Term::Var(x) => match sigma.get(x) {
            Some(t) => t == subject,
            None => {
                sigma.insert(x.clone(), subject.clone());
                true
            }
        },
        Term::App(f, pa) => match subject {
            Term::App(g, sa) if f == g && pa.len() == sa.len() => {
                pa.iter().zip(sa).all(|(p, s)| match_into(p, s, sigma))
            }
            _ => false,
        },
    }
}

/// Returns σ with pattern·σ = subject.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

/// Most general unifier with occurs check; the result is idempotent.
pub fn unify(s: &Term, t: &Term) -> Option<Subst> {
    unify_all(&[(s.clone(), t.clone())])
}

/// Simultaneous unification of several equations.
pub fn unify_all(eqs: &[(Term, Term)]) -> Option<Subst> {
    let mut sigma = Subst::new();
    let mut work: Vec<(Term, Term)> = eqs.iter().rev().cloned().collect();
    while let Some((a, b)) = work.pop() {
        let a = a.apply(&sigma);
        let b = b.apply(&sigma);
        if a == b {
            continue;
        }
        match (&a, &b) {
            (Term::Var(x), _) => bind(&mut sigma, x, &b)?,
            (_, Term::Var(y)) => bind(&mut sigma, y, &a)?,
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                for (u, v) in fa.iter().zip(ga).rev() {
                    work.push((u.clone(), v.clone()));
                }
            }
        }
    }
    Some(sigma)
}

fn bind(sigma: &mut Subst, x: &Sym, t: &Term) -> Option<()> {
    if t.vars().contains(x) {
        return None;
    }
    let single: Subst = std::iter::once((x.clone(), t.clone())).collect();
    for v in sigma.0.values_mut() {
        *v = v.apply(&single);
    }
    sigma.insert(x.clone(), t.clone());
    Some(())
}

/// Generates variable names not occurring in a given set.
#[derive(Clone, Debug, Default)]
pub struct FreshVars {
    used: BTreeSet<Sym>,
    counter: usize,
}

impl FreshVars {
    pub fn new(used: impl IntoIterator<Item = Sym>) -> FreshVars {
        FreshVars { used: used.into_iter().collect(), counter: 0 }
    }

    pub fn reserve(&mut self, x: Sym) {
        self.used.insert(x);
    }

    /// Internal fresh name `base#n`; the parser rejects `#`, so these never clash with user input.
    pub fn internal(&mut self, base: &str) -> Sym {
        loop {
            self.counter += 1;
            let cand = sym(&format!("{base}{FRESH_SEP}{}", self.counter));
            if self.used.insert(cand.clone()) {
                return cand;
            }
        }
    }

    /// Readable fresh name: `base`, then `base'`, `base''`, ... until unused.
    pub fn readable(&mut self, base: &str) -> Sym {
        let mut cand = base.to_string();
        loop {
            let s = sym(&cand);
            if self.used.insert(s.clone()) {
                return s;
            }
            cand.push('\'');
        }
    }
}

/// A term with one or more parallel holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub term: Term,
    pub holes: Vec<Position>,
}

impl Context {
    /// Builds a context by punching holes into `term` at parallel positions.
    pub fn new(term: Term, holes: Vec<Position>) -> Option<Context> {
        for (i, p) in holes.iter().enumerate() {
            term.subterm(p)?;
            if holes[i + 1..].iter().any(|q| !p.is_parallel_to(q)) {
                return None;
            }
        }
        Some(Context { term, holes })
    }

    /// Fills the holes, left to right, with `fillers`.
    pub fn fill(&self, fillers: &[Term]) -> Option<Term> {
        if fillers.len() != self.holes.len() {
            return None;
        }
        let mut t = self.term.clone();
        for (p, u) in self.holes.iter().zip(fillers) {
            t = t.replace_at(p, u.clone()).ok()?;
        }
        Some(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: &str, a: Vec<Term>) -> Term {
        Term::app(n, a)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn matching_examples() {
        assert_eq!(match_term(&v("x"), &f("f", vec![c("a")])).unwrap().get(&sym("x")), Some(&f("f", vec![c("a")])));
        let s = match_term(&f("add", vec![c("0"), v("y")]), &f("add", vec![c("0"), f("s", vec![c("0")])])).unwrap();
        assert_eq!(s.get(&sym("y")), Some(&f("s", vec![c("0")])));
        assert!(match_term(&f("g", vec![c("d"), v("x"), v("x")]), &f("g", vec![c("d"), c("c"), c("e")])).is_none());
    }

    #[test]
    fn unify_examples() {
        let s = unify(&v("x"), &f("f", vec![v("y")])).unwrap();
        assert_eq!(v("x").apply(&s), f("f", vec![v("y")]));
        let l = f("g", vec![c("d"), v("x"), v("x")]);
        let r = f("g", vec![v("y"), v("z"), v("z")]);
        let s = unify(&l, &r).unwrap();
        assert_eq!(l.apply(&s), r.apply(&s));
        assert_eq!(v("y").apply(&s), c("d"));
        assert!(unify(&c("a"), &c("b")).is_none());
        assert!(unify(&v("x"), &f("f", vec![v("x")])).is_none());
    }

    #[test]
    fn replace_examples() {
        let t = f("h", vec![f("f", vec![c("a")]), f("f", vec![c("b")])]);
        assert_eq!(f("f", vec![c("a")]).replace_at(&Position::root(), c("b")).unwrap(), c("b"));
        assert_eq!(t.replace_at(&Position(vec![1]), c("d")).unwrap(), f("h", vec![c("d"), f("f", vec![c("b")])]));
        assert!(c("a").replace_at(&Position(vec![1]), c("b")).is_err());
    }

    #[test]
    fn positions_examples() {
        assert_eq!(v("x").positions(PosKind::Variable), vec![Position::root()]);
        let t = f("h", vec![f("f", vec![c("a")]), f("f", vec![c("b")])]);
        let ps: Vec<String> = t.positions(PosKind::Function).iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, vec!["ε", "1", "1.1", "2", "2.1"]);
        assert_eq!(f("tp2", vec![v("x"), v("y")]).positions(PosKind::Function), vec![Position::root()]);
    }

    #[test]
    fn fresh_vars() {
        let mut fv = FreshVars::new([sym("x"), sym("x'")]);
        assert_eq!(&*fv.readable("x"), "x''");
        assert!(fv.internal("x").contains(FRESH_SEP));
    }

    #[test]
    fn context_fill() {
        let ctx = Context::new(f("h", vec![c("a"), c("b")]), vec![Position(vec![1]), Position(vec![2])]).unwrap();
        assert_eq!(ctx.fill(&[c("c"), c("d")]).unwrap(), f("h", vec![c("c"), c("d")]));
        assert!(Context::new(f("h", vec![c("a"), c("b")]), vec![Position(vec![]), Position(vec![2])]).is_none());
    }
}
