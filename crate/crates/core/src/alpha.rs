//! Equality of systems modulo variable renaming and renaming of generated symbols.

use std::collections::BTreeMap;

use crate::system::{Rule, System};
use crate::term::{Sym, Term};
use crate::unravel::is_u_symbol;

/// Names introduced by the transformations rather than written by the user.
pub fn is_generated(name: &str) -> bool {
    is_u_symbol(name)
        || name == "eq"
        || name == "top"
        || name == "curly"
        || name == "bot"
        || name.ends_with("^bar")
        || numbered(name, "eq")
        || numbered(name, "stk")
}

fn numbered(name: &str, prefix: &str) -> bool {
    name.strip_prefix(prefix).is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
}

/// Canonical rules (variables renamed by first occurrence), duplicates removed, labels ignored.
fn canonical_set(sys: &System) -> Vec<Rule> {
    let mut out: Vec<Rule> = Vec::new();
    for r in &sys.rules {
        let c = r.canonical();
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Same rule sets modulo per-rule variable renaming.
pub fn equal_modulo_vars(a: &System, b: &System) -> bool {
    let (x, y) = (canonical_set(a), canonical_set(b));
    x.len() == y.len() && x.iter().all(|r| y.contains(r))
}

/// Rules of `a` missing from `b`, modulo variable renaming.
pub fn missing_modulo_vars(a: &System, b: &System) -> Vec<Rule> {
    let y = canonical_set(b);
    let mut out: Vec<Rule> = Vec::new();
    for r in &a.rules {
        if !y.contains(&r.canonical()) && !out.iter().any(|q| q.canonical() == r.canonical()) {
            out.push(r.clone());
        }
    }
    out
}

/// Equality after renaming the symbols of `a` through `pairing`.
pub fn equal_under_pairing(a: &System, b: &System, pairing: &BTreeMap<Sym, Sym>) -> bool {
    let renamed = System {
        rules: a.rules.iter().map(|r| r.map_syms(&|f| pairing.get(f).cloned().unwrap_or_else(|| f.clone()))).collect(),
        ..a.clone()
    };
    equal_modulo_vars(&renamed, b)
}

struct Search<'a> {
    left: &'a [Rule],
    right: &'a [Rule],
    used: Vec<bool>,
    fwd: BTreeMap<Sym, Sym>,
    back: BTreeMap<Sym, Sym>,
}

impl Search<'_> {
    /// Extends the symbol bijection so that `s` maps onto `t`; returns the newly bound symbols.
    fn walk(&mut self, s: &Term, t: &Term, added: &mut Vec<Sym>) -> bool {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::App(f, xs), Term::App(g, ys)) => {
                if xs.len() != ys.len() {
                    return false;
                }
                let fg = is_generated(f);
                if fg != is_generated(g) {
                    return false;
                }
                if fg {
                    match (self.fwd.get(f), self.back.get(g)) {
                        (Some(h), _) if h != g => return false,
                        (None, Some(_)) => return false,
                        (None, None) => {
                            self.fwd.insert(f.clone(), g.clone());
                            self.back.insert(g.clone(), f.clone());
                            added.push(f.clone());
                        }
                        _ => {}
                    }
                } else if f != g {
                    return false;
                }
                xs.iter().zip(ys).all(|(a, b)| self.walk(a, b, added))
            }
            _ => false,
        }
    }

    fn rule(&mut self, a: &Rule, b: &Rule, added: &mut Vec<Sym>) -> bool {
        a.conds.len() == b.conds.len()
            && self.walk(&a.lhs, &b.lhs, added)
            && self.walk(&a.rhs, &b.rhs, added)
            && a.conds.iter().zip(&b.conds).all(|(c, d)| self.walk(&c.lhs, &d.lhs, added) && self.walk(&c.rhs, &d.rhs, added))
    }

    fn undo(&mut self, added: Vec<Sym>) {
        for f in added {
            if let Some(g) = self.fwd.remove(&f) {
                self.back.remove(&g);
            }
        }
    }

    fn solve(&mut self, i: usize) -> bool {
        if i == self.left.len() {
            return true;
        }
        for j in 0..self.right.len() {
            if self.used[j] {
                continue;
            }
            let mut added = Vec::new();
            if self.rule(&self.left[i].clone(), &self.right[j].clone(), &mut added) {
                self.used[j] = true;
                if self.solve(i + 1) {
                    return true;
                }
                self.used[j] = false;
            }
            self.undo(added);
        }
        false
    }
}

/// Finds a bijection between generated symbols making the rule sets equal modulo
/// per-rule variable renaming; the witness maps symbols of `a` to symbols of `b`.
pub fn alpha_u_witness(a: &System, b: &System) -> Option<BTreeMap<Sym, Sym>> {
    let (left, right) = (canonical_set(a), canonical_set(b));
    if left.len() != right.len() {
        return None;
    }
    let mut s = Search { left: &left, right: &right, used: vec![false; right.len()], fwd: BTreeMap::new(), back: BTreeMap::new() };
    s.solve(0).then_some(s.fwd)
}

pub fn alpha_u_equal(a: &System, b: &System) -> bool {
    alpha_u_witness(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;

    #[test]
    fn renaming_of_u_symbols() {
        let a = parse_system("(VAR x)(RULES f(x) -> U4(x,x)  U4(e,x) -> x)").unwrap();
        let b = parse_system("(VAR y)(RULES U_r_1(e,y) -> y  f(y) -> U_r_1(y,y))").unwrap();
        let w = alpha_u_witness(&a, &b).unwrap();
        assert_eq!(&*w[&crate::term::sym("U4")], "U_r_1");
        let c = parse_system("(VAR x)(RULES f(x) -> U4(x,x)  U4(d,x) -> x)").unwrap();
        assert!(!alpha_u_equal(&c, &b));
        assert!(alpha_u_equal(&a, &a));
    }

    #[test]
    fn bijection_is_enforced() {
        let a = parse_system("(RULES f -> U1  g -> U2)").unwrap();
        let b = parse_system("(RULES f -> U9  g -> U9)").unwrap();
        assert!(!alpha_u_equal(&a, &b));
    }

    #[test]
    fn duplicates_collapse() {
        let a = parse_system("(VAR x y)(RULES f(x) -> x  f(y) -> y)").unwrap();
        let b = parse_system("(VAR z)(RULES f(z) -> z)").unwrap();
        assert!(equal_modulo_vars(&a, &b));
        assert!(alpha_u_equal(&a, &b));
    }

    #[test]
    fn generated_names() {
        for n in ["U_rho_1_1", "eq", "eq3", "top", "split^bar", "curly", "bot", "stk2"] {
            assert!(is_generated(n), "{n}");
        }
        for n in ["equal", "stk", "f", "tp2"] {
            assert!(!is_generated(n), "{n}");
        }
    }
}
