//! Critical pairs, carrying conditions for conditional rules.

use serde::Serialize;

use crate::system::{Condition, Rule, System};
use crate::term::{unify, FreshVars, PosKind, Position, Subst, Term};

/// An overlap of `inner` into `outer` at `position`.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPair {
    pub outer: String,
    pub inner: String,
    pub position: Position,
    /// (C[r₁]θ, r₂θ), where l₂ = C[t] and θ unifies l₁ with t.
    pub pair: (Term, Term),
    pub conds: Vec<Condition>,
    pub trivial: bool,
    pub mgu: Subst,
    /// Rules as renamed apart (inner renamed), so the pair replays from these.
    pub outer_rule: Rule,
    pub inner_rule: Rule,
}

/// Renames the variables of `r` apart from `avoid` using readable primed names.
fn rename_apart(r: &Rule, avoid: &Rule) -> Rule {
    let mut fresh = FreshVars::new(avoid.vars().into_iter().chain(r.vars()));
    let clash: std::collections::BTreeSet<_> = avoid.vars();
    let mut map = std::collections::BTreeMap::new();
    r.map_vars(&mut |x| {
        if !clash.contains(x) {
            return x.clone();
        }
        map.entry(x.clone()).or_insert_with(|| fresh.readable(&format!("{x}'"))).clone()
    })
}

/// All critical pairs; the root overlap of a rule with its own renamed copy is excluded.
pub fn critical_pairs(sys: &System) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    for (j, outer) in sys.rules.iter().enumerate() {
        for p in outer.lhs.positions(PosKind::Function) {
            let t = outer.lhs.subterm(&p).expect("position from positions()");
            for (i, inner0) in sys.rules.iter().enumerate() {
                if i == j && p.is_root() {
                    continue;
                }
                let inner = rename_apart(inner0, outer);
                let Some(theta) = unify(&inner.lhs, t) else { continue };
                let left = outer.lhs.replace_at(&p, inner.rhs.clone()).expect("valid position").apply(&theta);
                let right = outer.rhs.apply(&theta);
                let conds = inner
                    .conds
                    .iter()
                    .chain(&outer.conds)
                    .map(|c| Condition::new(c.lhs.apply(&theta), c.rhs.apply(&theta)))
                    .collect();
                out.push(CriticalPair {
                    outer: outer.label.to_string(),
                    inner: inner.label.to_string(),
                    position: p.clone(),
                    trivial: left == right,
                    pair: (left, right),
                    conds,
                    mgu: theta,
                    outer_rule: outer.clone(),
                    inner_rule: inner,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;
    use std::collections::BTreeSet;

    #[test]
    fn no_overlap() {
        assert!(critical_pairs(&parse_system("(RULES a -> b)").unwrap()).is_empty());
    }

    #[test]
    fn r7_single_class() {
        let r7 = parse_system(
            "(VAR x y ys zs1 zs2)(RULES
              split(x,nil) -> tp2(nil,nil)
              split(x,cons(y,ys)) -> tp2(zs1,cons(y,zs2)) | split(x,ys) == tp2(zs1,zs2), le(x,y) == true
              split(x,cons(y,ys)) -> tp2(cons(y,zs1),zs2) | split(x,ys) == tp2(zs1,zs2), le(x,y) == false
              le(0,y) -> true
              le(s(x),0) -> false
              le(s(x),s(y)) -> le(x,y))",
        )
        .unwrap();
        let cps = critical_pairs(&r7);
        let classes: BTreeSet<BTreeSet<String>> =
            cps.iter().map(|c| [c.outer.clone(), c.inner.clone()].into_iter().collect()).collect();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes.into_iter().next().unwrap(), ["rho_2".to_string(), "rho_3".to_string()].into());
        for c in &cps {
            assert_eq!(c.conds.len(), 4);
        }
    }

    #[test]
    fn pairs_replay() {
        let s = parse_system("(VAR x y)(RULES f(g(x),y) -> x  g(a) -> b  f(x,x) -> c)").unwrap();
        for c in critical_pairs(&s) {
            let lt = c.outer_rule.lhs.apply(&c.mgu);
            let inner_at = lt.subterm(&c.position).unwrap().clone();
            assert_eq!(inner_at, c.inner_rule.lhs.apply(&c.mgu));
            assert_eq!(c.pair.1, c.outer_rule.rhs.apply(&c.mgu));
            assert_eq!(c.pair.0, lt.replace_at(&c.position, c.inner_rule.rhs.apply(&c.mgu)).unwrap());
        }
    }
}
