//! Syntactic classification of conditional rules and systems.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cp::critical_pairs;
use crate::system::{Rule, System};
use crate::term::{match_term, Sym, Term};
use crate::unravel::{ultra_check, Method, Property, Unraveling};

/// Per-rule classification flags.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RuleClass {
    pub label: String,
    pub deterministic: bool,
    /// Smallest n with the rule of Type n.
    pub rule_type: u8,
    pub ll: bool,
    pub rl: bool,
    pub ne: bool,
    pub non_lv: bool,
    pub non_rv: bool,
    pub normal: bool,
    pub ground_conditional: bool,
    pub wll_normal1: bool,
    pub wll_3dctrs: bool,
    pub right_stable: bool,
    pub right_separated: bool,
    pub syntactically_deterministic: bool,
    pub uopt_ll: bool,
    pub uopt_rl: bool,
    pub uopt_ne: bool,
    pub u_ll: bool,
    pub u_rl: bool,
    pub u_ne: bool,
}

/// System-level classification: conjunctions of the rule flags plus global properties.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassificationReport {
    pub rules: Vec<RuleClass>,
    pub deterministic: bool,
    pub system_type: u8,
    pub ll: bool,
    pub rl: bool,
    pub ne: bool,
    pub non_lv: bool,
    pub non_rv: bool,
    pub normal: bool,
    pub ground_conditional: bool,
    pub wll_normal1: bool,
    pub wll_3dctrs: bool,
    pub right_stable: bool,
    pub right_separated: bool,
    pub syntactically_deterministic: bool,
    /// Strong determinism is not decided; `Some(true)` only when the syntactic check passes.
    pub strongly_deterministic: Option<bool>,
    pub uopt_ll: bool,
    pub uopt_rl: bool,
    pub uopt_ne: bool,
    pub u_ll: bool,
    pub u_rl: bool,
    pub u_ne: bool,
    pub constructor_system: bool,
    pub overlay: bool,
    pub non_overlapping: bool,
    pub defined: Vec<String>,
    pub constructors: Vec<String>,
}

/// No rule of the unconditional system `ru` matches any subterm of `t`.
pub fn is_normal_form(ru: &System, t: &Term) -> bool {
    let here = ru.rules.iter().all(|r| match_term(&r.lhs, t).is_none());
    here && t.args().iter().all(|a| is_normal_form(ru, a))
}

pub fn is_ground_normal_form(ru: &System, t: &Term) -> bool {
    t.is_ground() && is_normal_form(ru, t)
}

fn vars_of<'a>(ts: impl IntoIterator<Item = &'a Term>) -> BTreeSet<Sym> {
    ts.into_iter().flat_map(|t| t.vars()).collect()
}

fn rule_type(r: &Rule) -> u8 {
    let lv = r.lhs.vars();
    let conds = vars_of(r.conds.iter().flat_map(|c| [&c.lhs, &c.rhs]));
    let rv = r.rhs.vars();
    if rv.is_subset(&lv) && conds.is_subset(&lv) {
        1
    } else if rv.is_subset(&lv) {
        2
    } else if rv.iter().all(|x| lv.contains(x) || conds.contains(x)) {
        3
    } else {
        4
    }
}

fn is_constructor_term(t: &Term, defined: &BTreeSet<Sym>) -> bool {
    !t.contains_symbol(&|f| defined.contains(f))
}

/// Every x occurring at least twice in l, t₁, …, tₖ occurs in none of r, s₁, …, sₖ.
fn wll_3dctrs_rule(r: &Rule) -> bool {
    let mut occ = r.lhs.var_occurrences();
    for c in &r.conds {
        occ.extend(c.rhs.var_occurrences());
    }
    let rs = vars_of(std::iter::once(&r.rhs).chain(r.conds.iter().map(|c| &c.lhs)));
    occ.iter().filter(|x| occ.iter().filter(|y| y == x).count() >= 2).all(|x| !rs.contains(x))
}

/// Conditional rules are Uopt-LL; unconditional ones are linear on Var(l) ∩ Var(r).
fn wll_normal1_shape(r: &Rule) -> bool {
    if r.is_conditional() {
        ultra_check(r, Property::LL, Method::Syntactic, Unraveling::Uopt)
    } else {
        let keep = r.rhs.vars();
        let occ: Vec<Sym> = r.lhs.var_occurrences().into_iter().filter(|x| keep.contains(x)).collect();
        let set: BTreeSet<&Sym> = occ.iter().collect();
        set.len() == occ.len()
    }
}

pub fn classify_rule(sys: &System, ru: &System, defined: &BTreeSet<Sym>, r: &Rule) -> RuleClass {
    let k = r.conds.len();
    let deterministic = r.is_deterministic();
    let rule_type = rule_type(r);
    let normal = r.conds.iter().all(|c| is_ground_normal_form(ru, &c.rhs));
    let _ = sys;
    RuleClass {
        label: r.label.to_string(),
        deterministic,
        rule_type,
        ll: r.lhs.is_linear(),
        rl: r.rhs.is_linear(),
        ne: r.lhs.vars().is_subset(&r.rhs.vars()),
        non_lv: !r.lhs.is_var(),
        non_rv: !r.rhs.is_var(),
        normal,
        ground_conditional: r.conds.iter().all(|c| c.lhs.is_ground() && c.rhs.is_ground()),
        wll_normal1: normal && rule_type == 1 && wll_normal1_shape(r),
        wll_3dctrs: wll_3dctrs_rule(r),
        right_stable: (1..=k).all(|i| r.conds[i - 1].rhs.is_linear() && r.conds[i - 1].rhs.vars().is_disjoint(&r.x_set(i))),
        right_separated: (1..=k).all(|i| r.conds[i - 1].rhs.vars().is_disjoint(&r.x_set(i))),
        syntactically_deterministic: deterministic
            && r.conds.iter().all(|c| is_constructor_term(&c.rhs, defined) || is_ground_normal_form(ru, &c.rhs)),
        uopt_ll: ultra_check(r, Property::LL, Method::Syntactic, Unraveling::Uopt),
        uopt_rl: ultra_check(r, Property::RL, Method::Syntactic, Unraveling::Uopt),
        uopt_ne: ultra_check(r, Property::NE, Method::Syntactic, Unraveling::Uopt),
        u_ll: ultra_check(r, Property::LL, Method::Syntactic, Unraveling::U),
        u_rl: ultra_check(r, Property::RL, Method::Syntactic, Unraveling::U),
        u_ne: ultra_check(r, Property::NE, Method::Syntactic, Unraveling::U),
    }
}

/// Computes every classification predicate of a system.
pub fn classify(sys: &System) -> ClassificationReport {
    let ru = sys.underlying();
    let defined = sys.defined();
    let rules: Vec<RuleClass> = sys.rules.iter().map(|r| classify_rule(sys, &ru, &defined, r)).collect();
    let all = |f: fn(&RuleClass) -> bool| rules.iter().all(f);
    let constructor_system = sys
        .rules
        .iter()
        .all(|r| r.lhs.args().iter().all(|a| is_constructor_term(a, &defined)));
    let cps = critical_pairs(sys);
    let syntactically_deterministic = all(|r| r.syntactically_deterministic);
    let system_type = rules.iter().map(|r| r.rule_type).max().unwrap_or(1);
    ClassificationReport {
        deterministic: all(|r| r.deterministic),
        system_type,
        ll: all(|r| r.ll),
        rl: all(|r| r.rl),
        ne: all(|r| r.ne),
        non_lv: all(|r| r.non_lv),
        non_rv: all(|r| r.non_rv),
        normal: all(|r| r.normal),
        ground_conditional: all(|r| r.ground_conditional),
        wll_normal1: all(|r| r.wll_normal1),
        wll_3dctrs: all(|r| r.deterministic && r.rule_type <= 3 && r.wll_3dctrs),
        right_stable: all(|r| r.right_stable),
        right_separated: all(|r| r.right_separated),
        syntactically_deterministic,
        strongly_deterministic: if syntactically_deterministic { Some(true) } else { None },
        uopt_ll: all(|r| r.uopt_ll),
        uopt_rl: all(|r| r.uopt_rl),
        uopt_ne: all(|r| r.uopt_ne),
        u_ll: all(|r| r.u_ll),
        u_rl: all(|r| r.u_rl),
        u_ne: all(|r| r.u_ne),
        constructor_system,
        overlay: cps.iter().all(|c| c.position.is_root()),
        non_overlapping: cps.is_empty(),
        defined: defined.iter().map(|s| s.to_string()).collect(),
        constructors: sys.constructors().iter().map(|s| s.to_string()).collect(),
        rules,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;

    #[test]
    fn empty_system_is_vacuous() {
        let c = classify(&parse_system("(RULES)").unwrap());
        assert!(c.deterministic && c.ll && c.rl && c.ne && c.non_lv && c.non_rv && c.normal);
        assert!(c.uopt_ll && c.u_rl && c.constructor_system && c.overlay && c.non_overlapping);
        assert!(c.defined.is_empty());
    }

    #[test]
    fn r3_is_3dctrs() {
        let r3 = parse_system(
            "(VAR x)(RULES f(x) -> x | x == e  g(d,x,x) -> A  h(x,x) -> g(x,x,f(k))
              a -> c  a -> d  b -> c  b -> d  c -> e  c -> l  k -> l  k -> m  d -> m)",
        )
        .unwrap();
        let c = classify(&r3);
        assert!(c.deterministic);
        assert!(c.system_type <= 3);
        assert!(!c.ll);
    }

    #[test]
    fn types() {
        let s = parse_system("(VAR x y z)(RULES f(x) -> x | x == y  g(x) -> y | x == y  h(x) -> z)").unwrap();
        let c = classify(&s);
        assert_eq!(c.rules.iter().map(|r| r.rule_type).collect::<Vec<_>>(), vec![2, 3, 4]);
    }
}
