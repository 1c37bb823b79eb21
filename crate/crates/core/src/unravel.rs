//! The unravelings U, Uopt, UJ and UN, and ultra-property checks.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::classify::is_ground_normal_form;
use crate::system::{Flavor, Rule, System, SystemError};
use crate::term::{sym, FreshVars, Sym, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnravelError {
    #[error("{0}")]
    System(#[from] SystemError),
}

/// Which of the two sequential unravelings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Unraveling {
    U,
    Uopt,
}

/// Argument vector used by UJ and UN.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Vector {
    /// Var(l), the standard definition.
    #[default]
    Lhs,
    /// Var(r), the optimized variants.
    Rhs,
}

/// Name of the i-th U symbol of the rule labelled `label`.
pub fn u_symbol(label: &str, i: usize) -> Sym {
    sym(&format!("U_{label}_{i}"))
}

/// Name of the single U symbol that UJ and UN introduce for a rule.
pub fn uj_symbol(label: &str) -> Sym {
    sym(&format!("U_{label}"))
}

/// True for names produced by the unravelings (`U_…`) or written in the `U<digits>` style.
pub fn is_u_symbol(name: &str) -> bool {
    let mut cs = name.chars();
    cs.next() == Some('U') && matches!(cs.next(), Some('_') | Some('0'..='9'))
}

fn vars(v: Vec<Sym>) -> Vec<Term> {
    v.into_iter().map(Term::Var).collect()
}

fn with_vec(f: Sym, first: Vec<Term>, rest: Vec<Term>) -> Term {
    let mut a = first;
    a.extend(rest);
    Term::App(f, a)
}

/// Per-rule data of a sequential unraveling: Xᵢ, Yᵢ, Zᵢ and the U symbols.
#[derive(Clone, Debug, Serialize)]
pub struct RulePlan {
    pub label: String,
    pub k: usize,
    pub x: Vec<Vec<String>>,
    pub y: Vec<Vec<String>>,
    pub z: Vec<Vec<String>>,
    pub symbols: Vec<String>,
}

/// The variable sets and symbol names an unraveling will use.
pub fn plan(sys: &System) -> Vec<RulePlan> {
    let names = |s: Vec<Sym>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    sys.rules
        .iter()
        .filter(|r| r.is_conditional())
        .map(|r| {
            let k = r.conds.len();
            RulePlan {
                label: r.label.to_string(),
                k,
                x: (1..=k).map(|i| names(r.x_vec(i))).collect(),
                y: (1..=k).map(|i| r.y_set(i).iter().map(|x| x.to_string()).collect()).collect(),
                z: (1..=k).map(|i| names(r.z_vec(i))).collect(),
                symbols: (1..=k).map(|i| u_symbol(&r.label, i).to_string()).collect(),
            }
        })
        .collect()
}

/// Unravels one deterministic rule; unconditional rules pass through.
pub fn unravel_rule(r: &Rule, mode: Unraveling) -> Vec<Rule> {
    let k = r.conds.len();
    if k == 0 {
        return vec![r.clone()];
    }
    let vecs: Vec<Vec<Term>> = (1..=k)
        .map(|i| match mode {
            Unraveling::U => vars(r.x_vec(i)),
            Unraveling::Uopt => vars(r.z_vec(i)),
        })
        .collect();
    let u = |i: usize| u_symbol(&r.label, i);
    let lab = |i: usize| format!("{}/{}", r.label, i);
    let mut out = Vec::with_capacity(k + 1);
    out.push(Rule::unconditional(&lab(0), r.lhs.clone(), with_vec(u(1), vec![r.conds[0].lhs.clone()], vecs[0].clone())));
    for i in 1..k {
        out.push(Rule::unconditional(
            &lab(i),
            with_vec(u(i), vec![r.conds[i - 1].rhs.clone()], vecs[i - 1].clone()),
            with_vec(u(i + 1), vec![r.conds[i].lhs.clone()], vecs[i].clone()),
        ));
    }
    out.push(Rule::unconditional(
        &lab(k),
        with_vec(u(k), vec![r.conds[k - 1].rhs.clone()], vecs[k - 1].clone()),
        r.rhs.clone(),
    ));
    out
}

fn check_fresh(sys: &System, fresh: impl IntoIterator<Item = Sym>) -> Result<(), SystemError> {
    let sig = sys.signature()?;
    for f in fresh {
        if sig.contains_key(&f) {
            return Err(SystemError::ReservedCollision(f.to_string()));
        }
    }
    Ok(())
}

fn sequential(sys: &System, mode: Unraveling) -> Result<System, UnravelError> {
    if sys.flavor != Flavor::Oriented {
        return Err(SystemError::NotOriented.into());
    }
    sys.check_lhs()?;
    if let Some(r) = sys.rules.iter().find(|r| !r.is_deterministic()) {
        return Err(SystemError::NotDeterministic(r.label.to_string()).into());
    }
    check_fresh(sys, sys.rules.iter().flat_map(|r| (1..=r.conds.len()).map(|i| u_symbol(&r.label, i))))?;
    let rules = sys.rules.iter().flat_map(|r| unravel_rule(r, mode)).collect();
    Ok(System { rules, vars: sys.vars.clone(), flavor: Flavor::Oriented, extended: sys.extended, origin: sys.origin.clone() })
}

/// U: l → U₁(s₁, X₁), Uᵢ(tᵢ, Xᵢ) → Uᵢ₊₁(sᵢ₊₁, Xᵢ₊₁), Uₖ(tₖ, Xₖ) → r.
pub fn unravel_u(sys: &System) -> Result<System, UnravelError> {
    sequential(sys, Unraveling::U)
}

/// Uopt: as U with the vectors Zᵢ = Xᵢ ∩ Yᵢ.
pub fn unravel_uopt(sys: &System) -> Result<System, UnravelError> {
    sequential(sys, Unraveling::Uopt)
}

pub fn unravel(sys: &System, mode: Unraveling) -> Result<System, UnravelError> {
    sequential(sys, mode)
}

fn vector_of(r: &Rule, v: Vector) -> Vec<Term> {
    match v {
        Vector::Lhs => vars(r.lhs.vars_ordered()),
        Vector::Rhs => vars(r.rhs.vars_ordered()),
    }
}

/// UJ for join systems: l → U(s₁,t₁,…,sₖ,tₖ,Var(l)), U(x₁,x₁,…,xₖ,xₖ,Var(l)) → r.
pub fn unravel_uj(sys: &System) -> Result<System, UnravelError> {
    unravel_uj_with(sys, Vector::Lhs)
}

pub fn unravel_uj_with(sys: &System, v: Vector) -> Result<System, UnravelError> {
    if sys.flavor != Flavor::Join {
        return Err(SystemError::NotJoin.into());
    }
    sys.check_lhs()?;
    check_fresh(sys, sys.rules.iter().filter(|r| r.is_conditional()).map(|r| uj_symbol(&r.label)))?;
    let mut rules = Vec::new();
    for r in &sys.rules {
        if !r.is_conditional() {
            rules.push(r.clone());
            continue;
        }
        let u = uj_symbol(&r.label);
        let vec = vector_of(r, v);
        let mut first = Vec::new();
        for c in &r.conds {
            first.push(c.lhs.clone());
            first.push(c.rhs.clone());
        }
        let mut fresh = FreshVars::new(r.vars());
        let mut pairs = Vec::new();
        for i in 1..=r.conds.len() {
            let x = Term::Var(fresh.readable(&format!("x{i}")));
            pairs.push(x.clone());
            pairs.push(x);
        }
        rules.push(Rule::unconditional(&format!("{}/0", r.label), r.lhs.clone(), with_vec(u.clone(), first, vec.clone())));
        rules.push(Rule::unconditional(&format!("{}/1", r.label), with_vec(u, pairs, vec), r.rhs.clone()));
    }
    Ok(System { rules, vars: sys.vars.clone(), flavor: Flavor::Oriented, extended: sys.extended, origin: sys.origin.clone() })
}

/// Every tᵢ is a ground normal form of R_u.
pub fn is_normal(sys: &System) -> Result<(), SystemError> {
    let ru = sys.underlying();
    for r in &sys.rules {
        for c in &r.conds {
            if !is_ground_normal_form(&ru, &c.rhs) {
                return Err(SystemError::NotNormal(format!("`{}` in rule {} is not a ground normal form", c.rhs, r.label)));
            }
        }
    }
    Ok(())
}

/// UN for normal systems: l → U(s₁,…,sₖ,Var(l)), U(t₁,…,tₖ,Var(l)) → r.
pub fn unravel_un(sys: &System) -> Result<System, UnravelError> {
    unravel_un_with(sys, Vector::Lhs)
}

pub fn unravel_un_with(sys: &System, v: Vector) -> Result<System, UnravelError> {
    is_normal(sys)?;
    unravel_un_assuming_normal(sys, v)
}

/// UN without the normality check, for inputs normal only up to trivial self-loops
/// such as the output of Norm, where `eq(top,top)` rewrites to itself.
pub fn unravel_un_assuming_normal(sys: &System, v: Vector) -> Result<System, UnravelError> {
    if sys.flavor != Flavor::Oriented {
        return Err(SystemError::NotOriented.into());
    }
    sys.check_lhs()?;
    check_fresh(sys, sys.rules.iter().filter(|r| r.is_conditional()).map(|r| uj_symbol(&r.label)))?;
    let mut rules = Vec::new();
    for r in &sys.rules {
        if !r.is_conditional() {
            rules.push(r.clone());
            continue;
        }
        let u = uj_symbol(&r.label);
        let vec = vector_of(r, v);
        let ss = r.conds.iter().map(|c| c.lhs.clone()).collect();
        let ts = r.conds.iter().map(|c| c.rhs.clone()).collect();
        rules.push(Rule::unconditional(&format!("{}/0", r.label), r.lhs.clone(), with_vec(u.clone(), ss, vec.clone())));
        rules.push(Rule::unconditional(&format!("{}/1", r.label), with_vec(u, ts, vec), r.rhs.clone()));
    }
    Ok(System { rules, vars: sys.vars.clone(), flavor: Flavor::Oriented, extended: sys.extended, origin: sys.origin.clone() })
}

/// Reorders the variable vectors of sequential U symbols (all arguments after the first)
/// by variable name, so systems that differ only in the conventional vector order compare equal.
pub fn sort_u_vectors(sys: &System) -> System {
    fn go(t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => {
                let mut a: Vec<Term> = args.iter().map(go).collect();
                if is_u_symbol(f) && a.len() > 1 && a[1..].iter().all(Term::is_var) {
                    a[1..].sort();
                }
                Term::App(f.clone(), a)
            }
        }
    }
    let rules = sys
        .rules
        .iter()
        .map(|r| Rule::new(&r.label, go(&r.lhs), go(&r.rhs), r.conds.iter().map(|c| crate::system::Condition::new(go(&c.lhs), go(&c.rhs))).collect()))
        .collect();
    System { rules, ..sys.clone() }
}

/// Plain rule properties lifted by the ultra-check.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Property {
    LL,
    RL,
    NE,
    NonLV,
    NonRV,
}

impl Property {
    pub const ALL: [Property; 5] = [Property::LL, Property::RL, Property::NE, Property::NonLV, Property::NonRV];

    /// The property on a single rule.
    pub fn holds(self, r: &Rule) -> bool {
        match self {
            Property::LL => r.lhs.is_linear(),
            Property::RL => r.rhs.is_linear(),
            Property::NE => r.lhs.vars().is_subset(&r.rhs.vars()),
            Property::NonLV => !r.lhs.is_var(),
            Property::NonRV => !r.rhs.is_var(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Property::LL => "LL",
            Property::RL => "RL",
            Property::NE => "NE",
            Property::NonLV => "non-LV",
            Property::NonRV => "non-RV",
        }
    }
}

/// Route used by [`ultra_check`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    /// Unravel, then check every generated rule.
    Direct,
    /// Evaluate the syntactic characterization on the conditional rule.
    Syntactic,
}

fn vars_of(ts: &[&Term]) -> BTreeSet<Sym> {
    ts.iter().flat_map(|t| t.vars()).collect()
}

fn syntactic(r: &Rule, p: Property, mode: Unraveling) -> bool {
    let k = r.conds.len();
    let s = |i: usize| &r.conds[i - 1].lhs;
    let t = |i: usize| &r.conds[i - 1].rhs;
    match (p, mode) {
        (Property::NonLV, _) => !r.lhs.is_var(),
        (Property::NonRV, _) => !r.rhs.is_var(),
        (Property::LL, _) => {
            r.lhs.is_linear() && (1..=k).all(|i| t(i).is_linear() && t(i).vars().is_disjoint(&r.x_set(i)))
        }
        (Property::RL, Unraveling::Uopt) => {
            r.rhs.is_linear() && (1..=k).all(|i| s(i).is_linear() && s(i).vars().is_disjoint(&r.y_set(i)))
        }
        (Property::RL, Unraveling::U) => r.rhs.is_linear() && (1..=k).all(|i| s(i).is_ground()),
        (Property::NE, Unraveling::Uopt) => {
            let mut all: Vec<&Term> = vec![&r.rhs];
            all.extend((1..=k).map(s));
            r.lhs.vars().is_subset(&vars_of(&all))
                && (1..=k).all(|i| {
                    let mut later: Vec<&Term> = vec![&r.rhs];
                    later.extend((i + 1..=k).map(s));
                    t(i).vars().is_subset(&vars_of(&later))
                })
        }
        (Property::NE, Unraveling::U) => {
            let mut lt: Vec<&Term> = vec![&r.lhs];
            lt.extend((1..=k).map(t));
            vars_of(&lt).is_subset(&r.rhs.vars())
        }
    }
}

/// Whether `r` is ultra-`p` with respect to `mode`.
pub fn ultra_check(r: &Rule, p: Property, method: Method, mode: Unraveling) -> bool {
    match method {
        Method::Direct => unravel_rule(r, mode).iter().all(|q| p.holds(q)),
        Method::Syntactic => syntactic(r, p, mode),
    }
}

/// System-level ultra-property: every rule has it.
pub fn ultra_check_system(sys: &System, p: Property, method: Method, mode: Unraveling) -> bool {
    sys.rules.iter().all(|r| ultra_check(r, p, method, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;

    fn r2() -> System {
        parse_system(
            "(VAR x y z w)(RULES
              add^-1(y) -> tp2(0,y)
              add^-1(s(z)) -> tp2(s(x),y) | add^-1(z) == tp2(x,y)
              mult^-1(0) -> tp2(0,y)
              mult^-1(0) -> tp2(x,0)
              mult^-1(s(z)) -> tp2(s(x),s(y)) | add^-1(z) == tp2(w,y), mult^-1(w) == tp2(x,s(y)))",
        )
        .unwrap()
    }

    #[test]
    fn u_of_r2_vectors() {
        let u = unravel_u(&r2()).unwrap();
        let shown: Vec<String> = u.rules.iter().map(|r| r.to_string()).collect();
        assert!(shown.contains(&"add^-1(s(z)) -> U_rho_2_1(add^-1(z),z)".to_string()));
        assert!(shown.contains(&"U_rho_2_1(tp2(x,y),z) -> tp2(s(x),y)".to_string()));
        assert!(shown.contains(&"U_rho_5_1(tp2(w,y),z) -> U_rho_5_2(mult^-1(w),z,w,y)".to_string()));
        let o = unravel_uopt(&r2()).unwrap();
        let shown: Vec<String> = o.rules.iter().map(|r| r.to_string()).collect();
        assert!(shown.contains(&"add^-1(s(z)) -> U_rho_2_1(add^-1(z))".to_string()));
        assert!(shown.contains(&"U_rho_5_1(tp2(w,y)) -> U_rho_5_2(mult^-1(w),y)".to_string()));
    }

    #[test]
    fn pass_through_and_sizes() {
        let r0 = parse_system("(RULES a -> c  a -> d)").unwrap();
        assert_eq!(unravel_u(&r0).unwrap(), r0);
        for r in &r2().rules {
            assert_eq!(unravel_rule(r, Unraveling::U).len(), r.conds.len() + 1);
            assert_eq!(unravel_rule(r, Unraveling::Uopt).len(), r.conds.len() + 1);
        }
    }

    #[test]
    fn r2_ultra_properties() {
        let s = r2();
        for m in [Method::Direct, Method::Syntactic] {
            assert!(ultra_check_system(&s, Property::RL, m, Unraveling::Uopt));
            assert!(ultra_check_system(&s, Property::NE, m, Unraveling::Uopt));
            assert!(!ultra_check_system(&s, Property::LL, m, Unraveling::Uopt));
            assert!(!ultra_check_system(&s, Property::RL, m, Unraveling::U));
            assert!(!ultra_check_system(&s, Property::LL, m, Unraveling::U));
            assert!(!ultra_check_system(&s, Property::NE, m, Unraveling::U));
        }
    }

    #[test]
    fn uj_and_un_shapes() {
        let r12 = parse_system(
            "(CONDITIONTYPE JOIN)(VAR x)(RULES odd(0) -> false  odd(s(x)) -> true | even(x) == true  even(0) -> true)",
        )
        .unwrap();
        let uj = unravel_uj(&r12).unwrap();
        assert_eq!(uj.rules[1].to_string(), "odd(s(x)) -> U_rho_2(even(x),true,x)");
        assert_eq!(uj.rules[2].to_string(), "U_rho_2(x1,x1,x) -> true");
        assert!(unravel_u(&r12).is_err());
        let mut r12p = r12.clone();
        r12p.flavor = Flavor::Oriented;
        let un = unravel_un(&r12p).unwrap();
        assert_eq!(un.rules[2].to_string(), "U_rho_2(true,x) -> true");
        let bad = parse_system("(VAR x)(RULES f(x) -> x | x == g(a)  g(a) -> a)").unwrap();
        assert!(unravel_un(&bad).is_err());
    }

    #[test]
    fn u_symbol_predicate() {
        assert!(is_u_symbol("U_rho_1_2"));
        assert!(is_u_symbol("U19"));
        assert!(!is_u_symbol("Up"));
        assert!(!is_u_symbol("A"));
    }
}
