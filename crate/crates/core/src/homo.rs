//! Tree homomorphisms, the Norm and Det conversions, and simulation checks.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::alpha::{is_generated, missing_modulo_vars};
use crate::classify::is_ground_normal_form;
use crate::system::{Condition, Flavor, Rule, Signature, System, SystemError};
use crate::term::{sym, FreshVars, Subst, Sym, Term};
use crate::unravel::{is_normal, u_symbol, uj_symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomoError {
    #[error("mapping gives `{symbol}` arity {mapped} but the system uses arity {used}")]
    ArityMismatch { symbol: String, mapped: usize, used: usize },
    #[error("construction `{theorem}` requires {predicate}")]
    Hypothesis { theorem: String, predicate: String },
    #[error("{0}")]
    System(#[from] SystemError),
}

/// Canonical pattern variable `x<i>` (1-based).
pub fn xvar(i: usize) -> Term {
    Term::var(&format!("x{i}"))
}

/// A tree homomorphism given by per-symbol patterns over x1..xn; unmapped symbols are identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Homomorphism {
    map: BTreeMap<Sym, (usize, Term)>,
}

impl Serialize for Homomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = self
            .map
            .iter()
            .map(|(f, (n, p))| (Term::App(f.clone(), (1..=*n).map(xvar).collect()).to_string(), p.to_string()))
            .collect();
        m.serialize(s)
    }
}

/// Flags of a homomorphism relative to a system.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct HomoFlags {
    pub linear: bool,
    pub non_erasing: bool,
    pub f_identical: bool,
    pub ev_preserving: bool,
}

impl Homomorphism {
    pub fn identity() -> Homomorphism {
        Homomorphism::default()
    }

    /// Sets φ(f(x1,…,xn)) = `pattern`.
    pub fn set(&mut self, f: Sym, arity: usize, pattern: Term) {
        self.map.insert(f, (arity, pattern));
    }

    pub fn entries(&self) -> &BTreeMap<Sym, (usize, Term)> {
        &self.map
    }

    pub fn get(&self, f: &str) -> Option<&(usize, Term)> {
        self.map.get(f)
    }

    /// Rejects mappings whose arity disagrees with the signature.
    pub fn check(&self, sig: &Signature) -> Result<(), HomoError> {
        for (f, (n, _)) in &self.map {
            if let Some(&m) = sig.get(f) {
                if m != *n {
                    return Err(HomoError::ArityMismatch { symbol: f.to_string(), mapped: *n, used: m });
                }
            }
        }
        Ok(())
    }

    /// φ(x) = x, φ(f(t₁,…,tₙ)) = φ(f){xᵢ ↦ φ(tᵢ)}.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.apply(a)).collect();
                match self.map.get(f) {
                    None => Term::App(f.clone(), args),
                    Some((_, pat)) => {
                        let s: Subst =
                            args.into_iter().enumerate().map(|(i, a)| (sym(&format!("x{}", i + 1)), a)).collect();
                        pat.apply(&s)
                    }
                }
            }
        }
    }

    pub fn apply_rule(&self, r: &Rule) -> Rule {
        Rule {
            label: r.label.clone(),
            lhs: self.apply(&r.lhs),
            rhs: self.apply(&r.rhs),
            conds: r.conds.iter().map(|c| Condition::new(self.apply(&c.lhs), self.apply(&c.rhs))).collect(),
        }
    }

    /// φ(R) as a rule set: duplicates (modulo variables) are collapsed.
    pub fn apply_system(&self, sys: &System) -> Result<System, HomoError> {
        self.check(&sys.signature()?)?;
        let mut rules: Vec<Rule> = Vec::new();
        for r in &sys.rules {
            let q = self.apply_rule(r);
            if !rules.iter().any(|p| p.canonical() == q.canonical()) {
                rules.push(q);
            }
        }
        let extended = rules.iter().any(|r| r.lhs.is_var()) || sys.extended;
        Ok(System { rules, extended, ..sys.clone() })
    }

    pub fn is_linear(&self) -> bool {
        self.map.values().all(|(_, p)| p.is_linear())
    }

    /// Var(φ(f)) = {x1,…,xn} for every mapped f.
    pub fn is_non_erasing(&self) -> bool {
        self.map.values().all(|(n, p)| {
            let want: BTreeSet<Sym> = (1..=*n).map(|i| sym(&format!("x{i}"))).collect();
            p.vars() == want
        })
    }

    /// φ(f) = f(x1,…,xn) for every f in `original`.
    pub fn is_f_identical(&self, original: &BTreeSet<Sym>) -> bool {
        self.map.iter().filter(|(f, _)| original.contains(*f)).all(|(f, (n, p))| {
            *p == Term::App(f.clone(), (1..=*n).map(xvar).collect())
        })
    }

    /// EVar(φ(l) → φ(r)) = EVar(l → r) for every rule of the unconditional system `sys`.
    pub fn is_ev_preserving(&self, sys: &System) -> bool {
        sys.rules.iter().all(|r| {
            let ev = |l: &Term, r: &Term| -> BTreeSet<Sym> { r.vars().difference(&l.vars()).cloned().collect() };
            ev(&r.lhs, &r.rhs) == ev(&self.apply(&r.lhs), &self.apply(&r.rhs))
        })
    }

    /// All flags, with F-identity judged on the non-generated symbols of `sys`.
    pub fn flags(&self, sys: &System) -> HomoFlags {
        let original: BTreeSet<Sym> = sys.sig().into_keys().filter(|f| !is_generated(f)).collect();
        HomoFlags {
            linear: self.is_linear(),
            non_erasing: self.is_non_erasing(),
            f_identical: self.is_f_identical(&original),
            ev_preserving: self.is_ev_preserving(sys),
        }
    }
}

fn check_reserved(sys: &System, names: &[Sym]) -> Result<(), SystemError> {
    let sig = sys.signature()?;
    match names.iter().find(|n| sig.contains_key(*n)) {
        Some(n) => Err(SystemError::ReservedCollision(n.to_string())),
        None => Ok(()),
    }
}

/// Norm: sᵢ ↓ tᵢ becomes eq(sᵢ,tᵢ) ↠ eq(top,top), plus eq(x,x) → eq(top,top).
pub fn norm_transform(sys: &System) -> Result<System, HomoError> {
    if sys.flavor != Flavor::Join {
        return Err(SystemError::NotJoin.into());
    }
    check_reserved(sys, &[sym("eq"), sym("top")])?;
    let top = Term::constant("top");
    let eqtop = Term::app("eq", vec![top.clone(), top]);
    let mut rules: Vec<Rule> = sys
        .rules
        .iter()
        .map(|r| Rule {
            conds: r
                .conds
                .iter()
                .map(|c| Condition::new(Term::app("eq", vec![c.lhs.clone(), c.rhs.clone()]), eqtop.clone()))
                .collect(),
            ..r.clone()
        })
        .collect();
    let x = Term::var("x");
    rules.insert(0, Rule::unconditional("eq_rule", Term::app("eq", vec![x.clone(), x]), eqtop));
    let mut vars = sys.vars.clone();
    vars.insert(sym("x"));
    Ok(System { rules, vars, flavor: Flavor::Oriented, extended: sys.extended, origin: sys.origin.clone() })
}

/// Name of the 2k-ary constructor Det introduces.
pub fn eq_k(k: usize) -> Sym {
    sym(&format!("eq{k}"))
}

/// Det: the conditions become eq_k(s₁,t₁,…,sₖ,tₖ) ↠ eq_k(x₁,x₁,…,xₖ,xₖ).
pub fn det_transform(sys: &System) -> Result<System, HomoError> {
    if sys.flavor != Flavor::Join {
        return Err(SystemError::NotJoin.into());
    }
    let ks: BTreeSet<usize> = sys.rules.iter().map(|r| r.conds.len()).filter(|k| *k > 0).collect();
    check_reserved(sys, &ks.iter().map(|k| eq_k(*k)).collect::<Vec<_>>())?;
    let mut vars = sys.vars.clone();
    let mut rules = Vec::new();
    for r in &sys.rules {
        let k = r.conds.len();
        if k == 0 {
            rules.push(r.clone());
            continue;
        }
        let mut fresh = FreshVars::new(r.vars());
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, c) in r.conds.iter().enumerate() {
            left.push(c.lhs.clone());
            left.push(c.rhs.clone());
            let x = fresh.readable(&format!("x{}", i + 1));
            vars.insert(x.clone());
            right.push(Term::Var(x.clone()));
            right.push(Term::Var(x));
        }
        let cond = Condition::new(Term::App(eq_k(k), left), Term::App(eq_k(k), right));
        rules.push(Rule { conds: vec![cond], ..r.clone() });
    }
    Ok(System { rules, vars, flavor: Flavor::Oriented, extended: sys.extended, origin: sys.origin.clone() })
}

/// The φ constructions relating pairs of unravelings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Construction {
    /// φ(U(R)) = Uopt(R).
    UToUopt,
    /// φ(UJ(R)) = UN(Norm(R)).
    UjToUnNorm,
    /// φ(UN(R)) = UJ(R′), R normal read as join.
    UnToUj,
    /// φ(UJ(R)) = UN(R′), R a join system with ground normal tᵢ.
    UjToUnNormalJoin,
    /// φ(UJ(R)) = U(Det(R)).
    UjToUdet,
    /// φ(U(R)) minus identity rules = UN(R), R normal.
    UToUn,
}

impl Construction {
    pub const ALL: [Construction; 6] = [
        Construction::UToUopt,
        Construction::UjToUnNorm,
        Construction::UnToUj,
        Construction::UjToUnNormalJoin,
        Construction::UjToUdet,
        Construction::UToUn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::UToUopt => "u_to_uopt",
            Construction::UjToUnNorm => "uj_to_unnorm",
            Construction::UnToUj => "un_to_uj",
            Construction::UjToUnNormalJoin => "uj_to_un_normaljoin",
            Construction::UjToUdet => "uj_to_udet",
            Construction::UToUn => "u_to_un",
        }
    }

    pub fn parse(name: &str) -> Option<Construction> {
        Construction::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Flags the construction's soundness-transfer argument relies on.
    pub fn required(self, f: &HomoFlags) -> bool {
        match self {
            Construction::UToUopt | Construction::UToUn | Construction::UjToUnNormalJoin => {
                f.f_identical && f.ev_preserving
            }
            Construction::UjToUnNorm | Construction::UnToUj | Construction::UjToUdet => f.f_identical && f.non_erasing,
        }
    }
}

fn hyp(c: Construction, predicate: &str) -> HomoError {
    HomoError::Hypothesis { theorem: c.name().to_string(), predicate: predicate.to_string() }
}

/// Pattern variable for each element of `vec`, offset past `offset` leading slots.
fn slot_of(vec: &[Sym], offset: usize) -> BTreeMap<Sym, Term> {
    vec.iter().enumerate().map(|(j, x)| (x.clone(), xvar(j + offset + 1))).collect()
}

fn lhs_vars(r: &Rule) -> Vec<Sym> {
    r.lhs.vars_ordered()
}

/// Builds the homomorphism of construction `c` for the system `sys`.
pub fn canonical_phi(c: Construction, sys: &System) -> Result<Homomorphism, HomoError> {
    let mut h = Homomorphism::identity();
    let join = sys.flavor == Flavor::Join;
    let cond_rules = sys.rules.iter().filter(|r| r.is_conditional());
    match c {
        Construction::UToUopt => {
            if join || sys.rules.iter().any(|r| !r.is_deterministic()) {
                return Err(hyp(c, "an oriented deterministic system"));
            }
            for r in cond_rules {
                for i in 1..=r.conds.len() {
                    let x: Vec<Sym> = r.x_vec(i);
                    let slots = slot_of(&x, 1);
                    let mut args = vec![xvar(1)];
                    args.extend(r.z_vec(i).iter().map(|z| slots[z].clone()));
                    h.set(u_symbol(&r.label, i), 1 + x.len(), Term::App(u_symbol(&r.label, i), args));
                }
            }
        }
        Construction::UjToUnNorm | Construction::UjToUdet | Construction::UjToUnNormalJoin => {
            if !join {
                return Err(hyp(c, "a join system"));
            }
            if c == Construction::UjToUnNormalJoin {
                let ru = sys.underlying();
                if !sys.rules.iter().all(|r| r.conds.iter().all(|d| is_ground_normal_form(&ru, &d.rhs))) {
                    return Err(hyp(c, "every tᵢ to be a ground normal form"));
                }
            }
            for r in cond_rules {
                let k = r.conds.len();
                let n = lhs_vars(r).len();
                let tail = (2 * k + 1..=2 * k + n).map(xvar);
                let u = uj_symbol(&r.label);
                let pat = match c {
                    Construction::UjToUnNorm => {
                        let mut a: Vec<Term> =
                            (0..k).map(|i| Term::app("eq", vec![xvar(2 * i + 1), xvar(2 * i + 2)])).collect();
                        a.extend(tail);
                        Term::App(u.clone(), a)
                    }
                    Construction::UjToUdet => {
                        let mut a = vec![Term::App(eq_k(k), (1..=2 * k).map(xvar).collect())];
                        a.extend(tail);
                        Term::App(u_symbol(&r.label, 1), a)
                    }
                    _ => {
                        let mut a: Vec<Term> = (0..k).map(|i| xvar(2 * i + 1)).collect();
                        a.extend(tail);
                        Term::App(u.clone(), a)
                    }
                };
                h.set(u, 2 * k + n, pat);
            }
        }
        Construction::UnToUj => {
            if join || is_normal(sys).is_err() {
                return Err(hyp(c, "a normal oriented system"));
            }
            for r in cond_rules {
                let k = r.conds.len();
                let n = lhs_vars(r).len();
                let mut a = Vec::new();
                for (i, d) in r.conds.iter().enumerate() {
                    a.push(xvar(i + 1));
                    a.push(d.rhs.clone());
                }
                a.extend((k + 1..=k + n).map(xvar));
                h.set(uj_symbol(&r.label), k + n, Term::App(uj_symbol(&r.label), a));
            }
        }
        Construction::UToUn => {
            if join || is_normal(sys).is_err() {
                return Err(hyp(c, "a normal oriented system"));
            }
            for r in cond_rules {
                let k = r.conds.len();
                let vl = lhs_vars(r);
                for i in 1..=k {
                    let x: Vec<Sym> = r.x_vec(i);
                    let slots = slot_of(&x, 1);
                    let to_pat = |t: &Term| t.apply(&Subst(slots.clone()));
                    let mut a: Vec<Term> = r.conds[..i - 1].iter().map(|d| d.rhs.clone()).collect();
                    a.push(xvar(1));
                    a.extend(r.conds[i..].iter().map(|d| to_pat(&d.lhs)));
                    a.extend(vl.iter().map(|v| slots[v].clone()));
                    h.set(u_symbol(&r.label, i), 1 + x.len(), Term::App(uj_symbol(&r.label), a));
                }
            }
        }
    }
    Ok(h)
}

/// Outcome of comparing `lhs` with φ(`rhs`).
#[derive(Clone, Debug, Serialize)]
pub struct SimulationVerdict {
    pub equal: bool,
    /// Rules of the left system absent from φ(rhs).
    pub missing: Vec<String>,
    /// Rules of φ(rhs) absent from the left system.
    pub extra: Vec<String>,
    pub discarded_identity_rules: usize,
    pub flags: HomoFlags,
}

/// Rule `t → t` built only from generated symbols' images (never an original-signature rule).
fn is_generated_identity(r: &Rule) -> bool {
    r.conds.is_empty() && r.lhs == r.rhs && r.lhs.contains_symbol(&is_generated)
}

/// Compares `lhs` with φ(`rhs`) as rule sets modulo variable renaming.
pub fn check_simulation(
    lhs: &System,
    rhs: &System,
    phi: &Homomorphism,
    modulo_identity: bool,
) -> Result<SimulationVerdict, HomoError> {
    let mut image = phi.apply_system(rhs)?;
    let before = image.rules.len();
    if modulo_identity {
        image.rules.retain(|r| !is_generated_identity(r));
    }
    let discarded = before - image.rules.len();
    let missing: Vec<String> = missing_modulo_vars(lhs, &image).iter().map(|r| r.to_string()).collect();
    let extra: Vec<String> = missing_modulo_vars(&image, lhs).iter().map(|r| r.to_string()).collect();
    Ok(SimulationVerdict {
        equal: missing.is_empty() && extra.is_empty(),
        missing,
        extra,
        discarded_identity_rules: discarded,
        flags: phi.flags(rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;
    use crate::unravel::{unravel_u, unravel_uj, unravel_un, unravel_uopt};

    fn r12(join: bool) -> System {
        let ct = if join { "(CONDITIONTYPE JOIN)" } else { "" };
        parse_system(&format!(
            "{ct}(VAR x)(RULES odd(0) -> false  odd(s(x)) -> true | even(x) == true
              odd(s(x)) -> false | even(x) == false  even(0) -> true
              even(s(x)) -> true | odd(x) == true  even(s(x)) -> false | odd(x) == false)"
        ))
        .unwrap()
    }

    #[test]
    fn identity_and_erasing() {
        let id = Homomorphism::identity();
        let t = Term::app("f", vec![Term::constant("b")]);
        assert_eq!(id.apply(&t), t);
        let mut h = Homomorphism::identity();
        h.set(sym("f"), 1, Term::constant("a"));
        assert_eq!(h.apply(&t), Term::constant("a"));
        assert!(!h.is_non_erasing());
        let s = r12(false);
        let f = id.flags(&s);
        assert!(f.linear && f.non_erasing && f.f_identical && f.ev_preserving);
    }

    #[test]
    fn norm_and_det() {
        let n = norm_transform(&r12(true)).unwrap();
        assert_eq!(n.rules.iter().filter(|r| &*r.label == "eq_rule").count(), 1);
        assert!(n.rules.iter().any(|r| r.to_string() == "odd(s(x)) -> true | eq(even(x),true) == eq(top,top)"));
        let d = det_transform(&r12(true)).unwrap();
        assert!(d.rules.iter().all(|r| r.is_deterministic()));
        assert!(d.rules.iter().any(|r| r.to_string() == "odd(s(x)) -> true | eq1(even(x),true) == eq1(x1,x1)"));
        assert!(norm_transform(&r12(false)).is_err());
    }

    #[test]
    fn u_to_uopt_on_r12p() {
        let s = r12(false);
        let phi = canonical_phi(Construction::UToUopt, &s).unwrap();
        let v = check_simulation(&unravel_uopt(&s).unwrap(), &unravel_u(&s).unwrap(), &phi, false).unwrap();
        assert!(v.equal, "{v:?}");
        assert!(v.flags.f_identical && v.flags.ev_preserving);
    }

    #[test]
    fn un_to_uj_pattern() {
        let phi = canonical_phi(Construction::UnToUj, &r12(false)).unwrap();
        let (n, pat) = phi.get("U_rho_2").unwrap();
        assert_eq!(*n, 2);
        assert_eq!(pat.to_string(), "U_rho_2(x1,true,x2)");
        assert!(canonical_phi(Construction::UnToUj, &r12(true)).is_err());
    }

    #[test]
    fn u_to_un_modulo_identity() {
        let s = r12(false);
        let phi = canonical_phi(Construction::UToUn, &s).unwrap();
        let v = check_simulation(&unravel_un(&s).unwrap(), &unravel_u(&s).unwrap(), &phi, true).unwrap();
        assert!(v.equal, "{v:?}");
        let _ = unravel_uj(&r12(true)).unwrap();
    }
}
