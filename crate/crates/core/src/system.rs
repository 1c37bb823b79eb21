//! Conditional rules, rewrite systems and rule inversion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::term::{sym, Sym, Term};

/// How conditions are read: reachability or joinability.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[default]
    Oriented,
    Join,
}

/// A condition `lhs == rhs`, interpreted according to the system's flavor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Condition {
    pub lhs: Term,
    pub rhs: Term,
}

impl Condition {
    pub fn new(lhs: Term, rhs: Term) -> Condition {
        Condition { lhs, rhs }
    }
}

/// A (conditional) rewrite rule.
#[derive(Clone, Debug, Serialize)]
pub struct Rule {
    pub label: Sym,
    pub lhs: Term,
    pub rhs: Term,
    pub conds: Vec<Condition>,
}

/// Rules compare by content; labels are names, not meaning.
impl PartialEq for Rule {
    fn eq(&self, other: &Rule) -> bool {
        self.lhs == other.lhs && self.rhs == other.rhs && self.conds == other.conds
    }
}
impl Eq for Rule {}

impl Rule {
    pub fn new(label: &str, lhs: Term, rhs: Term, conds: Vec<Condition>) -> Rule {
        Rule { label: sym(label), lhs, rhs, conds }
    }

    pub fn unconditional(label: &str, lhs: Term, rhs: Term) -> Rule {
        Rule::new(label, lhs, rhs, Vec::new())
    }

    pub fn is_conditional(&self) -> bool {
        !self.conds.is_empty()
    }

    /// All terms of the rule: l, r, s₁, t₁, ….
    pub fn terms(&self) -> Vec<&Term> {
        let mut v = vec![&self.lhs, &self.rhs];
        for c in &self.conds {
            v.push(&c.lhs);
            v.push(&c.rhs);
        }
        v
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        self.terms().into_iter().flat_map(|t| t.vars()).collect()
    }

    /// EVar(ρ) = (Var(r) ∪ Var(c)) \ Var(l).
    pub fn extra_vars(&self) -> BTreeSet<Sym> {
        let lv = self.lhs.vars();
        self.vars().into_iter().filter(|x| !lv.contains(x)).collect()
    }

    /// Xᵢ = Var(l, t₁, …, tᵢ₋₁), with i 1-based.
    pub fn x_set(&self, i: usize) -> BTreeSet<Sym> {
        let mut s = self.lhs.vars();
        for c in &self.conds[..i - 1] {
            s.extend(c.rhs.vars());
        }
        s
    }

    /// Xᵢ in order of first occurrence in l, t₁, …, tᵢ₋₁; the vector order used by unravelings.
    pub fn x_vec(&self, i: usize) -> Vec<Sym> {
        let mut out = self.lhs.vars_ordered();
        for c in &self.conds[..i - 1] {
            for x in c.rhs.vars_ordered() {
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// Zᵢ in the order of [`Rule::x_vec`].
    pub fn z_vec(&self, i: usize) -> Vec<Sym> {
        let y = self.y_set(i);
        self.x_vec(i).into_iter().filter(|x| y.contains(x)).collect()
    }

    /// Yᵢ = Var(r, tᵢ, sᵢ₊₁, tᵢ₊₁, …, sₖ, tₖ).
    pub fn y_set(&self, i: usize) -> BTreeSet<Sym> {
        let mut s = self.rhs.vars();
        s.extend(self.conds[i - 1].rhs.vars());
        for c in &self.conds[i..] {
            s.extend(c.lhs.vars());
            s.extend(c.rhs.vars());
        }
        s
    }

    /// Zᵢ = Xᵢ ∩ Yᵢ.
    pub fn z_set(&self, i: usize) -> BTreeSet<Sym> {
        self.x_set(i).intersection(&self.y_set(i)).cloned().collect()
    }

    /// Var(sᵢ) ⊆ Var(l, t₁, …, tᵢ₋₁) for every i.
    pub fn is_deterministic(&self) -> bool {
        (1..=self.conds.len()).all(|i| self.conds[i - 1].lhs.vars().is_subset(&self.x_set(i)))
    }

    /// Rule inversion: r → l ⇐ tₖ == sₖ; …; t₁ == s₁.
    pub fn inverted(&self) -> Rule {
        Rule {
            label: self.label.clone(),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            conds: self.conds.iter().rev().map(|c| Condition::new(c.rhs.clone(), c.lhs.clone())).collect(),
        }
    }

    /// Renames every variable through `f`.
    pub fn map_vars(&self, f: &mut dyn FnMut(&Sym) -> Sym) -> Rule {
        Rule {
            label: self.label.clone(),
            lhs: self.lhs.map_vars(f),
            rhs: self.rhs.map_vars(f),
            conds: self.conds.iter().map(|c| Condition::new(c.lhs.map_vars(f), c.rhs.map_vars(f))).collect(),
        }
    }

    pub fn map_syms(&self, f: &dyn Fn(&Sym) -> Sym) -> Rule {
        Rule {
            label: self.label.clone(),
            lhs: self.lhs.map_syms(f),
            rhs: self.rhs.map_syms(f),
            conds: self.conds.iter().map(|c| Condition::new(c.lhs.map_syms(f), c.rhs.map_syms(f))).collect(),
        }
    }

    /// Renames variables to a canonical sequence in order of first occurrence.
    pub fn canonical(&self) -> Rule {
        let mut map: BTreeMap<Sym, Sym> = BTreeMap::new();
        let mut n = 0usize;
        self.map_vars(&mut |x| {
            map.entry(x.clone())
                .or_insert_with(|| {
                    n += 1;
                    sym(&format!("v#{n}"))
                })
                .clone()
        })
    }

    /// Display with an explicit condition separator.
    pub fn display_with(&self, arrow: &str) -> String {
        let mut s = format!("{} -> {}", self.lhs, self.rhs);
        if !self.conds.is_empty() {
            let cs: Vec<String> = self.conds.iter().map(|c| format!("{} {arrow} {}", c.lhs, c.rhs)).collect();
            s.push_str(" | ");
            s.push_str(&cs.join(", "));
        }
        s
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("=="))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("symbol `{symbol}` is used with arities {first} and {second}")]
    ArityClash { symbol: String, first: usize, second: usize },
    #[error("identifier `{0}` is used both as a variable and as a function symbol")]
    VarAsFunction(String),
    #[error("operation requires an oriented system")]
    NotOriented,
    #[error("operation requires a join system")]
    NotJoin,
    #[error("rule `{0}` is not deterministic")]
    NotDeterministic(String),
    #[error("rule `{0}` has a variable left-hand side but the system is not extended")]
    VariableLhs(String),
    #[error("generated symbol `{0}` collides with a symbol of the input system")]
    ReservedCollision(String),
    #[error("system is not normal: {0}")]
    NotNormal(String),
    #[error("operation requires an unconditional system")]
    Conditional,
}

/// Symbol → arity.
pub type Signature = BTreeMap<Sym, usize>;

/// A conditional term rewriting system.
#[derive(Clone, Debug, Default, Serialize)]
pub struct System {
    pub rules: Vec<Rule>,
    /// Declared variables (used ones are always rendered as well).
    pub vars: BTreeSet<Sym>,
    pub flavor: Flavor,
    pub extended: bool,
    pub origin: String,
}

impl PartialEq for System {
    fn eq(&self, other: &System) -> bool {
        self.rules.len() == other.rules.len()
            && self.rules.iter().zip(&other.rules).all(|(a, b)| a == b)
            && self.flavor == other.flavor
    }
}

impl System {
    pub fn new(rules: Vec<Rule>, flavor: Flavor) -> System {
        let extended = rules.iter().any(|r| r.lhs.is_var());
        System { rules, vars: BTreeSet::new(), flavor, extended, origin: String::new() }
    }

    pub fn oriented(rules: Vec<Rule>) -> System {
        System::new(rules, Flavor::Oriented)
    }

    pub fn with_origin(mut self, origin: &str) -> System {
        self.origin = origin.to_string();
        self
    }

    pub fn is_conditional(&self) -> bool {
        self.rules.iter().any(Rule::is_conditional)
    }

    pub fn used_vars(&self) -> BTreeSet<Sym> {
        self.rules.iter().flat_map(|r| r.vars()).collect()
    }

    /// Checks arity consistency and returns the signature.
    pub fn signature(&self) -> Result<Signature, SystemError> {
        let mut seen: BTreeMap<Sym, BTreeSet<usize>> = BTreeMap::new();
        for r in &self.rules {
            for t in r.terms() {
                t.symbols(&mut seen);
            }
        }
        let vars = self.used_vars();
        let mut sig = Signature::new();
        for (f, ars) in seen {
            if ars.len() > 1 {
                let v: Vec<usize> = ars.into_iter().collect();
                return Err(SystemError::ArityClash { symbol: f.to_string(), first: v[0], second: v[1] });
            }
            if vars.contains(&f) {
                return Err(SystemError::VarAsFunction(f.to_string()));
            }
            sig.insert(f, ars.into_iter().next().unwrap_or(0));
        }
        Ok(sig)
    }

    /// Signature, assuming it is consistent (empty on clash).
    pub fn sig(&self) -> Signature {
        self.signature().unwrap_or_default()
    }

    /// D_R: roots of non-variable left-hand sides.
    pub fn defined(&self) -> BTreeSet<Sym> {
        self.rules.iter().filter_map(|r| r.lhs.root().cloned()).collect()
    }

    /// C_R = signature \ D_R.
    pub fn constructors(&self) -> BTreeSet<Sym> {
        let d = self.defined();
        self.sig().into_keys().filter(|f| !d.contains(f)).collect()
    }

    /// The underlying unconditional system R_u.
    pub fn underlying(&self) -> System {
        let rules = self.rules.iter().map(|r| Rule { conds: Vec::new(), ..r.clone() }).collect();
        System { rules, flavor: Flavor::Oriented, ..self.clone() }
    }

    /// Rule-wise inversion of an oriented system; the result is extended.
    pub fn invert(&self) -> Result<System, SystemError> {
        if self.flavor != Flavor::Oriented {
            return Err(SystemError::NotOriented);
        }
        Ok(System {
            rules: self.rules.iter().map(Rule::inverted).collect(),
            vars: self.vars.clone(),
            flavor: Flavor::Oriented,
            extended: true,
            origin: self.origin.clone(),
        })
    }

    /// Checks that plain systems have no variable left-hand sides.
    pub fn check_lhs(&self) -> Result<(), SystemError> {
        if self.extended {
            return Ok(());
        }
        match self.rules.iter().find(|r| r.lhs.is_var()) {
            Some(r) => Err(SystemError::VariableLhs(r.label.to_string())),
            None => Ok(()),
        }
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| &*r.label == label)
    }

    /// Union of two systems, keeping the flavor of `self`.
    pub fn union(&self, other: &System) -> System {
        let mut rules = self.rules.clone();
        for r in &other.rules {
            if !rules.contains(r) {
                rules.push(r.clone());
            }
        }
        System {
            rules,
            vars: self.vars.union(&other.vars).cloned().collect(),
            flavor: self.flavor,
            extended: self.extended || other.extended,
            origin: self.origin.clone(),
        }
    }
}

/// Default rule label for the i-th rule (1-based).
pub fn default_label(i: usize) -> String {
    format!("rho_{i}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;

    #[test]
    fn invert_r8() {
        let r8 = parse_system("(VAR x y)(RULES f(x) -> c(x,y) | g(x) == y, y == h(x)  a -> b  g(a) -> h(b))").unwrap();
        let inv = r8.invert().unwrap();
        let expected =
            parse_system("(VAR x y)(RULES c(x,y) -> f(x) | h(x) == y, y == g(x)  b -> a  h(b) -> g(a))").unwrap();
        assert_eq!(inv.rules, expected.rules);
        assert!(inv.extended);
        assert_eq!(inv.invert().unwrap().rules, r8.rules);
        let j = parse_system("(CONDITIONTYPE JOIN)(RULES a -> b)").unwrap();
        assert_eq!(j.invert(), Err(SystemError::NotOriented));
    }

    #[test]
    fn xyz_sets() {
        let r = parse_system(
            "(VAR x y z w)(RULES mult-1(s(z)) -> tp2(s(x),s(y)) | add-1(z) == tp2(w,y), mult-1(w) == tp2(x,s(y)))",
        )
        .unwrap();
        let r = &r.rules[0];
        let names = |s: BTreeSet<Sym>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(names(r.x_set(2)), "w,y,z");
        assert_eq!(names(r.y_set(2)), "x,y");
        assert_eq!(names(r.z_set(2)), "y");
        assert!(r.is_deterministic());
    }
}
