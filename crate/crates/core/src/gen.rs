//! Seeded random rules and systems for property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::system::{Condition, Rule, System};
use crate::term::{sym, Sym, Term};

/// Symbols used by generated terms: (name, arity).
const FUNS: &[(&str, usize)] = &[("f", 2), ("g", 1), ("c", 2), ("s", 1), ("a", 0), ("b", 0)];
const VARS: &[&str] = &["x", "y", "z", "w"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random term of depth ≤ `depth` over [`FUNS`] and the variables in `vars`.
pub fn term(rng: &mut impl Rng, depth: usize, vars: &[Sym]) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return Term::Var(vars.choose(rng).expect("non-empty").clone());
        }
        let consts: Vec<_> = FUNS.iter().filter(|(_, n)| *n == 0).collect();
        return Term::constant(consts.choose(rng).expect("constants").0);
    }
    let (f, n) = *FUNS.iter().filter(|(_, n)| *n > 0).collect::<Vec<_>>().choose(rng).expect("functions");
    Term::app(f, (0..*n).map(|_| term(rng, depth - 1, vars)).collect())
}

fn non_var(rng: &mut impl Rng, depth: usize, vars: &[Sym]) -> Term {
    loop {
        let t = term(rng, depth.max(1), vars);
        if !t.is_var() {
            return t;
        }
    }
}

/// Random deterministic rule with at most `max_k` conditions and term depth ≤ `depth`.
/// Right-hand sides of conditions may introduce fresh variables; sᵢ only uses bound ones.
pub fn deterministic_rule(rng: &mut impl Rng, label: &str, max_k: usize, depth: usize) -> Rule {
    let all: Vec<Sym> = VARS.iter().map(|v| sym(v)).collect();
    let lhs_vars: Vec<Sym> = all[..rng.gen_range(1..=2)].to_vec();
    let lhs = non_var(rng, depth, &lhs_vars);
    let mut bound: Vec<Sym> = lhs.vars_ordered();
    let k = rng.gen_range(0..=max_k);
    let mut conds = Vec::new();
    for _ in 0..k {
        let s = term(rng, depth, &bound);
        let t = term(rng, depth, &all);
        for x in t.vars_ordered() {
            if !bound.contains(&x) {
                bound.push(x);
            }
        }
        conds.push(Condition::new(s, t));
    }
    let rhs = term(rng, depth, &bound);
    Rule::new(label, lhs, rhs, conds)
}

/// Random oriented deterministic system of `n` rules.
pub fn deterministic_system(rng: &mut impl Rng, n: usize, max_k: usize, depth: usize) -> System {
    let rules = (1..=n).map(|i| deterministic_rule(rng, &format!("rho_{i}"), max_k, depth)).collect();
    System::oriented(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_are_deterministic_and_seeded() {
        let mut r = rng(7);
        let a: Vec<Rule> = (0..50).map(|i| deterministic_rule(&mut r, &format!("r{i}"), 3, 3)).collect();
        assert!(a.iter().all(|x| x.is_deterministic() && !x.lhs.is_var()));
        let mut r2 = rng(7);
        let b: Vec<Rule> = (0..50).map(|i| deterministic_rule(&mut r2, &format!("r{i}"), 3, 3)).collect();
        assert_eq!(a, b);
    }
}
