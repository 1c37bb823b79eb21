//! Properties of the unravelings on seeded random deterministic systems.


use ctrs::alpha::{alpha_u_equal, equal_modulo_vars};
use ctrs::classify::classify;
use ctrs::gen;
use ctrs::homo::{canonical_phi, check_simulation, Construction};
use ctrs::unravel::{ultra_check, unravel_u, unravel_uopt, Method, Property, Unraveling};
use proptest::prelude::*;

const PROPS: [Property; 5] = [Property::LL, Property::RL, Property::NE, Property::NonLV, Property::NonRV];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn direct_and_syntactic_agree(seed in any::<u64>()) {
        let r = gen::deterministic_rule(&mut gen::rng(seed), "r", 3, 3);
        for p in PROPS {
            for m in [Unraveling::U, Unraveling::Uopt] {
                prop_assert_eq!(ultra_check(&r, p, Method::Direct, m), ultra_check(&r, p, Method::Syntactic, m), "{:?} {:?} {}", p, m, r);
            }
        }
    }

    #[test]
    fn unravelings_are_unconditional_with_k_plus_one_rules(seed in any::<u64>()) {
        let s = gen::deterministic_system(&mut gen::rng(seed), 3, 3, 2);
        let want: usize = s.rules.iter().map(|r| r.conds.len() + 1).sum();
        for out in [unravel_u(&s).unwrap(), unravel_uopt(&s).unwrap()] {
            prop_assert!(!out.is_conditional());
            prop_assert_eq!(out.rules.len(), want);
        }
    }

    #[test]
    fn uopt_is_a_homomorphic_image_of_u(seed in any::<u64>()) {
        let s = gen::deterministic_system(&mut gen::rng(seed), 2, 3, 2);
        let (u, uopt) = (unravel_u(&s).unwrap(), unravel_uopt(&s).unwrap());
        if let Ok(phi) = canonical_phi(Construction::UToUopt, &s) {
            let v = check_simulation(&uopt, &u, &phi, false).unwrap();
            prop_assert!(v.equal, "missing {:?} extra {:?}", v.missing, v.extra);
        }
    }

    #[test]
    fn uopt_ne_systems_are_inversion_dual(seed in any::<u64>()) {
        let s = gen::deterministic_system(&mut gen::rng(seed), 2, 3, 2);
        if classify(&s).uopt_ne {
            if let Ok(ok) = ctrs::suite::inversion_dual(&s) {
                prop_assert!(ok);
            }
        }
    }

    #[test]
    fn inversion_is_an_involution(seed in any::<u64>()) {
        let s = gen::deterministic_system(&mut gen::rng(seed), 3, 3, 2);
        for r in &s.rules {
            prop_assert_eq!(r.inverted().inverted(), r.clone());
        }
    }
}

#[test]
fn unconditional_systems_are_unchanged() {
    let r0 = ctrs::corpus::load("R0").unwrap();
    assert!(equal_modulo_vars(&unravel_u(&r0).unwrap(), &r0));
    assert!(alpha_u_equal(&unravel_uopt(&r0).unwrap(), &unravel_u(&r0).unwrap()));
}

#[test]
fn u_and_uopt_differ_on_r2() {
    let r2 = ctrs::corpus::load("R2").unwrap();
    assert!(!alpha_u_equal(&unravel_u(&r2).unwrap(), &unravel_uopt(&r2).unwrap()));
}
