mod common;

use common::*;
use ffq_core::algebra::RingPoly;
use ffq_core::equidist::FolnerBox;
use ffq_core::polyseq::{decompose, derivational_degree, ddeg_difference_oracle, reparametrize, StdPoly};
use ffq_core::torus::TorusVec;
use proptest::prelude::*;

#[test]
fn decomposed_form_evaluates_alike_on_small_box() {
    let f = field(2, 1);
    let mut r = rng(1);
    for _ in 0..20 {
        let g = random_std(&mut r, &f, 1, 40, 9);
        let h = decompose(&g, &f);
        for n in FolnerBox::new(3, &f).unwrap().iter() {
            assert_eq!(g.evaluate(&n, 8, &f).unwrap(), h.evaluate(&n, 8, &f).unwrap());
        }
    }
}

#[test]
fn ddeg_agrees_with_oracle_on_every_support() {
    for f in [field(2, 1), field(3, 1)] {
        let unit = tv(&f, &[0, 1]);
        for mask in 1u32..1 << 10 {
            let terms = (0..10).filter(|k| mask >> k & 1 == 1).map(|k| (k, unit.clone()));
            let g = StdPoly::new(1, 2, terms, &f).unwrap();
            let d = derivational_degree(&g, &f).unwrap();
            assert!(ddeg_difference_oracle(&g, d, 1, &f).unwrap(), "mask {mask:#b} over F_{}", f.q());
        }
    }
    ddeg_matches_oracle(9, 3).unwrap();
}

#[test]
fn additive_parts_are_additive() {
    let mut r = rng(2);
    for f in [field(2, 1), field(3, 1)] {
        for _ in 0..6 {
            let g = random_std(&mut r, &f, 1, 30, 9);
            let h = decompose(&g, &f);
            for rr in h.separable_exponents() {
                let eta = h.additive_component(rr, &f).unwrap();
                let pts: Vec<RingPoly> = FolnerBox::new(2, &f).unwrap().iter().collect();
                for a in &pts {
                    let ea = eta.evaluate(a, 6, &f).unwrap();
                    for b in &pts {
                        let lhs = eta.evaluate(&a.add(b, &f), 6, &f).unwrap();
                        let rhs = ea.add(&eta.evaluate(b, 6, &f).unwrap(), &f).unwrap();
                        assert_eq!(lhs, rhs, "η_{rr} over F_{}", f.q());
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn roundtrip(seed in any::<u64>()) {
        decompose_roundtrips(seed, 4).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn reparametrize_matches_substitution(seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)]) {
        let f = field(p, 1);
        let mut r = rng(seed);
        let g = random_std(&mut r, &f, 2, 40, 6);
        let m = random_poly(&mut r, &f, 2);
        prop_assume!(!m.is_zero());
        let k = random_poly(&mut r, &f, 2);
        let n = random_poly(&mut r, &f, 2);
        let h = reparametrize(&g, &m, &k, &f).unwrap();
        let direct: TorusVec = g.evaluate(&m.mul(&n, &f).add(&k, &f), 4, &f).unwrap();
        prop_assert_eq!(h.evaluate(&n, 4, &f).unwrap(), direct);
    }
}
