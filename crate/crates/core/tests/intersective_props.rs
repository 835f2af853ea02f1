mod common;

use common::*;
use ffq_core::algebra::{crt_combine, irreducibles_up_to, RingPoly};
use ffq_core::equidist::FolnerBox;
use ffq_core::intersective::{
    branch_search, hensel_lift, roots_mod_factored, intersective_verdict, p1_check, p4_desk_search, roots_mod, IntPoly,
    IntersectiveVerdict,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn crt_roots_match_brute_force(seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)]) {
        let f = field(p, 1);
        let mut r = rng(seed);
        let q = random_intpoly(&mut r, &f, 3, 2);
        let budget = if p == 2 { 13 } else { 8 };
        let d1 = 1 + below(&mut r, budget / 2) as usize;
        let d2 = 1 + below(&mut r, (budget - d1 as u64).min(budget / 2)) as usize;
        let m1 = random_monic(&mut r, &f, d1);
        let m2 = random_monic(&mut r, &f, d2);
        prop_assume!(m1.gcd(&m2, &f).is_one());
        let brute = roots_mod(&q, &m1.mul(&m2, &f), &f).unwrap();
        let mut combined = Vec::new();
        for a in roots_mod(&q, &m1, &f).unwrap() {
            for b in roots_mod(&q, &m2, &f).unwrap() {
                combined.push(crt_combine(&[(a.clone(), m1.clone()), (b, m2.clone())], &f).unwrap().0);
            }
        }
        combined.sort();
        prop_assert_eq!(brute, combined);
    }

    #[test]
    fn hensel_lift_is_the_unique_branch(seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)]) {
        let f = field(p, 1);
        let mut r = rng(seed);
        let q = random_intpoly(&mut r, &f, 3, 1);
        let dq = q.derivative(&f);
        for pi in irreducibles_up_to(&f, 2).unwrap() {
            let search = branch_search(&q, &pi, 4, 100_000, &f).unwrap();
            for root in &search.levels[0] {
                if dq.eval_mod(root, &pi, &f).unwrap().is_zero() {
                    continue;
                }
                prop_assert_eq!(search.levels.len(), 4);
                for j in 2..=4 {
                    let lift = hensel_lift(&q, &pi, root, 1, j, &f).unwrap();
                    let above: Vec<&RingPoly> =
                        search.levels[j - 1].iter().filter(|x| x.rem(&pi, &f).unwrap() == *root).collect();
                    prop_assert_eq!(above, vec![&lift]);
                }
            }
        }
    }

    #[test]
    fn certificates_reverify(seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)]) {
        let f = field(p, 1);
        let mut r = rng(seed);
        let q = random_intpoly(&mut r, &f, 3, 1);
        let certs = match intersective_verdict(&q, 2, 4, &f).unwrap() {
            IntersectiveVerdict::CertifiedUpTo { certificates, .. } => certificates,
            IntersectiveVerdict::Inconclusive { certificates, .. } => certificates,
            IntersectiveVerdict::NonIntersective { .. } => Vec::new(),
        };
        for c in &certs {
            prop_assert!(c.verify(&q, &f).unwrap());
        }
    }

    #[test]
    fn vanishing_at_zero_is_certified_by_zero(seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)]) {
        let f = field(p, 1);
        let mut r = rng(seed);
        let mut coeffs = random_intpoly(&mut r, &f, 3, 2).coeffs().to_vec();
        coeffs[0] = RingPoly::zero();
        let q = IntPoly::new(coeffs);
        prop_assert!(p1_check(&q));
        match intersective_verdict(&q, 2, 4, &f).unwrap() {
            IntersectiveVerdict::CertifiedUpTo { certificates, .. } => {
                prop_assert!(certificates.iter().all(|c| c.root.is_zero() && c.exact));
            }
            v => prop_assert!(false, "verdict {}", v.name()),
        }
    }
}

#[test]
fn factored_roots_match_brute_force() {
    let mut r = rng(21);
    for f in [field(2, 1), field(3, 1)] {
        let irr = irreducibles_up_to(&f, 2).unwrap();
        for _ in 0..20 {
            let q = random_intpoly(&mut r, &f, 3, 1);
            let factors: Vec<(RingPoly, usize)> =
                irr.iter().take(3).map(|pi| (pi.clone(), below(&mut r, 3) as usize)).collect();
            let m = factors.iter().fold(RingPoly::one(), |acc, (pi, e)| acc.mul(&pi.pow(*e as u64, &f), &f));
            assert_eq!(roots_mod_factored(&q, &factors, &f).unwrap(), roots_mod(&q, &m, &f).unwrap());
        }
    }
}

#[test]
fn non_intersective_witness_blocks_differences() {
    let f = field(2, 1);
    let t = RingPoly::t();
    for q in [IntPoly::from_ints(&f, &[1, 1, 1]), IntPoly::new(vec![t.clone(), RingPoly::zero(), RingPoly::one()])] {
        let IntersectiveVerdict::NonIntersective { witness, .. } = intersective_verdict(&q, 3, 4, &f).unwrap() else {
            panic!("{} should be non-intersective", q.to_text(&f));
        };
        let e: Vec<RingPoly> =
            FolnerBox::new(6, &f).unwrap().iter().filter(|x| x.rem(&witness, &f).unwrap().is_zero()).collect();
        assert_eq!(p4_desk_search(&q, &e, 4, &f).unwrap(), None);
    }
}
