mod common;

use common::*;
use ffq_core::algebra::RingPoly;
use ffq_core::equidist::{
    ap_wd_scan, nontrivial_characters, value_histogram, wd_verdict, weyl_sum, Serial, Verdict,
};
use ffq_core::polyseq::{PolySource, Reparametrized, SymPoly, SymSeq};
use ffq_core::subtorus::{estimate_subgroup, EmpiricalControls};
use proptest::prelude::*;

#[test]
fn trivial_character_sums_to_one() {
    let f = field(2, 1);
    let s = weyl_sum(&counterexample(&f), &[RingPoly::zero()], 6, &f).unwrap();
    assert!((s.re - 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weyl_sums_are_bounded_and_shift_stable(w in 0u64..8, k in 0u64..8, n in 3usize..7) {
        let f = field(2, 1);
        let g = counterexample(&f);
        let w = RingPoly::from_index(w, &f);
        let k = RingPoly::from_index(k, &f);
        let base = weyl_sum(&g, std::slice::from_ref(&w), n, &f).unwrap();
        prop_assert!(base.norm() <= 1.0 + 1e-12);
        let shifted = Reparametrized { source: &g, m: RingPoly::one(), k: k.clone() };
        let moved = weyl_sum(&shifted, std::slice::from_ref(&w), n, &f).unwrap();
        let bound = 2.0 * (f.q() as f64).powi(k.degree().unwrap_or(0) as i32) / (f.q() as f64).powi(n as i32 + 1);
        prop_assert!((base - moved).norm() <= bound + 1e-12);
    }
}

#[test]
fn well_distributed_histograms_are_flat() {
    let f = field(2, 1);
    let g = repaired(&f);
    let tol = 0.05;
    let v = wd_verdict(&g, 2, &[4, 6, 8, 10], tol, None, &f).unwrap();
    assert_eq!(v.verdict, Verdict::WellDistributed);
    let h = value_histogram(&g, 2, 10, &Serial, &f).unwrap();
    let total: u64 = h.values().sum();
    let chars = nontrivial_characters(1, 2, &f).unwrap().len() as f64;
    let cell = 1.0 / 4.0;
    assert_eq!(h.len(), 4);
    for &c in h.values() {
        assert!((c as f64 / total as f64 - cell).abs() <= tol * chars);
    }
}

#[test]
fn annihilating_characters_see_a_periodic_sequence() {
    let f = field(2, 1);
    let g = counterexample(&f);
    let controls = EmpiricalControls::default();
    let (sub, parts) = estimate_subgroup(&g, 3, &controls, &f).unwrap();
    let mut m = RingPoly::one();
    for (_, est) in &parts {
        m = m.mul(&est.modulus, &f).monic(&f);
    }
    let values = g.for_box(3, 6, &f).unwrap();
    for w in nontrivial_characters(1, 3, &f).unwrap() {
        if !sub.annihilated_by(&w).unwrap() {
            continue;
        }
        for i in 0..128 {
            let n = RingPoly::from_index(i, &f);
            let r = n.rem(&m, &f).unwrap();
            let a = values.evaluate(&n, 3, &f).unwrap().pairing_index(&w, &f).unwrap();
            let b = values.evaluate(&r, 3, &f).unwrap().pairing_index(&w, &f).unwrap();
            assert_eq!(a, b, "character {:?} at n = {}", w, n.to_text(&f));
        }
    }
}

#[test]
fn progression_scan_agrees_with_subgroup_estimate() {
    let f = field(2, 1);
    let controls = EmpiricalControls::default();
    let ms = [RingPoly::one(), RingPoly::t()];
    let ks = [RingPoly::zero(), RingPoly::one()];
    // the repaired η is well distributed although F(η) = {c1 = 0}: the n/t
    // term spreads it over the cosets, which progressions tn + k undo
    for (g, expect_full) in [(repaired(&f), false), (counterexample(&f), false)] {
        let (sub, _) = estimate_subgroup(&g, 3, &controls, &f).unwrap();
        assert_eq!(sub.is_full(), expect_full);
        let scan = ap_wd_scan(&g, &ms, &ks, 3, &[4, 6, 8], 0.05, Some(&sub), &Serial, &f).unwrap();
        assert_eq!(scan.routes_agree, Some(true));
    }
    let line = SymSeq::scalar(SymPoly::new(vec![(1, squares_term(&f, &[1], 1))]));
    let (sub, _) = estimate_subgroup(&line, 3, &controls, &f).unwrap();
    assert!(sub.is_full());
    let scan = ap_wd_scan(&line, &ms, &ks, 3, &[4, 6, 8], 0.05, Some(&sub), &Serial, &f).unwrap();
    assert!(scan.all_wd);
    assert_eq!(scan.routes_agree, Some(true));
}
