mod common;

use common::*;
use ffq_core::algebra::{RationalFF, RingPoly};
use ffq_core::equidist::{FolnerBox, Serial};
use ffq_core::intersective::IntPoly;
use ffq_core::recurrence::{return_ladder, to_f64, FiniteRotation};
use ffq_core::torus::CoeffStream;
use proptest::prelude::*;

#[test]
fn rotations_preserve_measure() {
    measure_preserved(3).unwrap();
}

#[test]
fn return_measure_matches_double_loop() {
    return_matches_oracle(4).unwrap();
}

#[test]
fn invariant_subgroups_absorb_returns() {
    // {x : c_i = 0 for i > j} is closed under multiplication by F_q[t]
    for f in [field(2, 1), field(3, 1)] {
        for j in 1..=2 {
            let alpha = RationalFF::new(poly(&f, &[1, 1]), RingPoly::t().pow(j as u64, &f), &f).unwrap();
            let base = FiniteRotation::from_streams(&f, vec![CoeffStream::Rational(alpha)], 3, 2, []).unwrap();
            let sys = base.with_predicate(|x| (j + 1..=3).all(|i| x.coord(0).coeff(i).is_zero())).unwrap();
            for q in [IntPoly::from_ints(&f, &[0, 0, 1]), IntPoly::from_ints(&f, &[1, 1, 1])] {
                for n in FolnerBox::new(3, &f).unwrap().iter() {
                    assert_eq!(sys.return_measure(&q.eval(&n, &f)).unwrap(), sys.measure());
                }
            }
        }
    }
}

#[test]
fn intersective_polynomials_return_on_every_system() {
    let suite = rotation_suite();
    for sys in &suite {
        let f = sys.field();
        let t = RingPoly::t();
        let qs = [
            IntPoly::from_ints(f, &[0, 0, 1]),
            IntPoly::from_ints(f, &[0, 0, 0, 1]),
            IntPoly::new(vec![RingPoly::zero(), t, RingPoly::one()]),
        ];
        for q in &qs {
            let ladder = return_ladder(sys, q, 5, 2, 0.1, &Serial).unwrap();
            let best = ladder.best_entry().unwrap();
            assert!(ladder.found(), "{} on F_{}: best {} ≤ {}", q.to_text(f), f.q(), to_f64(&best.value), ladder.threshold);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enlarging_a_never_lowers_returns(seed in any::<u64>(), extra in any::<u64>(), s in 0u64..256) {
        let f = field(2, 1);
        let base = FiniteRotation::from_streams(&f, vec![squares()], 3, 10, []).unwrap();
        let small = base.with_random(seed, 0.3).unwrap();
        let more = base.with_random(extra, 0.3).unwrap();
        let members: Vec<u64> = small.members().iter().chain(more.members().iter()).map(|x| x.group_index(&f)).collect();
        let large = base.with_indices(members).unwrap();
        let s = RingPoly::from_index(s, &f);
        prop_assert!(large.return_measure(&s).unwrap() >= small.return_measure(&s).unwrap());
    }
}
