mod common;

use common::*;
use ffq_core::algebra::{abs_norm, ff_trace, irreducibles_up_to, ring_divmod, FieldSpec, RationalFF, RingPoly};
use proptest::prelude::*;

#[test]
fn field_axioms_exhaustive() {
    for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let f = field(p, k);
        let els: Vec<_> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, f.neg(a)), f.zero());
            assert_eq!(f.mul(a, f.one()), a);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }
}

#[test]
fn trace_is_linear_and_onto() {
    for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let f = field(p, k);
        let mut hit = vec![false; p as usize];
        for a in f.elements() {
            hit[ff_trace(a, &f) as usize] = true;
            for b in f.elements() {
                assert_eq!(ff_trace(f.add(a, b), &f), (ff_trace(a, &f) + ff_trace(b, &f)) % p);
            }
            for c in 0..p {
                assert_eq!(ff_trace(f.mul(f.from_int(c as i64), a), &f), c * ff_trace(a, &f) % p);
            }
        }
        assert!(hit.iter().all(|&h| h), "trace not onto for q = {}", f.q());
    }
}

#[test]
fn irreducibles_have_no_small_factor() {
    for f in [field(2, 1), field(3, 1), field(2, 2)] {
        for pi in irreducibles_up_to(&f, 4).unwrap() {
            let d = pi.degree().unwrap();
            let below = (f.q() as u64).pow(d as u32);
            for i in f.q() as u64..below {
                let g = RingPoly::from_index(i, &f);
                assert!(!pi.rem(&g, &f).unwrap().is_zero(), "{} divides {}", g.to_text(&f), pi.to_text(&f));
            }
        }
    }
}

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(field(2, 1)), Just(field(3, 1)), Just(field(2, 2)), Just(field(5, 1))]
}

proptest! {
    #[test]
    fn divmod_reconstructs(f in field_strategy(), a in 0u64..100_000, b in 1u64..5_000) {
        let a = RingPoly::from_index(a, &f);
        let b = RingPoly::from_index(b, &f);
        let (q, r) = ring_divmod(&a, &b, &f).unwrap();
        prop_assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
    }

    #[test]
    fn norm_is_multiplicative(f in field_strategy(), a in 0u64..5_000, b in 1u64..5_000, c in 0u64..5_000, d in 1u64..5_000) {
        let x = RationalFF::new(RingPoly::from_index(a, &f), RingPoly::from_index(b, &f), &f).unwrap();
        let y = RationalFF::new(RingPoly::from_index(c, &f), RingPoly::from_index(d, &f), &f).unwrap();
        prop_assert_eq!(abs_norm(&x.mul(&y, &f), &f), abs_norm(&x, &f).mul(&abs_norm(&y, &f)));
    }
}
