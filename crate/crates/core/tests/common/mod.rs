//! Builders and exhaustive checks shared by the integration targets.
#![allow(dead_code)]

use ffq_core::algebra::{FieldSpec, RationalFF, RingPoly};
use ffq_core::equidist::FolnerBox;
use ffq_core::intersective::IntPoly;
use ffq_core::polyseq::{
    decompose, derivational_degree, ddeg_difference_oracle, AdditiveMapSpec, CoeffTerm, StdPoly, SymPoly, SymSeq,
};
use ffq_core::recurrence::FiniteRotation;
use ffq_core::subtorus::{phi_image, phi_image_with_slack, Ambient, FpSubspace};
use ffq_core::torus::{CoeffStream, TorusElem, TorusVec};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type Check = Result<(), String>;

pub fn field(p: u32, k: u32) -> FieldSpec {
    FieldSpec::new(p, k).unwrap()
}

pub fn poly(f: &FieldSpec, coeffs: &[i64]) -> RingPoly {
    RingPoly::from_ints(f, coeffs)
}

/// A point of `T_M` from its slot coefficients `t^-1, t^-2, …`.
pub fn tv(f: &FieldSpec, slots: &[i64]) -> TorusVec {
    TorusVec::scalar(TorusElem::from_coeffs(slots.iter().map(|&c| f.from_int(c)).collect()).unwrap())
}

/// `num / t^d` as a coefficient.
pub fn rat_term(f: &FieldSpec, num: &[i64], d: usize) -> CoeffTerm {
    CoeffTerm::rational(RationalFF::new(poly(f, num), RingPoly::monomial(f.one(), d), f).unwrap())
}

/// `num · α^e` with `α` the sparse-squares stream.
pub fn squares_term(f: &FieldSpec, num: &[i64], e: u32) -> CoeffTerm {
    CoeffTerm {
        scalar: RationalFF::from_poly(poly(f, num)),
        streams: vec![(CoeffStream::SparsePowers { exponent: 2 }, e)],
    }
}

pub fn squares() -> CoeffStream {
    CoeffStream::SparsePowers { exponent: 2 }
}

/// `g(n) = η(n³)` with `η(n) = αn + (t+t²)α²n² + n/t²` over F_2.
pub fn counterexample(f: &FieldSpec) -> SymSeq {
    SymSeq::scalar(SymPoly::new(vec![
        (3, squares_term(f, &[1], 1)),
        (6, squares_term(f, &[0, 1, 1], 2)),
        (3, rat_term(f, &[1], 2)),
    ]))
}

/// `g(n) = η(n²)` with `η(n) = αn − t²α³n³ + n/t` over F_3.
pub fn single_exponent_seq(f: &FieldSpec) -> SymSeq {
    SymSeq::scalar(SymPoly::new(vec![
        (2, squares_term(f, &[1], 1)),
        (6, squares_term(f, &[0, 0, -1], 3)),
        (2, rat_term(f, &[1], 1)),
    ]))
}

/// `η(n) = αn + tα²n² + n/t` over F_2.
pub fn repaired(f: &FieldSpec) -> SymSeq {
    SymSeq::scalar(SymPoly::new(vec![
        (1, squares_term(f, &[1], 1)),
        (2, squares_term(f, &[0, 1], 2)),
        (1, rat_term(f, &[1], 1)),
    ]))
}

/// `x ↦ x − t^(q−1) x^q`.
pub fn frobenius_twist(f: &FieldSpec) -> AdditiveMapSpec {
    let lead = RingPoly::monomial(f.from_int(-1), f.q() as usize - 1);
    AdditiveMapSpec::new(1, 1, [(0, 0, vec![RingPoly::one()]), (0, f.k(), vec![lead])], f).unwrap()
}

/// `{x ∈ T_M : c_1 = … = c_j = 0}`.
pub fn leading_slots_zero(f: &FieldSpec, m: usize, j: usize) -> FpSubspace {
    let mut s = FpSubspace::zero(Ambient::new(f.clone(), 1, m).unwrap());
    for slot in j + 1..=m {
        for c in f.elements() {
            s.insert(&TorusVec::scalar(TorusElem::monomial(c, slot, m).unwrap())).unwrap();
        }
    }
    s
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

pub fn random_poly(rng: &mut ChaCha8Rng, f: &FieldSpec, max_deg: usize) -> RingPoly {
    let count = (f.q() as u64).pow(max_deg as u32 + 1);
    RingPoly::from_index(below(rng, count), f)
}

pub fn random_monic(rng: &mut ChaCha8Rng, f: &FieldSpec, deg: usize) -> RingPoly {
    let low = (f.q() as u64).pow(deg as u32);
    RingPoly::from_index(low + below(rng, low), f)
}

pub fn random_point(rng: &mut ChaCha8Rng, f: &FieldSpec, dim: usize, prec: usize) -> TorusVec {
    let coords = (0..dim)
        .map(|_| {
            let c = (0..prec).map(|_| f.elem(below(rng, f.q() as u64) as u32).unwrap()).collect();
            TorusElem::from_coeffs(c).unwrap()
        })
        .collect();
    TorusVec::new(coords).unwrap()
}

pub fn random_std(rng: &mut ChaCha8Rng, f: &FieldSpec, dim: usize, prec: usize, max_deg: usize) -> StdPoly {
    let mut terms = Vec::new();
    for k in 0..=max_deg {
        if below(rng, 3) > 0 {
            terms.push((k, random_point(rng, f, dim, prec)));
        }
    }
    StdPoly::new(dim, prec, terms, f).unwrap()
}

pub fn random_intpoly(rng: &mut ChaCha8Rng, f: &FieldSpec, max_deg: usize, coeff_deg: usize) -> IntPoly {
    let deg = 1 + below(rng, max_deg as u64) as usize;
    let mut coeffs: Vec<RingPoly> = (0..deg).map(|_| random_poly(rng, f, coeff_deg)).collect();
    coeffs.push(RingPoly::one());
    IntPoly::new(coeffs)
}

fn all_points(f: &FieldSpec, m: usize) -> Vec<TorusVec> {
    let order = (f.q() as u64).pow(m as u32);
    (0..order).map(|i| TorusVec::from_group_index(i, 1, m, f).unwrap()).collect()
}

/// Bi-additivity and non-degeneracy of `⟨w, x⟩` on `deg w < M` × `T_M`.
pub fn torus_duality(f: &FieldSpec, m: usize) -> Check {
    let p = f.p();
    let points = all_points(f, m);
    let chars: Vec<RingPoly> = FolnerBox::new(m - 1, f).unwrap().iter().collect();
    let idx = |w: &RingPoly, x: &TorusVec| x.pairing_index(std::slice::from_ref(w), f).unwrap();
    for w in &chars {
        for x in &points {
            let wx = idx(w, x);
            for y in &points {
                if idx(w, &x.add(y, f).unwrap()) != (wx + idx(w, y)) % p {
                    return Err(format!("⟨{}, ·⟩ not additive at {}, {}", w.to_text(f), x.to_text(f), y.to_text(f)));
                }
            }
            for v in &chars {
                if idx(&w.add(v, f), x) != (wx + idx(v, x)) % p {
                    return Err(format!("⟨·, {}⟩ not additive", x.to_text(f)));
                }
            }
        }
    }
    for x in points.iter().filter(|x| !x.is_zero()) {
        if chars.iter().all(|w| idx(w, x) == 0) {
            return Err(format!("{} pairs trivially with every character", x.to_text(f)));
        }
    }
    for w in chars.iter().filter(|w| !w.is_zero()) {
        if points.iter().all(|x| idx(w, x) == 0) {
            return Err(format!("character {} is trivial", w.to_text(f)));
        }
    }
    Ok(())
}

/// `recompose(decompose(g)) = g` and both forms evaluate alike.
pub fn decompose_roundtrips(seed: u64, cases: usize) -> Check {
    let mut r = rng(seed);
    for case in 0..cases {
        let f = [field(2, 1), field(3, 1), field(2, 2), field(5, 1)][case % 4].clone();
        let dim = 1 + case % 2;
        let g = random_std(&mut r, &f, dim, 30, 9);
        let h = decompose(&g, &f);
        if h.recompose(&f) != g {
            return Err(format!("case {case}: recompose differs for {}", g.to_text(&f)));
        }
        for _ in 0..4 {
            let n = random_poly(&mut r, &f, 2);
            if g.evaluate(&n, 6, &f).unwrap() != h.evaluate(&n, 6, &f).unwrap() {
                return Err(format!("case {case}: evaluations differ at n = {}", n.to_text(&f)));
            }
        }
    }
    Ok(())
}

/// The digit-sum degree agrees with the difference oracle for single
/// monomials `x^k`, `k ≤ max_exp`, and random sums of them.
pub fn ddeg_matches_oracle(max_exp: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for f in [field(2, 1), field(3, 1)] {
        for k in 0..=max_exp {
            let g = StdPoly::new(1, 2, [(k, tv(&f, &[0, 1]))], &f).unwrap();
            let d = derivational_degree(&g, &f).unwrap();
            if !ddeg_difference_oracle(&g, d, 1, &f).unwrap() {
                return Err(format!("x^{k} over F_{}: oracle rejects degree {d}", f.q()));
            }
        }
        for _ in 0..10 {
            let g = random_std(&mut r, &f, 1, 3, max_exp);
            if g.is_zero() {
                continue;
            }
            let d = derivational_degree(&g, &f).unwrap();
            if !ddeg_difference_oracle(&g, d, 1, &f).unwrap() {
                return Err(format!("{} over F_{}: oracle rejects degree {d}", g.to_text(&f), f.q()));
            }
        }
    }
    Ok(())
}

/// Extra input slots never change a Φ-image.
pub fn phi_slack_stable() -> Check {
    let f2 = field(2, 1);
    let f3 = field(3, 1);
    let f4 = field(2, 2);
    let maps = [
        (frobenius_twist(&f2), f2.clone()),
        (frobenius_twist(&f3), f3.clone()),
        (frobenius_twist(&f4), f4.clone()),
        (AdditiveMapSpec::univariate(&[RingPoly::one(), poly(&f2, &[0, 1, 1])], &f2).unwrap(), f2.clone()),
        (AdditiveMapSpec::univariate(&[poly(&f2, &[0, 1]), poly(&f2, &[1, 0, 1]), poly(&f2, &[0, 0, 0, 1])], &f2).unwrap(), f2.clone()),
        (AdditiveMapSpec::univariate(&[poly(&f3, &[0, 0, 1])], &f3).unwrap(), f3.clone()),
    ];
    for (map, f) in &maps {
        for m in 1..=5 {
            let base = phi_image(map, m, f).map_err(|e| e.to_string())?;
            for slack in 1..=3 {
                if phi_image_with_slack(map, m, slack, f).unwrap() != base {
                    return Err(format!("F_{}, M = {m}: slack {slack} changes the image", f.q()));
                }
            }
        }
    }
    Ok(())
}

/// Small rotation systems used by the recurrence checks.
pub fn rotation_suite() -> Vec<FiniteRotation> {
    let f2 = field(2, 1);
    let f3 = field(3, 1);
    let inv_t = |f: &FieldSpec| {
        CoeffStream::Rational(RationalFF::new(RingPoly::one(), RingPoly::t(), f).unwrap())
    };
    let sq = FiniteRotation::from_streams(&f2, vec![squares()], 2, 8, []).unwrap();
    let sq3 = FiniteRotation::from_streams(&f2, vec![squares()], 3, 8, []).unwrap();
    let pair = FiniteRotation::from_streams(&f2, vec![squares(), inv_t(&f2)], 2, 8, []).unwrap();
    let ter = FiniteRotation::from_streams(&f3, vec![squares()], 2, 8, []).unwrap();
    let rat = FiniteRotation::from_streams(&f3, vec![inv_t(&f3)], 2, 4, []).unwrap();
    vec![
        sq.with_predicate(|x| x.coord(0).coeff(1).is_zero()).unwrap(),
        sq3.with_indices([0, 3, 5]).unwrap(),
        sq3.with_random(7, 0.4).unwrap(),
        pair.with_predicate(|x| x.coord(0).coeff(2) == x.coord(1).coeff(1)).unwrap(),
        ter.with_random(11, 0.5).unwrap(),
        rat.with_indices([0, 1, 2]).unwrap(),
    ]
}

/// `|T(n)A| = |A|` and `T(n)` permutes `G` for every `n` in the box.
pub fn measure_preserved(n: usize) -> Check {
    for (i, sys) in rotation_suite().iter().enumerate() {
        for s in FolnerBox::new(n, sys.field()).unwrap().iter() {
            if sys.image_size(&s).unwrap() != sys.set_size() || !sys.is_bijective(&s).unwrap() {
                return Err(format!("system {i}: T({}) does not preserve measure", s.to_text(sys.field())));
            }
        }
    }
    Ok(())
}

/// `return_measure` equals the double-loop count for every `s` in the box.
pub fn return_matches_oracle(n: usize) -> Check {
    for (i, sys) in rotation_suite().iter().enumerate() {
        for s in FolnerBox::new(n, sys.field()).unwrap().iter() {
            let fast = sys.return_measure(&s).unwrap();
            let slow = sys.return_measure_oracle(&s).unwrap();
            if fast != slow {
                return Err(format!("system {i}, s = {}: {fast} vs {slow}", s.to_text(sys.field())));
            }
        }
    }
    Ok(())
}
