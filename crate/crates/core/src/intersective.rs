//! Roots of polynomials `q(n) ∈ Z[n]` modulo elements of Z, Hensel lifting,
//! and bounded certificates of intersectivity.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{irreducibles_up_to, FieldSpec, RingPoly, ENUMERATION_GUARD};
use crate::error::{Error, Result};

/// A polynomial in `n` with coefficients in Z; `coeffs[i]` multiplies `n^i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<RingPoly>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<RingPoly>) -> Self {
        while coeffs.last().is_some_and(RingPoly::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// From coefficients in the prime field, lowest power first.
    pub fn from_ints(f: &FieldSpec, coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| RingPoly::constant(f.from_int(c))).collect())
    }

    pub fn coeffs(&self) -> &[RingPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RingPoly {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, n: &RingPoly, f: &FieldSpec) -> RingPoly {
        self.coeffs.iter().rev().fold(RingPoly::zero(), |acc, c| acc.mul(n, f).add(c, f))
    }

    /// `q(n) mod m`, reducing at every Horner step.
    pub fn eval_mod(&self, n: &RingPoly, m: &RingPoly, f: &FieldSpec) -> Result<RingPoly> {
        let n = n.rem(m, f)?;
        let mut acc = RingPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&n, f).add(c, f).rem(m, f)?;
        }
        Ok(acc)
    }

    /// Formal derivative; it can vanish identically in characteristic p.
    pub fn derivative(&self, f: &FieldSpec) -> IntPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(f.from_int(i as i64), f))
            .collect();
        IntPoly::new(coeffs)
    }

    /// Text in the variable `x`, descending powers.
    pub fn to_text(&self, f: &FieldSpec) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let ct = c.to_text(f);
            let var = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            parts.push(match (i, c.is_one()) {
                (0, _) => ct,
                (_, true) => var,
                _ if c.len() == 1 && !ct.contains('+') => format!("{ct}*{var}"),
                _ => format!("({ct})*{var}"),
            });
        }
        if parts.is_empty() {
            return "0".into();
        }
        parts.join("+")
    }
}

/// (P1): `q(0) = 0`.
pub fn p1_check(q: &IntPoly) -> bool {
    q.coeff(0).is_zero()
}

fn residue_count(m: &RingPoly, f: &FieldSpec) -> Result<u64> {
    let d = m.degree().ok_or(Error::DivisionByZero)?;
    let count = (f.q() as u128).saturating_pow(d as u32);
    if count > ENUMERATION_GUARD {
        return Err(Error::BoundExceeded { what: "residues mod m", size: count, limit: ENUMERATION_GUARD });
    }
    Ok(count as u64)
}

/// All residues `r` with `deg r < deg m` and `m | q(r)`, by exhaustive evaluation.
pub fn roots_mod(q: &IntPoly, m: &RingPoly, f: &FieldSpec) -> Result<Vec<RingPoly>> {
    let count = residue_count(m, f)?;
    let mut out = Vec::new();
    for i in 0..count {
        let r = RingPoly::from_index(i, f);
        if q.eval_mod(&r, m, f)?.is_zero() {
            out.push(r);
        }
    }
    Ok(out)
}

/// All roots mod `Π π_i^(e_i)` for distinct monic irreducibles `π_i`:
/// complete root lists mod each `π_i^(e_i)` from [`branch_search`],
/// combined by CRT. Sorted canonically.
pub fn roots_mod_factored(q: &IntPoly, factors: &[(RingPoly, usize)], f: &FieldSpec) -> Result<Vec<RingPoly>> {
    let mut acc = vec![(RingPoly::zero(), RingPoly::one())];
    for (pi, e) in factors {
        if *e == 0 {
            continue;
        }
        let search = branch_search(q, pi, *e, DEFAULT_WIDTH, f)?;
        if search.levels.len() < *e || search.failed_at().is_some() {
            return Ok(Vec::new());
        }
        let roots = &search.levels[e - 1];
        let size = acc.len() as u128 * roots.len() as u128;
        if size > ENUMERATION_GUARD {
            return Err(Error::BoundExceeded { what: "combined roots", size, limit: ENUMERATION_GUARD });
        }
        let pe = pi.pow(*e as u64, f);
        let mut next = Vec::with_capacity(size as usize);
        for (a, m) in &acc {
            for r in roots {
                next.push(crate::algebra::crt_combine(&[(a.clone(), m.clone()), (r.clone(), pe.clone())], f)?);
            }
        }
        acc = next;
    }
    let mut out: Vec<RingPoly> = acc.into_iter().map(|(r, _)| r).collect();
    out.sort();
    Ok(out)
}

/// Newton lifting of a root mod `π^k` to a root mod `π^target`.
pub fn hensel_lift(q: &IntPoly, pi: &RingPoly, r: &RingPoly, k: usize, target: usize, f: &FieldSpec) -> Result<RingPoly> {
    if k == 0 {
        return Err(Error::InvalidArgument("root level must be ≥ 1".into()));
    }
    let dq = q.derivative(f);
    if dq.eval_mod(r, pi, f)?.is_zero() {
        return Err(Error::NonUnitDerivative);
    }
    if !q.eval_mod(r, &pi.pow(k as u64, f), f)?.is_zero() {
        return Err(Error::InvalidArgument(format!("not a root mod π^{k}")));
    }
    let mut level = k;
    let mut r = r.rem(&pi.pow(k.max(target) as u64, f), f)?;
    while level < target {
        level = (2 * level).min(target);
        let modulus = pi.pow(level as u64, f);
        let inv = dq.eval_mod(&r, &modulus, f)?.inv_mod(&modulus, f)?.ok_or(Error::NonUnitDerivative)?;
        let step = q.eval_mod(&r, &modulus, f)?.mul(&inv, f);
        r = r.sub(&step, f).rem(&modulus, f)?;
    }
    let modulus = pi.pow(target.max(k) as u64, f);
    let r = r.rem(&modulus, f)?;
    debug_assert!(q.eval_mod(&r, &modulus, f)?.is_zero());
    Ok(r)
}

/// Default branch-search depth and width.
pub const DEFAULT_K: usize = 6;
pub const DEFAULT_WIDTH: usize = 10_000;

/// Complete root lists mod `π^j`, `j = 1, 2, …`, until `K` or an empty level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSearch {
    /// `levels[j-1]` holds all roots mod `π^j`.
    pub levels: Vec<Vec<RingPoly>>,
}

impl BranchSearch {
    /// The first `j` with no root mod `π^j`.
    pub fn failed_at(&self) -> Option<usize> {
        self.levels.iter().position(Vec::is_empty).map(|i| i + 1)
    }
}

/// Level-by-level expansion `r ↦ r + s π^j`; every root mod `π^(j+1)`
/// reduces to a root mod `π^j`, so the lists are complete.
pub fn branch_search(q: &IntPoly, pi: &RingPoly, k: usize, width: usize, f: &FieldSpec) -> Result<BranchSearch> {
    let mut levels = vec![roots_mod(q, pi, f)?];
    let digits: Vec<RingPoly> = (0..residue_count(pi, f)?).map(|i| RingPoly::from_index(i, f)).collect();
    let mut pj = pi.clone();
    while levels.len() < k && !levels.last().unwrap().is_empty() {
        let prev = levels.last().unwrap();
        let candidates = (prev.len() as u128) * digits.len() as u128;
        if candidates > width as u128 {
            return Err(Error::BoundExceeded { what: "branch search width", size: candidates, limit: width as u128 });
        }
        let next_mod = pj.mul(pi, f);
        let mut next = Vec::new();
        for r in prev {
            for s in &digits {
                let cand = r.add(&s.mul(&pj, f), f);
                if q.eval_mod(&cand, &next_mod, f)?.is_zero() {
                    next.push(cand);
                }
            }
        }
        next.sort();
        levels.push(next);
        pj = next_mod;
    }
    Ok(BranchSearch { levels })
}

/// Evidence that `q` has roots modulo powers of one irreducible `π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootCertificate {
    pub pi: RingPoly,
    /// Root mod `π`.
    pub root: RingPoly,
    /// `q'(root)` is a unit mod `π`, so every power of `π` is covered.
    pub liftable: bool,
    /// `q(root) = 0` exactly, so every power of `π` is covered.
    pub exact: bool,
    /// `lifts[j-1]` is a root mod `π^j`.
    pub lifts: Vec<RingPoly>,
}

impl RootCertificate {
    /// Builds and re-verifies a certificate.
    pub fn new(q: &IntPoly, pi: RingPoly, lifts: Vec<RingPoly>, f: &FieldSpec) -> Result<Self> {
        let root = lifts.first().cloned().ok_or_else(|| Error::InvalidArgument("certificate without a root".into()))?;
        let liftable = !q.derivative(f).eval_mod(&root, &pi, f)?.is_zero();
        let exact = q.eval(&root, f).is_zero();
        let cert = RootCertificate { pi, root, liftable, exact, lifts };
        if !cert.verify(q, f)? {
            return Err(Error::InvalidArgument("certificate does not verify".into()));
        }
        Ok(cert)
    }

    /// `π^j | q(r_j)` at every recorded level.
    pub fn verify(&self, q: &IntPoly, f: &FieldSpec) -> Result<bool> {
        let mut pj = RingPoly::one();
        for r in &self.lifts {
            pj = pj.mul(&self.pi, f);
            if !q.eval_mod(r, &pj, f)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn levels(&self) -> usize {
        self.lifts.len()
    }

    /// Whether all powers of `π` are covered.
    pub fn unbounded(&self) -> bool {
        self.liftable || self.exact
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntersectiveVerdict {
    /// No root mod `witness = π^power`.
    NonIntersective { witness: RingPoly, pi: RingPoly, power: usize },
    /// Roots mod `π^j` for all `deg π ≤ b`, `j ≤ k` (all `j` when the
    /// certificate is unbounded).
    CertifiedUpTo { b: usize, k: usize, certificates: Vec<RootCertificate> },
    /// The width guard stopped the search below these `π`.
    Inconclusive { pis: Vec<RingPoly>, certificates: Vec<RootCertificate> },
}

impl IntersectiveVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            IntersectiveVerdict::NonIntersective { .. } => "NonIntersective",
            IntersectiveVerdict::CertifiedUpTo { .. } => "CertifiedUpTo",
            IntersectiveVerdict::Inconclusive { .. } => "Inconclusive",
        }
    }
}

/// Outcome for one irreducible.
enum PiOutcome {
    Fails(usize),
    Certified(RootCertificate),
    Stuck,
}

fn examine_pi(q: &IntPoly, pi: &RingPoly, k: usize, width: usize, f: &FieldSpec) -> Result<PiOutcome> {
    let roots = roots_mod(q, pi, f)?;
    if roots.is_empty() {
        return Ok(PiOutcome::Fails(1));
    }
    let dq = q.derivative(f);
    // exact roots first, then liftable ones, each in canonical order
    if let Some(r) = roots.iter().find(|r| q.eval(r, f).is_zero()) {
        let lifts = (1..=k).map(|j| r.rem(&pi.pow(j as u64, f), f)).collect::<Result<Vec<_>>>()?;
        return Ok(PiOutcome::Certified(RootCertificate::new(q, pi.clone(), lifts, f)?));
    }
    for r in &roots {
        if !dq.eval_mod(r, pi, f)?.is_zero() {
            let lifts = (1..=k).map(|j| hensel_lift(q, pi, r, 1, j, f)).collect::<Result<Vec<_>>>()?;
            return Ok(PiOutcome::Certified(RootCertificate::new(q, pi.clone(), lifts, f)?));
        }
    }
    match branch_search(q, pi, k, width, f) {
        Ok(search) => {
            if let Some(j) = search.failed_at() {
                return Ok(PiOutcome::Fails(j));
            }
            // follow the canonical-least chain down from level k
            let top = search.levels[k - 1][0].clone();
            let lifts = (1..=k).map(|j| top.rem(&pi.pow(j as u64, f), f)).collect::<Result<Vec<_>>>()?;
            Ok(PiOutcome::Certified(RootCertificate::new(q, pi.clone(), lifts, f)?))
        }
        Err(Error::BoundExceeded { .. }) => Ok(PiOutcome::Stuck),
        Err(e) => Err(e),
    }
}

/// Largest supported power bound.
pub const MAX_K: usize = 64;

/// Bounded semi-decision of (P3) over irreducibles of degree ≤ `b` and
/// powers ≤ `k`. A `NonIntersective` verdict is unconditional; its witness
/// is the least failing `π^j` in (degree, canonical) order.
pub fn intersective_verdict(q: &IntPoly, b: usize, k: usize, f: &FieldSpec) -> Result<IntersectiveVerdict> {
    intersective_verdict_width(q, b, k, DEFAULT_WIDTH, f)
}

pub fn intersective_verdict_width(q: &IntPoly, b: usize, k: usize, width: usize, f: &FieldSpec) -> Result<IntersectiveVerdict> {
    if q.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument("intersectivity needs deg q ≥ 1".into()));
    }
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidArgument(format!("power bound K must be in 1..={MAX_K}")));
    }
    let mut failures: Vec<(RingPoly, RingPoly, usize)> = Vec::new();
    let mut certificates = Vec::new();
    let mut stuck = Vec::new();
    for pi in irreducibles_up_to(f, b)? {
        match examine_pi(q, &pi, k, width, f)? {
            PiOutcome::Fails(j) => failures.push((pi.pow(j as u64, f), pi, j)),
            PiOutcome::Certified(c) => certificates.push(c),
            PiOutcome::Stuck => stuck.push(pi),
        }
    }
    if let Some((witness, pi, power)) = failures.into_iter().min_by(|a, b| a.0.cmp(&b.0)) {
        return Ok(IntersectiveVerdict::NonIntersective { witness, pi, power });
    }
    if !stuck.is_empty() {
        return Ok(IntersectiveVerdict::Inconclusive { pis: stuck, certificates });
    }
    Ok(IntersectiveVerdict::CertifiedUpTo { b, k, certificates })
}

/// Searches `x, y ∈ E` and `deg m ≤ m_bound` with `x − y = q(m)`; `m` runs
/// in canonical order, then `y`.
pub fn p4_desk_search(q: &IntPoly, e: &[RingPoly], m_bound: usize, f: &FieldSpec) -> Result<Option<(RingPoly, RingPoly, RingPoly)>> {
    let set: BTreeSet<&RingPoly> = e.iter().collect();
    let count = crate::algebra::box_size(f, m_bound);
    if count > ENUMERATION_GUARD {
        return Err(Error::BoundExceeded { what: "p4 search", size: count, limit: ENUMERATION_GUARD });
    }
    for i in 0..count as u64 {
        let m = RingPoly::from_index(i, f);
        let v = q.eval(&m, f);
        for y in &set {
            let x = y.add(&v, f);
            if set.contains(&x) {
                return Ok(Some((x, (*y).clone(), m)));
            }
        }
    }
    Ok(None)
}

/// The least root of `q` mod `m`, if any.
pub fn some_root_mod(q: &IntPoly, m: &RingPoly, f: &FieldSpec) -> Result<Option<RingPoly>> {
    Ok(roots_mod(q, m, f)?.into_iter().next())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::new(2, 1).unwrap()
    }

    fn qpoly(f: &FieldSpec, coeffs: &[&[i64]]) -> IntPoly {
        IntPoly::new(coeffs.iter().map(|c| RingPoly::from_ints(f, c)).collect())
    }

    #[test]
    fn p1_examples() {
        let f = f2();
        assert!(!p1_check(&IntPoly::from_ints(&f, &[1, 1])));
        assert!(p1_check(&IntPoly::from_ints(&f, &[0, 0, 1])));
        assert!(!p1_check(&qpoly(&f, &[&[0, 1], &[], &[1]])));
    }

    #[test]
    fn roots_mod_examples() {
        let f = f2();
        let t = RingPoly::t();
        assert!(roots_mod(&IntPoly::from_ints(&f, &[1, 1, 1]), &t, &f).unwrap().is_empty());
        assert_eq!(
            roots_mod(&IntPoly::from_ints(&f, &[1, 1]), &t.pow(2, &f), &f).unwrap(),
            [RingPoly::one()]
        );
        let q = IntPoly::from_ints(&f, &[0, 1, 1]);
        assert!(roots_mod(&q, &RingPoly::from_ints(&f, &[1, 1, 1]), &f).unwrap().contains(&RingPoly::zero()));
    }

    #[test]
    fn hensel_examples() {
        let f = f2();
        let t = RingPoly::t();
        let q = qpoly(&f, &[&[0, 1], &[1], &[1]]);
        assert_eq!(hensel_lift(&q, &t, &RingPoly::zero(), 1, 2, &f).unwrap(), t);
        let exact = IntPoly::from_ints(&f, &[1, 1]);
        for target in 1..6 {
            assert_eq!(hensel_lift(&exact, &t, &RingPoly::one(), 1, target, &f).unwrap(), RingPoly::one());
        }
        let f3 = FieldSpec::new(3, 1).unwrap();
        let q3 = qpoly(&f3, &[&[0, 1], &[1]]);
        assert_eq!(hensel_lift(&q3, &t, &RingPoly::zero(), 1, 2, &f3).unwrap(), RingPoly::from_ints(&f3, &[0, 2]));
        let deg = IntPoly::from_ints(&f, &[0, 0, 1]);
        assert_eq!(hensel_lift(&deg, &t, &RingPoly::zero(), 1, 2, &f), Err(Error::NonUnitDerivative));
    }

    #[test]
    fn branch_examples() {
        let f = f2();
        let t = RingPoly::t();
        let s = branch_search(&qpoly(&f, &[&[0, 1], &[], &[1]]), &t, 2, DEFAULT_WIDTH, &f).unwrap();
        assert_eq!(s.levels[0], [RingPoly::zero()]);
        assert_eq!(s.failed_at(), Some(2));
        let sq = branch_search(&IntPoly::from_ints(&f, &[0, 0, 1]), &t, 5, DEFAULT_WIDTH, &f).unwrap();
        assert!(sq.levels.iter().all(|l| l.contains(&RingPoly::zero())));
        // n^4 + t^2: t^2 | (bt)^4 + t^2, so both 0 and t survive mod t^2;
        // mod t^3 every candidate leaves t^2.
        let q4 = qpoly(&f, &[&[0, 0, 1], &[], &[], &[], &[1]]);
        let s4 = branch_search(&q4, &t, 3, DEFAULT_WIDTH, &f).unwrap();
        assert_eq!(s4.levels[1], [RingPoly::zero(), t.clone()]);
        assert_eq!(s4.levels[1], roots_mod(&q4, &t.pow(2, &f), &f).unwrap());
        assert_eq!(s4.failed_at(), Some(3));
        assert!(roots_mod(&q4, &t.pow(3, &f), &f).unwrap().is_empty());
    }

    #[test]
    fn verdict_examples() {
        let f = f2();
        let t = RingPoly::t();
        match intersective_verdict(&IntPoly::from_ints(&f, &[1, 1]), 3, 4, &f).unwrap() {
            IntersectiveVerdict::CertifiedUpTo { b: 3, k: 4, certificates } => {
                assert_eq!(certificates.len(), 5);
                assert!(certificates.iter().all(|c| c.unbounded()));
            }
            v => panic!("unexpected {v:?}"),
        }
        match intersective_verdict(&IntPoly::from_ints(&f, &[1, 1, 1]), 3, 4, &f).unwrap() {
            IntersectiveVerdict::NonIntersective { witness, .. } => assert_eq!(witness, t),
            v => panic!("unexpected {v:?}"),
        }
        match intersective_verdict(&qpoly(&f, &[&[0, 1], &[], &[1]]), 3, 4, &f).unwrap() {
            IntersectiveVerdict::NonIntersective { witness, .. } => assert_eq!(witness, t.pow(2, &f)),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn p4_examples() {
        let f = f2();
        let q = IntPoly::from_ints(&f, &[0, 0, 1]);
        let coset: Vec<RingPoly> = (0..32u64).map(|i| RingPoly::from_index(i, &f)).filter(|n| n.coeff(0).is_zero()).collect();
        let (x, y, m) = p4_desk_search(&q, &coset, 2, &f).unwrap().unwrap();
        assert_eq!(x.sub(&y, &f), q.eval(&m, &f));
        let single = [RingPoly::one()];
        assert!(p4_desk_search(&IntPoly::from_ints(&f, &[1, 1, 1]), &single, 3, &f).unwrap().is_none());
        assert!(p4_desk_search(&IntPoly::from_ints(&f, &[1, 1]), &single, 3, &f).unwrap().is_some());
    }
}
