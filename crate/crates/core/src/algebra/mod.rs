//! Exact arithmetic in F_q, F_q[t] and F_q(t).

mod field;
mod poly;
mod rational;

pub use field::{FFElem, FieldSpec, MAX_FIELD_SIZE};
pub use poly::{box_size, elem_text, RingPoly, ENUMERATION_GUARD};
pub(crate) use poly::format_terms;
pub use rational::{abs_norm, AbsNorm, RationalFF};

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Trace of `x` down to the prime field.
pub fn ff_trace(x: FFElem, f: &FieldSpec) -> u32 {
    f.trace(x)
}

/// Euclidean division in F_q[t].
pub fn ring_divmod(a: &RingPoly, b: &RingPoly, f: &FieldSpec) -> Result<(RingPoly, RingPoly)> {
    a.divmod(b, f)
}

/// All monic irreducible polynomials of degree `1..=bound`, in canonical order.
///
/// Irreducibility is decided by trial division by the irreducibles already
/// found, so the list is complete and duplicate-free.
pub fn irreducibles_up_to(f: &FieldSpec, bound: usize) -> Result<Vec<RingPoly>> {
    if bound == 0 {
        return Err(Error::InvalidArgument("degree bound must be ≥ 1".into()));
    }
    let size = (f.q() as u128).saturating_pow(bound as u32);
    if size > ENUMERATION_GUARD {
        return Err(Error::BoundExceeded {
            what: "irreducible enumeration",
            size,
            limit: ENUMERATION_GUARD,
        });
    }
    let q = f.q() as u64;
    let mut found: Vec<RingPoly> = Vec::new();
    for d in 1..=bound {
        let lower = q.pow(d as u32);
        // Monic polynomials of degree d occupy indices [q^d, 2 q^d).
        for idx in lower..2 * lower {
            let cand = RingPoly::from_index(idx, f);
            let reducible = found
                .iter()
                .take_while(|g| 2 * g.degree().unwrap() <= d)
                .any(|g| cand.rem(g, f).unwrap().is_zero());
            if !reducible {
                found.push(cand);
            }
        }
    }
    Ok(found)
}

/// The divisor ladder `m_1, …, m_jmax`: `m_j` is the least common multiple
/// of all monic polynomials of degree ≤ j, i.e. `Π π^⌊j / deg π⌋` over the
/// monic irreducibles `π` of degree ≤ j. Each step divides the next.
pub fn divisor_ladder(f: &FieldSpec, jmax: usize) -> Result<Vec<RingPoly>> {
    let irr = irreducibles_up_to(f, jmax)?;
    let mut out = Vec::with_capacity(jmax);
    for j in 1..=jmax {
        let mut m = RingPoly::one();
        for pi in irr.iter().take_while(|pi| pi.degree().unwrap() <= j) {
            m = m.mul(&pi.pow((j / pi.degree().unwrap()) as u64, f), f);
        }
        out.push(m);
    }
    Ok(out)
}

/// Combines residues `value mod modulus` with pairwise coprime moduli into
/// the unique residue modulo the product. Returns `(value, product)`.
pub fn crt_combine(residues: &[(RingPoly, RingPoly)], f: &FieldSpec) -> Result<(RingPoly, RingPoly)> {
    for (i, (_, mi)) in residues.iter().enumerate() {
        if mi.is_zero() {
            return Err(Error::DivisionByZero);
        }
        for (_, mj) in &residues[i + 1..] {
            if !mi.gcd(mj, f).is_one() {
                return Err(Error::NotCoprime);
            }
        }
    }
    let mut acc = RingPoly::zero();
    let mut modulus = RingPoly::one();
    for (a, m) in residues {
        // acc + modulus · ((a − acc) · modulus^{-1} mod m)
        let inv = modulus.inv_mod(m, f)?.ok_or(Error::NotCoprime)?;
        let diff = a.sub(&acc, f).rem(m, f)?;
        let k = diff.mul(&inv, f).rem(m, f)?;
        acc = acc.add(&modulus.mul(&k, f), f);
        modulus = modulus.mul(m, f);
        acc = acc.rem(&modulus, f)?;
    }
    Ok((acc, modulus))
}
