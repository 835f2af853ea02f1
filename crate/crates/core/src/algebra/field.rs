//! The finite field F_q = F_p[u]/(modulus).
//!
//! Elements are packed into a single integer `Σ c_i p^i` where `c_i` is the
//! coefficient of `u^i`. The packed value doubles as the canonical
//! enumeration order of the field.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest field size supported.
pub const MAX_FIELD_SIZE: u32 = 1 << 16;
/// Fields up to this size get precomputed operation tables.
const TABLE_LIMIT: u32 = 256;

/// An element of F_q in packed form. Only meaningful together with the
/// [`FieldSpec`] that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FFElem(u32);

impl FFElem {
    pub const ZERO: FFElem = FFElem(0);
    pub const ONE: FFElem = FFElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Packed integer value in `[0, q)`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    frob: Vec<u32>,
    trace: Vec<u32>,
}

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// A finite field `F_p(u)` with `u` a root of a monic irreducible modulus.
///
/// Cloning is cheap; the operation tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldData>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("k", &self.inner.k)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

/// Conway polynomials for the non-prime fields of size ≤ 16 and primitive
/// roots for the prime ones, low coefficient first.
fn default_modulus(p: u32, k: u32) -> Option<Vec<u32>> {
    let m: &[u32] = match (p, k) {
        (2, 1) => &[1, 1],
        (3, 1) => &[1, 1],
        (5, 1) => &[3, 1],
        (7, 1) => &[4, 1],
        (11, 1) => &[9, 1],
        (13, 1) => &[11, 1],
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (3, 2) => &[2, 2, 1],
        _ => return None,
    };
    Some(m.to_vec())
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over F_p, low coefficient first, used only to
// validate moduli and to build tables.
fn fp_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let inv_lead = fp_inv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = (r[r.len() - 1] as u64 * inv_lead as u64 % p as u64) as u32;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (c as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn fp_inv(a: u32, p: u32) -> u32 {
    fp_pow(a as u64, p as u64 - 2, p as u64) as u32
}

/// Brute-force irreducibility: no monic factor of degree 1..=deg/2.
fn fp_is_irreducible(m: &[u32], p: u32) -> Result<bool> {
    let deg = m.len() - 1;
    if deg <= 1 {
        return Ok(true);
    }
    let half = deg / 2;
    let count = (p as u128).pow(half as u32);
    if count > 1_000_000 {
        return Err(Error::BoundExceeded {
            what: "irreducibility check",
            size: count,
            limit: 1_000_000,
        });
    }
    for d in 1..=half {
        let total = (p as u64).pow(d as u32);
        for idx in 0..total {
            let mut f = vec![0u32; d + 1];
            let mut rest = idx;
            for c in f.iter_mut().take(d) {
                *c = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            f[d] = 1;
            if fp_rem(m, &f, p).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl FieldSpec {
    /// The field of size `p^k` with the shipped default modulus, or the
    /// smallest monic irreducible in canonical order when none is shipped.
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be ≥ 1".into()));
        }
        let modulus = match default_modulus(p, k) {
            Some(m) => m,
            None => Self::first_irreducible(p, k)?,
        };
        Self::with_modulus(p, &modulus)
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    fn first_irreducible(p: u32, k: u32) -> Result<Vec<u32>> {
        let size = (p as u128).pow(k);
        if size > MAX_FIELD_SIZE as u128 {
            return Err(Error::BoundExceeded {
                what: "field size",
                size,
                limit: MAX_FIELD_SIZE as u128,
            });
        }
        for idx in 0..size as u64 {
            let mut m = vec![0u32; k as usize + 1];
            let mut rest = idx;
            for c in m.iter_mut().take(k as usize) {
                *c = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            m[k as usize] = 1;
            if k == 1 || (m[0] != 0 && fp_is_irreducible(&m, p)?) {
                return Ok(m);
            }
        }
        Err(Error::InvalidField(format!("no irreducible of degree {k} over F_{p}")))
    }

    /// Field with an explicit monic modulus given low coefficient first.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let mut m: Vec<u32> = modulus.iter().map(|&c| c % p).collect();
        fp_trim(&mut m);
        if m.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree ≥ 1".into()));
        }
        if *m.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let k = (m.len() - 1) as u32;
        let size = (p as u128).pow(k);
        if size > MAX_FIELD_SIZE as u128 {
            return Err(Error::BoundExceeded {
                what: "field size",
                size,
                limit: MAX_FIELD_SIZE as u128,
            });
        }
        if !fp_is_irreducible(&m, p)? {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let q = size as u32;
        let mut data = FieldData { p, k, q, modulus: m, tables: None };
        if q <= TABLE_LIMIT {
            data.tables = Some(build_tables(&data));
        }
        Ok(FieldSpec { inner: Arc::new(data) })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.inner.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Monic modulus, low coefficient first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// Whether this field is shipped with a default modulus that matches.
    pub fn has_default_modulus(&self) -> bool {
        default_modulus(self.p(), self.k()).as_deref() == Some(self.modulus())
    }

    pub fn zero(&self) -> FFElem {
        FFElem::ZERO
    }

    pub fn one(&self) -> FFElem {
        FFElem::ONE
    }

    /// The generator `u` (equal to the root of the modulus when `k = 1`).
    pub fn generator(&self) -> FFElem {
        if self.k() == 1 {
            FFElem((self.p() - self.inner.modulus[0]) % self.p())
        } else {
            FFElem(self.p())
        }
    }

    /// Element from an index in `[0, q)`.
    pub fn elem(&self, index: u32) -> Result<FFElem> {
        if index < self.q() {
            Ok(FFElem(index))
        } else {
            Err(Error::InvalidElement(format!("index {index} outside F_{}", self.q())))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FFElem {
        FFElem(n.rem_euclid(self.p() as i64) as u32)
    }

    /// Element from its coefficients in the generator basis (low first);
    /// coefficients are reduced mod p and extra length is reduced mod the modulus.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> FFElem {
        let p = self.p();
        let mut v: Vec<u32> = coeffs.iter().map(|&c| c % p).collect();
        if v.len() > self.k() as usize {
            v = fp_rem(&v, &self.inner.modulus, p);
        }
        FFElem(pack(&v, p))
    }

    /// Coefficients in the generator basis, low first, length `k`.
    pub fn coeffs(&self, x: FFElem) -> Vec<u32> {
        unpack(x.0, self.p(), self.k())
    }

    pub fn is_valid(&self, x: FFElem) -> bool {
        x.0 < self.q()
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FFElem> {
        (0..self.q()).map(FFElem)
    }

    #[inline]
    pub fn add(&self, a: FFElem, b: FFElem) -> FFElem {
        if let Some(t) = &self.inner.tables {
            return FFElem(t.add[(a.0 * self.q() + b.0) as usize]);
        }
        if self.k() == 1 {
            return FFElem((a.0 + b.0) % self.p());
        }
        let p = self.p();
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        for _ in 0..self.k() {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FFElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FFElem) -> FFElem {
        if let Some(t) = &self.inner.tables {
            return FFElem(t.neg[a.0 as usize]);
        }
        let p = self.p();
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        for _ in 0..self.k() {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FFElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FFElem, b: FFElem) -> FFElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FFElem, b: FFElem) -> FFElem {
        if let Some(t) = &self.inner.tables {
            return FFElem(t.mul[(a.0 * self.q() + b.0) as usize]);
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: FFElem, b: FFElem) -> FFElem {
        FFElem(mul_raw(&self.inner, a.0, b.0))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FFElem) -> Option<FFElem> {
        if a.is_zero() {
            return None;
        }
        if let Some(t) = &self.inner.tables {
            return Some(FFElem(t.inv[a.0 as usize]));
        }
        Some(self.pow(a, self.q() as u64 - 2))
    }

    pub fn pow(&self, a: FFElem, mut e: u64) -> FFElem {
        let mut acc = FFElem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^p`.
    #[inline]
    pub fn frobenius(&self, a: FFElem) -> FFElem {
        if let Some(t) = &self.inner.tables {
            return FFElem(t.frob[a.0 as usize]);
        }
        self.pow(a, self.p() as u64)
    }

    /// `a^(p^j)`; the Frobenius has order `k`, so `j` is reduced mod `k`.
    pub fn frobenius_pow(&self, a: FFElem, j: u32) -> FFElem {
        let mut x = a;
        for _ in 0..(j % self.k()) {
            x = self.frobenius(x);
        }
        x
    }

    /// Trace to the prime field, `Σ_{i<k} x^(p^i)`, as a residue in `[0, p)`.
    pub fn trace(&self, x: FFElem) -> u32 {
        if let Some(t) = &self.inner.tables {
            return t.trace[x.0 as usize];
        }
        trace_raw(&self.inner, x.0)
    }
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn unpack(mut x: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(x % p);
        x /= p;
    }
    out
}

fn mul_raw(d: &FieldData, a: u32, b: u32) -> u32 {
    let (p, k) = (d.p, d.k);
    if k == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let x = unpack(a, p, k);
    let y = unpack(b, p, k);
    let mut prod = vec![0u32; 2 * k as usize - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + xi as u64 * yj as u64) % p as u64) as u32;
        }
    }
    pack(&fp_rem(&prod, &d.modulus, p), p)
}

fn trace_raw(d: &FieldData, x: u32) -> u32 {
    let p = d.p;
    let mut acc = 0u32;
    let mut cur = x;
    for _ in 0..d.k {
        acc = add_raw(d, acc, cur);
        let mut pw = 1u32;
        for _ in 0..p {
            pw = mul_raw(d, pw, cur);
        }
        cur = pw;
    }
    // The trace lies in the prime field, so only the constant digit is set.
    debug_assert!(acc < p);
    acc
}

fn add_raw(d: &FieldData, a: u32, b: u32) -> u32 {
    let x = unpack(a, d.p, d.k);
    let y = unpack(b, d.p, d.k);
    let s: Vec<u32> = x.iter().zip(&y).map(|(&u, &v)| (u + v) % d.p).collect();
    pack(&s, d.p)
}

fn build_tables(d: &FieldData) -> Tables {
    let q = d.q as usize;
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    for a in 0..q {
        for b in 0..q {
            add[a * q + b] = add_raw(d, a as u32, b as u32);
            mul[a * q + b] = mul_raw(d, a as u32, b as u32);
        }
    }
    let mut neg = vec![0u32; q];
    let mut inv = vec![0u32; q];
    for a in 0..q {
        for b in 0..q {
            if add[a * q + b] == 0 {
                neg[a] = b as u32;
            }
            if mul[a * q + b] == 1 {
                inv[a] = b as u32;
            }
        }
    }
    let frob = (0..q)
        .map(|a| {
            let mut acc = 1u32;
            for _ in 0..d.p {
                acc = mul[acc as usize * q + a];
            }
            acc
        })
        .collect();
    let trace = (0..q).map(|a| trace_raw(d, a as u32)).collect();
    Tables { add, mul, neg, inv, frob, trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<FieldSpec> {
        vec![
            FieldSpec::new(2, 1).unwrap(),
            FieldSpec::new(3, 1).unwrap(),
            FieldSpec::new(2, 2).unwrap(),
            FieldSpec::new(5, 1).unwrap(),
            FieldSpec::new(3, 2).unwrap(),
        ]
    }

    #[test]
    fn trace_examples() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f2.trace(FFElem::ONE), 1);
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let u = f4.generator();
        // u + u^2 = u + (u + 1) = 1
        assert_eq!(f4.trace(u), 1);
        for f in small_fields() {
            assert_eq!(f.trace(f.zero()), 0);
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), f.zero());
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
    fn trace_is_linear_and_surjective() {
        for f in small_fields() {
            let mut hit = vec![false; f.p() as usize];
            for a in f.elements() {
                hit[f.trace(a) as usize] = true;
                for b in f.elements() {
                    assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % f.p());
                }
                for c in 0..f.p() {
                    let ca = f.mul(f.from_int(c as i64), a);
                    assert_eq!(f.trace(ca), c * f.trace(a) % f.p());
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn table_free_path_agrees() {
        // F_{2^9} exceeds the table limit.
        let big = FieldSpec::new(2, 9).unwrap();
        assert!(big.inner.tables.is_none());
        let a = big.elem(300).unwrap();
        let b = big.elem(77).unwrap();
        let ab = big.mul(a, b);
        assert_eq!(big.mul(ab, big.inv(b).unwrap()), a);
        assert_eq!(big.frobenius_pow(a, 9), a);
        assert!(big.trace(a) < 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldSpec::new(4, 1).is_err());
        assert!(FieldSpec::with_modulus(2, &[1, 0, 1]).is_err());
        assert!(FieldSpec::with_modulus(3, &[1, 1, 2]).is_err());
        assert!(FieldSpec::with_modulus(3, &[1, 0, 1]).is_ok());
    }
}
