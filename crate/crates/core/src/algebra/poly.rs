//! The polynomial ring Z = F_q[t].

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write;

use super::field::{FFElem, FieldSpec};
use crate::error::{Error, Result};

/// Enumeration guard shared by all exhaustive residue searches.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

/// An element of F_q[t], coefficients indexed by powers of `t`.
///
/// Always normalized: the leading coefficient is nonzero and the zero
/// polynomial is the empty vector. Ordering is the canonical enumeration
/// order of Z: by degree, then lexicographically from the leading
/// coefficient down.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RingPoly {
    coeffs: Vec<FFElem>,
}

impl Ord for RingPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for RingPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl RingPoly {
    pub fn zero() -> Self {
        RingPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FFElem::ONE)
    }

    pub fn constant(c: FFElem) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The generator `t`.
    pub fn t() -> Self {
        Self::monomial(FFElem::ONE, 1)
    }

    /// `c · t^d`.
    pub fn monomial(c: FFElem, d: usize) -> Self {
        let mut v = vec![FFElem::ZERO; d + 1];
        v[d] = c;
        Self::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<FFElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RingPoly { coeffs }
    }

    /// Polynomial over the prime subfield from integer coefficients, low first.
    pub fn from_ints(f: &FieldSpec, coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| f.from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FFElem {
        self.coeffs.get(i).copied().unwrap_or(FFElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FFElem::ONE
    }

    /// Degree, with `None` standing for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of stored coefficients (`deg + 1`, or 0 for the zero polynomial).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<FFElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FFElem::ONE)
    }

    pub fn add(&self, other: &Self, f: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(v)
    }

    pub fn neg(&self, f: &FieldSpec) -> Self {
        RingPoly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn sub(&self, other: &Self, f: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(v)
    }

    pub fn scale(&self, c: FFElem, f: &FieldSpec) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    /// Multiplication by `t^d`.
    pub fn shift(&self, d: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![FFElem::ZERO; d];
        v.extend_from_slice(&self.coeffs);
        RingPoly { coeffs: v }
    }

    pub fn mul(&self, other: &Self, f: &FieldSpec) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut v = vec![FFElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Self::from_coeffs(v)
    }

    pub fn pow(&self, mut e: u64, f: &FieldSpec) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    /// `self^(p^j)`, computed coefficient-wise as `Σ c_i^(p^j) t^(i p^j)`.
    pub fn frobenius_pow(&self, j: u32, f: &FieldSpec) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let step = (f.p() as usize).pow(j);
        let mut v = vec![FFElem::ZERO; (self.coeffs.len() - 1) * step + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * step] = f.frobenius_pow(c, j);
        }
        RingPoly { coeffs: v }
    }

    /// Euclidean division `self = quot · b + rem` with `deg rem < deg b`.
    pub fn divmod(&self, b: &Self, f: &FieldSpec) -> Result<(Self, Self)> {
        let lead = b.leading().ok_or(Error::DivisionByZero)?;
        let db = b.coeffs.len() - 1;
        if self.coeffs.len() <= db {
            return Ok((Self::zero(), self.clone()));
        }
        let inv = f.inv(lead).expect("leading coefficient is nonzero");
        let mut r = self.coeffs.clone();
        let mut quot = vec![FFElem::ZERO; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = f.mul(r[i], inv);
            if c.is_zero() {
                continue;
            }
            let s = i - db;
            quot[s] = c;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                r[s + j] = f.sub(r[s + j], f.mul(c, bj));
            }
        }
        r.truncate(db);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(r)))
    }

    pub fn rem(&self, b: &Self, f: &FieldSpec) -> Result<Self> {
        Ok(self.divmod(b, f)?.1)
    }

    /// Scales to leading coefficient 1 (the zero polynomial is unchanged).
    pub fn monic(&self, f: &FieldSpec) -> Self {
        match self.leading() {
            Some(l) => self.scale(f.inv(l).unwrap(), f),
            None => Self::zero(),
        }
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Self, f: &FieldSpec) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).unwrap();
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Extended gcd: returns `(g, s, u)` with `s·self + u·other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Self, f: &FieldSpec) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut u0, mut u1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1, f).unwrap();
            let s2 = s0.sub(&q.mul(&s1, f), f);
            let u2 = u0.sub(&q.mul(&u1, f), f);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            u0 = u1;
            u1 = u2;
        }
        match r0.leading() {
            Some(l) => {
                let li = f.inv(l).unwrap();
                (r0.scale(li, f), s0.scale(li, f), u0.scale(li, f))
            }
            None => (r0, s0, u0),
        }
    }

    /// Inverse modulo `m`, if `gcd(self, m) = 1`.
    pub fn inv_mod(&self, m: &Self, f: &FieldSpec) -> Result<Option<Self>> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = self.rem(m, f)?;
        let (g, s, _) = a.ext_gcd(m, f);
        if g.is_one() {
            Ok(Some(s.rem(m, f)?))
        } else {
            Ok(None)
        }
    }

    /// Evaluates at a field element.
    pub fn eval(&self, x: FFElem, f: &FieldSpec) -> FFElem {
        self.coeffs.iter().rev().fold(FFElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// The `index`-th element of Z in canonical order: base-q digits of the
    /// index are the coefficients, lowest digit the constant term.
    pub fn from_index(mut index: u64, f: &FieldSpec) -> Self {
        let q = f.q() as u64;
        let mut v = Vec::new();
        while index > 0 {
            v.push(f.elem((index % q) as u32).unwrap());
            index /= q;
        }
        Self::from_coeffs(v)
    }

    /// Inverse of [`RingPoly::from_index`].
    pub fn to_index(&self, f: &FieldSpec) -> u64 {
        let q = f.q() as u64;
        self.coeffs.iter().rev().fold(0, |acc, c| acc * q + c.index() as u64)
    }

    /// Whether every coefficient is a valid element of `f`.
    pub fn is_valid(&self, f: &FieldSpec) -> bool {
        self.coeffs.iter().all(|&c| f.is_valid(c))
    }

    /// Canonical text form: descending powers, zero terms omitted.
    pub fn to_text(&self, f: &FieldSpec) -> String {
        format_terms(self.coeffs.iter().enumerate().rev().map(|(i, &c)| (i as i64, c)), f)
    }
}

/// Number of polynomials of degree ≤ `n`, i.e. `q^(n+1)`.
pub fn box_size(f: &FieldSpec, n: usize) -> u128 {
    (f.q() as u128).saturating_pow(n as u32 + 1)
}

/// Text for one field element, as a polynomial in `u` when `k > 1`.
pub fn elem_text(c: FFElem, f: &FieldSpec) -> String {
    let mut s = String::new();
    if f.k() == 1 {
        let _ = write!(s, "{}", c.index());
        return s;
    }
    let coeffs = f.coeffs(c);
    let mut first = true;
    for (i, &a) in coeffs.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        if !first {
            s.push('+');
        }
        first = false;
        match (i, a) {
            (0, _) => {
                let _ = write!(s, "{a}");
            }
            (_, 1) => {}
            _ => {
                let _ = write!(s, "{a}*");
            }
        }
        match i {
            0 => {}
            1 => s.push('u'),
            _ => {
                let _ = write!(s, "u^{i}");
            }
        }
    }
    if first {
        s.push('0');
    }
    s
}

/// Formats `Σ c · t^e` for `(e, c)` pairs in the given order.
pub(crate) fn format_terms(terms: impl Iterator<Item = (i64, FFElem)>, f: &FieldSpec) -> String {
    let mut s = String::new();
    for (e, c) in terms {
        if c.is_zero() {
            continue;
        }
        if !s.is_empty() {
            s.push('+');
        }
        let ct = elem_text(c, f);
        let compound = f.k() > 1 && ct.contains('+');
        if e == 0 {
            s.push_str(&ct);
            continue;
        }
        if c != FFElem::ONE {
            if compound {
                let _ = write!(s, "({ct})*");
            } else {
                let _ = write!(s, "{ct}*");
            }
        }
        if e == 1 {
            s.push('t');
        } else {
            let _ = write!(s, "t^{e}");
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}
