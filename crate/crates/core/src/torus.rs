//! Truncated Laurent series in 1/t and the torus T = F_q((1/t)) / F_q[t].
//!
//! A [`TorusElem`] of precision `M` stores the coefficients of
//! `t^-1, …, t^-M`; it stands for every element of T that agrees with it in
//! those slots. Operations compute the exact output precision and refuse to
//! invent coefficients: multiplying by `n ∈ Z` costs `deg n` slots, the
//! Frobenius `x ↦ x^(p^j)` multiplies the precision by `p^j`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::algebra::{format_terms, FFElem, FieldSpec, RationalFF, RingPoly};
use crate::error::{Error, Result};

/// An element of T known to precision `M = coeffs.len() ≥ 1`; `coeffs[s-1]`
/// is the coefficient of `t^-s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusElem {
    coeffs: Vec<FFElem>,
}

fn check_prec(prec: usize) -> Result<()> {
    if prec == 0 {
        Err(Error::InsufficientPrecision { required: 1, available: 0 })
    } else {
        Ok(())
    }
}

impl TorusElem {
    pub fn zero(prec: usize) -> Result<Self> {
        check_prec(prec)?;
        Ok(TorusElem { coeffs: vec![FFElem::ZERO; prec] })
    }

    /// From the coefficients of `t^-1, t^-2, …`; the precision is the length.
    pub fn from_coeffs(coeffs: Vec<FFElem>) -> Result<Self> {
        check_prec(coeffs.len())?;
        Ok(TorusElem { coeffs })
    }

    /// `c · t^-slot` at the given precision.
    pub fn monomial(c: FFElem, slot: usize, prec: usize) -> Result<Self> {
        let mut x = Self::zero(prec)?;
        if slot == 0 || slot > prec {
            return Err(Error::InvalidArgument(format!("slot {slot} outside 1..={prec}")));
        }
        x.coeffs[slot - 1] = c;
        Ok(x)
    }

    #[inline]
    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.coeffs
    }

    /// Coefficient of `t^-slot`, `1 ≤ slot ≤ prec`.
    pub fn coeff(&self, slot: usize) -> FFElem {
        self.coeffs[slot - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self, f: &FieldSpec) -> Result<Self> {
        if self.prec() != other.prec() {
            return Err(Error::PrecisionMismatch { left: self.prec(), right: other.prec() });
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(TorusElem { coeffs })
    }

    pub fn neg(&self, f: &FieldSpec) -> Self {
        TorusElem { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn sub(&self, other: &Self, f: &FieldSpec) -> Result<Self> {
        self.add(&other.neg(f), f)
    }

    /// Multiplication by a field constant; precision unchanged.
    pub fn scale(&self, c: FFElem, f: &FieldSpec) -> Self {
        TorusElem { coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect() }
    }

    /// Keeps the first `prec` slots.
    pub fn truncate(&self, prec: usize) -> Result<Self> {
        check_prec(prec)?;
        if prec > self.prec() {
            return Err(Error::InsufficientPrecision { required: prec, available: self.prec() });
        }
        Ok(TorusElem { coeffs: self.coeffs[..prec].to_vec() })
    }

    /// `n · x mod Z`, at precision `prec(x) − deg n` (unchanged for `n = 0`).
    pub fn scalar_mul(&self, n: &RingPoly, f: &FieldSpec) -> Result<Self> {
        let Some(d) = n.degree() else {
            return Self::zero(self.prec());
        };
        if d >= self.prec() {
            return Err(Error::InsufficientPrecision { required: d + 1, available: self.prec() });
        }
        let out = self.prec() - d;
        let mut coeffs = vec![FFElem::ZERO; out];
        for (j, &nj) in n.coeffs().iter().enumerate() {
            if nj.is_zero() {
                continue;
            }
            // t^j · c_{s+j} t^-(s+j) lands in slot s
            for (s, slot) in coeffs.iter_mut().enumerate() {
                *slot = f.add(*slot, f.mul(nj, self.coeffs[s + j]));
            }
        }
        Ok(TorusElem { coeffs })
    }

    /// `x^(p^j) mod Z` at precision `prec · p^j`.
    pub fn frobenius_pow(&self, j: u32, f: &FieldSpec) -> Self {
        let step = (f.p() as usize).pow(j);
        let mut coeffs = vec![FFElem::ZERO; self.prec() * step];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(i + 1) * step - 1] = f.frobenius_pow(c, j);
        }
        TorusElem { coeffs }
    }

    /// Residue of `Tr(c_1)` in `[0, p)`; the character is `ζ_p` to this power.
    pub fn char_index(&self, f: &FieldSpec) -> u32 {
        f.trace(self.coeffs[0])
    }

    pub fn to_text(&self, f: &FieldSpec) -> String {
        format_terms(self.coeffs.iter().enumerate().map(|(i, &c)| (-(i as i64) - 1, c)), f)
    }

    /// `t^M · Σ c_s t^-s`, a polynomial of degree < M.
    pub fn scaled_numerator(&self) -> RingPoly {
        RingPoly::from_coeffs(self.coeffs.iter().rev().copied().collect())
    }

    /// The exact element `Σ c_s t^-s` of F_q(t).
    pub fn to_rational(&self, f: &FieldSpec) -> RationalFF {
        RationalFF::new(self.scaled_numerator(), RingPoly::monomial(FFElem::ONE, self.prec()), f).unwrap()
    }
}

/// `exp(2πi r / p)`.
pub fn root_of_unity(p: u32, r: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / p as f64)
}

/// The character `e(x) = exp(2πi Tr(x_{-1}) / p)`.
pub fn char_e(x: &TorusElem, f: &FieldSpec) -> Complex64 {
    root_of_unity(f.p(), x.char_index(f))
}

/// The duality pairing `⟨w, x⟩ = e(w x)`.
pub fn pairing(w: &RingPoly, x: &TorusElem, f: &FieldSpec) -> Result<Complex64> {
    Ok(char_e(&x.scalar_mul(w, f)?, f))
}

/// A point of `T^c`; every coordinate has the same precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusVec {
    coords: Vec<TorusElem>,
}

impl TorusVec {
    pub fn new(coords: Vec<TorusElem>) -> Result<Self> {
        let Some(first) = coords.first() else {
            return Err(Error::DimensionMismatch("a torus vector needs c ≥ 1".into()));
        };
        let prec = first.prec();
        if let Some(bad) = coords.iter().find(|x| x.prec() != prec) {
            return Err(Error::PrecisionMismatch { left: prec, right: bad.prec() });
        }
        Ok(TorusVec { coords })
    }

    pub fn scalar(x: TorusElem) -> Self {
        TorusVec { coords: vec![x] }
    }

    pub fn zero(dim: usize, prec: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("a torus vector needs c ≥ 1".into()));
        }
        Ok(TorusVec { coords: vec![TorusElem::zero(prec)?; dim] })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn prec(&self) -> usize {
        self.coords[0].prec()
    }

    pub fn coords(&self) -> &[TorusElem] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &TorusElem {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(TorusElem::is_zero)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&TorusElem, &TorusElem) -> Result<TorusElem>,
    ) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("c = {} vs {}", self.dim(), other.dim())));
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| op(a, b)).collect::<Result<_>>()?;
        Ok(TorusVec { coords })
    }

    pub fn add(&self, other: &Self, f: &FieldSpec) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b, f))
    }

    pub fn sub(&self, other: &Self, f: &FieldSpec) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b, f))
    }

    pub fn neg(&self, f: &FieldSpec) -> Self {
        TorusVec { coords: self.coords.iter().map(|x| x.neg(f)).collect() }
    }

    pub fn scalar_mul(&self, n: &RingPoly, f: &FieldSpec) -> Result<Self> {
        let coords = self.coords.iter().map(|x| x.scalar_mul(n, f)).collect::<Result<_>>()?;
        Ok(TorusVec { coords })
    }

    pub fn frobenius_pow(&self, j: u32, f: &FieldSpec) -> Self {
        TorusVec { coords: self.coords.iter().map(|x| x.frobenius_pow(j, f)).collect() }
    }

    pub fn truncate(&self, prec: usize) -> Result<Self> {
        let coords = self.coords.iter().map(|x| x.truncate(prec)).collect::<Result<_>>()?;
        Ok(TorusVec { coords })
    }

    /// Residue of the character `⟨w, x⟩ = e(Σ w_i x_i)` in `[0, p)`.
    pub fn pairing_index(&self, w: &[RingPoly], f: &FieldSpec) -> Result<u32> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("character has {} entries, c = {}", w.len(), self.dim())));
        }
        let mut acc = 0;
        for (wi, xi) in w.iter().zip(&self.coords) {
            if wi.is_zero() {
                continue;
            }
            acc += xi.scalar_mul(wi, f)?.char_index(f);
        }
        Ok(acc % f.p())
    }

    pub fn pairing(&self, w: &[RingPoly], f: &FieldSpec) -> Result<Complex64> {
        Ok(root_of_unity(f.p(), self.pairing_index(w, f)?))
    }

    /// Coordinates over F_p in the fixed order: coordinate, then slot
    /// `t^-1 … t^-M`, then generator power from `u^(k-1)` down to `u^0`.
    pub fn to_fp_digits(&self, f: &FieldSpec) -> Vec<u32> {
        let k = f.k() as usize;
        let mut out = Vec::with_capacity(self.dim() * self.prec() * k);
        for x in &self.coords {
            for &c in x.coeffs() {
                let digits = f.coeffs(c);
                out.extend(digits.iter().rev());
            }
        }
        out
    }

    /// Inverse of [`TorusVec::to_fp_digits`].
    pub fn from_fp_digits(digits: &[u32], dim: usize, prec: usize, f: &FieldSpec) -> Result<Self> {
        let k = f.k() as usize;
        if digits.len() != dim * prec * k || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} digits for c = {dim}, M = {prec}, k = {k}",
                digits.len()
            )));
        }
        let coords = digits
            .chunks(prec * k)
            .map(|chunk| {
                let coeffs = chunk
                    .chunks(k)
                    .map(|d| {
                        let low_first: Vec<u32> = d.iter().rev().copied().collect();
                        f.from_coeffs(&low_first)
                    })
                    .collect();
                TorusElem::from_coeffs(coeffs)
            })
            .collect::<Result<_>>()?;
        Ok(TorusVec { coords })
    }

    /// Index of this point in `T_M^c` when the group is enumerated in the
    /// fixed coordinate order (first coordinate most significant).
    pub fn group_index(&self, f: &FieldSpec) -> u64 {
        let q = f.q() as u64;
        self.coords
            .iter()
            .flat_map(|x| x.coeffs().iter())
            .fold(0, |acc, c| acc * q + c.index() as u64)
    }

    pub fn from_group_index(mut index: u64, dim: usize, prec: usize, f: &FieldSpec) -> Result<Self> {
        let q = f.q() as u64;
        let mut flat = vec![FFElem::ZERO; dim * prec];
        for slot in flat.iter_mut().rev() {
            *slot = f.elem((index % q) as u32)?;
            index /= q;
        }
        let coords = flat.chunks(prec).map(|c| TorusElem::from_coeffs(c.to_vec())).collect::<Result<_>>()?;
        TorusVec::new(coords)
    }

    pub fn to_text(&self, f: &FieldSpec) -> String {
        if self.dim() == 1 {
            return self.coords[0].to_text(f);
        }
        let parts: Vec<String> = self.coords.iter().map(|x| x.to_text(f)).collect();
        format!("({})", parts.join(", "))
    }
}

/// An element `integer_part + fractional` of F_q((1/t)), with the fractional
/// part known to its precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentElem {
    pub integer_part: RingPoly,
    pub fractional: TorusElem,
}

/// `a · y` for `a ∈ Z` and a fractional series `y`: the integer part and the
/// fractional part at precision `prec(y) − deg a`.
fn poly_times_series(a: &RingPoly, y: &TorusElem, f: &FieldSpec) -> Result<(RingPoly, TorusElem)> {
    let Some(da) = a.degree() else {
        return Ok((RingPoly::zero(), TorusElem::zero(y.prec())?));
    };
    let frac = y.scalar_mul(a, f)?;
    // t^i · t^-j with i ≥ j contributes to t^(i-j)
    let mut int = vec![FFElem::ZERO; da];
    for (i, &ai) in a.coeffs().iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for j in 1..=i {
            int[i - j] = f.add(int[i - j], f.mul(ai, y.coeff(j)));
        }
    }
    Ok((RingPoly::from_coeffs(int), frac))
}

impl LaurentElem {
    pub fn new(integer_part: RingPoly, fractional: TorusElem) -> Self {
        LaurentElem { integer_part, fractional }
    }

    pub fn from_poly(p: RingPoly, prec: usize) -> Result<Self> {
        Ok(LaurentElem { integer_part: p, fractional: TorusElem::zero(prec)? })
    }

    pub fn from_torus(x: TorusElem) -> Self {
        LaurentElem { integer_part: RingPoly::zero(), fractional: x }
    }

    /// Expansion of an exact rational function to the given precision.
    pub fn from_rational(r: &RationalFF, prec: usize, f: &FieldSpec) -> Result<Self> {
        let (int, rem) = r.num().divmod(r.den(), f)?;
        let frac = long_division(&rem, r.den(), prec, f)?;
        Ok(LaurentElem { integer_part: int, fractional: frac })
    }

    pub fn prec(&self) -> usize {
        self.fractional.prec()
    }

    /// The class mod Z.
    pub fn reduce(&self) -> TorusElem {
        self.fractional.clone()
    }

    pub fn truncate(&self, prec: usize) -> Result<Self> {
        Ok(LaurentElem { integer_part: self.integer_part.clone(), fractional: self.fractional.truncate(prec)? })
    }

    /// Sum at the smaller of the two precisions.
    pub fn add(&self, o: &Self, f: &FieldSpec) -> Result<Self> {
        let prec = self.prec().min(o.prec());
        Ok(LaurentElem {
            integer_part: self.integer_part.add(&o.integer_part, f),
            fractional: self.fractional.truncate(prec)?.add(&o.fractional.truncate(prec)?, f)?,
        })
    }

    pub fn neg(&self, f: &FieldSpec) -> Self {
        LaurentElem { integer_part: self.integer_part.neg(f), fractional: self.fractional.neg(f) }
    }

    pub fn sub(&self, o: &Self, f: &FieldSpec) -> Result<Self> {
        self.add(&o.neg(f), f)
    }

    /// Product; the precision is the largest one at which every slot is
    /// determined by the known coefficients of both factors.
    pub fn mul(&self, o: &Self, f: &FieldSpec) -> Result<Self> {
        let (a, x) = (&self.integer_part, &self.fractional);
        let (b, y) = (&o.integer_part, &o.fractional);
        let mut prec = x.prec().min(y.prec());
        if let Some(da) = a.degree() {
            prec = prec.min(y.prec().saturating_sub(da));
        }
        if let Some(db) = b.degree() {
            prec = prec.min(x.prec().saturating_sub(db));
        }
        if prec == 0 {
            let required = x.prec().max(y.prec()) - prec + 1;
            return Err(Error::InsufficientPrecision { required, available: x.prec().min(y.prec()) });
        }
        let (ay_int, ay_frac) = poly_times_series(a, y, f)?;
        let (bx_int, bx_frac) = poly_times_series(b, x, f)?;
        let mut xy = vec![FFElem::ZERO; prec];
        for (s, slot) in xy.iter_mut().enumerate() {
            // slot s+1 collects x_i y_j with i + j = s + 1, i, j ≥ 1
            let total = s + 1;
            for i in 1..total {
                *slot = f.add(*slot, f.mul(x.coeff(i), y.coeff(total - i)));
            }
        }
        let frac = ay_frac
            .truncate(prec)?
            .add(&bx_frac.truncate(prec)?, f)?
            .add(&TorusElem::from_coeffs(xy)?, f)?;
        let int = a.mul(b, f).add(&ay_int, f).add(&bx_int, f);
        Ok(LaurentElem { integer_part: int, fractional: frac })
    }

    pub fn scalar_mul(&self, n: &RingPoly, f: &FieldSpec) -> Result<Self> {
        let (int, frac) = poly_times_series(n, &self.fractional, f)?;
        Ok(LaurentElem { integer_part: self.integer_part.mul(n, f).add(&int, f), fractional: frac })
    }

    /// `x^(p^j)`; in characteristic p this is additive, so integer and
    /// fractional parts are raised separately.
    pub fn frobenius_pow(&self, j: u32, f: &FieldSpec) -> Self {
        LaurentElem {
            integer_part: self.integer_part.frobenius_pow(j, f),
            fractional: self.fractional.frobenius_pow(j, f),
        }
    }

    pub fn pow(&self, e: u32, f: &FieldSpec) -> Result<Self> {
        let mut acc = LaurentElem::from_poly(RingPoly::one(), self.prec())?;
        for _ in 0..e {
            acc = acc.mul(self, f)?;
        }
        Ok(acc)
    }

    pub fn char_e(&self, f: &FieldSpec) -> Complex64 {
        char_e(&self.fractional, f)
    }
}

/// First `prec` coefficients of `rem / den` for `deg rem < deg den`.
fn long_division(rem: &RingPoly, den: &RingPoly, prec: usize, f: &FieldSpec) -> Result<TorusElem> {
    check_prec(prec)?;
    let dd = den.degree().ok_or(Error::DivisionByZero)?;
    let inv = f.inv(den.leading().unwrap()).unwrap();
    let mut r = rem.clone();
    let mut coeffs = Vec::with_capacity(prec);
    for _ in 0..prec {
        r = r.shift(1);
        let c = if r.degree() == Some(dd) { f.mul(r.leading().unwrap(), inv) } else { FFElem::ZERO };
        if !c.is_zero() {
            r = r.sub(&den.scale(c, f), f);
        }
        coeffs.push(c);
    }
    TorusElem::from_coeffs(coeffs)
}

/// A deterministic source of Laurent coefficients modelling an element of T.
///
/// `SparsePowers { exponent: e }` has coefficient 1 exactly at the slots
/// `j^e`, `j ≥ 1`. The gaps `(j+1)^e − j^e` grow without bound, so the
/// coefficient sequence is not eventually periodic and the element is
/// irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffStream {
    Rational(RationalFF),
    SparsePowers { exponent: u32 },
    Seeded { seed: u64 },
}

impl CoeffStream {
    /// Coefficient of `t^-slot` of the fractional part, `slot ≥ 1`.
    pub fn coefficient(&self, slot: usize, f: &FieldSpec) -> Result<FFElem> {
        match self {
            CoeffStream::SparsePowers { exponent } => Ok(if is_perfect_power(slot as u64, *exponent) {
                FFElem::ONE
            } else {
                FFElem::ZERO
            }),
            CoeffStream::Seeded { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos((slot - 1) as u128);
                Ok(f.elem(rng.next_u32() % f.q())?)
            }
            CoeffStream::Rational(_) => Ok(self.expand(slot, f)?.coeff(slot)),
        }
    }

    /// The first `prec` coefficients of the element mod Z.
    pub fn expand(&self, prec: usize, f: &FieldSpec) -> Result<TorusElem> {
        check_prec(prec)?;
        match self {
            CoeffStream::Rational(r) => Ok(LaurentElem::from_rational(r, prec, f)?.fractional),
            CoeffStream::SparsePowers { exponent } => {
                if *exponent < 2 {
                    return Err(Error::InvalidArgument("sparse exponent must be ≥ 2".into()));
                }
                let mut coeffs = vec![FFElem::ZERO; prec];
                let mut j = 1u64;
                loop {
                    let s = j.pow(*exponent) as usize;
                    if s > prec {
                        break;
                    }
                    coeffs[s - 1] = FFElem::ONE;
                    j += 1;
                }
                TorusElem::from_coeffs(coeffs)
            }
            CoeffStream::Seeded { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let coeffs = (0..prec).map(|_| f.elem(rng.next_u32() % f.q())).collect::<Result<_>>()?;
                TorusElem::from_coeffs(coeffs)
            }
        }
    }

    /// Expansion keeping the integer part of a rational stream.
    pub fn expand_laurent(&self, prec: usize, f: &FieldSpec) -> Result<LaurentElem> {
        match self {
            CoeffStream::Rational(r) => LaurentElem::from_rational(r, prec, f),
            _ => Ok(LaurentElem::from_torus(self.expand(prec, f)?)),
        }
    }

    /// Whether the stream is an exact element of F_q(t).
    pub fn is_rational(&self) -> bool {
        matches!(self, CoeffStream::Rational(_))
    }
}

fn is_perfect_power(n: u64, e: u32) -> bool {
    let mut j = 1u64;
    while j.pow(e) < n {
        j += 1;
    }
    j.pow(e) == n
}

/// Convenience wrapper for [`CoeffStream::expand`].
pub fn expand(stream: &CoeffStream, prec: usize, f: &FieldSpec) -> Result<TorusElem> {
    stream.expand(prec, f)
}
