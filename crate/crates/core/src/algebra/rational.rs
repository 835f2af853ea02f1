use alloc::string::String;

use super::field::FieldSpec;
use super::poly::RingPoly;
use crate::error::{Error, Result};

/// An element `num/den` of the rational function field F_q(t), kept in
/// lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFF {
    num: RingPoly,
    den: RingPoly,
}

impl RationalFF {
    pub fn new(num: RingPoly, den: RingPoly, f: &FieldSpec) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den, f);
        let (mut n, _) = num.divmod(&g, f)?;
        let (mut d, _) = den.divmod(&g, f)?;
        let l = f.inv(d.leading().unwrap()).unwrap();
        n = n.scale(l, f);
        d = d.scale(l, f);
        Ok(RationalFF { num: n, den: d })
    }

    pub fn zero() -> Self {
        RationalFF { num: RingPoly::zero(), den: RingPoly::one() }
    }

    pub fn from_poly(p: RingPoly) -> Self {
        RationalFF { num: p, den: RingPoly::one() }
    }

    pub fn num(&self) -> &RingPoly {
        &self.num
    }

    pub fn den(&self) -> &RingPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self, f: &FieldSpec) -> Self {
        let n = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        Self::new(n, self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn neg(&self, f: &FieldSpec) -> Self {
        RationalFF { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self, f: &FieldSpec) -> Self {
        self.add(&o.neg(f), f)
    }

    pub fn mul(&self, o: &Self, f: &FieldSpec) -> Self {
        Self::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn div(&self, o: &Self, f: &FieldSpec) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.num.mul(&o.den, f), self.den.mul(&o.num, f), f)
    }

    /// `deg num − deg den`, or `None` for zero.
    pub fn valuation_degree(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap() as i64)
    }

    pub fn to_text(&self, f: &FieldSpec) -> String {
        if self.den.is_one() {
            return self.num.to_text(f);
        }
        alloc::format!("({})/({})", self.num.to_text(f), self.den.to_text(f))
    }
}

/// The absolute value `|u/v| = q^(deg u − deg v)`, stored by exponent so it
/// stays exact for any degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbsNorm {
    pub q: u32,
    /// `None` for the zero element.
    pub exponent: Option<i64>,
}

impl AbsNorm {
    pub fn is_zero(&self) -> bool {
        self.exponent.is_none()
    }

    /// Numerator and denominator, if they fit in `u128`.
    pub fn fraction(&self) -> Option<(u128, u128)> {
        match self.exponent {
            None => Some((0, 1)),
            Some(e) if e >= 0 => Some(((self.q as u128).checked_pow(e as u32)?, 1)),
            Some(e) => Some((1, (self.q as u128).checked_pow((-e) as u32)?)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.exponent {
            None => 0.0,
            Some(e) => libm::pow(self.q as f64, e as f64),
        }
    }

    /// `|xy| = |x||y|`.
    pub fn mul(&self, o: &Self) -> Self {
        let exponent = match (self.exponent, o.exponent) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        AbsNorm { q: self.q, exponent }
    }
}

pub fn abs_norm(x: &RationalFF, f: &FieldSpec) -> AbsNorm {
    AbsNorm { q: f.q(), exponent: x.valuation_degree() }
}
