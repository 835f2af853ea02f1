//! Polynomial sequences `g : Z → T^c` in standard form `Σ α_i x^i` and in
//! additive/separable form `α_0 + Σ_r η_r(x^r)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{FieldSpec, RationalFF, RingPoly};
use crate::error::{Error, Result};
use crate::torus::{CoeffStream, LaurentElem, TorusElem, TorusVec};

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binom_mod_p(mut n: usize, mut k: usize, p: u32) -> u32 {
    let p = p as usize;
    let mut acc = 1usize;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        // small binomial by the multiplicative formula mod p
        let mut c = 1usize;
        for i in 0..b {
            c = c * (a - i) % p * inv_mod_small(i + 1, p) % p;
        }
        acc = acc * c % p;
        n /= p;
        k /= p;
    }
    acc as u32
}

fn inv_mod_small(a: usize, p: usize) -> usize {
    (1..p).find(|&b| a * b % p == 1).unwrap()
}

/// Base-p digit sum of `k`.
pub fn digit_sum(mut k: usize, p: u32) -> u32 {
    let mut s = 0;
    while k > 0 {
        s += (k % p as usize) as u32;
        k /= p as usize;
    }
    s
}

/// Writes `k ≥ 1` as `p^j · r` with `p ∤ r`; returns `(j, r)`.
pub fn split_exponent(mut k: usize, p: u32) -> (u32, usize) {
    let mut j = 0;
    while k.is_multiple_of(p as usize) {
        k /= p as usize;
        j += 1;
    }
    (j, k)
}

/// `g(x) = Σ α_i x^i` with every `α_i ∈ T^c` at one common precision.
/// Zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StdPoly {
    dim: usize,
    prec: usize,
    terms: BTreeMap<usize, TorusVec>,
}

impl StdPoly {
    pub fn new(dim: usize, prec: usize, terms: impl IntoIterator<Item = (usize, TorusVec)>, f: &FieldSpec) -> Result<Self> {
        let mut g = Self::zero(dim, prec)?;
        for (i, a) in terms {
            g.add_term(i, a, f)?;
        }
        Ok(g)
    }

    pub fn zero(dim: usize, prec: usize) -> Result<Self> {
        TorusVec::zero(dim, prec)?;
        Ok(StdPoly { dim, prec, terms: BTreeMap::new() })
    }

    pub fn constant(alpha0: TorusVec) -> Self {
        let (dim, prec) = (alpha0.dim(), alpha0.prec());
        let mut terms = BTreeMap::new();
        if !alpha0.is_zero() {
            terms.insert(0, alpha0);
        }
        StdPoly { dim, prec, terms }
    }

    fn add_term(&mut self, i: usize, a: TorusVec, f: &FieldSpec) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("coefficient has c = {}, expected {}", a.dim(), self.dim)));
        }
        if a.prec() != self.prec {
            return Err(Error::PrecisionMismatch { left: self.prec, right: a.prec() });
        }
        let sum = match self.terms.remove(&i) {
            Some(old) => old.add(&a, f)?,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(i, sum);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Precision of the stored coefficients.
    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Nonzero terms in increasing power.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &TorusVec)> {
        self.terms.iter().map(|(&i, a)| (i, a))
    }

    pub fn coeff(&self, i: usize) -> Option<&TorusVec> {
        self.terms.get(&i)
    }

    /// Largest power with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term, zero if absent.
    pub fn alpha0(&self) -> TorusVec {
        self.terms.get(&0).cloned().unwrap_or_else(|| TorusVec::zero(self.dim, self.prec).unwrap())
    }

    /// Coefficient precision needed to evaluate at precision `out_prec` for
    /// every `n` with `deg n ≤ deg_n`.
    pub fn required_precision(&self, out_prec: usize, deg_n: usize) -> usize {
        out_prec + self.degree().unwrap_or(0) * deg_n
    }

    pub fn truncate(&self, prec: usize) -> Result<Self> {
        let terms = self.terms.iter().map(|(&i, a)| Ok((i, a.truncate(prec)?))).collect::<Result<Vec<_>>>()?;
        let mut g = Self::zero(self.dim, prec)?;
        for (i, a) in terms {
            if !a.is_zero() {
                g.terms.insert(i, a);
            }
        }
        Ok(g)
    }

    pub fn add(&self, other: &Self, f: &FieldSpec) -> Result<Self> {
        let mut g = self.clone();
        for (i, a) in other.terms() {
            g.add_term(i, a.clone(), f)?;
        }
        Ok(g)
    }

    /// Coordinate `i` as a one-dimensional polynomial.
    pub fn coordinate(&self, i: usize) -> Result<Self> {
        if i >= self.dim {
            return Err(Error::DimensionMismatch(format!("coordinate {i} of c = {}", self.dim)));
        }
        let mut g = Self::zero(1, self.prec)?;
        for (k, a) in self.terms() {
            let x = a.coord(i).clone();
            if !x.is_zero() {
                g.terms.insert(k, TorusVec::scalar(x));
            }
        }
        Ok(g)
    }

    /// Concatenates one-dimensional or vector polynomials into one vector.
    pub fn stack(parts: &[StdPoly]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::DimensionMismatch("nothing to stack".into()))?;
        let prec = first.prec;
        if let Some(bad) = parts.iter().find(|g| g.prec != prec) {
            return Err(Error::PrecisionMismatch { left: prec, right: bad.prec });
        }
        let dim = parts.iter().map(|g| g.dim).sum();
        let mut powers: Vec<usize> = parts.iter().flat_map(|g| g.terms.keys().copied()).collect();
        powers.sort_unstable();
        powers.dedup();
        let mut terms = BTreeMap::new();
        for k in powers {
            let mut coords = Vec::with_capacity(dim);
            for g in parts {
                match g.terms.get(&k) {
                    Some(a) => coords.extend(a.coords().iter().cloned()),
                    None => coords.extend(vec![TorusElem::zero(prec)?; g.dim]),
                }
            }
            terms.insert(k, TorusVec::new(coords)?);
        }
        Ok(StdPoly { dim, prec, terms })
    }

    /// `g(n) mod Z` at precision `out_prec`.
    pub fn evaluate(&self, n: &RingPoly, out_prec: usize, f: &FieldSpec) -> Result<TorusVec> {
        let required = self.required_precision(out_prec, n.degree().unwrap_or(0));
        if self.prec < required {
            return Err(Error::InsufficientPrecision { required, available: self.prec });
        }
        let mut acc = TorusVec::zero(self.dim, out_prec)?;
        let mut power = RingPoly::one();
        let mut at = 0;
        for (i, a) in self.terms() {
            power = power.mul(&n.pow((i - at) as u64, f), f);
            at = i;
            acc = acc.add(&a.scalar_mul(&power, f)?.truncate(out_prec)?, f)?;
        }
        Ok(acc)
    }

    pub fn to_text(&self, f: &FieldSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(i, a)| {
                let c = a.to_text(f);
                match i {
                    0 => format!("[{c}]"),
                    1 => format!("[{c}]*x"),
                    _ => format!("[{c}]*x^{i}"),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// `α_0 + Σ_r Σ_j η_{r,j} (x^r)^(p^j)`: for each separable exponent `r`
/// (`p ∤ r`) the additive polynomial `η_r(y) = Σ_j η_{r,j} y^(p^j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddSepForm {
    p: u32,
    dim: usize,
    prec: usize,
    alpha0: TorusVec,
    parts: BTreeMap<usize, BTreeMap<u32, TorusVec>>,
}

impl AddSepForm {
    /// Builds the form from `(r, j, coefficient)` triples.
    pub fn new(
        alpha0: TorusVec,
        parts: impl IntoIterator<Item = (usize, u32, TorusVec)>,
        f: &FieldSpec,
    ) -> Result<Self> {
        let (dim, prec) = (alpha0.dim(), alpha0.prec());
        let mut out: BTreeMap<usize, BTreeMap<u32, TorusVec>> = BTreeMap::new();
        for (r, j, a) in parts {
            if r == 0 || r % f.p() as usize == 0 {
                return Err(Error::InvalidArgument(format!("{r} is not a separable exponent for p = {}", f.p())));
            }
            if a.dim() != dim {
                return Err(Error::DimensionMismatch(format!("coefficient has c = {}, expected {dim}", a.dim())));
            }
            if a.prec() != prec {
                return Err(Error::PrecisionMismatch { left: prec, right: a.prec() });
            }
            let eta = out.entry(r).or_default();
            let sum = match eta.remove(&j) {
                Some(old) => old.add(&a, f)?,
                None => a,
            };
            if !sum.is_zero() {
                eta.insert(j, sum);
            }
        }
        out.retain(|_, eta| !eta.is_empty());
        Ok(AddSepForm { p: f.p(), dim, prec, alpha0, parts: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn alpha0(&self) -> &TorusVec {
        &self.alpha0
    }

    /// Parts in increasing `r`; each maps Frobenius index `j` to its coefficient.
    pub fn parts(&self) -> impl Iterator<Item = (usize, &BTreeMap<u32, TorusVec>)> {
        self.parts.iter().map(|(&r, eta)| (r, eta))
    }

    pub fn separable_exponents(&self) -> Vec<usize> {
        self.parts.keys().copied().collect()
    }

    /// Whether the form is a single additive polynomial with no constant.
    pub fn is_additive(&self) -> bool {
        self.alpha0.is_zero() && self.parts.keys().all(|&r| r == 1)
    }

    /// `η_r` as an additive sequence in its own variable.
    pub fn additive_component(&self, r: usize, f: &FieldSpec) -> Result<AddSepForm> {
        let eta = self
            .parts
            .get(&r)
            .ok_or_else(|| Error::InvalidArgument(format!("no part with r = {r}")))?;
        let zero = TorusVec::zero(self.dim, self.prec)?;
        AddSepForm::new(zero, eta.iter().map(|(&j, a)| (1, j, a.clone())), f)
    }

    pub fn degree(&self) -> usize {
        self.parts
            .iter()
            .map(|(&r, eta)| r * (self.p as usize).pow(*eta.keys().next_back().unwrap()))
            .max()
            .unwrap_or(0)
    }

    pub fn recompose(&self, f: &FieldSpec) -> StdPoly {
        let p = f.p() as usize;
        let mut terms = vec![(0, self.alpha0.clone())];
        for (&r, eta) in &self.parts {
            for (&j, a) in eta {
                terms.push((r * p.pow(j), a.clone()));
            }
        }
        StdPoly::new(self.dim, self.prec, terms, f).expect("parts share dimension and precision")
    }

    /// `g(n) mod Z`, computing each `(n^r)^(p^j)` through the Frobenius of F_q[t].
    pub fn evaluate(&self, n: &RingPoly, out_prec: usize, f: &FieldSpec) -> Result<TorusVec> {
        let required = out_prec + self.degree() * n.degree().unwrap_or(0);
        if self.prec < required {
            return Err(Error::InsufficientPrecision { required, available: self.prec });
        }
        let mut acc = self.alpha0.truncate(out_prec)?;
        for (&r, eta) in &self.parts {
            let nr = n.pow(r as u64, f);
            for (&j, a) in eta {
                let y = nr.frobenius_pow(j, f);
                acc = acc.add(&a.scalar_mul(&y, f)?.truncate(out_prec)?, f)?;
            }
        }
        Ok(acc)
    }

    pub fn derivational_degree(&self, f: &FieldSpec) -> Result<u32> {
        derivational_degree(&self.recompose(f), f)
    }
}

/// Groups each monomial `x^k`, `k = p^j r`, into part `r` at index `j`.
pub fn decompose(g: &StdPoly, f: &FieldSpec) -> AddSepForm {
    let alpha0 = g.alpha0();
    let parts = g.terms().filter(|&(k, _)| k > 0).map(|(k, a)| {
        let (j, r) = split_exponent(k, f.p());
        (r, j, a.clone())
    });
    AddSepForm::new(alpha0, parts, f).expect("exponents split into separable parts")
}

/// Maximum base-p digit sum over the powers with nonzero coefficient.
pub fn derivational_degree(g: &StdPoly, f: &FieldSpec) -> Result<u32> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(g.terms().map(|(k, _)| digit_sum(k, f.p())).max().unwrap())
}

/// Limit on the number of shift tuples the difference oracle visits.
pub const ORACLE_GUARD: u128 = 1_000_000;

/// `g(x + y) − g(x)` for `g ∈ F_q[t][x]` given by its coefficient list.
fn difference(g: &[RingPoly], y: &RingPoly, f: &FieldSpec) -> Vec<RingPoly> {
    let deg = g.len();
    let mut ypow = vec![RingPoly::one()];
    for i in 1..deg {
        ypow.push(ypow[i - 1].mul(y, f));
    }
    let mut out = vec![RingPoly::zero(); deg];
    for (k, a) in g.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        // (x + y)^k − x^k = Σ_{m<k} C(k, m) y^(k−m) x^m
        for (m, slot) in out.iter_mut().enumerate().take(k) {
            let c = binom_mod_p(k, m, f.p());
            if c != 0 {
                let term = a.mul(&ypow[k - m], f).scale(f.from_int(c as i64), f);
                *slot = slot.add(&term, f);
            }
        }
    }
    while out.last().is_some_and(RingPoly::is_zero) {
        out.pop();
    }
    out
}

fn all_constant(gs: &[Vec<RingPoly>], depth: u32, shifts: &[RingPoly], start: usize, f: &FieldSpec) -> bool {
    if gs.iter().all(|g| g.len() <= 1) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    for (idx, y) in shifts.iter().enumerate().skip(start) {
        let next: Vec<_> = gs.iter().map(|g| difference(g, y, f)).collect();
        if !all_constant(&next, depth - 1, shifts, idx, f) {
            return false;
        }
    }
    true
}

/// Independent check of the derivational degree via iterated differences.
///
/// Coefficients are scaled by `t^prec` so that the whole computation runs
/// exactly in F_q[t][x]; the shifts are all nonzero `y` with
/// `deg y ≤ shift_degree` (differences commute, so multisets suffice).
/// Returns whether every `d`-fold difference is constant while some
/// `(d−1)`-fold difference is not. For `d = 0` this means `g` is a nonzero
/// constant.
pub fn ddeg_difference_oracle(g: &StdPoly, d: u32, shift_degree: usize, f: &FieldSpec) -> Result<bool> {
    let n_shifts = (f.q() as u128).saturating_pow(shift_degree as u32 + 1) - 1;
    let mut tuples = 1u128;
    for i in 0..d as u128 {
        tuples = tuples.saturating_mul(n_shifts + i) / (i + 1);
    }
    if tuples > ORACLE_GUARD {
        return Err(Error::BoundExceeded { what: "difference oracle shifts", size: tuples, limit: ORACLE_GUARD });
    }
    let shifts: Vec<RingPoly> = (1..=n_shifts as u64).map(|i| RingPoly::from_index(i, f)).collect();
    let gs: Vec<Vec<RingPoly>> = (0..g.dim())
        .map(|c| {
            let mut v = vec![RingPoly::zero(); g.degree().map_or(0, |d| d + 1)];
            for (k, a) in g.terms() {
                v[k] = a.coord(c).scaled_numerator();
            }
            v
        })
        .collect();
    if d == 0 {
        return Ok(!g.is_zero() && all_constant(&gs, 0, &shifts, 0, f));
    }
    Ok(all_constant(&gs, d, &shifts, 0, f) && !all_constant(&gs, d - 1, &shifts, 0, f))
}

/// `g(m x + k)`, expanded with exact coefficient arithmetic.
///
/// Output precision is `prec(g) − deg(g) · max(deg m, deg k)`.
pub fn reparametrize(g: &StdPoly, m: &RingPoly, k: &RingPoly, f: &FieldSpec) -> Result<StdPoly> {
    if m.is_zero() {
        return Err(Error::InvalidArgument("reparametrization needs m ≠ 0".into()));
    }
    let step = m.degree().unwrap().max(k.degree().unwrap_or(0));
    let loss = g.degree().unwrap_or(0) * step;
    if loss >= g.prec() {
        return Err(Error::InsufficientPrecision { required: loss + 1, available: g.prec() });
    }
    let out_prec = g.prec() - loss;
    let mut out = StdPoly::zero(g.dim(), out_prec)?;
    for (i, a) in g.terms() {
        // (m x + k)^i = Σ_j C(i, j) m^j k^(i−j) x^j
        for j in 0..=i {
            let c = binom_mod_p(i, j, f.p());
            if c == 0 {
                continue;
            }
            let w = m.pow(j as u64, f).mul(&k.pow((i - j) as u64, f), f).scale(f.from_int(c as i64), f);
            if w.is_zero() {
                continue;
            }
            out.add_term(j, a.scalar_mul(&w, f)?.truncate(out_prec)?, f)?;
        }
    }
    Ok(out)
}

/// `reparametrize` for the additive/separable form.
pub fn reparametrize_form(g: &AddSepForm, m: &RingPoly, k: &RingPoly, f: &FieldSpec) -> Result<AddSepForm> {
    Ok(decompose(&reparametrize(&g.recompose(f), m, k, f)?, f))
}

/// An additive polynomial map `T^b → T^c`,
/// `(x_1, …, x_b) ↦ Σ_{i,j} m_{i,j} x_i^(p^j)` with `m_{i,j} ∈ Z^c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveMapSpec {
    domain: usize,
    codomain: usize,
    /// `coeffs[i][j]` is `m_{i,j}`; trailing all-zero levels are trimmed.
    coeffs: Vec<Vec<Vec<RingPoly>>>,
}

impl AdditiveMapSpec {
    /// From `(i, j, m_{i,j})` entries; repeated entries are summed.
    pub fn new(
        domain: usize,
        codomain: usize,
        entries: impl IntoIterator<Item = (usize, u32, Vec<RingPoly>)>,
        f: &FieldSpec,
    ) -> Result<Self> {
        if domain == 0 || codomain == 0 {
            return Err(Error::DimensionMismatch("additive maps need b, c ≥ 1".into()));
        }
        let mut coeffs = vec![Vec::<Vec<RingPoly>>::new(); domain];
        for (i, j, m) in entries {
            if i >= domain || m.len() != codomain {
                return Err(Error::DimensionMismatch(format!(
                    "entry for input {i} with {} outputs; map is {domain} → {codomain}",
                    m.len()
                )));
            }
            let row = &mut coeffs[i];
            while row.len() <= j as usize {
                row.push(vec![RingPoly::zero(); codomain]);
            }
            for (slot, v) in row[j as usize].iter_mut().zip(m) {
                *slot = slot.add(&v, f);
            }
        }
        for row in &mut coeffs {
            while row.last().is_some_and(|m| m.iter().all(RingPoly::is_zero)) {
                row.pop();
            }
        }
        Ok(AdditiveMapSpec { domain, codomain, coeffs })
    }

    /// The one-variable map `x ↦ Σ_j m_j x^(p^j)` into T.
    pub fn univariate(levels: &[RingPoly], f: &FieldSpec) -> Result<Self> {
        Self::new(1, 1, levels.iter().enumerate().map(|(j, m)| (0, j as u32, vec![m.clone()])), f)
    }

    /// Reads an additive polynomial `Σ_j m_j x^(p^j)` off a standard form
    /// whose coefficients are polynomials in t.
    pub fn from_powers(terms: &[(usize, RingPoly)], f: &FieldSpec) -> Result<Self> {
        let mut entries = Vec::new();
        for (k, m) in terms {
            let (j, r) = if *k == 0 { (0, 0) } else { split_exponent(*k, f.p()) };
            if r != 1 {
                return Err(Error::InvalidArgument(format!("x^{k} is not additive for p = {}", f.p())));
            }
            entries.push((0, j, vec![m.clone()]));
        }
        Self::new(1, 1, entries, f)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    /// Largest Frobenius index with a nonzero coefficient.
    pub fn level(&self) -> u32 {
        self.coeffs.iter().map(|row| row.len()).max().unwrap_or(0).saturating_sub(1) as u32
    }

    /// `D = max deg m_{i,j}`.
    pub fn max_degree(&self) -> usize {
        self.entries().filter_map(|(_, _, m)| m.degree()).max().unwrap_or(0)
    }

    /// Nonzero entries `(i, j, coordinate polynomial)` flattened per output coordinate.
    fn entries(&self) -> impl Iterator<Item = (usize, u32, &RingPoly)> {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().flat_map(move |(j, m)| m.iter().map(move |v| (i, j as u32, v)))
        })
    }

    /// `m_{i,j}`, zero when not present.
    pub fn coeff(&self, i: usize, j: u32) -> Vec<RingPoly> {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j as usize))
            .cloned()
            .unwrap_or_else(|| vec![RingPoly::zero(); self.codomain])
    }

    /// Image of a point of `T^b` at precision `out_prec`; needs the input
    /// precision to be at least `out_prec + D`.
    pub fn apply(&self, xs: &[TorusElem], out_prec: usize, f: &FieldSpec) -> Result<TorusVec> {
        if xs.len() != self.domain {
            return Err(Error::DimensionMismatch(format!("{} inputs for b = {}", xs.len(), self.domain)));
        }
        let mut acc = TorusVec::zero(self.codomain, out_prec)?;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                let y = xs[i].frobenius_pow(j as u32, f);
                let coords = m
                    .iter()
                    .map(|mc| y.scalar_mul(mc, f)?.truncate(out_prec))
                    .collect::<Result<Vec<_>>>()?;
                acc = acc.add(&TorusVec::new(coords)?, f)?;
            }
        }
        Ok(acc)
    }
}

/// One coefficient of a symbolic sequence: an exact element of F_q(t)
/// times a product of powers of coefficient streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTerm {
    pub scalar: RationalFF,
    pub streams: Vec<(CoeffStream, u32)>,
}

impl CoeffTerm {
    pub fn rational(r: RationalFF) -> Self {
        CoeffTerm { scalar: r, streams: Vec::new() }
    }

    pub fn stream(s: CoeffStream) -> Self {
        CoeffTerm { scalar: RationalFF::from_poly(RingPoly::one()), streams: vec![(s, 1)] }
    }

    /// The class mod Z at precision `prec`, working at increasing internal
    /// precision until every requested slot is determined.
    pub fn expand(&self, prec: usize, f: &FieldSpec) -> Result<TorusElem> {
        let int_deg = |r: &RationalFF| r.valuation_degree().unwrap_or(0).max(0) as usize;
        let mut slack = int_deg(&self.scalar) + 2;
        for (s, e) in &self.streams {
            if let CoeffStream::Rational(r) = s {
                slack += int_deg(r) * *e as usize;
            }
        }
        for _ in 0..16 {
            let work = prec + slack;
            let mut acc = LaurentElem::from_rational(&self.scalar, work, f)?;
            let mut ok = true;
            for (s, e) in &self.streams {
                let x = s.expand_laurent(work, f)?;
                match x.pow(*e, f).and_then(|y| acc.mul(&y, f)) {
                    Ok(v) => acc = v,
                    Err(Error::InsufficientPrecision { .. }) => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if ok && acc.prec() >= prec {
                return acc.fractional.truncate(prec);
            }
            slack *= 2;
        }
        Err(Error::InsufficientPrecision { required: prec, available: prec + slack })
    }
}

/// A one-coordinate sequence polynomial with symbolic coefficients; it is
/// turned into a [`StdPoly`] at whatever precision a computation needs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymPoly {
    pub terms: Vec<(usize, CoeffTerm)>,
}

impl SymPoly {
    pub fn new(terms: Vec<(usize, CoeffTerm)>) -> Self {
        SymPoly { terms }
    }

    pub fn max_exponent(&self) -> usize {
        self.terms.iter().map(|(k, _)| *k).max().unwrap_or(0)
    }

    pub fn to_std(&self, prec: usize, f: &FieldSpec) -> Result<StdPoly> {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| Ok((*k, TorusVec::scalar(c.expand(prec, f)?))))
            .collect::<Result<Vec<_>>>()?;
        StdPoly::new(1, prec, terms, f)
    }
}

/// Builds the vector polynomial with the given coordinates at precision `prec`.
pub fn build_std(coords: &[SymPoly], prec: usize, f: &FieldSpec) -> Result<StdPoly> {
    let parts = coords.iter().map(|g| g.to_std(prec, f)).collect::<Result<Vec<_>>>()?;
    StdPoly::stack(&parts)
}

/// A sequence polynomial that can be produced at any requested
/// coefficient precision.
pub trait PolySource {
    fn dim(&self) -> usize;

    /// Upper bound on the degree in x.
    fn degree_bound(&self) -> usize;

    fn std_at(&self, prec: usize, f: &FieldSpec) -> Result<StdPoly>;

    /// Coefficients good enough to evaluate at precision `out_prec` for all
    /// `n` with `deg n ≤ deg_n`.
    fn for_box(&self, out_prec: usize, deg_n: usize, f: &FieldSpec) -> Result<StdPoly> {
        self.std_at(out_prec + self.degree_bound() * deg_n, f)
    }
}

impl PolySource for StdPoly {
    fn dim(&self) -> usize {
        self.dim
    }

    fn degree_bound(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    fn std_at(&self, prec: usize, _f: &FieldSpec) -> Result<StdPoly> {
        if prec > self.prec {
            return Err(Error::InsufficientPrecision { required: prec, available: self.prec });
        }
        self.truncate(prec)
    }
}

impl PolySource for AddSepForm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn degree_bound(&self) -> usize {
        self.degree()
    }

    fn std_at(&self, prec: usize, f: &FieldSpec) -> Result<StdPoly> {
        self.recompose(f).std_at(prec, f)
    }
}

/// Coordinates given symbolically; any precision is available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSeq {
    pub coords: Vec<SymPoly>,
}

impl SymSeq {
    pub fn new(coords: Vec<SymPoly>) -> Self {
        SymSeq { coords }
    }

    pub fn scalar(g: SymPoly) -> Self {
        SymSeq { coords: vec![g] }
    }
}

impl PolySource for SymSeq {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn degree_bound(&self) -> usize {
        self.coords.iter().map(SymPoly::max_exponent).max().unwrap_or(0)
    }

    fn std_at(&self, prec: usize, f: &FieldSpec) -> Result<StdPoly> {
        build_std(&self.coords, prec, f)
    }
}

/// `g(m x + k)` for a source `g`.
#[derive(Clone, Debug)]
pub struct Reparametrized<'a, S: ?Sized> {
    pub source: &'a S,
    pub m: RingPoly,
    pub k: RingPoly,
}

impl<S: PolySource + ?Sized> PolySource for Reparametrized<'_, S> {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn degree_bound(&self) -> usize {
        self.source.degree_bound()
    }

    fn std_at(&self, prec: usize, f: &FieldSpec) -> Result<StdPoly> {
        let step = self.m.degree().unwrap_or(0).max(self.k.degree().unwrap_or(0));
        let g = self.source.std_at(prec + self.source.degree_bound() * step, f)?;
        reparametrize(&g, &self.m, &self.k, f)?.truncate(prec)
    }
}

/// The additive polynomial `η_r` of a source, as a sequence in its own variable.
#[derive(Clone, Debug)]
pub struct AdditiveComponent<'a, S: ?Sized> {
    pub source: &'a S,
    pub r: usize,
}

impl<S: PolySource + ?Sized> PolySource for AdditiveComponent<'_, S> {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn degree_bound(&self) -> usize {
        self.source.degree_bound() / self.r
    }

    fn std_at(&self, prec: usize, f: &FieldSpec) -> Result<StdPoly> {
        let g = decompose(&self.source.std_at(prec, f)?, f);
        Ok(g.additive_component(self.r, f)?.recompose(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FFElem;

    fn tv(f: &FieldSpec, digits: &[i64]) -> TorusVec {
        TorusVec::scalar(TorusElem::from_coeffs(digits.iter().map(|&d| f.from_int(d)).collect()).unwrap())
    }

    fn mono(f: &FieldSpec, k: usize, prec: usize) -> StdPoly {
        let mut d = vec![0; prec];
        d[0] = 1;
        StdPoly::new(1, prec, [(k, tv(f, &d))], f).unwrap()
    }

    #[test]
    fn lucas_binomials() {
        for p in [2u32, 3, 5, 7] {
            for n in 0..40usize {
                let mut row = vec![1u64];
                for _ in 0..n {
                    let mut next = vec![1u64];
                    for w in row.windows(2) {
                        next.push((w[0] + w[1]) % p as u64);
                    }
                    next.push(1);
                    row = next;
                }
                for (k, &r) in row.iter().enumerate() {
                    assert_eq!(binom_mod_p(n, k, p) as u64, r % p as u64, "C({n},{k}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let f = FieldSpec::new(2, 1).unwrap();
        let one = tv(&f, &[1, 0]);
        let g = StdPoly::new(1, 2, [(6, one.clone()), (3, one.clone()), (2, one.clone())], &f).unwrap();
        let h = decompose(&g, &f);
        let parts: Vec<(usize, Vec<u32>)> = h.parts().map(|(r, eta)| (r, eta.keys().copied().collect())).collect();
        assert_eq!(parts, [(1, vec![1]), (3, vec![0, 1])]);
        assert_eq!(h.recompose(&f), g);

        let c = StdPoly::constant(one.clone());
        let hc = decompose(&c, &f);
        assert_eq!(hc.alpha0(), &one);
        assert_eq!(hc.parts().count(), 0);

        let f3 = FieldSpec::new(3, 1).unwrap();
        let h9 = decompose(&mono(&f3, 9, 2), &f3);
        let parts: Vec<(usize, Vec<u32>)> = h9.parts().map(|(r, eta)| (r, eta.keys().copied().collect())).collect();
        assert_eq!(parts, [(1, vec![2])]);
    }

    #[test]
    fn ddeg_examples() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(derivational_degree(&mono(&f2, 7, 1), &f2), Ok(3));
        assert_eq!(derivational_degree(&mono(&f3, 5, 1), &f3), Ok(3));
        for j in 0..5 {
            assert_eq!(derivational_degree(&mono(&f2, 1 << j, 1), &f2), Ok(1));
        }
        assert_eq!(derivational_degree(&mono(&f2, 0, 1), &f2), Ok(0));
        assert_eq!(derivational_degree(&StdPoly::zero(1, 1).unwrap(), &f2), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn oracle_examples() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let eta = StdPoly::new(1, 3, [(1, tv(&f2, &[1, 0, 1])), (4, tv(&f2, &[0, 1, 1]))], &f2).unwrap();
        assert!(ddeg_difference_oracle(&eta, 1, 2, &f2).unwrap());
        assert!(ddeg_difference_oracle(&mono(&f2, 3, 2), 2, 2, &f2).unwrap());
        assert!(!ddeg_difference_oracle(&mono(&f2, 3, 2), 1, 2, &f2).unwrap());
        assert!(ddeg_difference_oracle(&mono(&f2, 0, 2), 0, 2, &f2).unwrap());
        assert!(!ddeg_difference_oracle(&StdPoly::zero(1, 2).unwrap(), 0, 2, &f2).unwrap());
    }

    #[test]
    fn evaluate_cycle_values() {
        let f = FieldSpec::new(2, 1).unwrap();
        // x^3 / t^2 with coefficient known to 5 slots
        let g = StdPoly::new(1, 5, [(3, tv(&f, &[0, 1, 0, 0, 0]))], &f).unwrap();
        let n = RingPoly::from_ints(&f, &[1, 1]);
        assert_eq!(g.evaluate(&n, 2, &f).unwrap(), tv(&f, &[1, 1]));
        assert_eq!(g.evaluate(&RingPoly::t(), 2, &f).unwrap(), tv(&f, &[0, 0]));
        assert_eq!(
            g.evaluate(&RingPoly::t(), 3, &f),
            Err(Error::InsufficientPrecision { required: 6, available: 5 })
        );
        let a0 = tv(&f, &[1, 1]);
        let c = StdPoly::new(1, 2, [(0, a0.clone()), (2, tv(&f, &[0, 1]))], &f).unwrap();
        assert_eq!(c.evaluate(&RingPoly::zero(), 2, &f).unwrap(), a0);
    }

    #[test]
    fn reparametrize_examples() {
        let f = FieldSpec::new(2, 1).unwrap();
        let a = tv(&f, &[1, 1, 0, 1]);
        let g = StdPoly::new(1, 4, [(1, a.clone())], &f).unwrap();
        assert_eq!(reparametrize(&g, &RingPoly::one(), &RingPoly::zero(), &f).unwrap(), g);
        let h = reparametrize(&g, &RingPoly::t(), &RingPoly::one(), &f).unwrap();
        let at = a.scalar_mul(&RingPoly::t(), &f).unwrap();
        let expected = StdPoly::new(1, 3, [(1, at), (0, a.truncate(3).unwrap())], &f).unwrap();
        assert_eq!(h, expected);

        let sq = mono(&f, 2, 5);
        let h = reparametrize(&sq, &RingPoly::t(), &RingPoly::one(), &f).unwrap();
        let one = sq.coeff(2).unwrap();
        let expected = StdPoly::new(
            1,
            3,
            [
                (2, one.scalar_mul(&RingPoly::t().pow(2, &f), &f).unwrap().truncate(3).unwrap()),
                (0, one.truncate(3).unwrap()),
            ],
            &f,
        )
        .unwrap();
        assert_eq!(h, expected);
        assert!(reparametrize(&g, &RingPoly::zero(), &RingPoly::one(), &f).is_err());
    }

    #[test]
    fn additive_map_apply() {
        let f = FieldSpec::new(2, 1).unwrap();
        // x ↦ x + t x^2 kills the first slot exactly when a_1 + a_1^2 = 0
        let map = AdditiveMapSpec::univariate(&[RingPoly::one(), RingPoly::t()], &f).unwrap();
        assert_eq!(map.level(), 1);
        assert_eq!(map.max_degree(), 1);
        let x = TorusElem::from_coeffs(vec![FFElem::ONE, FFElem::ZERO, FFElem::ONE]).unwrap();
        let y = map.apply(&[x], 2, &f).unwrap();
        assert_eq!(y.coord(0).coeff(1), FFElem::ZERO);
    }

    #[test]
    fn symbolic_coefficients_expand() {
        let f = FieldSpec::new(2, 1).unwrap();
        let t = RingPoly::t();
        // t · (t^-1 + t^-4 + …)^2 = t · (t^-2 + t^-8 + …) = t^-1 + t^-7 + …
        let term = CoeffTerm {
            scalar: RationalFF::from_poly(t),
            streams: vec![(CoeffStream::SparsePowers { exponent: 2 }, 2)],
        };
        let x = term.expand(8, &f).unwrap();
        let ones: Vec<usize> = (1..=8).filter(|&s| x.coeff(s) == FFElem::ONE).collect();
        assert_eq!(ones, [1, 7]);
    }
}
