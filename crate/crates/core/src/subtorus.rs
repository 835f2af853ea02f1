//! F_p-linear algebra in the finite group `T_M^c`, exact images of additive
//! maps, and empirical subtori and orbit closures of sequences.
//!
//! `T_M^c` is an F_p-vector space of dimension `c·M·k`. Its coordinates are
//! ordered by torus coordinate, then slot `t^-1 … t^-M`, then generator power
//! `u^(k-1) … u^0`; lexicographic order on these digit vectors is the
//! enumeration order of the group.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{divisor_ladder, FieldSpec, RingPoly};
use crate::error::{Error, Result};
use crate::polyseq::{decompose, AdditiveComponent, AdditiveMapSpec, PolySource};
use crate::torus::{TorusElem, TorusVec};

/// The group `T_M^c` over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    pub field: FieldSpec,
    pub c: usize,
    pub m: usize,
}

impl Ambient {
    pub fn new(field: FieldSpec, c: usize, m: usize) -> Result<Self> {
        if c == 0 || m == 0 {
            return Err(Error::DimensionMismatch(format!("ambient needs c, M ≥ 1 (got c = {c}, M = {m})")));
        }
        Ok(Ambient { field, c, m })
    }

    /// Dimension over F_p.
    pub fn n_digits(&self) -> usize {
        self.c * self.m * self.field.k() as usize
    }

    /// `|T_M^c| = q^(cM)`, saturating.
    pub fn order(&self) -> u128 {
        (self.field.p() as u128).saturating_pow(self.n_digits() as u32)
    }

    fn check(&self, x: &TorusVec) -> Result<()> {
        if x.dim() != self.c {
            return Err(Error::DimensionMismatch(format!("point has c = {}, ambient c = {}", x.dim(), self.c)));
        }
        if x.prec() != self.m {
            return Err(Error::PrecisionMismatch { left: self.m, right: x.prec() });
        }
        Ok(())
    }
}

/// An F_p-subspace of `T_M^c` held as a reduced row-echelon basis, so that
/// equal subspaces have equal representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpSubspace {
    ambient: Ambient,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl FpSubspace {
    pub fn zero(ambient: Ambient) -> Self {
        FpSubspace { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: Ambient) -> Self {
        let n = ambient.n_digits();
        let mut s = Self::zero(ambient);
        for i in 0..n {
            let mut v = vec![0; n];
            v[i] = 1;
            s.insert_digits(v);
        }
        s
    }

    /// Span of the given points.
    pub fn span<'a>(ambient: Ambient, points: impl IntoIterator<Item = &'a TorusVec>) -> Result<Self> {
        let mut s = Self::zero(ambient);
        for x in points {
            s.insert(x)?;
        }
        Ok(s)
    }

    /// Span of digit vectors in the fixed coordinate order.
    pub fn from_rows(ambient: Ambient, rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = ambient.n_digits();
        let p = ambient.field.p();
        let mut s = Self::zero(ambient);
        for r in rows {
            if r.len() != n || r.iter().any(|&d| d >= p) {
                return Err(Error::DimensionMismatch(format!("row of length {} with digits < {p} expected {n}", r.len())));
            }
            s.insert_digits(r);
        }
        Ok(s)
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    /// Basis rows in reduced row-echelon form, pivots increasing.
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient.n_digits() - self.dim()
    }

    /// `[T_M^c : V] = p^codim`, saturating.
    pub fn index(&self) -> u128 {
        (self.ambient.field.p() as u128).saturating_pow(self.codim() as u32)
    }

    pub fn is_full(&self) -> bool {
        self.codim() == 0
    }

    fn p(&self) -> u32 {
        self.ambient.field.p()
    }

    /// Clears the pivot positions of `v` using the basis.
    fn reduce_digits(&self, v: &mut [u32]) {
        let p = self.p();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                *x = (*x + (p - c) * r) % p;
            }
        }
    }

    /// Adds a vector to the span; returns whether the dimension grew.
    fn insert_digits(&mut self, mut v: Vec<u32>) -> bool {
        let p = self.p();
        self.reduce_digits(&mut v);
        let Some(piv) = v.iter().position(|&d| d != 0) else {
            return false;
        };
        let inv = (1..p).find(|&b| v[piv] * b % p == 1).unwrap();
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        for row in &mut self.rows {
            let c = row[piv];
            if c != 0 {
                for (x, &r) in row.iter_mut().zip(&v) {
                    *x = (*x + (p - c) * r) % p;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < piv);
        self.rows.insert(at, v);
        self.pivots.insert(at, piv);
        true
    }

    pub fn insert(&mut self, x: &TorusVec) -> Result<bool> {
        self.ambient.check(x)?;
        Ok(self.insert_digits(x.to_fp_digits(&self.ambient.field)))
    }

    pub fn member(&self, x: &TorusVec) -> Result<bool> {
        self.ambient.check(x)?;
        let mut v = x.to_fp_digits(&self.ambient.field);
        self.reduce_digits(&mut v);
        Ok(v.iter().all(|&d| d == 0))
    }

    /// The coset representative of `x`: the least element of `x + V` in the
    /// enumeration order of `T_M^c`.
    pub fn reduce(&self, x: &TorusVec) -> Result<TorusVec> {
        self.ambient.check(x)?;
        let f = &self.ambient.field;
        let mut v = x.to_fp_digits(f);
        self.reduce_digits(&mut v);
        TorusVec::from_fp_digits(&v, self.ambient.c, self.ambient.m, f)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch("subspaces live in different ambients".into()));
        }
        let mut s = self.clone();
        for r in &other.rows {
            s.insert_digits(r.clone());
        }
        Ok(s)
    }

    pub fn contains(&self, other: &Self) -> Result<bool> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch("subspaces live in different ambients".into()));
        }
        Ok(other.rows.iter().all(|r| {
            let mut v = r.clone();
            self.reduce_digits(&mut v);
            v.iter().all(|&d| d == 0)
        }))
    }

    /// Image under truncation `T_M^c → T_{M'}^c`, `M' ≤ M`.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        let ambient = Ambient::new(self.ambient.field.clone(), self.ambient.c, m)?;
        let mut s = FpSubspace::zero(ambient);
        for x in self.basis() {
            s.insert(&x.truncate(m)?)?;
        }
        Ok(s)
    }

    pub fn basis(&self) -> Vec<TorusVec> {
        let a = &self.ambient;
        self.rows
            .iter()
            .map(|r| TorusVec::from_fp_digits(r, a.c, a.m, &a.field).unwrap())
            .collect()
    }

    /// Whether the character `w` is trivial on the subspace.
    pub fn annihilated_by(&self, w: &[RingPoly]) -> Result<bool> {
        for x in self.basis() {
            if x.pairing_index(w, &self.ambient.field)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_text(&self) -> String {
        let f = &self.ambient.field;
        let rows: Vec<String> = self.basis().iter().map(|x| x.to_text(f)).collect();
        format!("span{{{}}}", rows.join(", "))
    }
}

/// Sum of two subspaces.
pub fn subspace_sum(a: &FpSubspace, b: &FpSubspace) -> Result<FpSubspace> {
    a.sum(b)
}

/// `p^codim`.
pub fn subspace_index(a: &FpSubspace) -> u128 {
    a.index()
}

pub fn member(a: &FpSubspace, x: &TorusVec) -> Result<bool> {
    a.member(x)
}

pub fn subspace_equal(a: &FpSubspace, b: &FpSubspace) -> Result<bool> {
    if a.ambient != b.ambient {
        return Err(Error::DimensionMismatch("subspaces live in different ambients".into()));
    }
    Ok(a == b)
}

/// The image at precision `m` of `T^b` under an additive map.
///
/// Output slots `≤ m` only see input slots `≤ m + D` with `D` the largest
/// coefficient degree, so the span of the images of the F_p basis
/// `u^a t^-s e_i`, `s ≤ m + D`, is the exact image.
pub fn phi_image(map: &AdditiveMapSpec, m: usize, f: &FieldSpec) -> Result<FpSubspace> {
    phi_image_with_slack(map, m, 0, f)
}

/// [`phi_image`] computed from `slack` extra input slots.
pub fn phi_image_with_slack(map: &AdditiveMapSpec, m: usize, slack: usize, f: &FieldSpec) -> Result<FpSubspace> {
    let ambient = Ambient::new(f.clone(), map.codomain(), m)?;
    let work = m + map.max_degree() + slack;
    let mut s = FpSubspace::zero(ambient);
    let zero = TorusElem::zero(work)?;
    for i in 0..map.domain() {
        for slot in 1..=work {
            for a in 0..f.k() {
                let mut xs = vec![zero.clone(); map.domain()];
                xs[i] = TorusElem::monomial(f.elem(f.p().pow(a))?, slot, work)?;
                s.insert(&map.apply(&xs, m, f)?)?;
            }
        }
    }
    Ok(s)
}

/// Controls for the divisor-ladder estimate of a Φ-subtorus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmpiricalControls {
    /// Spans are taken over `deg n ≤ n_max`.
    pub n_max: usize,
    /// Number of ladder moduli tried.
    pub ladder_len: usize,
    /// Consecutive equal spans required.
    pub window: usize,
}

impl Default for EmpiricalControls {
    fn default() -> Self {
        EmpiricalControls { n_max: 10, ladder_len: 6, window: 3 }
    }
}

/// A subtorus estimated from a sequence; always heuristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalSubtorus {
    pub subspace: FpSubspace,
    /// 1-based ladder step at which the window closed.
    pub ladder_step: usize,
    pub modulus: RingPoly,
    /// Span dimension at each ladder step visited.
    pub dims: Vec<usize>,
}

impl EmpiricalSubtorus {
    pub const HEURISTIC: bool = true;
}

/// Estimates `F(η)` for an additive sequence `η` with `η(0) = 0`.
///
/// For ladder moduli `m_j`, spans `{η(m_j n) : deg n ≤ n_max}` at precision
/// `m` and returns the first span that stays unchanged for `window`
/// consecutive steps. Since `η` is additive, the span over the box equals
/// the span over its F_p basis `u^a t^i`, which is what is evaluated.
pub fn empirical_subtorus<S: PolySource + ?Sized>(
    eta: &S,
    m: usize,
    controls: &EmpiricalControls,
    f: &FieldSpec,
) -> Result<EmpiricalSubtorus> {
    if controls.window == 0 {
        return Err(Error::InvalidArgument("stability window must be ≥ 1".into()));
    }
    let ambient = Ambient::new(f.clone(), eta.dim(), m)?;
    let ladder = divisor_ladder(f, controls.ladder_len)?;
    let mut dims = Vec::new();
    let mut last: Option<FpSubspace> = None;
    let mut run = 0;
    for (j, mj) in ladder.iter().enumerate() {
        let deg_n = mj.degree().unwrap() + controls.n_max;
        let g = eta.for_box(m, deg_n, f)?;
        if !decompose(&g, f).is_additive() {
            return Err(Error::InvalidArgument("empirical subtorus needs an additive sequence with η(0) = 0".into()));
        }
        let mut span = FpSubspace::zero(ambient.clone());
        for i in 0..=controls.n_max {
            for a in 0..f.k() {
                let n = RingPoly::monomial(f.elem(f.p().pow(a))?, i).mul(mj, f);
                span.insert(&g.evaluate(&n, m, f)?)?;
            }
        }
        dims.push(span.dim());
        run = if last.as_ref() == Some(&span) { run + 1 } else { 1 };
        last = Some(span);
        if run >= controls.window {
            return Ok(EmpiricalSubtorus { subspace: last.unwrap(), ladder_step: j + 1, modulus: mj.clone(), dims });
        }
    }
    Err(Error::NoStabilization { steps: ladder.len() })
}

/// Empirical orbit closure: `F(g)` estimated as the sum of the subtori of
/// the additive parts, and the values over the box bucketed into cosets.
#[derive(Clone, Debug)]
pub struct OrbitClosure {
    pub subgroup: FpSubspace,
    /// Coset representatives in enumeration order.
    pub coset_reps: Vec<TorusVec>,
    /// Exact number of `n` landing in each coset.
    pub counts: Vec<u64>,
    pub weights: Vec<f64>,
    pub box_size: u64,
    /// Per separable exponent `r`, the estimate for `η_r`.
    pub parts: Vec<(usize, EmpiricalSubtorus)>,
}

/// Estimates `F(g)` as `Σ_r F(η_r)` over the additive parts of `g`.
pub fn estimate_subgroup<S: PolySource + ?Sized>(
    g: &S,
    m: usize,
    controls: &EmpiricalControls,
    f: &FieldSpec,
) -> Result<(FpSubspace, Vec<(usize, EmpiricalSubtorus)>)> {
    let ambient = Ambient::new(f.clone(), g.dim(), m)?;
    let form = decompose(&g.std_at(m, f)?, f);
    let mut subgroup = FpSubspace::zero(ambient);
    let mut parts = Vec::new();
    for r in form.separable_exponents() {
        let est = empirical_subtorus(&AdditiveComponent { source: g, r }, m, controls, f)?;
        subgroup = subgroup.sum(&est.subspace)?;
        parts.push((r, est));
    }
    Ok((subgroup, parts))
}

/// Tallies how many `n` with index in `range` (canonical order of the box)
/// land in each coset of `subgroup`.
pub fn coset_counts(
    g: &crate::polyseq::StdPoly,
    subgroup: &FpSubspace,
    range: core::ops::Range<u64>,
    f: &FieldSpec,
) -> Result<BTreeMap<TorusVec, u64>> {
    let m = subgroup.ambient().m;
    let mut out = BTreeMap::new();
    for idx in range {
        let n = RingPoly::from_index(idx, f);
        let rep = subgroup.reduce(&g.evaluate(&n, m, f)?)?;
        *out.entry(rep).or_insert(0) += 1;
    }
    Ok(out)
}

pub fn orbit_closure<S: PolySource + ?Sized>(
    g: &S,
    m: usize,
    controls: &EmpiricalControls,
    f: &FieldSpec,
) -> Result<OrbitClosure> {
    let (subgroup, parts) = estimate_subgroup(g, m, controls, f)?;
    let size = crate::algebra::box_size(f, controls.n_max);
    if size > crate::algebra::ENUMERATION_GUARD * 100 {
        return Err(Error::BoundExceeded { what: "orbit box", size, limit: crate::algebra::ENUMERATION_GUARD * 100 });
    }
    let values = g.for_box(m, controls.n_max, f)?;
    let tally = coset_counts(&values, &subgroup, 0..size as u64, f)?;
    Ok(closure_from_counts(subgroup, parts, tally, size as u64))
}

/// Assembles an [`OrbitClosure`] from merged coset tallies.
pub fn closure_from_counts(
    subgroup: FpSubspace,
    parts: Vec<(usize, EmpiricalSubtorus)>,
    tally: BTreeMap<TorusVec, u64>,
    box_size: u64,
) -> OrbitClosure {
    let (coset_reps, counts): (Vec<_>, Vec<_>) = tally.into_iter().unzip();
    let weights = counts.iter().map(|&c| c as f64 / box_size as f64).collect();
    OrbitClosure { subgroup, coset_reps, counts, weights, box_size, parts }
}
