//! Rotations on finite tori and return-time statistics.
//!
//! A [`FiniteRotation`] is the action `T(n): x ↦ x + n·α` on `G = T_M^c`
//! with counting measure. Returns `μ(A ∩ (A − s·α))` depend only on the
//! shift `v = s·α ∈ G`, so averages are computed from exact shift
//! histograms and a cached correlation `|A ∩ (A − v)|`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::algebra::{box_size, divisor_ladder, irreducibles_up_to, FieldSpec, RingPoly};
use crate::equidist::{ChunkRunner, FolnerBox, Histogram};
use crate::error::{Error, Result};
use crate::intersective::{roots_mod_factored, IntPoly};
use crate::subtorus::FpSubspace;
use crate::torus::{CoeffStream, TorusElem, TorusVec};

/// Largest group `T_M^c` a rotation will enumerate.
pub const GROUP_GUARD: u128 = 1 << 20;

/// Largest number of `(y, z)` pairs a partition search will visit.
pub const PAIR_GUARD: u128 = 100_000_000;

/// Exact measure values.
pub type Measure = Ratio<u128>;

/// `(G, μ, T, A)` with `G = T_M^c`, `T(n)x = x + n·α`.
#[derive(Clone, Debug)]
pub struct FiniteRotation {
    field: FieldSpec,
    c: usize,
    m: usize,
    alpha: TorusVec,
    streams: Option<Vec<CoeffStream>>,
    member: Vec<bool>,
    a_size: u64,
}

impl FiniteRotation {
    /// Rotation by a fixed `α` (precision ≥ `m`) with `A` given as points of `T_M^c`.
    pub fn new(f: &FieldSpec, alpha: TorusVec, m: usize, a: impl IntoIterator<Item = TorusVec>) -> Result<Self> {
        let mut sys = Self::empty(f, alpha, None, m)?;
        for x in a {
            sys.check_point(&x)?;
            sys.insert(x.group_index(f) as usize);
        }
        Ok(sys)
    }

    /// Rotation whose `α` is re-expanded from coefficient streams whenever a
    /// shift needs more precision than `m + slack`.
    pub fn from_streams(
        f: &FieldSpec,
        streams: Vec<CoeffStream>,
        m: usize,
        slack: usize,
        a: impl IntoIterator<Item = TorusVec>,
    ) -> Result<Self> {
        let alpha = expand_streams(&streams, m + slack, f)?;
        let mut sys = Self::empty(f, alpha, Some(streams), m)?;
        for x in a {
            sys.check_point(&x)?;
            sys.insert(x.group_index(f) as usize);
        }
        Ok(sys)
    }

    /// Same group and `α`, with `A = {x : pred(x)}`.
    pub fn with_predicate(&self, pred: impl Fn(&TorusVec) -> bool) -> Result<Self> {
        let mut sys = self.cleared();
        for i in 0..self.group_order() {
            if pred(&self.point(i)?) {
                sys.insert(i as usize);
            }
        }
        Ok(sys)
    }

    /// Same group and `α`, with `A` the points of the F_p-subspace `s`.
    pub fn with_subgroup(&self, s: &FpSubspace) -> Result<Self> {
        let amb = s.ambient();
        if amb.c != self.c || amb.m != self.m || amb.field != self.field {
            return Err(Error::DimensionMismatch("subgroup lives in another torus".into()));
        }
        let mut sys = self.cleared();
        for i in 0..self.group_order() {
            if s.member(&self.point(i)?)? {
                sys.insert(i as usize);
            }
        }
        Ok(sys)
    }

    /// Same group and `α`, with each point kept independently with
    /// probability `density`, drawn from a ChaCha8 stream seeded by `seed`.
    pub fn with_random(&self, seed: u64, density: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidArgument(format!("density {density} outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cut = density * 4_294_967_296.0;
        let mut sys = self.cleared();
        for i in 0..self.group_order() {
            if (rng.next_u32() as f64) < cut {
                sys.insert(i as usize);
            }
        }
        Ok(sys)
    }

    /// Same group and `α`, with `A` given by group indices.
    pub fn with_indices(&self, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut sys = self.cleared();
        for i in indices {
            if i >= self.group_order() {
                return Err(Error::InvalidArgument(format!("group index {i} ≥ |G| = {}", self.group_order())));
            }
            sys.insert(i as usize);
        }
        Ok(sys)
    }

    fn empty(f: &FieldSpec, alpha: TorusVec, streams: Option<Vec<CoeffStream>>, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("precision M must be ≥ 1".into()));
        }
        if alpha.prec() < m {
            return Err(Error::InsufficientPrecision { required: m, available: alpha.prec() });
        }
        let c = alpha.dim();
        let order = (f.q() as u128).saturating_pow((c * m) as u32);
        if order > GROUP_GUARD {
            return Err(Error::BoundExceeded { what: "rotation group", size: order, limit: GROUP_GUARD });
        }
        Ok(FiniteRotation {
            field: f.clone(),
            c,
            m,
            alpha,
            streams,
            member: vec![false; order as usize],
            a_size: 0,
        })
    }

    fn cleared(&self) -> Self {
        FiniteRotation { member: vec![false; self.member.len()], a_size: 0, ..self.clone() }
    }

    fn insert(&mut self, i: usize) {
        if !self.member[i] {
            self.member[i] = true;
            self.a_size += 1;
        }
    }

    fn check_point(&self, x: &TorusVec) -> Result<()> {
        if x.dim() != self.c {
            return Err(Error::DimensionMismatch(format!("point has c = {}, group has c = {}", x.dim(), self.c)));
        }
        if x.prec() != self.m {
            return Err(Error::PrecisionMismatch { left: self.m, right: x.prec() });
        }
        Ok(())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.c
    }

    pub fn prec(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> &TorusVec {
        &self.alpha
    }

    /// `|G| = q^(cM)`.
    pub fn group_order(&self) -> u64 {
        self.member.len() as u64
    }

    /// `|A|`.
    pub fn set_size(&self) -> u64 {
        self.a_size
    }

    /// `μ(A) = |A| / |G|`.
    pub fn measure(&self) -> Measure {
        Ratio::new(self.a_size as u128, self.group_order() as u128)
    }

    pub fn point(&self, index: u64) -> Result<TorusVec> {
        TorusVec::from_group_index(index, self.c, self.m, &self.field)
    }

    pub fn contains(&self, x: &TorusVec) -> bool {
        x.dim() == self.c && x.prec() == self.m && self.member[x.group_index(&self.field) as usize]
    }

    /// Points of `A` in group-index order.
    pub fn members(&self) -> Vec<TorusVec> {
        (0..self.group_order())
            .filter(|&i| self.member[i as usize])
            .map(|i| self.point(i).unwrap())
            .collect()
    }

    /// `s·α` in `G`. Needs `α` known to precision `M + deg s`.
    pub fn shift(&self, s: &RingPoly) -> Result<TorusVec> {
        let required = self.m + s.degree().unwrap_or(0);
        if self.alpha.prec() >= required {
            return self.alpha.scalar_mul(s, &self.field)?.truncate(self.m);
        }
        match &self.streams {
            Some(streams) => {
                let alpha = expand_streams(streams, required, &self.field)?;
                alpha.scalar_mul(s, &self.field)?.truncate(self.m)
            }
            None => Err(Error::InsufficientPrecision { required, available: self.alpha.prec() }),
        }
    }

    /// `T(n)x = x + n·α`.
    pub fn apply(&self, n: &RingPoly, x: &TorusVec) -> Result<TorusVec> {
        self.check_point(x)?;
        x.add(&self.shift(n)?, &self.field)
    }

    /// `|A ∩ (A − v)| = #{x ∈ A : x + v ∈ A}`.
    pub fn overlap(&self, v: &TorusVec) -> Result<u64> {
        self.check_point(v)?;
        let mut count = 0;
        for i in 0..self.group_order() {
            if self.member[i as usize] {
                let y = self.point(i)?.add(v, &self.field)?;
                if self.member[y.group_index(&self.field) as usize] {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// `μ(A ∩ (A − s·α))`.
    pub fn return_measure(&self, s: &RingPoly) -> Result<Measure> {
        let v = self.shift(s)?;
        Ok(Ratio::new(self.overlap(&v)? as u128, self.group_order() as u128))
    }

    /// `Σ_x 1_A(x)·1_A(x − s·α) / |G|`, scanning the member list for every
    /// point of `G`.
    pub fn return_measure_oracle(&self, s: &RingPoly) -> Result<Measure> {
        let v = self.shift(s)?;
        let a = self.members();
        let mut count = 0u128;
        for i in 0..self.group_order() {
            let x = self.point(i)?;
            let y = x.sub(&v, &self.field)?;
            if a.contains(&x) && a.contains(&y) {
                count += 1;
            }
        }
        Ok(Ratio::new(count, self.group_order() as u128))
    }

    /// `|T(n)A|`.
    pub fn image_size(&self, n: &RingPoly) -> Result<u64> {
        let v = self.shift(n)?;
        let mut image = BTreeSet::new();
        for x in self.members() {
            image.insert(x.add(&v, &self.field)?);
        }
        Ok(image.len() as u64)
    }

    /// Whether `T(n)` permutes `G`.
    pub fn is_bijective(&self, n: &RingPoly) -> Result<bool> {
        let v = self.shift(n)?;
        let mut seen = vec![false; self.member.len()];
        for i in 0..self.group_order() {
            let y = self.point(i)?.add(&v, &self.field)?;
            let j = y.group_index(&self.field) as usize;
            if seen[j] {
                return Ok(false);
            }
            seen[j] = true;
        }
        Ok(true)
    }

    /// A copy with `α` expanded to precision `prec` when streams allow it,
    /// so that shifts of degree up to `prec − M` need no re-expansion.
    pub fn widened(&self, prec: usize) -> Result<Self> {
        match &self.streams {
            Some(streams) if self.alpha.prec() < prec => {
                Ok(FiniteRotation { alpha: expand_streams(streams, prec, &self.field)?, ..self.clone() })
            }
            _ => Ok(self.clone()),
        }
    }

    /// Histogram of `s(n)·α` over the box `deg n ≤ N`.
    fn shift_histogram(
        &self,
        s: &(dyn Fn(&RingPoly) -> RingPoly + Sync),
        n: usize,
        runner: &dyn ChunkRunner,
    ) -> Result<(Histogram, u64)> {
        let bx = FolnerBox::new(n, &self.field)?;
        let total = bx.size();
        let job = |range: core::ops::Range<u64>| -> Result<Histogram> {
            let mut h = Histogram::new();
            for i in range {
                let v = self.shift(&s(&RingPoly::from_index(i, &self.field)))?;
                *h.entry(v).or_insert(0) += 1;
            }
            Ok(h)
        };
        Ok((runner.map_reduce(total, &job)?, total))
    }

    fn cached_overlap(&self, cache: &mut BTreeMap<TorusVec, u64>, v: &TorusVec) -> Result<u64> {
        if let Some(&c) = cache.get(v) {
            return Ok(c);
        }
        let c = self.overlap(v)?;
        cache.insert(v.clone(), c);
        Ok(c)
    }
}

fn expand_streams(streams: &[CoeffStream], prec: usize, f: &FieldSpec) -> Result<TorusVec> {
    let coords = streams.iter().map(|s| s.expand(prec, f)).collect::<Result<Vec<TorusElem>>>()?;
    TorusVec::new(coords)
}

/// Upper bound on `deg q(mn + k)` over `deg n ≤ N`.
fn value_degree_bound(q: &IntPoly, m: &RingPoly, k: &RingPoly, n: usize) -> usize {
    let arg = (m.degree().unwrap_or(0) + n).max(k.degree().unwrap_or(0));
    q.coeffs().iter().enumerate().filter_map(|(i, c)| c.degree().map(|d| d + i * arg)).max().unwrap_or(0)
}

/// `(1/|Φ_N|) Σ_{deg n ≤ N} μ(A ∩ (A − q(mn+k)·α))`.
pub fn avg_return(
    sys: &FiniteRotation,
    q: &IntPoly,
    m: &RingPoly,
    k: &RingPoly,
    n: usize,
    runner: &dyn ChunkRunner,
) -> Result<Measure> {
    if m.is_zero() {
        return Err(Error::InvalidArgument("m must be nonzero".into()));
    }
    let sys = &sys.widened(sys.prec() + value_degree_bound(q, m, k, n))?;
    let f = sys.field();
    let s = |x: &RingPoly| q.eval(&m.mul(x, f).add(k, f), f);
    let (h, total) = sys.shift_histogram(&s, n, runner)?;
    let mut cache = BTreeMap::new();
    let mut num = 0u128;
    for (v, count) in &h {
        num += *count as u128 * sys.cached_overlap(&mut cache, v)? as u128;
    }
    Ok(Ratio::new(num, total as u128 * sys.group_order() as u128))
}

/// One `(m, k)` candidate of the return ladder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderEntry {
    pub m: RingPoly,
    pub k: RingPoly,
    pub value: Measure,
}

#[derive(Clone, Debug)]
pub struct ReturnLadder {
    pub entries: Vec<LadderEntry>,
    /// `μ(A)² − ε`.
    pub threshold: f64,
    /// Index of the first entry with the largest value.
    pub best: Option<usize>,
}

impl ReturnLadder {
    pub fn best_entry(&self) -> Option<&LadderEntry> {
        self.best.map(|i| &self.entries[i])
    }

    /// Whether some candidate beats `μ(A)² − ε`.
    pub fn found(&self) -> bool {
        self.best_entry().is_some_and(|e| to_f64(&e.value) > self.threshold)
    }
}

pub fn to_f64(r: &Measure) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Most residues `k` tried per ladder modulus.
pub const LADDER_K_CAP: usize = 64;

/// Searches `m` over the divisor ladder `m_1 … m_L` and `k` over the first
/// [`LADDER_K_CAP`] roots of `q` mod `m` (canonical order), averaging returns along `q(mn+k)` over `deg n ≤ N`.
pub fn return_ladder(
    sys: &FiniteRotation,
    q: &IntPoly,
    n: usize,
    ladder_len: usize,
    eps: f64,
    runner: &dyn ChunkRunner,
) -> Result<ReturnLadder> {
    if eps <= 0.0 {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    let f = sys.field();
    let mu = to_f64(&sys.measure());
    let irr = irreducibles_up_to(f, ladder_len)?;
    let mut entries = Vec::new();
    for (j, m) in (1..).zip(divisor_ladder(f, ladder_len)?) {
        let factors: Vec<(RingPoly, usize)> = irr
            .iter()
            .filter_map(|pi| {
                let d = pi.degree().unwrap();
                (d <= j).then(|| (pi.clone(), j / d))
            })
            .collect();
        for k in roots_mod_factored(q, &factors, f)?.into_iter().take(LADDER_K_CAP) {
            let value = avg_return(sys, q, &m, &k, n, runner)?;
            entries.push(LadderEntry { m: m.clone(), k, value });
        }
    }
    let mut best: Option<usize> = None;
    for (i, e) in entries.iter().enumerate() {
        if best.is_none_or(|b| e.value > entries[b].value) {
            best = Some(i);
        }
    }
    Ok(ReturnLadder { entries, threshold: mu * mu - eps, best })
}

/// Large-return set with a covering certificate.
#[derive(Clone, Debug)]
pub struct SyndeticityReport {
    pub n: usize,
    pub threshold: f64,
    /// `R` in box order.
    pub r_set: Vec<RingPoly>,
    /// Translates chosen greedily, in the order picked.
    pub f_set: Vec<RingPoly>,
    /// Boundary slots excluded from the target box.
    pub margin: usize,
    /// Box points not in `R + F`.
    pub uncovered: u64,
}

impl SyndeticityReport {
    pub fn covered(&self) -> bool {
        self.uncovered == 0
    }

    /// Recomputes `R + F ⊇ {deg n ≤ N − margin}` by direct set arithmetic.
    pub fn replay(&self, f: &FieldSpec) -> Result<bool> {
        let target = self.n.checked_sub(self.margin);
        let Some(target) = target else { return Ok(true) };
        let r: BTreeSet<&RingPoly> = self.r_set.iter().collect();
        let bx = FolnerBox::new(target, f)?;
        for x in bx.iter() {
            if !self.f_set.iter().any(|g| r.contains(&x.sub(g, f))) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `R = {n : deg n ≤ N, μ(A ∩ (A − q(n)·α)) > μ(A)² − ε}` and a greedy
/// cover `R + F` of the box with `deg f ≤ f_deg`.
///
/// Boxes are subgroups of F_q[t], so `R + F` never leaves the box and the
/// margin is 0.
pub fn large_return_set(
    sys: &FiniteRotation,
    q: &IntPoly,
    n: usize,
    eps: f64,
    f_deg: usize,
) -> Result<SyndeticityReport> {
    if eps <= 0.0 {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    let sys = &sys.widened(sys.prec() + value_degree_bound(q, &RingPoly::one(), &RingPoly::zero(), n))?;
    let f = sys.field();
    let bx = FolnerBox::new(n, f)?;
    let size = bx.size() as usize;
    let mu = to_f64(&sys.measure());
    let threshold = mu * mu - eps;
    let order = sys.group_order() as f64;
    let mut cache = BTreeMap::new();
    let mut in_r = vec![false; size];
    for (i, x) in bx.iter().enumerate() {
        let v = sys.shift(&q.eval(&x, f))?;
        let overlap = sys.cached_overlap(&mut cache, &v)?;
        in_r[i] = overlap as f64 / order > threshold;
    }
    let r_set: Vec<RingPoly> =
        (0..size).filter(|&i| in_r[i]).map(|i| RingPoly::from_index(i as u64, f)).collect();

    let f_deg = f_deg.min(n);
    let cands: Vec<RingPoly> = (0..box_size(f, f_deg) as u64).map(|i| RingPoly::from_index(i, f)).collect();
    let cost = cands.len() as u128 * size as u128;
    if cost > PAIR_GUARD {
        return Err(Error::BoundExceeded { what: "cover search", size: cost, limit: PAIR_GUARD });
    }
    let mut covered = vec![false; size];
    let mut remaining = size as u64;
    let mut f_set = Vec::new();
    let mut used = vec![false; cands.len()];
    while remaining > 0 {
        let mut best: Option<(usize, u64)> = None;
        for (ci, g) in cands.iter().enumerate() {
            if used[ci] {
                continue;
            }
            let gain = (0..size)
                .filter(|&i| !covered[i] && in_r[RingPoly::from_index(i as u64, f).sub(g, f).to_index(f) as usize])
                .count() as u64;
            if gain > 0 && best.is_none_or(|(_, b)| gain > b) {
                best = Some((ci, gain));
            }
        }
        let Some((ci, gain)) = best else { break };
        used[ci] = true;
        let g = &cands[ci];
        for (i, slot) in covered.iter_mut().enumerate() {
            if !*slot && in_r[RingPoly::from_index(i as u64, f).sub(g, f).to_index(f) as usize] {
                *slot = true;
            }
        }
        remaining -= gain;
        f_set.push(g.clone());
    }
    Ok(SyndeticityReport { n, threshold, r_set, f_set, margin: 0, uncovered: remaining })
}

/// A monochromatic `x, y, z` with `x − y = q(z) ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionWitness {
    pub color: usize,
    pub x: RingPoly,
    pub y: RingPoly,
    pub z: RingPoly,
}

/// Exhaustive search over `deg x, y, z ≤ N`, `z` outermost, both in box order.
pub fn partition_witness(
    q: &IntPoly,
    coloring: &dyn Fn(&RingPoly) -> usize,
    n: usize,
    f: &FieldSpec,
) -> Result<Option<PartitionWitness>> {
    let bx = FolnerBox::new(n, f)?;
    let size = bx.size();
    let pairs = size as u128 * size as u128;
    if pairs > PAIR_GUARD {
        return Err(Error::BoundExceeded { what: "partition search", size: pairs, limit: PAIR_GUARD });
    }
    let colors: Vec<usize> = bx.iter().map(|x| coloring(&x)).collect();
    for z in bx.iter() {
        let v = q.eval(&z, f);
        if v.is_zero() || !bx.contains(&v) {
            continue;
        }
        let cz = colors[z.to_index(f) as usize];
        for y in bx.iter() {
            let x = y.add(&v, f);
            if colors[y.to_index(f) as usize] == cz && colors[x.to_index(f) as usize] == cz {
                return Ok(Some(PartitionWitness { color: cz, x, y, z }));
            }
        }
    }
    Ok(None)
}

/// Correlation of `u` with its translate by one shift.
#[derive(Clone, Debug)]
pub struct ShiftCorrelation {
    pub shift: RingPoly,
    /// Mean of `u(n+s)·conj(u(n))` over the `n` with `n + s` in the box.
    pub value: Complex64,
    pub pairs: u64,
    /// Share of the box dropped because `n + s` leaves it.
    pub boundary_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct VdcReport {
    pub correlations: Vec<ShiftCorrelation>,
    /// `(1/|Φ_N|) Σ u(n)`.
    pub average: Complex64,
}

impl VdcReport {
    pub fn max_correlation(&self) -> f64 {
        self.correlations.iter().map(|c| c.value.norm()).fold(0.0, f64::max)
    }
}

/// Shift correlations and the mean of a bounded sequence over `deg n ≤ N`.
pub fn vdc_correlation(
    u: &dyn Fn(&RingPoly) -> Result<Complex64>,
    shifts: &[RingPoly],
    n: usize,
    f: &FieldSpec,
) -> Result<VdcReport> {
    let bx = FolnerBox::new(n, f)?;
    let values: Vec<Complex64> = bx.iter().map(|x| u(&x)).collect::<Result<_>>()?;
    if let Some(bad) = values.iter().find(|z| z.norm() > 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("|u(n)| = {} exceeds 1", bad.norm())));
    }
    let size = values.len() as u64;
    let average = values.iter().sum::<Complex64>() / size as f64;
    let mut correlations = Vec::with_capacity(shifts.len());
    for s in shifts {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pairs = 0u64;
        for (i, x) in bx.iter().enumerate() {
            let y = x.add(s, f);
            if bx.contains(&y) {
                acc += values[y.to_index(f) as usize] * values[i].conj();
                pairs += 1;
            }
        }
        let value = if pairs == 0 { acc } else { acc / pairs as f64 };
        correlations.push(ShiftCorrelation {
            shift: s.clone(),
            value,
            pairs,
            boundary_fraction: 1.0 - pairs as f64 / size as f64,
        });
    }
    Ok(VdcReport { correlations, average })
}

/// The distinct nonzero values `q(z)`, `deg z ≤ d`, in canonical order.
pub fn value_shifts(q: &IntPoly, d: usize, f: &FieldSpec) -> Result<Vec<RingPoly>> {
    let bx = FolnerBox::new(d, f)?;
    let set: BTreeSet<RingPoly> = bx.iter().map(|z| q.eval(&z, f)).filter(|v| !v.is_zero()).collect();
    Ok(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equidist::Serial;
    use crate::algebra::FFElem;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn point(f: &FieldSpec, coeffs: &[i64]) -> TorusVec {
        TorusVec::scalar(TorusElem::from_coeffs(coeffs.iter().map(|&c| f.from_int(c)).collect()).unwrap())
    }

    fn rational_sys(f: &FieldSpec, num: RingPoly) -> FiniteRotation {
        let r = crate::algebra::RationalFF::new(num, RingPoly::t(), f).unwrap();
        FiniteRotation::from_streams(f, vec![CoeffStream::Rational(r)], 1, 0, [point(f, &[0])]).unwrap()
    }

    fn squares_sys(f: &FieldSpec) -> FiniteRotation {
        let base = FiniteRotation::from_streams(f, vec![CoeffStream::SparsePowers { exponent: 2 }], 2, 8, []).unwrap();
        base.with_predicate(|x| x.coord(0).coeff(1).is_zero()).unwrap()
    }

    #[test]
    fn single_step_leaves_point() {
        let f = f2();
        let sys = rational_sys(&f, RingPoly::one());
        assert_eq!(sys.return_measure(&RingPoly::one()).unwrap(), Ratio::new(0, 1));
        assert_eq!(sys.return_measure(&RingPoly::zero()).unwrap(), Ratio::new(1, 2));
        let zero = rational_sys(&f, RingPoly::zero());
        assert_eq!(zero.return_measure(&RingPoly::t()).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn shortfall_without_streams() {
        let f = f2();
        let sys = FiniteRotation::new(&f, point(&f, &[1, 0]), 1, []).unwrap();
        let s = RingPoly::monomial(FFElem::ONE, 3);
        assert_eq!(sys.return_measure(&s), Err(Error::InsufficientPrecision { required: 4, available: 2 }));
    }

    #[test]
    fn squares_ladder_beats_threshold() {
        let f = f2();
        let sys = squares_sys(&f);
        assert_eq!(sys.measure(), Ratio::new(1, 2));
        let q = IntPoly::from_ints(&f, &[0, 0, 1]);
        let t = RingPoly::t();
        let direct = avg_return(&sys, &q, &t, &RingPoly::zero(), 8, &Serial).unwrap();
        assert_eq!(direct, Ratio::new(1, 4));
        let ladder = return_ladder(&sys, &q, 8, 2, 0.1, &Serial).unwrap();
        assert!(ladder.found());
    }

    #[test]
    fn large_returns_for_squares_and_none_for_shifted() {
        let f = f2();
        let sys = squares_sys(&f);
        let q = IntPoly::from_ints(&f, &[0, 0, 1]);
        let rep = large_return_set(&sys, &q, 8, 0.1, 2).unwrap();
        assert!(rep.covered());
        assert!(rep.replay(&f).unwrap());
        assert!(rep.f_set.iter().all(|g| g.degree().is_none_or(|d| d <= 2)));

        let rigged = rational_sys(&f, RingPoly::one());
        let bad = IntPoly::from_ints(&f, &[1, 1, 1]);
        let rep = large_return_set(&rigged, &bad, 6, 0.1, 2).unwrap();
        assert!(rep.r_set.is_empty());
        assert!(rep.f_set.is_empty());
        assert!(!rep.covered());
    }

    #[test]
    fn full_set_returns_everywhere() {
        let f = f2();
        let sys = squares_sys(&f).with_predicate(|_| true).unwrap();
        let q = IntPoly::from_ints(&f, &[1, 1, 1]);
        assert_eq!(avg_return(&sys, &q, &RingPoly::one(), &RingPoly::zero(), 5, &Serial).unwrap(), Ratio::new(1, 1));
        let rep = large_return_set(&sys, &q, 5, 0.1, 2).unwrap();
        assert_eq!(rep.f_set, vec![RingPoly::zero()]);
        assert_eq!(rep.r_set.len(), 64);
    }

    #[test]
    fn partition_examples() {
        let f = f2();
        let c0 = |n: &RingPoly| n.coeff(0).index() as usize;
        let sq = IntPoly::from_ints(&f, &[0, 0, 1]);
        let w = partition_witness(&sq, &c0, 3, &f).unwrap().unwrap();
        assert_eq!(w.color, 0);
        assert_eq!(w.x.sub(&w.y, &f), sq.eval(&w.z, &f));
        let bad = IntPoly::from_ints(&f, &[1, 1, 1]);
        assert_eq!(partition_witness(&bad, &c0, 3, &f).unwrap(), None);
        assert!(partition_witness(&bad, &|_| 0, 3, &f).unwrap().is_some());
    }

    #[test]
    fn vdc_constant_and_integral() {
        let f = f2();
        let shifts = value_shifts(&IntPoly::from_ints(&f, &[0, 0, 1]), 3, &f).unwrap();
        let rep = vdc_correlation(&|_| Ok(Complex64::new(1.0, 0.0)), &shifts, 6, &f).unwrap();
        assert!((rep.average.re - 1.0).abs() < 1e-12);
        assert!(rep.correlations.iter().all(|c| (c.value.re - 1.0).abs() < 1e-12));
        let tinv = CoeffStream::Rational(crate::algebra::RationalFF::new(RingPoly::one(), RingPoly::t(), &f).unwrap());
        let u = |n: &RingPoly| -> Result<Complex64> {
            let x = tinv.expand(2 + n.degree().unwrap_or(0), &f)?.scalar_mul(n, &f)?;
            crate::torus::pairing(&RingPoly::t(), &x, &f)
        };
        let rep = vdc_correlation(&u, &shifts, 4, &f).unwrap();
        assert!((rep.average.re - 1.0).abs() < 1e-12);
    }
}
