//! Følner boxes, character sums and distribution verdicts.
//!
//! Every sum here is computed from an exact histogram of the values
//! `g(n) ∈ T_M^c` over a box: a character sum is then `Σ_r N_r ζ_p^r`
//! with integer tallies `N_r`, so chunked evaluation is order-free.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;

use crate::algebra::{box_size, FieldSpec, RingPoly};
use crate::error::{Error, Result};
use crate::polyseq::{PolySource, Reparametrized, StdPoly};
use crate::subtorus::FpSubspace;
use crate::torus::{root_of_unity, TorusVec};

/// Exact value counts over part of a box.
pub type Histogram = BTreeMap<TorusVec, u64>;

/// Largest box the verdicts will enumerate.
pub const BOX_GUARD: u128 = 10_000_000;

/// `Φ_N = {n : deg n ≤ N}` (with 0), in canonical order.
#[derive(Clone, Debug)]
pub struct FolnerBox {
    pub n: usize,
    field: FieldSpec,
}

impl FolnerBox {
    pub fn new(n: usize, f: &FieldSpec) -> Result<Self> {
        let size = box_size(f, n);
        if size > BOX_GUARD {
            return Err(Error::BoundExceeded { what: "Følner box", size, limit: BOX_GUARD });
        }
        Ok(FolnerBox { n, field: f.clone() })
    }

    /// `q^(N+1)`.
    pub fn size(&self) -> u64 {
        box_size(&self.field, self.n) as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = RingPoly> + '_ {
        (0..self.size()).map(|i| RingPoly::from_index(i, &self.field))
    }

    pub fn contains(&self, n: &RingPoly) -> bool {
        n.degree().is_none_or(|d| d <= self.n)
    }
}

/// Splits the index range `0..total` into chunks and merges the partial
/// results. Implementations may run the chunks concurrently.
pub trait ChunkRunner {
    fn map_reduce(
        &self,
        total: u64,
        job: &(dyn Fn(Range<u64>) -> Result<Histogram> + Sync),
    ) -> Result<Histogram>;
}

/// Runs the whole range in the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Serial;

impl ChunkRunner for Serial {
    fn map_reduce(
        &self,
        total: u64,
        job: &(dyn Fn(Range<u64>) -> Result<Histogram> + Sync),
    ) -> Result<Histogram> {
        job(0..total)
    }
}

/// Adds the counts of `b` into `a`.
pub fn merge_histograms(a: &mut Histogram, b: Histogram) {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
}

/// Counts of `g(n)` at precision `m` for the box indices in `range`.
pub fn value_histogram_range(g: &StdPoly, m: usize, range: Range<u64>, f: &FieldSpec) -> Result<Histogram> {
    let mut h = Histogram::new();
    for idx in range {
        let v = g.evaluate(&RingPoly::from_index(idx, f), m, f)?;
        *h.entry(v).or_insert(0) += 1;
    }
    Ok(h)
}

/// Counts of `g(n)` at precision `m` over `Φ_N`.
pub fn value_histogram<S: PolySource + ?Sized>(
    g: &S,
    m: usize,
    n: usize,
    runner: &dyn ChunkRunner,
    f: &FieldSpec,
) -> Result<Histogram> {
    let b = FolnerBox::new(n, f)?;
    let poly = g.for_box(m, n, f)?;
    runner.map_reduce(b.size(), &|r| value_histogram_range(&poly, m, r, f))
}

/// Tallies of the character residue `Tr((w·x)_{-1})` over a histogram.
pub fn residue_counts(h: &Histogram, w: &[RingPoly], f: &FieldSpec) -> Result<Vec<u64>> {
    let mut counts = alloc::vec![0u64; f.p() as usize];
    for (x, &c) in h {
        counts[x.pairing_index(w, f)? as usize] += c;
    }
    Ok(counts)
}

/// `Σ_r counts[r] ζ_p^r / total`.
pub fn average_from_counts(counts: &[u64], p: u32) -> Complex64 {
    let total: u64 = counts.iter().sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, &c) in counts.iter().enumerate() {
        if c > 0 {
            acc += root_of_unity(p, r as u32) * c as f64;
        }
    }
    acc / total as f64
}

/// Character average over a histogram.
pub fn character_average(h: &Histogram, w: &[RingPoly], f: &FieldSpec) -> Result<Complex64> {
    Ok(average_from_counts(&residue_counts(h, w, f)?, f.p()))
}

/// Precision at which `⟨w, ·⟩` is determined.
pub fn character_precision(w: &[RingPoly]) -> usize {
    w.iter().filter_map(RingPoly::degree).max().unwrap_or(0) + 1
}

/// `(1/|Φ_N|) Σ_{n ∈ Φ_N} ⟨w, g(n)⟩`.
pub fn weyl_sum<S: PolySource + ?Sized>(g: &S, w: &[RingPoly], n: usize, f: &FieldSpec) -> Result<Complex64> {
    weyl_sum_with(g, w, n, &Serial, f)
}

pub fn weyl_sum_with<S: PolySource + ?Sized>(
    g: &S,
    w: &[RingPoly],
    n: usize,
    runner: &dyn ChunkRunner,
    f: &FieldSpec,
) -> Result<Complex64> {
    if w.len() != g.dim() {
        return Err(Error::DimensionMismatch(format!("character has {} entries, c = {}", w.len(), g.dim())));
    }
    let h = value_histogram(g, character_precision(w), n, runner, f)?;
    character_average(&h, w, f)
}

/// Every character of `T_M^c` except the trivial one, as `w ∈ Z^c` with
/// `deg w_i < M`, in canonical order (first coordinate most significant).
pub fn nontrivial_characters(c: usize, m: usize, f: &FieldSpec) -> Result<Vec<Vec<RingPoly>>> {
    let per = (f.q() as u128).saturating_pow(m as u32);
    let total = per.saturating_pow(c as u32);
    if total > crate::algebra::ENUMERATION_GUARD {
        return Err(Error::BoundExceeded { what: "character enumeration", size: total, limit: crate::algebra::ENUMERATION_GUARD });
    }
    let per = per as u64;
    Ok((1..total as u64)
        .map(|mut idx| {
            let mut w = alloc::vec![RingPoly::zero(); c];
            for slot in w.iter_mut().rev() {
                *slot = RingPoly::from_index(idx % per, f);
                idx /= per;
            }
            w
        })
        .collect())
}

pub fn character_text(w: &[RingPoly], f: &FieldSpec) -> String {
    if w.len() == 1 {
        return w[0].to_text(f);
    }
    let parts: Vec<String> = w.iter().map(|x| x.to_text(f)).collect();
    format!("({})", parts.join(", "))
}

/// Character averages of one `w` along an N schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylReport {
    pub character: Vec<RingPoly>,
    pub ns: Vec<usize>,
    pub moduli: Vec<f64>,
}

impl WeylReport {
    pub fn final_modulus(&self) -> f64 {
        *self.moduli.last().unwrap_or(&1.0)
    }

    /// Final modulus at most `tol` and no step up by more than `tol / 2`.
    pub fn passes(&self, tol: f64) -> bool {
        self.final_modulus() <= tol && self.moduli.windows(2).all(|w| w[1] <= w[0] + tol / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    WellDistributed,
    NotWellDistributed { witness: Vec<RingPoly>, modulus: f64 },
    /// Every character nontrivial on the subgroup passes, so the sequence is
    /// uniform inside each coset; `quotient` counts values per coset.
    FiniteIndexUniform { subgroup: FpSubspace, quotient: Vec<(TorusVec, u64)> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::WellDistributed => "WellDistributed",
            Verdict::NotWellDistributed { .. } => "NotWellDistributed",
            Verdict::FiniteIndexUniform { .. } => "FiniteIndexUniform",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionVerdict {
    pub verdict: Verdict,
    /// For a subgroup-relative verdict, the largest failing character.
    pub witness: Option<(Vec<RingPoly>, f64)>,
    pub evidence: Vec<WeylReport>,
    pub tol: f64,
}

/// Default N schedule: `{4, 6, 8, 10}` for q = 2, shifted down for larger q
/// so that the largest box stays within [`BOX_GUARD`].
pub fn default_schedule(f: &FieldSpec) -> Vec<usize> {
    let mut top = 10usize;
    while top > 0 && box_size(f, top) > BOX_GUARD {
        top -= 1;
    }
    [6usize, 4, 2, 0].iter().map(|&d| top.saturating_sub(d)).collect()
}

/// Character reports along a schedule for all nontrivial characters of `T_M^c`.
pub fn schedule_reports(
    hists: &[(usize, Histogram)],
    c: usize,
    m: usize,
    f: &FieldSpec,
) -> Result<Vec<WeylReport>> {
    let mut out = Vec::new();
    for w in nontrivial_characters(c, m, f)? {
        let mut moduli = Vec::with_capacity(hists.len());
        for (_, h) in hists {
            moduli.push(character_average(h, &w, f)?.norm());
        }
        out.push(WeylReport { character: w, ns: hists.iter().map(|(n, _)| *n).collect(), moduli });
    }
    Ok(out)
}

fn worst<'a>(reports: impl Iterator<Item = &'a WeylReport>, tol: f64) -> Option<&'a WeylReport> {
    let mut best: Option<&WeylReport> = None;
    for r in reports.filter(|r| !r.passes(tol)) {
        if best.is_none_or(|b| r.final_modulus() > b.final_modulus()) {
            best = Some(r);
        }
    }
    best
}

/// Trend-and-threshold verdict on well distribution in `T_M^c`.
pub fn wd_verdict<S: PolySource + ?Sized>(
    g: &S,
    m: usize,
    schedule: &[usize],
    tol: f64,
    subgroup: Option<&FpSubspace>,
    f: &FieldSpec,
) -> Result<DistributionVerdict> {
    wd_verdict_with(g, m, schedule, tol, subgroup, &Serial, f)
}

pub fn wd_verdict_with<S: PolySource + ?Sized>(
    g: &S,
    m: usize,
    schedule: &[usize],
    tol: f64,
    subgroup: Option<&FpSubspace>,
    runner: &dyn ChunkRunner,
    f: &FieldSpec,
) -> Result<DistributionVerdict> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be > 0".into()));
    }
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty N schedule".into()));
    }
    let hists = schedule
        .iter()
        .map(|&n| Ok((n, value_histogram(g, m, n, runner, f)?)))
        .collect::<Result<Vec<_>>>()?;
    verdict_from_histograms(&hists, g.dim(), m, tol, subgroup, f)
}

/// The verdict from histograms already computed along a schedule.
pub fn verdict_from_histograms(
    hists: &[(usize, Histogram)],
    c: usize,
    m: usize,
    tol: f64,
    subgroup: Option<&FpSubspace>,
    f: &FieldSpec,
) -> Result<DistributionVerdict> {
    let evidence = schedule_reports(hists, c, m, f)?;
    let Some(bad) = worst(evidence.iter(), tol) else {
        return Ok(DistributionVerdict { verdict: Verdict::WellDistributed, witness: None, evidence, tol });
    };
    let global = (bad.character.clone(), bad.final_modulus());
    if let Some(sub) = subgroup.filter(|s| !s.is_full()) {
        let mut relative = Vec::new();
        for r in &evidence {
            if !sub.annihilated_by(&r.character)? {
                relative.push(r);
            }
        }
        if worst(relative.into_iter(), tol).is_none() {
            let last = &hists.last().unwrap().1;
            let mut quotient: BTreeMap<TorusVec, u64> = BTreeMap::new();
            for (x, &cnt) in last {
                *quotient.entry(sub.reduce(x)?).or_insert(0) += cnt;
            }
            return Ok(DistributionVerdict {
                verdict: Verdict::FiniteIndexUniform { subgroup: sub.clone(), quotient: quotient.into_iter().collect() },
                witness: Some(global),
                evidence,
                tol,
            });
        }
    }
    Ok(DistributionVerdict {
        verdict: Verdict::NotWellDistributed { witness: global.0.clone(), modulus: global.1 },
        witness: Some(global),
        evidence,
        tol,
    })
}

/// Distribution of `g(mn + k)` for one residue `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentReport {
    pub k: RingPoly,
    /// Cosets hit, with counts.
    pub cosets: Vec<(TorusVec, u64)>,
    pub single_coset: bool,
    /// Largest `|average|` over characters nontrivial on the subgroup.
    pub max_deviation: f64,
    pub uniform: bool,
}

/// Every `k` with `deg k < deg m`, in canonical order.
pub fn residues(m: &RingPoly, f: &FieldSpec) -> Result<Vec<RingPoly>> {
    let d = m.degree().ok_or_else(|| Error::InvalidArgument("modulus must be nonzero".into()))?;
    let count = (f.q() as u128).saturating_pow(d as u32);
    if count > crate::algebra::ENUMERATION_GUARD {
        return Err(Error::BoundExceeded { what: "residues", size: count, limit: crate::algebra::ENUMERATION_GUARD });
    }
    Ok((0..count as u64).map(|i| RingPoly::from_index(i, f)).collect())
}

/// Checks, for each residue class `k mod m`, that `g(mn + k)` stays in one
/// coset of `subgroup` and is uniform inside it.
#[allow(clippy::too_many_arguments)]
pub fn components_verdict<S: PolySource + ?Sized>(
    g: &S,
    m: &RingPoly,
    prec: usize,
    n: usize,
    tol: f64,
    subgroup: &FpSubspace,
    runner: &dyn ChunkRunner,
    f: &FieldSpec,
) -> Result<Vec<ComponentReport>> {
    if m.is_zero() {
        return Err(Error::InvalidArgument("components need m ≠ 0".into()));
    }
    let chars: Vec<Vec<RingPoly>> = nontrivial_characters(g.dim(), prec, f)?
        .into_iter()
        .map(|w| Ok((subgroup.annihilated_by(&w)?, w)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(trivial, _)| !trivial)
        .map(|(_, w)| w)
        .collect();
    let mut out = Vec::new();
    for k in residues(m, f)? {
        let seq = Reparametrized { source: g, m: m.clone(), k: k.clone() };
        let h = value_histogram(&seq, prec, n, runner, f)?;
        let mut cosets: BTreeMap<TorusVec, u64> = BTreeMap::new();
        for (x, &c) in &h {
            *cosets.entry(subgroup.reduce(x)?).or_insert(0) += c;
        }
        let mut max_deviation: f64 = 0.0;
        for w in &chars {
            max_deviation = max_deviation.max(character_average(&h, w, f)?.norm());
        }
        // Inside one coset y + F a character nontrivial on F averages to 0
        // exactly when the values are uniform on the coset.
        out.push(ComponentReport {
            k,
            single_coset: cosets.len() == 1,
            cosets: cosets.into_iter().collect(),
            max_deviation,
            uniform: max_deviation <= tol,
        });
    }
    Ok(out)
}

/// Well-distribution verdicts of `g(mn + k)` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ApScan {
    pub ms: Vec<RingPoly>,
    pub ks: Vec<RingPoly>,
    /// `entries[i][j]` for `(ms[i], ks[j])`.
    pub entries: Vec<Vec<bool>>,
    pub all_wd: bool,
    /// Whether the supplied `F(g)` estimate is the full space.
    pub full_space: Option<bool>,
    /// Whether the two characterizations agree.
    pub routes_agree: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
pub fn ap_wd_scan<S: PolySource + ?Sized>(
    g: &S,
    ms: &[RingPoly],
    ks: &[RingPoly],
    prec: usize,
    schedule: &[usize],
    tol: f64,
    subgroup: Option<&FpSubspace>,
    runner: &dyn ChunkRunner,
    f: &FieldSpec,
) -> Result<ApScan> {
    if ms.iter().any(RingPoly::is_zero) {
        return Err(Error::InvalidArgument("every m must be nonzero".into()));
    }
    let mut entries = Vec::with_capacity(ms.len());
    for m in ms {
        let mut row = Vec::with_capacity(ks.len());
        for k in ks {
            let seq = Reparametrized { source: g, m: m.clone(), k: k.clone() };
            let v = wd_verdict_with(&seq, prec, schedule, tol, None, runner, f)?;
            row.push(v.verdict == Verdict::WellDistributed);
        }
        entries.push(row);
    }
    let all_wd = entries.iter().all(|r| r.iter().all(|&b| b));
    let full_space = subgroup.map(FpSubspace::is_full);
    Ok(ApScan {
        ms: ms.to_vec(),
        ks: ks.to_vec(),
        entries,
        all_wd,
        full_space,
        routes_agree: full_space.map(|full| full == all_wd),
    })
}
