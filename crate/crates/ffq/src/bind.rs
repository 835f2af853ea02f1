//! Turning parsed text into field elements, polynomials, streams and maps.

use std::collections::BTreeMap;

use ffq_core::algebra::{FieldSpec, RationalFF, RingPoly};
use ffq_core::intersective::IntPoly;
use ffq_core::polyseq::{AdditiveMapSpec, CoeffTerm, StdPoly, SymPoly, SymSeq};
use ffq_core::torus::{CoeffStream, LaurentElem, TorusElem, TorusVec};
use ffq_core::Error;

use crate::error::{CliError, CliResult};
use crate::expr::{self, Expr, Var};

/// Largest degree in t or x that binding will build.
pub const MAX_DEGREE: usize = 4096;

/// Largest number of monomials in a bound expression.
pub const MAX_TERMS: usize = 4096;

/// Parses `p`, `p^k` or `p^k:m0,m1,…,mk` (monic modulus, low coefficient first).
pub fn parse_field(spec: &str) -> CliResult<FieldSpec> {
    let bad = || CliError::Usage(format!("bad field spec \"{spec}\"; expected p[^k[:m0,…,mk]]"));
    let (head, modulus) = match spec.split_once(':') {
        Some((h, m)) => (h, Some(m)),
        None => (spec, None),
    };
    let (p, k) = match head.split_once('^') {
        Some((p, k)) => (p.trim().parse::<u32>().map_err(|_| bad())?, k.trim().parse::<u32>().map_err(|_| bad())?),
        None => (head.trim().parse::<u32>().map_err(|_| bad())?, 1),
    };
    match modulus {
        None => Ok(FieldSpec::new(p, k)?),
        Some(m) => {
            let coeffs = m
                .split(',')
                .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<CliResult<Vec<u32>>>()?;
            if coeffs.len() != k as usize + 1 {
                return Err(CliError::Usage(format!("modulus for degree {k} needs {} coefficients", k + 1)));
            }
            Ok(FieldSpec::with_modulus(p, &coeffs)?)
        }
    }
}

/// Text of a field in the form accepted by [`parse_field`].
pub fn field_text(f: &FieldSpec) -> String {
    if f.k() == 1 {
        return f.p().to_string();
    }
    let m: Vec<String> = f.modulus().iter().map(u32::to_string).collect();
    format!("{}^{}:{}", f.p(), f.k(), m.join(","))
}

/// Text of a stream in the form accepted by [`Env::stream`].
pub fn stream_text(s: &CoeffStream, f: &FieldSpec) -> String {
    match s {
        CoeffStream::Rational(r) => format!("rat:({})/({})", r.num().to_text(f), r.den().to_text(f)),
        CoeffStream::SparsePowers { exponent: 2 } => "sparse:squares".into(),
        CoeffStream::SparsePowers { exponent: 3 } => "sparse:cubes".into(),
        CoeffStream::SparsePowers { exponent } => format!("sparse:pow={exponent}"),
        CoeffStream::Seeded { seed } => format!("rand:seed={seed}"),
    }
}

fn parse_text(text: &str) -> CliResult<Expr> {
    expr::parse(text).map_err(|err| CliError::Syntax { input: text.to_string(), err })
}

fn too_big(what: &'static str, size: usize) -> CliError {
    CliError::Domain(Error::BoundExceeded { what, size: size as u128, limit: MAX_DEGREE as u128 })
}

/// Most monomial products formed in one multiplication.
const MAX_WORK: usize = 1 << 16;

type Key = (usize, Vec<(String, u32)>);

/// A polynomial in x and stream names with coefficients in F_q(t).
#[derive(Clone, Debug, Default)]
struct Sym(BTreeMap<Key, RationalFF>);

impl Sym {
    fn constant(r: RationalFF) -> Self {
        let mut m = BTreeMap::new();
        if !r.is_zero() {
            m.insert((0, Vec::new()), r);
        }
        Sym(m)
    }

    fn monomial(key: Key) -> Self {
        Sym(BTreeMap::from([(key, RationalFF::from_poly(RingPoly::one()))]))
    }

    fn add(mut self, o: Sym, f: &FieldSpec) -> CliResult<Self> {
        for (k, v) in o.0 {
            let s = match self.0.remove(&k) {
                Some(a) => a.add(&v, f),
                None => v,
            };
            if !s.is_zero() {
                self.0.insert(k, s);
            }
        }
        if self.0.len() > MAX_TERMS {
            return Err(too_big("expression terms", self.0.len()));
        }
        Ok(self)
    }

    fn neg(self, f: &FieldSpec) -> Self {
        Sym(self.0.into_iter().map(|(k, v)| (k, v.neg(f))).collect())
    }

    fn mul(&self, o: &Sym, f: &FieldSpec) -> CliResult<Self> {
        let work = self.0.len().saturating_mul(o.0.len());
        if work > MAX_WORK {
            return Err(too_big("expression expansion", work));
        }
        let mut out = Sym::default();
        for ((xa, sa), va) in &self.0 {
            for ((xb, sb), vb) in &o.0 {
                let x = xa + xb;
                if x > MAX_DEGREE {
                    return Err(too_big("degree in x", x));
                }
                let mut names: BTreeMap<String, u32> = sa.iter().cloned().collect();
                for (n, e) in sb {
                    let slot = names.entry(n.clone()).or_insert(0);
                    *slot = slot.saturating_add(*e);
                    if *slot as usize > MAX_DEGREE {
                        return Err(too_big("stream power", *slot as usize));
                    }
                }
                let v = va.mul(vb, f);
                check_rational(&v)?;
                out = out.add(Sym(BTreeMap::from([((x, names.into_iter().collect()), v)])), f)?;
            }
        }
        Ok(out)
    }

    fn pow(&self, mut e: u64, f: &FieldSpec) -> CliResult<Self> {
        let mut acc = Sym::constant(RationalFF::from_poly(RingPoly::one()));
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f)?;
            }
        }
        Ok(acc)
    }

    fn as_constant(&self) -> Option<RationalFF> {
        match self.0.len() {
            0 => Some(RationalFF::zero()),
            1 => self.0.get(&(0, Vec::new())).cloned(),
            _ => None,
        }
    }
}

fn check_rational(r: &RationalFF) -> CliResult<()> {
    let d = r.num().degree().unwrap_or(0).max(r.den().degree().unwrap_or(0));
    if d > MAX_DEGREE {
        return Err(too_big("degree in t", d));
    }
    Ok(())
}

/// Field plus the streams bound with `--def`.
#[derive(Clone, Debug)]
pub struct Env {
    pub field: FieldSpec,
    pub defs: BTreeMap<String, CoeffStream>,
}

impl Env {
    pub fn new(field: FieldSpec) -> Self {
        Env { field, defs: BTreeMap::new() }
    }

    /// Binds `name=stream`.
    pub fn define(&mut self, def: &str) -> CliResult<()> {
        let (name, spec) =
            def.split_once('=').ok_or_else(|| CliError::Usage(format!("--def expects name=stream, got \"{def}\"")))?;
        let name = name.trim();
        if !expr::is_name(name) {
            return Err(CliError::Usage(format!("\"{name}\" is not a valid stream name")));
        }
        let s = self.stream(spec.trim())?;
        self.defs.insert(name.to_string(), s);
        Ok(())
    }

    /// Parses `rat:<rational>`, `sparse:squares`, `sparse:cubes`,
    /// `sparse:pow=<k>`, `rand:seed=<u64>` or a bound name.
    pub fn stream(&self, spec: &str) -> CliResult<CoeffStream> {
        let bad = || CliError::Usage(format!("bad stream spec \"{spec}\""));
        if spec.starts_with("rat:") {
            return Ok(CoeffStream::Rational(self.rational(spec)?));
        }
        if let Some(rest) = spec.strip_prefix("sparse:") {
            let exponent = match rest {
                "squares" => 2,
                "cubes" => 3,
                _ => rest.strip_prefix("pow=").and_then(|k| k.parse::<u32>().ok()).filter(|&k| k >= 2).ok_or_else(bad)?,
            };
            return Ok(CoeffStream::SparsePowers { exponent });
        }
        if let Some(rest) = spec.strip_prefix("rand:seed=") {
            return Ok(CoeffStream::Seeded { seed: rest.parse().map_err(|_| bad())? });
        }
        self.defs.get(spec).cloned().ok_or_else(|| CliError::UnknownSymbol(format!("stream \"{spec}\" is not defined")))
    }

    fn eval(&self, e: &Expr) -> CliResult<Sym> {
        let f = &self.field;
        let one = || RationalFF::from_poly(RingPoly::one());
        Ok(match e {
            Expr::Int(n) => {
                let r = (*n % f.p() as u64) as i64;
                Sym::constant(RationalFF::from_poly(RingPoly::constant(f.from_int(r))))
            }
            Expr::Var(Var::T) => Sym::constant(RationalFF::from_poly(RingPoly::t())),
            Expr::Var(Var::X) => Sym::monomial((1, Vec::new())),
            Expr::Var(Var::U) => {
                if f.k() == 1 {
                    return Err(CliError::UnknownSymbol("u (the prime field has no generator)".into()));
                }
                Sym::constant(RationalFF::from_poly(RingPoly::constant(f.generator())))
            }
            Expr::Name(n) => {
                if !self.defs.contains_key(n) {
                    return Err(CliError::UnknownSymbol(format!("{n} (bind it with --def {n}=<stream>)")));
                }
                Sym::monomial((0, vec![(n.clone(), 1)]))
            }
            Expr::Rat(a, b) => {
                let (a, b) = (self.constant(a)?, self.constant(b)?);
                Sym::constant(a.div(&b, f)?)
            }
            Expr::Pow(b, k) => {
                if k.unsigned_abs() as usize > MAX_DEGREE {
                    return Err(too_big("exponent", k.unsigned_abs() as usize));
                }
                let base = self.eval(b)?;
                if *k < 0 {
                    let c = base.as_constant().ok_or_else(|| CliError::Shape("negative power of a non-constant".into()))?;
                    let p = base_pow(&c, k.unsigned_abs(), f)?;
                    Sym::constant(one().div(&p, f)?)
                } else {
                    base.pow(*k as u64, f)?
                }
            }
            Expr::Neg(a) => self.eval(a)?.neg(f),
            Expr::Sum(items) => {
                let mut acc = Sym::default();
                for it in items {
                    acc = acc.add(self.eval(it)?, f)?;
                }
                acc
            }
            Expr::Product(items) => {
                let mut acc = Sym::constant(one());
                for it in items {
                    acc = acc.mul(&self.eval(it)?, f)?;
                }
                acc
            }
        })
    }

    fn constant(&self, e: &Expr) -> CliResult<RationalFF> {
        self.eval(e)?
            .as_constant()
            .ok_or_else(|| CliError::Shape(format!("\"{e}\" must not contain x or stream names")))
    }

    /// An element of F_q(t).
    pub fn rational(&self, text: &str) -> CliResult<RationalFF> {
        self.constant(&parse_text(text)?)
    }

    /// An element of F_q[t].
    pub fn ring_poly(&self, text: &str) -> CliResult<RingPoly> {
        let r = self.rational(text)?;
        if !r.den().is_one() {
            return Err(CliError::Shape(format!("\"{text}\" is not a polynomial in t")));
        }
        Ok(r.num().clone())
    }

    /// A polynomial in x with coefficients in F_q[t].
    pub fn int_poly(&self, text: &str) -> CliResult<IntPoly> {
        let terms = self.x_terms(text)?;
        let top = terms.last().map(|(k, _)| *k).unwrap_or(0);
        let mut coeffs = vec![RingPoly::zero(); top + 1];
        for (k, c) in terms {
            coeffs[k] = c;
        }
        Ok(IntPoly::new(coeffs))
    }

    fn x_terms(&self, text: &str) -> CliResult<Vec<(usize, RingPoly)>> {
        let sym = self.eval(&parse_text(text)?)?;
        let mut out = Vec::new();
        for ((k, names), r) in sym.0 {
            if !names.is_empty() {
                return Err(CliError::Shape(format!("\"{text}\" must not contain stream names")));
            }
            if !r.den().is_one() {
                return Err(CliError::Shape(format!("coefficients of \"{text}\" must be polynomials in t")));
            }
            out.push((k, r.num().clone()));
        }
        Ok(out)
    }

    /// An additive map `x ↦ Σ m_j x^(p^j)`.
    pub fn additive_map(&self, text: &str) -> CliResult<AdditiveMapSpec> {
        let terms = self.x_terms(text)?;
        if terms.iter().any(|(k, _)| *k == 0) {
            return Err(CliError::Shape(format!("\"{text}\" has a constant term, so it is not additive")));
        }
        Ok(AdditiveMapSpec::from_powers(&terms, &self.field)?)
    }

    /// A sequence polynomial in x with symbolic coefficients.
    pub fn sym_poly(&self, text: &str) -> CliResult<SymPoly> {
        let sym = self.eval(&parse_text(text)?)?;
        let terms = sym
            .0
            .into_iter()
            .map(|((k, names), r)| {
                let streams = names.into_iter().map(|(n, e)| (self.defs[&n].clone(), e)).collect();
                (k, CoeffTerm { scalar: r, streams })
            })
            .collect();
        Ok(SymPoly::new(terms))
    }

    /// The vector sequence with one coordinate per text.
    pub fn sym_seq(&self, coords: &[String]) -> CliResult<SymSeq> {
        if coords.is_empty() {
            return Err(CliError::Usage("at least one --g is required".into()));
        }
        Ok(SymSeq::new(coords.iter().map(|g| self.sym_poly(g)).collect::<CliResult<_>>()?))
    }

    /// `parse_seq_poly`: the scalar sequence `text` at precision `m`.
    pub fn seq_poly(&self, text: &str, m: usize) -> CliResult<StdPoly> {
        Ok(self.sym_poly(text)?.to_std(m, &self.field)?)
    }

    /// Exponents with a nonzero formal coefficient.
    pub fn support(&self, text: &str) -> CliResult<Vec<usize>> {
        let sym = self.eval(&parse_text(text)?)?;
        let mut ks: Vec<usize> = sym.0.keys().map(|(k, _)| *k).collect();
        ks.dedup();
        Ok(ks)
    }

    /// A point of `T_M^c`: comma-separated elements of F_q(t), reduced mod F_q[t].
    pub fn torus_point(&self, text: &str, m: usize) -> CliResult<TorusVec> {
        let coords = text
            .split(',')
            .map(|c| {
                let r = self.rational(c.trim())?;
                Ok(LaurentElem::from_rational(&r, m, &self.field)?.reduce())
            })
            .collect::<CliResult<Vec<TorusElem>>>()?;
        Ok(TorusVec::new(coords)?)
    }
}

fn base_pow(c: &RationalFF, e: u64, f: &FieldSpec) -> CliResult<RationalFF> {
    let d = c.num().degree().unwrap_or(0).max(c.den().degree().unwrap_or(0));
    if d.saturating_mul(e as usize) > MAX_DEGREE {
        return Err(too_big("degree in t", d.saturating_mul(e as usize)));
    }
    Ok(RationalFF::new(c.num().pow(e, f), c.den().pow(e, f), f)?)
}

/// `parse_ring_poly`: exact coefficients of `text` over `field`.
pub fn parse_ring_poly(text: &str, field: &FieldSpec) -> CliResult<RingPoly> {
    Env::new(field.clone()).ring_poly(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(spec: &str) -> Env {
        Env::new(parse_field(spec).unwrap())
    }

    fn digits(p: &RingPoly) -> Vec<u32> {
        p.coeffs().iter().map(|c| c.index()).collect()
    }

    #[test]
    fn ring_poly_examples() {
        assert_eq!(digits(&env("2").ring_poly("t^2+1").unwrap()), [1, 0, 1]);
        assert_eq!(digits(&env("3").ring_poly("2*t + 4").unwrap()), [1, 2]);
        let e4 = env("2^2");
        let p = e4.ring_poly("(u+1)*t").unwrap();
        assert!(p.coeff(0).is_zero());
        let f = &e4.field;
        assert_eq!(p.coeff(1), f.add(f.generator(), f.one()));
    }

    #[test]
    fn ring_poly_rejects_bad_symbols() {
        assert!(matches!(env("2").ring_poly("u*t"), Err(CliError::UnknownSymbol(_))));
        assert!(matches!(env("2").ring_poly("t^-1"), Err(CliError::Shape(_))));
        assert!(matches!(env("2").ring_poly("x"), Err(CliError::Shape(_))));
        assert!(matches!(env("2").ring_poly("a"), Err(CliError::UnknownSymbol(_))));
        assert!(matches!(env("2").ring_poly("t +"), Err(CliError::Syntax { .. })));
    }

    #[test]
    fn core_text_reparses() {
        let e = env("2^2");
        let f = &e.field;
        for i in 0..300u64 {
            let p = RingPoly::from_index(i * 7919 % 4096, f);
            assert_eq!(e.ring_poly(&p.to_text(f)).unwrap(), p);
        }
    }

    #[test]
    fn field_specs() {
        assert_eq!(parse_field("3").unwrap().q(), 3);
        assert_eq!(parse_field("2^2").unwrap().q(), 4);
        assert_eq!(parse_field("2^2:1,1,1").unwrap().q(), 4);
        assert!(parse_field("4").is_err());
        assert!(parse_field("2^2:1,0,1").is_err());
        assert!(parse_field("2^2:1,1").is_err());
        assert!(parse_field("two").is_err());
        let f = parse_field("3^2").unwrap();
        assert_eq!(parse_field(&field_text(&f)).unwrap(), f);
    }

    #[test]
    fn streams_roundtrip() {
        let mut e = env("2");
        e.define("a=sparse:squares").unwrap();
        e.define("b=rat:1/(t^2+t+1)").unwrap();
        e.define("c=rand:seed=9").unwrap();
        e.define("d=a").unwrap();
        assert_eq!(e.defs["d"], CoeffStream::SparsePowers { exponent: 2 });
        for s in e.defs.values() {
            assert_eq!(&e.stream(&stream_text(s, &e.field)).unwrap(), s);
        }
        assert!(e.define("t=sparse:squares").is_err());
        assert!(e.define("z=sparse:pow=1").is_err());
        assert!(e.define("z=nope").is_err());
    }

    #[test]
    fn seq_poly_cycle_example() {
        let e = env("2");
        let g = e.seq_poly("t^-2 * x^3", 2 + 3).unwrap();
        let f = &e.field;
        let one_plus_t = e.ring_poly("1+t").unwrap();
        let v = g.evaluate(&one_plus_t, 2, f).unwrap();
        assert_eq!(v.to_text(f), "t^-1+t^-2");
        assert!(e.seq_poly("0", 3).unwrap().degree().is_none());
    }

    #[test]
    fn seq_poly_with_streams_matches_direct_build() {
        let mut e = env("2");
        e.define("a=sparse:squares").unwrap();
        let g = e.seq_poly("a*x + t*a^2*x^2", 6).unwrap();
        let f = &e.field;
        let sq = CoeffStream::SparsePowers { exponent: 2 };
        let direct = SymPoly::new(vec![
            (1, CoeffTerm::stream(sq.clone())),
            (2, CoeffTerm { scalar: RationalFF::from_poly(RingPoly::t()), streams: vec![(sq, 2)] }),
        ])
        .to_std(6, f)
        .unwrap();
        assert_eq!(g, direct);
    }

    #[test]
    fn guards_stop_blowups() {
        let e = env("2");
        assert!(e.rational("t^100000").is_err());
        assert!(e.rational("((t+1)^4000)^4000").is_err());
        assert!(e.sym_poly("(x+t+1)^5000").is_err());
        assert!(matches!(e.rational("rat:1/0"), Err(CliError::Domain(_))));
    }

    #[test]
    fn additive_maps() {
        let e = env("2");
        assert!(e.additive_map("x + t*x^2").is_ok());
        assert!(e.additive_map("x^3").is_err());
        assert!(e.additive_map("x + 1").is_err());
    }
}
