//! Subcommand definitions and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use ffq_core::algebra::{divisor_ladder, FieldSpec, RingPoly};
use ffq_core::equidist::{
    ap_wd_scan, character_text, components_verdict, default_schedule, residues, weyl_sum_with, wd_verdict_with,
    ChunkRunner, FolnerBox, Verdict,
};
use ffq_core::intersective::{intersective_verdict_width, p1_check, IntersectiveVerdict, RootCertificate, DEFAULT_K, DEFAULT_WIDTH};
use ffq_core::polyseq::{decompose, derivational_degree, digit_sum, PolySource, SymSeq};
use ffq_core::recurrence::{large_return_set, partition_witness, return_ladder, to_f64, value_shifts, vdc_correlation, Measure};
use ffq_core::subtorus::{
    closure_from_counts, coset_counts, estimate_subgroup, phi_image_with_slack, EmpiricalControls, FpSubspace,
};
use ffq_core::torus::{TorusElem, TorusVec};

use crate::bind::{field_text, parse_field, Env};
use crate::config::RecurConfig;
use crate::error::{CliError, CliResult};
use crate::runner::Threads;
use crate::subspace_io::{read_subspace, write_subspace};

const ENV_HELP: &str = "\
Expressions: sums and products of integers, t, x, u (the generator of F_q over F_p),
stream names bound with --def, and rationals rat:num/den. Powers use ^; only t takes
negative powers. Example: --g \"a*x + t*a^2*x^2\" --def a=sparse:squares

Streams: rat:<rational>, sparse:squares, sparse:cubes, sparse:pow=<k>, rand:seed=<u64>.

Environment: FFQ_THREADS sets the worker count (default: available parallelism).

Exit codes: 0 success; 1 usage or syntax error; 2 domain error (an error JSON with a
\"code\" field is printed on standard output); intersective also uses 2 for a
non-intersective verdict and 3 for an inconclusive one.";

#[derive(Parser, Debug)]
#[command(name = "ffq", version, about = "Polynomial sequences over F_q(t): subtori, distribution, intersectivity and recurrence", after_help = ENV_HELP)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Field p, p^k or p^k:m0,…,mk (modulus coefficients, lowest first).
    #[arg(long, global = true, default_value = "2")]
    field: String,
    /// Torus precision: coefficients t^-1 … t^-M.
    #[arg(long = "M", id = "prec", value_name = "M", global = true)]
    m: Option<usize>,
    /// Box degree bound, or a comma-separated schedule.
    #[arg(long = "N", id = "box", value_name = "N", global = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Tolerance for distribution verdicts.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized choices (echoed in the output).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Binds a stream: name=stream. Repeatable.
    #[arg(long = "def", value_name = "NAME=STREAM", global = true)]
    defs: Vec<String>,
    /// Emit JSON lines instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the plot series of the command as CSV to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate g(n) mod F_q[t] at precision M.
    Eval {
        /// Sequence polynomial in x; repeat for vector sequences.
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        /// Points n; default is every n with deg n ≤ N.
        #[arg(long = "n")]
        n: Vec<String>,
    },
    /// Additive/separable decomposition of g at precision M.
    Decompose {
        #[arg(long = "g", required = true)]
        g: Vec<String>,
    },
    /// Derivational degree by the digit-sum rule.
    Ddeg {
        #[arg(long = "g", required = true)]
        g: Vec<String>,
    },
    /// Exact image of an additive map in T_M.
    PhiImage {
        /// Additive polynomial Σ m_j x^(p^j).
        #[arg(long)]
        map: String,
        /// Extra working precision.
        #[arg(long, default_value_t = 0)]
        slack: usize,
        /// Write the subspace to PATH.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Empirical orbit closure: subgroup estimate and coset weights over deg n ≤ N.
    Orbit {
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        #[arg(long, default_value_t = 6)]
        ladder: usize,
        #[arg(long, default_value_t = 3)]
        window: usize,
        /// Write the subgroup estimate to PATH.
        #[arg(long, value_name = "PATH")]
        save: Option<PathBuf>,
    },
    /// Weyl sums of one character along an N schedule.
    Weyl {
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        /// Character entry per coordinate (polynomials in t).
        #[arg(long = "w", required = true)]
        w: Vec<String>,
    },
    /// Well-distribution verdict over all characters of T_M^c.
    Wd {
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        /// Subgroup file for the finite-index test.
        #[arg(long, value_name = "PATH")]
        subgroup: Option<PathBuf>,
    },
    /// Per-residue distribution of g(mn + k).
    Components {
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        #[arg(long = "m")]
        m: String,
        /// Subgroup file; estimated from g when absent.
        #[arg(long, value_name = "PATH")]
        subgroup: Option<PathBuf>,
    },
    /// Well distribution along progressions mn + k.
    Apscan {
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        /// Moduli; default is the first two divisor-ladder steps.
        #[arg(long = "m")]
        m: Vec<String>,
        /// Offsets; default is every residue of the first modulus.
        #[arg(long = "k")]
        k: Vec<String>,
        #[arg(long, value_name = "PATH")]
        subgroup: Option<PathBuf>,
    },
    /// Bounded intersectivity certificate for q.
    Intersective {
        #[arg(long = "q")]
        q: String,
        /// Largest degree of the irreducibles π.
        #[arg(long = "B")]
        b: usize,
        /// Largest power of π.
        #[arg(long = "K", default_value_t = DEFAULT_K)]
        k: usize,
        /// Branch width guard.
        #[arg(long, default_value_t = DEFAULT_WIDTH)]
        width: usize,
    },
    /// Return-time statistics of a finite rotation, from a config file.
    Recur {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Search deg x, y, z ≤ N for x − y = q(z) inside one color.
    Partition {
        #[arg(long = "q")]
        q: String,
        /// deg-parity, const, c0 or random:r=<colors>.
        #[arg(long, default_value = "deg-parity")]
        coloring: String,
    },
    /// Shift correlations of u(n) = e(w·nα).
    Vdc {
        /// Stream or bound name for α.
        #[arg(long)]
        alpha: String,
        #[arg(long = "w", default_value = "1")]
        w: String,
        /// Shifts q(z), z ≠ root, deg z ≤ Z.
        #[arg(long = "q")]
        q: Option<String>,
        #[arg(long = "Z", default_value_t = 1)]
        z: usize,
        /// Explicit shifts.
        #[arg(long = "shift")]
        shift: Vec<String>,
    },
}

/// Where results go.
struct Out<'a> {
    json: bool,
    w: &'a mut dyn Write,
    first: bool,
}

impl Out<'_> {
    fn emit(&mut self, v: &Value) -> CliResult<()> {
        if self.json {
            writeln!(self.w, "{v}")?;
        } else {
            if !self.first {
                writeln!(self.w)?;
            }
            if let Value::Object(m) = v {
                for (k, x) in m {
                    match x {
                        Value::String(s) => writeln!(self.w, "{k}: {s}")?,
                        _ => writeln!(self.w, "{k}: {x}")?,
                    }
                }
            } else {
                writeln!(self.w, "{v}")?;
            }
        }
        self.first = false;
        Ok(())
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Floats as in the JSON output.
fn fnum(x: f64) -> String {
    Value::from(x).to_string()
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn measure_json(m: &Measure) -> Value {
    json!({ "exact": format!("{}/{}", m.numer(), m.denom()), "value": to_f64(m) })
}

fn cert_json(c: &RootCertificate, f: &FieldSpec) -> Value {
    json!({ "pi": c.pi.to_text(f), "root": c.root.to_text(f), "liftable": c.liftable, "exact": c.exact, "levels": c.levels() })
}

fn basis_json(s: &FpSubspace) -> Vec<String> {
    s.basis().iter().map(|x| x.to_text(&s.ambient().field)).collect()
}

/// `{c1=0, …}` when the subspace is cut out by vanishing coordinates.
fn coordinate_description(s: &FpSubspace) -> Option<String> {
    let a = s.ambient();
    let (k, n) = (a.field.k() as usize, a.n_digits());
    let used: Vec<bool> = (0..n).map(|i| s.rows().iter().any(|r| r[i] != 0)).collect();
    if s.dim() != used.iter().filter(|&&u| u).count() {
        return None;
    }
    let mut zero = Vec::new();
    for ci in 0..a.c {
        for slot in 0..a.m {
            let digits = (0..k).map(|j| (ci * a.m + slot) * k + j);
            let free = digits.clone().filter(|&d| used[d]).count();
            if free == 0 {
                zero.push(if a.c == 1 { format!("c{}=0", slot + 1) } else { format!("c{}[{}]=0", slot + 1, ci + 1) });
            } else if free != k {
                return None;
            }
        }
    }
    Some(format!("{{{}}}", zero.join(", ")))
}

fn subspace_json(s: &FpSubspace) -> Value {
    json!({
        "dim": s.dim(),
        "codim": s.codim(),
        "index": s.index().to_string(),
        "description": coordinate_description(s),
        "basis": basis_json(s),
    })
}

fn load_subgroup(path: &Path, env: &Env, c: usize, m: usize) -> CliResult<FpSubspace> {
    let s = read_subspace(&std::fs::read_to_string(path)?)?;
    let a = s.ambient();
    if a.field != env.field || a.c != c || a.m != m {
        return Err(CliError::Usage(format!(
            "subgroup file is for field {} c={} M={}, command uses field {} c={c} M={m}",
            field_text(&a.field),
            a.c,
            a.m,
            field_text(&env.field)
        )));
    }
    Ok(s)
}

struct Ctx<'a> {
    env: Env,
    common: &'a Common,
    runner: Threads,
}

impl Ctx<'_> {
    fn f(&self) -> &FieldSpec {
        &self.env.field
    }

    fn m_or(&self, d: usize) -> CliResult<usize> {
        let m = self.common.m.unwrap_or(d);
        if m == 0 {
            return Err(CliError::Usage("--M must be ≥ 1".into()));
        }
        Ok(m)
    }

    fn n_or(&self, d: usize) -> CliResult<usize> {
        match self.common.n.as_slice() {
            [] => Ok(d),
            [n] => Ok(*n),
            _ => Err(CliError::Usage("this command takes a single --N".into())),
        }
    }

    fn schedule(&self) -> Vec<usize> {
        if self.common.n.is_empty() {
            default_schedule(self.f())
        } else {
            self.common.n.clone()
        }
    }

    fn tol(&self) -> CliResult<f64> {
        let t = self.common.tol.unwrap_or(0.05);
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage("--tol must be a positive number".into()));
        }
        Ok(t)
    }

    fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        match &self.common.csv {
            Some(p) => write_csv(p, header, rows),
            None => Ok(()),
        }
    }
}

fn eval(ctx: &Ctx, g: &[String], ns: &[String], out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(4)?;
    let seq = ctx.env.sym_seq(g)?;
    let points: Vec<RingPoly> = if ns.is_empty() {
        FolnerBox::new(ctx.n_or(2)?, f)?.iter().collect()
    } else {
        ns.iter().map(|n| ctx.env.ring_poly(n)).collect::<CliResult<_>>()?
    };
    let top = points.iter().filter_map(RingPoly::degree).max().unwrap_or(0);
    let poly = seq.for_box(m, top, f)?;
    let mut rows = Vec::new();
    for n in &points {
        let v = poly.evaluate(n, m, f)?;
        out.emit(&json!({ "n": n.to_text(f), "value": v.to_text(f) }))?;
        rows.push(vec![n.to_text(f), v.to_text(f)]);
    }
    ctx.csv(&["n", "value"], &rows)?;
    Ok(0)
}

fn decompose_cmd(ctx: &Ctx, g: &[String], out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(6)?;
    let poly = ctx.env.sym_seq(g)?.std_at(m, f)?;
    let form = decompose(&poly, f);
    let parts: Vec<Value> = form
        .parts()
        .map(|(r, eta)| {
            let terms: Vec<Value> = eta.iter().map(|(j, a)| json!({ "j": j, "coeff": a.to_text(f) })).collect();
            json!({ "r": r, "terms": terms })
        })
        .collect();
    out.emit(&json!({
        "M": m,
        "g": poly.to_text(f),
        "alpha0": form.alpha0().to_text(f),
        "separable_exponents": form.separable_exponents(),
        "parts": parts,
    }))?;
    Ok(0)
}

fn ddeg_cmd(ctx: &Ctx, g: &[String], out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(8)?;
    let mut support = Vec::new();
    for gi in g {
        support.extend(ctx.env.support(gi)?);
    }
    support.sort_unstable();
    support.dedup();
    let formal = support.iter().map(|&k| digit_sum(k, f.p())).max().unwrap_or(0);
    let torus = match derivational_degree(&ctx.env.sym_seq(g)?.std_at(m, f)?, f) {
        Ok(d) => Some(d),
        Err(ffq_core::Error::ZeroPolynomial) => None,
        Err(e) => return Err(e.into()),
    };
    out.emit(&json!({ "ddeg": formal, "ddeg_mod_z": torus, "M": m, "support": support }))?;
    Ok(0)
}

fn phi_image_cmd(ctx: &Ctx, map: &str, slack: usize, path: Option<&Path>, out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(6)?;
    let spec = ctx.env.additive_map(map)?;
    let s = phi_image_with_slack(&spec, m, slack, f)?;
    if let Some(p) = path {
        std::fs::write(p, write_subspace(&s))?;
    }
    let mut v = json!({ "field": field_text(f), "map": map, "M": m });
    if let (Value::Object(a), Value::Object(b)) = (&mut v, subspace_json(&s)) {
        a.extend(b);
    }
    out.emit(&v)?;
    Ok(0)
}

fn orbit_cmd(ctx: &Ctx, g: &[String], ladder: usize, window: usize, save: Option<&Path>, out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(3)?;
    let n = ctx.n_or(8)?;
    let seq = ctx.env.sym_seq(g)?;
    let controls = EmpiricalControls { n_max: n, ladder_len: ladder, window };
    let (subgroup, parts) = estimate_subgroup(&seq, m, &controls, f)?;
    let bx = FolnerBox::new(n, f)?;
    let values = seq.for_box(m, n, f)?;
    let tally = ctx.runner.map_reduce(bx.size(), &|r| coset_counts(&values, &subgroup, r, f))?;
    let closure = closure_from_counts(subgroup, parts, tally, bx.size());
    if let Some(p) = save {
        std::fs::write(p, write_subspace(&closure.subgroup))?;
    }
    let cosets: Vec<Value> = closure
        .coset_reps
        .iter()
        .zip(&closure.counts)
        .zip(&closure.weights)
        .map(|((r, c), w)| json!({ "rep": r.to_text(f), "count": c, "weight": w }))
        .collect();
    let parts: Vec<Value> = closure
        .parts
        .iter()
        .map(|(r, e)| json!({ "r": r, "basis": basis_json(&e.subspace), "ladder_step": e.ladder_step, "modulus": e.modulus.to_text(f) }))
        .collect();
    out.emit(&json!({
        "M": m,
        "N": n,
        "heuristic": true,
        "subgroup": subspace_json(&closure.subgroup),
        "box_size": closure.box_size,
        "cosets": cosets,
        "parts": parts,
    }))?;
    let rows: Vec<Vec<String>> = closure
        .coset_reps
        .iter()
        .zip(&closure.counts)
        .zip(&closure.weights)
        .map(|((r, c), w)| vec![r.to_text(f), c.to_string(), fnum(*w)])
        .collect();
    ctx.csv(&["coset", "count", "weight"], &rows)?;
    Ok(0)
}

fn report(character: &str, ns: &[usize], moduli: &[f64], verdict: &str, witness: Option<String>) -> Value {
    json!({ "character": character, "N": ns, "modulus": moduli, "verdict": verdict, "witness": witness })
}

fn weyl_cmd(ctx: &Ctx, g: &[String], w: &[String], out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let seq = ctx.env.sym_seq(g)?;
    let w: Vec<RingPoly> = w.iter().map(|x| ctx.env.ring_poly(x)).collect::<CliResult<_>>()?;
    let tol = ctx.tol()?;
    let ns = ctx.schedule();
    let mut moduli = Vec::new();
    let mut rows = Vec::new();
    let ch = character_text(&w, f);
    for &n in &ns {
        let z = weyl_sum_with(&seq, &w, n, &ctx.runner, f)?;
        moduli.push(z.norm());
        rows.push(vec![ch.clone(), n.to_string(), fnum(z.re), fnum(z.im), fnum(z.norm())]);
    }
    let pass = moduli.last().is_some_and(|&x| x <= tol);
    let mut v = report(&ch, &ns, &moduli, if pass { "small" } else { "large" }, None);
    v["tol"] = tol.into();
    out.emit(&v)?;
    ctx.csv(&["character", "N", "re", "im", "modulus"], &rows)?;
    Ok(0)
}

fn wd_cmd(ctx: &Ctx, g: &[String], subgroup: Option<&Path>, out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(3)?;
    let seq = ctx.env.sym_seq(g)?;
    let sub = subgroup.map(|p| load_subgroup(p, &ctx.env, seq.dim(), m)).transpose()?;
    let tol = ctx.tol()?;
    let ns = ctx.schedule();
    let v = wd_verdict_with(&seq, m, &ns, tol, sub.as_ref(), &ctx.runner, f)?;
    let worst = v.witness.as_ref().and_then(|(w, _)| v.evidence.iter().find(|r| &r.character == w));
    let (ch, moduli) = match worst {
        Some(r) => (character_text(&r.character, f), r.moduli.clone()),
        None => {
            let best = v
                .evidence
                .iter()
                .max_by(|a, b| a.final_modulus().total_cmp(&b.final_modulus()));
            best.map_or((String::new(), Vec::new()), |r| (character_text(&r.character, f), r.moduli.clone()))
        }
    };
    let witness = v.witness.as_ref().map(|(w, _)| character_text(w, f));
    let mut line = report(&ch, &ns, &moduli, v.verdict.name(), witness);
    line["M"] = m.into();
    line["tol"] = tol.into();
    line["characters"] = v.evidence.len().into();
    if let Verdict::FiniteIndexUniform { subgroup, quotient } = &v.verdict {
        line["index"] = subgroup.index().to_string().into();
        line["quotient"] = quotient.iter().map(|(x, c)| json!({ "coset": x.to_text(f), "count": c })).collect::<Vec<_>>().into();
    }
    out.emit(&line)?;
    let mut rows = Vec::new();
    for r in &v.evidence {
        for (n, x) in r.ns.iter().zip(&r.moduli) {
            rows.push(vec![character_text(&r.character, f), n.to_string(), fnum(*x)]);
        }
    }
    ctx.csv(&["character", "N", "modulus"], &rows)?;
    Ok(0)
}

fn subgroup_for(ctx: &Ctx, seq: &SymSeq, path: Option<&Path>, m: usize, n: usize) -> CliResult<(FpSubspace, bool)> {
    match path {
        Some(p) => Ok((load_subgroup(p, &ctx.env, seq.dim(), m)?, false)),
        None => {
            let controls = EmpiricalControls { n_max: n, ..EmpiricalControls::default() };
            Ok((estimate_subgroup(seq, m, &controls, ctx.f())?.0, true))
        }
    }
}

fn components_cmd(ctx: &Ctx, g: &[String], modulus: &str, subgroup: Option<&Path>, out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(3)?;
    let n = ctx.n_or(6)?;
    let tol = ctx.tol()?;
    let seq = ctx.env.sym_seq(g)?;
    let md = ctx.env.ring_poly(modulus)?;
    let (sub, estimated) = subgroup_for(ctx, &seq, subgroup, m, n)?;
    let reports = components_verdict(&seq, &md, m, n, tol, &sub, &ctx.runner, f)?;
    for r in &reports {
        let cosets: Vec<Value> = r.cosets.iter().map(|(x, c)| json!({ "coset": x.to_text(f), "count": c })).collect();
        out.emit(&json!({
            "m": md.to_text(f),
            "k": r.k.to_text(f),
            "single_coset": r.single_coset,
            "uniform": r.uniform,
            "max_deviation": r.max_deviation,
            "cosets": cosets,
            "subgroup_estimated": estimated,
        }))?;
    }
    Ok(0)
}

fn apscan_cmd(ctx: &Ctx, g: &[String], ms: &[String], ks: &[String], subgroup: Option<&Path>, out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let m = ctx.m_or(3)?;
    let tol = ctx.tol()?;
    let ns = ctx.schedule();
    let seq = ctx.env.sym_seq(g)?;
    let moduli: Vec<RingPoly> = if ms.is_empty() {
        divisor_ladder(f, 2)?
    } else {
        ms.iter().map(|x| ctx.env.ring_poly(x)).collect::<CliResult<_>>()?
    };
    let offsets: Vec<RingPoly> = if ks.is_empty() {
        residues(&moduli[0], f)?
    } else {
        ks.iter().map(|x| ctx.env.ring_poly(x)).collect::<CliResult<_>>()?
    };
    let sub = subgroup.map(|p| load_subgroup(p, &ctx.env, seq.dim(), m)).transpose()?;
    let scan = ap_wd_scan(&seq, &moduli, &offsets, m, &ns, tol, sub.as_ref(), &ctx.runner, f)?;
    let entries: Vec<Value> = scan
        .ms
        .iter()
        .zip(&scan.entries)
        .flat_map(|(mi, row)| {
            scan.ks.iter().zip(row).map(move |(ki, &wd)| json!({ "m": mi.to_text(f), "k": ki.to_text(f), "wd": wd }))
        })
        .collect();
    out.emit(&json!({
        "M": m,
        "N": ns,
        "tol": tol,
        "all_wd": scan.all_wd,
        "full_space": scan.full_space,
        "routes_agree": scan.routes_agree,
        "entries": entries,
    }))?;
    Ok(0)
}

fn intersective_cmd(ctx: &Ctx, q: &str, b: usize, k: usize, width: usize, out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let qp = ctx.env.int_poly(q)?;
    let v = intersective_verdict_width(&qp, b, k, width, f)?;
    let mut line = json!({ "q": qp.to_text(f), "B": b, "K": k, "verdict": v.name(), "p1": p1_check(&qp) });
    let code = match &v {
        IntersectiveVerdict::NonIntersective { witness, pi, power } => {
            line["witness"] = witness.to_text(f).into();
            line["pi"] = pi.to_text(f).into();
            line["power"] = (*power).into();
            2
        }
        IntersectiveVerdict::CertifiedUpTo { certificates, .. } => {
            line["witness"] = Value::Null;
            line["certificates"] = certificates.iter().map(|c| cert_json(c, f)).collect::<Vec<_>>().into();
            0
        }
        IntersectiveVerdict::Inconclusive { pis, certificates } => {
            line["witness"] = Value::Null;
            line["undecided"] = pis.iter().map(|p| p.to_text(f)).collect::<Vec<_>>().into();
            line["certificates"] = certificates.iter().map(|c| cert_json(c, f)).collect::<Vec<_>>().into();
            3
        }
    };
    out.emit(&line)?;
    Ok(code)
}

fn recur_cmd(ctx: &Ctx, path: &Path, out: &mut Out) -> CliResult<i32> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let setup = RecurConfig::parse(&text)?.bind(base)?;
    let sys = &setup.system;
    let f = &setup.env.field;
    let cfg = &setup.config;
    out.emit(&json!({ "config": setup.echo, "mu_A": measure_json(&sys.measure()), "group_order": sys.group_order() }))?;
    let mut rows = Vec::new();
    for &n in &cfg.n {
        let ladder = return_ladder(sys, &setup.q, n, cfg.ladder, cfg.eps, &ctx.runner)?;
        let best = ladder
            .best_entry()
            .map(|e| json!({ "m": e.m.to_text(f), "k": e.k.to_text(f), "avg_return": measure_json(&e.value) }));
        out.emit(&json!({ "N": n, "threshold": ladder.threshold, "found": ladder.found(), "best": best, "tried": ladder.entries.len() }))?;
        for e in &ladder.entries {
            rows.push(vec![n.to_string(), e.m.to_text(f), e.k.to_text(f), fnum(to_f64(&e.value))]);
        }
    }
    if let Some(s) = &cfg.syndetic {
        let rep = large_return_set(sys, &setup.q, s.n, cfg.eps, s.f_deg)?;
        out.emit(&json!({
            "syndetic_N": rep.n,
            "threshold": rep.threshold,
            "return_set_size": rep.r_set.len(),
            "translates": rep.f_set.iter().map(|x| x.to_text(f)).collect::<Vec<_>>(),
            "uncovered": rep.uncovered,
            "covered": rep.covered(),
            "replayed": rep.replay(f)?,
        }))?;
    }
    ctx.csv(&["N", "m", "k", "avg_return"], &rows)?;
    Ok(0)
}

type Coloring = Box<dyn Fn(&RingPoly) -> usize>;

fn coloring_fn(spec: &str, seed: u64, f: &FieldSpec) -> CliResult<Coloring> {
    Ok(match spec {
        "deg-parity" => Box::new(|n: &RingPoly| n.degree().map_or(0, |d| d % 2)),
        "const" => Box::new(|_: &RingPoly| 0),
        "c0" => Box::new(|n: &RingPoly| n.coeff(0).index() as usize),
        _ => {
            let r = spec
                .strip_prefix("random:r=")
                .and_then(|r| r.parse::<u64>().ok())
                .filter(|&r| r >= 1)
                .ok_or_else(|| CliError::Usage(format!("unknown coloring \"{spec}\"")))?;
            let f = f.clone();
            Box::new(move |n: &RingPoly| {
                use rand_core::{RngCore, SeedableRng};
                let idx = n.to_index(&f);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                rng.set_word_pos(2 * idx as u128);
                (rng.next_u64() % r) as usize
            })
        }
    })
}

fn partition_cmd(ctx: &Ctx, q: &str, coloring: &str, out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let n = ctx.n_or(3)?;
    let seed = ctx.common.seed.unwrap_or(0);
    let qp = ctx.env.int_poly(q)?;
    let color = coloring_fn(coloring, seed, f)?;
    let w = partition_witness(&qp, &*color, n, f)?;
    let witness = w.map(|w| {
        json!({ "color": w.color, "x": w.x.to_text(f), "y": w.y.to_text(f), "z": w.z.to_text(f), "q(z)": qp.eval(&w.z, f).to_text(f) })
    });
    out.emit(&json!({ "q": qp.to_text(f), "N": n, "coloring": coloring, "seed": seed, "found": witness.is_some(), "witness": witness }))?;
    Ok(0)
}

fn vdc_cmd(ctx: &Ctx, alpha: &str, w: &str, q: Option<&str>, z: usize, shift: &[String], out: &mut Out) -> CliResult<i32> {
    let f = ctx.f();
    let n = ctx.n_or(6)?;
    let stream = ctx.env.stream(alpha)?;
    let w = ctx.env.ring_poly(w)?;
    if w.is_zero() {
        return Err(CliError::Usage("--w must be nonzero".into()));
    }
    let mut shifts: Vec<RingPoly> = shift.iter().map(|s| ctx.env.ring_poly(s)).collect::<CliResult<_>>()?;
    if let Some(q) = q {
        shifts.extend(value_shifts(&ctx.env.int_poly(q)?, z, f)?);
    }
    if shifts.is_empty() {
        return Err(CliError::Usage("give --q or --shift".into()));
    }
    let prec = w.degree().unwrap_or(0) + 1;
    let work = prec + n + 1;
    let a = ffq_core::torus::expand(&stream, work, f)?;
    let u = |x: &RingPoly| -> ffq_core::Result<Complex64> {
        let v: TorusElem = a.scalar_mul(x, f)?.truncate(prec)?;
        TorusVec::scalar(v).pairing(std::slice::from_ref(&w), f)
    };
    let rep = vdc_correlation(&u, &shifts, n, f)?;
    let mut rows = Vec::new();
    for c in &rep.correlations {
        out.emit(&json!({
            "shift": c.shift.to_text(f),
            "correlation": complex_json(c.value),
            "abs": c.value.norm(),
            "pairs": c.pairs,
            "boundary_fraction": c.boundary_fraction,
        }))?;
        rows.push(vec![c.shift.to_text(f), fnum(c.value.re), fnum(c.value.im), fnum(c.value.norm()), c.pairs.to_string()]);
    }
    out.emit(&json!({ "N": n, "average": complex_json(rep.average), "max_correlation": rep.max_correlation() }))?;
    ctx.csv(&["shift", "re", "im", "abs", "pairs"], &rows)?;
    Ok(0)
}

fn dispatch(cli: &Cli, out: &mut Out) -> CliResult<i32> {
    let c = &cli.common;
    let mut env = Env::new(parse_field(&c.field)?);
    for d in &c.defs {
        env.define(d)?;
    }
    let ctx = Ctx { env, common: c, runner: Threads::from_env()? };
    match &cli.cmd {
        Cmd::Eval { g, n } => eval(&ctx, g, n, out),
        Cmd::Decompose { g } => decompose_cmd(&ctx, g, out),
        Cmd::Ddeg { g } => ddeg_cmd(&ctx, g, out),
        Cmd::PhiImage { map, slack, out: path } => phi_image_cmd(&ctx, map, *slack, path.as_deref(), out),
        Cmd::Orbit { g, ladder, window, save } => orbit_cmd(&ctx, g, *ladder, *window, save.as_deref(), out),
        Cmd::Weyl { g, w } => weyl_cmd(&ctx, g, w, out),
        Cmd::Wd { g, subgroup } => wd_cmd(&ctx, g, subgroup.as_deref(), out),
        Cmd::Components { g, m, subgroup } => components_cmd(&ctx, g, m, subgroup.as_deref(), out),
        Cmd::Apscan { g, m, k, subgroup } => apscan_cmd(&ctx, g, m, k, subgroup.as_deref(), out),
        Cmd::Intersective { q, b, k, width } => intersective_cmd(&ctx, q, *b, *k, *width, out),
        Cmd::Recur { config } => recur_cmd(&ctx, config, out),
        Cmd::Partition { q, coloring } => partition_cmd(&ctx, q, coloring, out),
        Cmd::Vdc { alpha, w, q, z, shift } => vdc_cmd(&ctx, alpha, w, q.as_deref(), *z, shift, out),
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    let _ = writeln!(stdout, "{}", json!({ "error": e.kind().to_string(), "code": "usage" }));
                    1
                }
            };
        }
    };
    let mut out = Out { json: cli.common.json, w: stdout, first: true };
    match dispatch(&cli, &mut out) {
        Ok(code) => code,
        Err(CliError::BrokenPipe) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "ffq: {e}");
            let _ = writeln!(out.w, "{}", e.to_json());
            e.exit_code()
        }
    }
}
