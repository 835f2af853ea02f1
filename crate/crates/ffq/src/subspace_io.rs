//! Text format for F_p-subspaces of `T_M^c`.
//!
//! ```text
//! ffq-subspace v1 field=<p[^k:m0,…,mk]> c=<c> M=<M> rows=<r>
//! <hex row 1>
//! …
//! ```
//!
//! Each row lists the `c·M·k` F_p digits of one reduced row-echelon basis
//! vector in the order of `TorusVec::to_fp_digits`. Digits are written
//! with `w = ⌈log2 p⌉` bits each, most significant bit first, packed into
//! bytes from the high bit down, zero-padded to a whole byte and written as
//! lowercase hex. Reading rejects nonzero padding and digits `≥ p`, so a
//! file is accepted only in its canonical form.

use ffq_core::subtorus::{Ambient, FpSubspace};

use crate::bind::{field_text, parse_field};
use crate::error::{CliError, CliResult};

const MAGIC: &str = "ffq-subspace v1";

fn digit_width(p: u32) -> usize {
    (32 - (p - 1).leading_zeros()) as usize
}

fn pack(digits: &[u32], w: usize) -> Vec<u8> {
    let mut out = vec![0u8; (digits.len() * w).div_ceil(8)];
    let mut bit = 0;
    for &d in digits {
        for b in (0..w).rev() {
            if (d >> b) & 1 == 1 {
                out[bit / 8] |= 0x80 >> (bit % 8);
            }
            bit += 1;
        }
    }
    out
}

fn unpack(bytes: &[u8], n: usize, w: usize) -> Option<Vec<u32>> {
    if bytes.len() != (n * w).div_ceil(8) {
        return None;
    }
    let get = |bit: usize| (bytes[bit / 8] >> (7 - bit % 8)) & 1;
    let mut digits = Vec::with_capacity(n);
    let mut bit = 0;
    for _ in 0..n {
        let mut d = 0u32;
        for _ in 0..w {
            d = (d << 1) | get(bit) as u32;
            bit += 1;
        }
        digits.push(d);
    }
    (bit..bytes.len() * 8).all(|b| get(b) == 0).then_some(digits)
}

pub fn write_subspace(s: &FpSubspace) -> String {
    let a = s.ambient();
    let w = digit_width(a.field.p());
    let mut out = format!("{MAGIC} field={} c={} M={} rows={}\n", field_text(&a.field), a.c, a.m, s.rows().len());
    for r in s.rows() {
        out.push_str(&hex::encode(pack(r, w)));
        out.push('\n');
    }
    out
}

pub fn read_subspace(text: &str) -> CliResult<FpSubspace> {
    let bad = |m: &str| CliError::Format(format!("subspace file: {m}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty"))?;
    let rest = header.strip_prefix(MAGIC).ok_or_else(|| bad("missing header"))?;
    let mut field = None;
    let (mut c, mut m, mut rows) = (None, None, None);
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad("header entries must be key=value"))?;
        let num = || v.parse::<usize>().map_err(|_| bad(&format!("bad value for {k}")));
        match k {
            "field" => field = Some(parse_field(v)?),
            "c" => c = Some(num()?),
            "M" => m = Some(num()?),
            "rows" => rows = Some(num()?),
            _ => return Err(bad(&format!("unknown header key {k}"))),
        }
    }
    let (Some(field), Some(c), Some(m), Some(rows)) = (field, c, m, rows) else {
        return Err(bad("header needs field, c, M and rows"));
    };
    let ambient = Ambient::new(field, c, m)?;
    let n = ambient.n_digits();
    let p = ambient.field.p();
    let w = digit_width(p);
    let body: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    if body.len() != rows {
        return Err(bad(&format!("header says {rows} rows, found {}", body.len())));
    }
    let mut digit_rows = Vec::with_capacity(rows);
    for line in body {
        if line.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(bad("hex must be lowercase"));
        }
        let bytes = hex::decode(line).map_err(|_| bad("bad hex"))?;
        let digits = unpack(&bytes, n, w).ok_or_else(|| bad("row length or padding is wrong"))?;
        if digits.iter().any(|&d| d >= p) {
            return Err(bad("digit out of range"));
        }
        digit_rows.push(digits);
    }
    let s = FpSubspace::from_rows(ambient, digit_rows.clone())?;
    if s.rows() != digit_rows.as_slice() {
        return Err(bad("rows are not a reduced echelon basis"));
    }
    Ok(s)
}
