//! Polynomial text format: one decimal coefficient per line, constant term
//! first, `#` starts a comment. Inline form: comma-separated coefficients.

use crate::error::{Error, Result};
use crate::zpoly::IntPoly;
use num_bigint::BigInt;

fn parse_coeff(s: &str, where_: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::FormatError(format!("{where_}: bad coefficient {:?}", s.trim())))
}

fn finish(c: Vec<BigInt>) -> Result<IntPoly> {
    if c.is_empty() {
        return Err(Error::FormatError("no coefficients".into()));
    }
    Ok(IntPoly::new(c))
}

pub fn parse_lines(text: &str) -> Result<IntPoly> {
    let mut c = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        c.push(parse_coeff(body, &format!("line {}", n + 1))?);
    }
    finish(c)
}

pub fn parse_inline(s: &str) -> Result<IntPoly> {
    let c = s
        .split(',')
        .enumerate()
        .map(|(i, t)| parse_coeff(t, &format!("coefficient {i}")))
        .collect::<Result<Vec<_>>>()?;
    finish(c)
}

pub fn emit_lines(h: &IntPoly) -> String {
    let mut s = String::new();
    if h.is_zero() {
        s.push_str("0\n");
    }
    for c in h.coeffs() {
        s.push_str(&c.to_string());
        s.push('\n');
    }
    s
}
