//! Line-oriented text formats for programs (`.iqp`) and keys (`.iqpkey`).
//!
//! ```text
//! version 1
//! n 4
//! m 2
//! row 1100
//! row 0101
//! angle 1/8
//! angle 1/8
//! ```
//!
//! Key files carry `version`, `n`, then `secret <bits>` / `expected <value>`
//! pairs and optional `note <text>` lines. Blank lines and `#` comments are
//! ignored.

use std::fmt::Write as _;

use crate::bitlin::{BitMatrix, BitVector};
use crate::error::{Error, Result};

use super::{Angle, IqpProgram, SecretKey};

pub const FORMAT_VERSION: u32 = 1;

pub fn serialize_program(p: &IqpProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version {FORMAT_VERSION}");
    let _ = writeln!(out, "n {}", p.n());
    let _ = writeln!(out, "m {}", p.m());
    for row in p.chi().rows() {
        let _ = writeln!(out, "row {row}");
    }
    for a in p.angles() {
        let _ = writeln!(out, "angle {a}");
    }
    out
}

pub fn serialize_key(k: &SecretKey) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version {FORMAT_VERSION}");
    let _ = writeln!(out, "n {}", k.n());
    for (s, e) in k.iter() {
        let _ = writeln!(out, "secret {s}");
        let _ = writeln!(out, "expected {e}");
    }
    for note in k.notes() {
        let _ = writeln!(out, "note {note}");
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Yields `(line number, keyword, rest)` for meaningful lines.
fn fields(text: &str) -> impl Iterator<Item = (usize, &str, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        Some((i + 1, kw, rest.trim()))
    })
}

fn parse_usize(line: usize, kw: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| perr(line, format!("{kw}: expected a non-negative integer, got {v:?}")))
}

fn parse_bits(line: usize, v: &str, n: Option<usize>) -> Result<BitVector> {
    let n = n.ok_or_else(|| perr(line, "bitstring before `n` was declared"))?;
    let bits: BitVector = v.parse().map_err(|e: Error| perr(line, e.to_string()))?;
    if bits.len() != n {
        return Err(perr(line, format!("bitstring {v:?} has length {}, expected {n}", bits.len())));
    }
    Ok(bits)
}

fn check_version(line: usize, v: &str) -> Result<()> {
    if v != FORMAT_VERSION.to_string() {
        return Err(perr(line, format!("unsupported version {v:?}")));
    }
    Ok(())
}

pub fn parse_program(text: &str) -> Result<IqpProgram> {
    let mut version = false;
    let mut n = None;
    let mut m = None;
    let mut rows = Vec::new();
    let mut angles = Vec::new();
    let mut last_line = 0;
    for (line, kw, v) in fields(text) {
        last_line = line;
        match kw {
            "version" => {
                check_version(line, v)?;
                version = true;
            }
            "n" => {
                let val = parse_usize(line, kw, v)?;
                if val == 0 {
                    return Err(perr(line, "n must be at least 1"));
                }
                n = Some(val);
            }
            "m" => m = Some(parse_usize(line, kw, v)?),
            "row" => {
                let bits = parse_bits(line, v, n)?;
                if bits.is_zero() {
                    return Err(perr(line, "all-zero row"));
                }
                rows.push(bits);
            }
            "angle" => angles.push(v.parse::<Angle>().map_err(|e| perr(line, e.to_string()))?),
            other => return Err(perr(line, format!("unknown field {other:?}"))),
        }
    }
    if !version {
        return Err(perr(1, "missing `version` line"));
    }
    let n = n.ok_or_else(|| perr(last_line, "missing `n` line"))?;
    let m = m.ok_or_else(|| perr(last_line, "missing `m` line"))?;
    if rows.len() != m {
        return Err(perr(last_line, format!("declared m = {m} but found {} rows", rows.len())));
    }
    if angles.len() != m {
        return Err(perr(last_line, format!("declared m = {m} but found {} angles", angles.len())));
    }
    IqpProgram::new(BitMatrix::from_rows(n, rows)?, angles)
}

pub fn parse_key(text: &str) -> Result<SecretKey> {
    let mut version = false;
    let mut n = None;
    let mut secrets = Vec::new();
    let mut expected = Vec::new();
    let mut notes = Vec::new();
    let mut last_line = 0;
    for (line, kw, v) in fields(text) {
        last_line = line;
        match kw {
            "version" => {
                check_version(line, v)?;
                version = true;
            }
            "n" => n = Some(parse_usize(line, kw, v)?),
            "secret" => {
                if secrets.len() != expected.len() {
                    return Err(perr(line, "`secret` must be followed by its `expected` line"));
                }
                secrets.push(parse_bits(line, v, n)?);
            }
            "expected" => {
                if secrets.len() != expected.len() + 1 {
                    return Err(perr(line, "`expected` without a preceding `secret`"));
                }
                let val: f64 = v.parse().map_err(|_| perr(line, format!("bad number {v:?}")))?;
                expected.push(val);
            }
            "note" => notes.push(v.to_string()),
            other => return Err(perr(line, format!("unknown field {other:?}"))),
        }
    }
    if !version {
        return Err(perr(1, "missing `version` line"));
    }
    let n = n.ok_or_else(|| perr(last_line, "missing `n` line"))?;
    if secrets.len() != expected.len() {
        return Err(perr(last_line, "last `secret` has no `expected` line"));
    }
    Ok(SecretKey::new(n, secrets, expected)?.with_notes(notes))
}
