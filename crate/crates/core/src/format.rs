//! Text format for fault distributions.
//!
//! ```text
//! # ckpt-dist v1 t_start=0 t_end=4
//! 0,2
//! 1,1
//! 3,1
//! ```
//!
//! The header must be the first non-blank line. Later `#` lines and blank
//! lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::distribution::FaultDistribution;
use crate::error::{Error, Result};

const MAGIC: &str = "ckpt-dist v1";

pub fn parse_distribution(text: &str) -> Result<FaultDistribution> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `# ckpt-dist v1` header"))?;
    let (t_start, t_end) = parse_header(hline, header)?;

    let mut pairs = Vec::new();
    for (n, line) in lines {
        if line.starts_with('#') {
            continue;
        }
        let (t, c) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(n, format!("expected `<time>,<count>`, got `{line}`")))?;
        let t: u64 = t
            .trim()
            .parse()
            .map_err(|e| Error::parse(n, format!("bad time `{}`: {e}", t.trim())))?;
        let c: u64 = c
            .trim()
            .parse()
            .map_err(|e| Error::parse(n, format!("bad count `{}`: {e}", c.trim())))?;
        pairs.push((t, c));
    }
    FaultDistribution::new(pairs, t_start, t_end)
}

fn parse_header(line_no: usize, line: &str) -> Result<(u64, u64)> {
    let rest = line
        .strip_prefix('#')
        .map(str::trim_start)
        .and_then(|l| l.strip_prefix(MAGIC))
        .ok_or_else(|| Error::parse(line_no, format!("expected `# {MAGIC}` header")))?;
    let mut t_start = None;
    let mut t_end = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, format!("malformed header field `{field}`")))?;
        let value: u64 = value
            .parse()
            .map_err(|e| Error::parse(line_no, format!("bad `{key}` value: {e}")))?;
        match key {
            "t_start" => t_start = Some(value),
            "t_end" => t_end = Some(value),
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown header field `{key}`"),
                ))
            }
        }
    }
    match (t_start, t_end) {
        (Some(s), Some(e)) => Ok((s, e)),
        _ => Err(Error::parse(line_no, "header needs t_start and t_end")),
    }
}

/// Serializes `d`, emitting each string in `comments` as a `#` line after the header.
pub fn write_distribution(d: &FaultDistribution, comments: &[String]) -> String {
    let mut out = format!("# {MAGIC} t_start={} t_end={}\n", d.t_start(), d.t_end());
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for &(t, c) in d.entries() {
        let _ = writeln!(out, "{t},{c}");
    }
    out
}

pub fn read_distribution_file(path: impl AsRef<Path>) -> Result<FaultDistribution> {
    parse_distribution(&std::fs::read_to_string(path)?)
}
