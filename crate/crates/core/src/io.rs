//! Text graph format and the JSON sidecar written next to generated instances.
//!
//! ```text
//! # optional comments
//! n m
//! u v w      (m lines, 0 ≤ u < v < n, w a positive decimal)
//! ```
//!
//! Writing emits no comments, edges in lexicographic order and weights in the
//! shortest decimal form that parses back to the same `f64`, so parsing and
//! re-writing a canonical file reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::graph::{Cut, WeightedGraph};

/// Largest vertex count accepted from a file; the dense matrix is `n²` floats.
pub const MAX_FILE_VERTICES: usize = 4096;

fn parse_count(tok: &str, line: usize, what: &str) -> Result<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(line, format!("{what} must be a nonnegative integer, got {tok:?}")));
    }
    tok.parse::<usize>()
        .map_err(|_| Error::parse(line, format!("{what} {tok:?} out of range")))
}

/// Digits with an optional fractional part: `12`, `0.5`. No sign, exponent or
/// bare dot.
fn parse_weight(tok: &str, line: usize) -> Result<f64> {
    let (int, frac) = match tok.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (tok, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return Err(Error::parse(line, format!("weight {tok:?} is not a positive decimal")));
    }
    let w: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("weight {tok:?} is not a number")))?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::parse(line, format!("weight {tok:?} must be positive and finite")));
    }
    Ok(w)
}

/// Parse the text graph format.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing \"n m\" header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::parse(hline, "header must be \"n m\""));
    }
    let n = parse_count(toks[0], hline, "vertex count")?;
    let m = parse_count(toks[1], hline, "edge count")?;
    if n == 0 {
        return Err(Error::parse(hline, "graph needs at least one vertex"));
    }
    if n > MAX_FILE_VERTICES {
        return Err(Error::parse(
            hline,
            format!("{n} vertices exceeds the limit of {MAX_FILE_VERTICES}"),
        ));
    }
    if m > n * (n - 1) / 2 {
        return Err(Error::parse(hline, format!("{m} edges cannot fit on {n} vertices")));
    }

    let mut g = WeightedGraph::empty(n);
    for k in 0..m {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("expected {m} edges, found {k}")))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(lno, "edge line must be \"u v w\""));
        }
        let u = parse_count(toks[0], lno, "vertex")?;
        let v = parse_count(toks[1], lno, "vertex")?;
        if !(u < v && v < n) {
            return Err(Error::parse(lno, format!("need 0 ≤ u < v < {n}, got ({u},{v})")));
        }
        let w = parse_weight(toks[2], lno)?;
        if g.weight(u, v) != 0.0 {
            return Err(Error::parse(lno, format!("duplicate edge ({u},{v})")));
        }
        g.set(u, v, w);
    }
    if let Some((lno, _)) = lines.next() {
        return Err(Error::parse(lno, format!("unexpected content after {m} edges")));
    }
    Ok(g)
}

/// Serialize in the canonical text form.
pub fn write_graph(g: &WeightedGraph) -> String {
    let edges: Vec<_> = g.edges().collect();
    let mut out = String::with_capacity(16 + edges.len() * 16);
    let _ = writeln!(out, "{} {}", g.n(), edges.len());
    for (u, v, w) in edges {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

/// Metadata written beside a generated graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSidecar {
    pub model: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub planted_cut: Option<Cut>,
    /// Oracle-computed stability threshold, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_star: Option<ExtReal>,
}

impl InstanceSidecar {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sidecar serializes");
        s.push('\n');
        s
    }

    /// Sidecar consistent with a graph: the planted cut, if any, has `n` entries.
    pub fn check_against(&self, g: &WeightedGraph) -> Result<()> {
        match &self.planted_cut {
            Some(c) if c.len() != g.n() => Err(Error::Dimension {
                expected: g.n(),
                actual: c.len(),
            }),
            _ => Ok(()),
        }
    }
}
