//! Instance files.
//!
//! ```toml
//! name = "example"
//! num_variables = 3
//! quadratic = [[0, 1, 1.0], [1, 2, -1.0]]
//!
//! [linear]
//! "0" = 0.5
//! ```
//!
//! Semantic violations are reported with the 1-based line of the offending
//! entry.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::ising::{IsingProblem, MAX_INDEXED_VARIABLES};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    name: Option<String>,
    num_variables: Spanned<i64>,
    #[serde(default)]
    linear: BTreeMap<Spanned<String>, Spanned<f64>>,
    #[serde(default)]
    quadratic: Vec<Spanned<(i64, i64, f64)>>,
}

pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

fn toml_error(text: &str, err: toml::de::Error) -> Error {
    let line = err.span().map(|s| line_of(text, s.start));
    Error::parse(line, err.message().trim().to_string())
}

pub fn parse_instance(text: &str) -> Result<IsingProblem> {
    let raw: RawInstance = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let at = |span: std::ops::Range<usize>| Some(line_of(text, span.start));

    let n = *raw.num_variables.get_ref();
    if n <= 0 || n as usize > MAX_INDEXED_VARIABLES {
        return Err(Error::parse(
            at(raw.num_variables.span()),
            format!("num_variables must be in 1..={MAX_INDEXED_VARIABLES}, got {n}"),
        ));
    }
    let n = n as usize;

    let mut linear = Vec::with_capacity(raw.linear.len());
    let mut seen_linear = BTreeMap::new();
    for (key, value) in &raw.linear {
        let line = at(key.span());
        let idx: usize = key
            .get_ref()
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("linear key {:?} is not an index", key.get_ref())))?;
        if idx >= n {
            return Err(Error::parse(line, format!("linear index {idx} out of range for {n} variables")));
        }
        if !value.get_ref().is_finite() {
            return Err(Error::parse(line, format!("linear bias on {idx} is not finite")));
        }
        if seen_linear.insert(idx, ()).is_some() {
            return Err(Error::parse(line, format!("duplicate linear index {idx}")));
        }
        linear.push((idx, *value.get_ref()));
    }

    let mut quadratic = Vec::with_capacity(raw.quadratic.len());
    let mut seen = BTreeMap::new();
    for entry in &raw.quadratic {
        let line = at(entry.span());
        let (i, j, w) = *entry.get_ref();
        if i < 0 || j < 0 || i as usize >= n || j as usize >= n {
            return Err(Error::parse(line, format!("coupler ({i}, {j}) out of range for {n} variables")));
        }
        if i >= j {
            return Err(Error::parse(line, format!("coupler ({i}, {j}) must satisfy i < j")));
        }
        if !w.is_finite() {
            return Err(Error::parse(line, format!("coupler ({i}, {j}) is not finite")));
        }
        if seen.insert((i, j), ()).is_some() {
            return Err(Error::parse(line, format!("duplicate coupler ({i}, {j})")));
        }
        quadratic.push(((i as usize, j as usize), w));
    }

    let problem = IsingProblem::new(n, linear, quadratic)?;
    Ok(match raw.name {
        Some(name) => problem.with_name(name),
        None => problem,
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<IsingProblem> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

/// Serializes to the instance format. Reals use shortest round-trip form.
pub fn to_instance_string(problem: &IsingProblem) -> String {
    let mut out = String::new();
    if let Some(name) = problem.name() {
        let _ = writeln!(out, "name = {}", toml::Value::String(name.to_string()));
    }
    let _ = writeln!(out, "num_variables = {}", problem.num_variables());
    out.push_str("quadratic = [\n");
    for (&(i, j), &w) in problem.quadratic() {
        let _ = writeln!(out, "    [{i}, {j}, {}],", float(w));
    }
    out.push_str("]\n");
    if !problem.linear().is_empty() {
        out.push_str("\n[linear]\n");
        for (&i, &h) in problem.linear() {
            let _ = writeln!(out, "\"{i}\" = {}", float(h));
        }
    }
    out
}

fn float(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}
