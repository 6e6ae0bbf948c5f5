//! Line-oriented metric files.
//!
//! ```text
//! # Schwarzschild exterior
//! dim = 4
//! coords = t, r, theta, phi
//! param M = 1.0
//! domain r = 3.0 .. 20.0
//! g[0][0] = -(1 - 2*M/r)
//! g[1][1] = 1/(1 - 2*M/r)
//! g[2][2] = r^2
//! g[3][3] = r^2 * sin(theta)^2
//! ```
//!
//! Directives may come in any order; `g` lines are parsed once every
//! parameter is known. Unset components are zero and `g[j][i]` mirrors
//! `g[i][j]`. Setting both is allowed only when the two expressions simplify
//! to the same tree, so `x*t` and `t*x` count as different.

use std::path::Path;

use thiserror::Error;

use super::catalog::catalog_metric;
use crate::expr::parse;
use crate::geometry::{MetricError, MetricSpec};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Metric {
        line: usize,
        #[source]
        source: MetricError,
    },
    #[error("{0}")]
    Invalid(#[from] MetricError),
    #[error("`{0}` is neither a catalog metric nor a readable file")]
    UnknownSource(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Syntax { line, message: message.into() }
}

fn number(line: usize, text: &str) -> Result<f64, LoadError> {
    let v: f64 = text.trim().parse().map_err(|_| syntax(line, format!("expected a number, found `{}`", text.trim())))?;
    if !v.is_finite() {
        return Err(syntax(line, "number must be finite"));
    }
    Ok(v)
}

fn identifier(line: usize, text: &str) -> Result<String, LoadError> {
    let t = text.trim();
    let ok = t.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(t.to_string())
    } else {
        Err(syntax(line, format!("`{t}` is not an identifier")))
    }
}

/// `g[i][j]` -> `(i, j)`
fn component_index(line: usize, lhs: &str) -> Result<(usize, usize), LoadError> {
    let bad = || syntax(line, format!("expected g[i][j], found `{lhs}`"));
    let rest = lhs.strip_prefix("g[").ok_or_else(bad)?;
    let (i, rest) = rest.split_once("][").ok_or_else(bad)?;
    let j = rest.strip_suffix(']').ok_or_else(bad)?;
    Ok((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
}

/// Parses metric file text. `name` labels the resulting spec.
pub fn parse_metric_file(name: &str, text: &str) -> Result<MetricSpec, LoadError> {
    let mut dim: Option<(usize, usize)> = None;
    let mut coords: Option<(usize, Vec<String>)> = None;
    let mut params: Vec<(usize, String, f64)> = Vec::new();
    let mut domains: Vec<(usize, String, f64, f64)> = Vec::new();
    let mut components: Vec<(usize, usize, usize, String)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (lhs, rhs) = content
            .split_once('=')
            .ok_or_else(|| syntax(line, "expected `key = value`"))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if rhs.is_empty() {
            return Err(syntax(line, "missing value after `=`"));
        }
        if lhs == "dim" {
            if dim.is_some() {
                return Err(syntax(line, "dim given twice"));
            }
            let d = rhs.parse().map_err(|_| syntax(line, format!("dim must be a positive integer, found `{rhs}`")))?;
            dim = Some((line, d));
        } else if lhs == "coords" {
            if coords.is_some() {
                return Err(syntax(line, "coords given twice"));
            }
            let names = rhs.split(',').map(|c| identifier(line, c)).collect::<Result<Vec<_>, _>>()?;
            coords = Some((line, names));
        } else if let Some(p) = lhs.strip_prefix("param ") {
            let p = identifier(line, p)?;
            if params.iter().any(|(_, q, _)| *q == p) {
                return Err(syntax(line, format!("parameter `{p}` declared twice")));
            }
            params.push((line, p, number(line, rhs)?));
        } else if let Some(c) = lhs.strip_prefix("domain ") {
            let c = identifier(line, c)?;
            let (lo, hi) = rhs
                .split_once("..")
                .ok_or_else(|| syntax(line, "expected `lo .. hi`"))?;
            domains.push((line, c, number(line, lo)?, number(line, hi)?));
        } else if lhs.starts_with("g[") {
            let (i, j) = component_index(line, lhs)?;
            components.push((line, i, j, rhs.to_string()));
        } else {
            return Err(syntax(line, format!("unknown directive `{lhs}`")));
        }
    }

    let (coord_line, coords) = coords.ok_or_else(|| syntax(text.lines().count().max(1), "missing `coords = ...`"))?;
    if let Some((line, d)) = dim {
        if d != coords.len() {
            return Err(LoadError::Metric {
                line,
                source: MetricError::DimensionMismatch { dim: d, coords: coords.len() },
            });
        }
    }
    let names: Vec<&str> = coords.iter().map(String::as_str).collect();
    let mut builder = MetricSpec::builder(name, &names);
    for (line, p, v) in &params {
        if names.contains(&p.as_str()) {
            return Err(syntax(*line, format!("parameter `{p}` shadows a coordinate")));
        }
        builder = builder.param(p, *v);
    }
    for (line, c, lo, hi) in &domains {
        if !names.contains(&c.as_str()) {
            return Err(LoadError::Metric { line: *line, source: MetricError::UnknownCoordinate(c.clone()) });
        }
        if !(lo < hi) {
            return Err(LoadError::Metric {
                line: *line,
                source: MetricError::EmptyInterval { coord: c.clone(), lo: *lo, hi: *hi },
            });
        }
        builder = builder.domain(c, *lo, *hi);
    }
    let param_names: Vec<&str> = params.iter().map(|(_, p, _)| p.as_str()).collect();
    for (line, i, j, text) in &components {
        let e = parse(text, &names, &param_names).map_err(|e| syntax(*line, e.to_string()))?;
        builder.assign(*i, *j, e).map_err(|source| LoadError::Metric { line: *line, source })?;
    }
    builder.build().map_err(|source| match source {
        MetricError::Empty => LoadError::Metric { line: coord_line, source },
        other => LoadError::Invalid(other),
    })
}

/// A catalog name, or else a path to a metric file.
pub fn load_metric(source: &str) -> Result<MetricSpec, LoadError> {
    if let Some(m) = catalog_metric(source) {
        return Ok(m);
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(LoadError::UnknownSource(source.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io { path: source.to_string(), source: e })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(source);
    parse_metric_file(name, &text)
}
