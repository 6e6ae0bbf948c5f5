use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{parse, simplify, Expr, ParseError, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("metric needs at least one coordinate")]
    Empty,
    #[error("dimension {dim} does not match {coords} coordinate names")]
    DimensionMismatch { dim: usize, coords: usize },
    #[error("duplicate coordinate name `{0}`")]
    DuplicateCoordinate(String),
    #[error("component g[{i}][{j}] is out of range for dimension {dim}")]
    IndexOutOfRange { i: usize, j: usize, dim: usize },
    #[error("g[{i}][{j}] and g[{j}][{i}] are assigned different expressions")]
    Asymmetric { i: usize, j: usize },
    #[error("g[{i}][{j}] assigned twice")]
    Reassigned { i: usize, j: usize },
    #[error("unknown coordinate `{0}` in domain")]
    UnknownCoordinate(String),
    #[error("empty sampling interval for `{coord}`: {lo} .. {hi}")]
    EmptyInterval { coord: String, lo: f64, hi: f64 },
    #[error("parameter `{0}` is used but never declared")]
    UndeclaredParameter(String),
    #[error("in g[{i}][{j}]: {source}")]
    Parse {
        i: usize,
        j: usize,
        #[source]
        source: ParseError,
    },
}

/// Sampling interval for one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Interval {
    fn default() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }
}

/// A symmetric metric `g_{ij}` given by closed-form expressions.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    name: String,
    coords: Vec<String>,
    components: Vec<Expr>,
    params: BTreeMap<String, f64>,
    domain: Vec<Interval>,
    signature: Option<Vec<i8>>,
}

impl MetricSpec {
    pub fn builder(name: &str, coords: &[&str]) -> MetricBuilder {
        MetricBuilder {
            name: name.to_string(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            dim: None,
            params: BTreeMap::new(),
            domain: BTreeMap::new(),
            assigned: BTreeMap::new(),
            signature: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn signature(&self) -> Option<&[i8]> {
        self.signature.as_deref()
    }

    /// `g_{ij}`; the lower triangle shares the upper triangle's expression.
    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[i * self.dim() + j]
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.component(i, j).is_zero()))
    }

    /// Point at the given coordinates with the metric's parameter defaults.
    pub fn point(&self, coords: Vec<f64>) -> Point {
        Point {
            coords,
            params: self.params.clone(),
        }
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    /// Replaces the default value of one parameter.
    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }
}

/// Incremental construction of a [`MetricSpec`].
#[derive(Debug, Clone)]
pub struct MetricBuilder {
    name: String,
    coords: Vec<String>,
    dim: Option<usize>,
    params: BTreeMap<String, f64>,
    domain: BTreeMap<String, Interval>,
    assigned: BTreeMap<(usize, usize), Expr>,
    signature: Option<Vec<i8>>,
}

impl MetricBuilder {
    /// Declared dimension; checked against the coordinate count on build.
    pub fn dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn domain(mut self, coord: &str, lo: f64, hi: f64) -> Self {
        self.domain.insert(coord.to_string(), Interval { lo, hi });
        self
    }

    pub fn signature(mut self, signs: Vec<i8>) -> Self {
        self.signature = Some(signs);
        self
    }

    /// Sets `g_{ij}` (and, by symmetry, `g_{ji}`).
    pub fn set(mut self, i: usize, j: usize, e: Expr) -> Result<Self, MetricError> {
        self.assign(i, j, e)?;
        Ok(self)
    }

    /// Parses and sets `g_{ij}`.
    pub fn set_str(self, i: usize, j: usize, text: &str) -> Result<Self, MetricError> {
        let params: Vec<String> = self.params.keys().cloned().collect();
        let e = parse(text, &self.coords, &params).map_err(|source| MetricError::Parse { i, j, source })?;
        self.set(i, j, e)
    }

    pub fn assign(&mut self, i: usize, j: usize, e: Expr) -> Result<(), MetricError> {
        let n = self.coords.len();
        if i >= n || j >= n {
            return Err(MetricError::IndexOutOfRange { i, j, dim: n });
        }
        if self.assigned.contains_key(&(i, j)) {
            return Err(MetricError::Reassigned { i, j });
        }
        if i != j {
            if let Some(other) = self.assigned.get(&(j, i)) {
                if simplify(other) != simplify(&e) {
                    return Err(MetricError::Asymmetric { i: j, j: i });
                }
            }
        }
        self.assigned.insert((i, j), e);
        Ok(())
    }

    pub fn build(self) -> Result<MetricSpec, MetricError> {
        let n = self.coords.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if let Some(dim) = self.dim {
            if dim != n {
                return Err(MetricError::DimensionMismatch { dim, coords: n });
            }
        }
        for (k, c) in self.coords.iter().enumerate() {
            if self.coords[..k].contains(c) {
                return Err(MetricError::DuplicateCoordinate(c.clone()));
            }
        }
        let mut components = vec![Expr::zero(); n * n];
        for (&(i, j), e) in &self.assigned {
            let (a, b) = (i.min(j), i.max(j));
            if (i, j) != (a, b) && self.assigned.contains_key(&(a, b)) {
                continue;
            }
            let e = simplify(e);
            for p in e.params() {
                if !self.params.contains_key(&p) {
                    return Err(MetricError::UndeclaredParameter(p));
                }
            }
            components[a * n + b] = e.clone();
            components[b * n + a] = e;
        }
        let mut domain = vec![Interval::default(); n];
        for (name, iv) in &self.domain {
            let k = self
                .coords
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| MetricError::UnknownCoordinate(name.clone()))?;
            if !(iv.lo < iv.hi) {
                return Err(MetricError::EmptyInterval {
                    coord: name.clone(),
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
            domain[k] = *iv;
        }
        Ok(MetricSpec {
            name: self.name,
            coords: self.coords,
            components,
            params: self.params,
            domain,
            signature: self.signature,
        })
    }
}

/// Contravariant vector field `ξ^i`.
#[derive(Debug, Clone)]
pub struct VectorFieldSpec {
    components: Vec<Expr>,
}

impl VectorFieldSpec {
    pub fn new(components: Vec<Expr>) -> Self {
        VectorFieldSpec { components }
    }

    pub fn zero(dim: usize) -> Self {
        VectorFieldSpec::new(vec![Expr::zero(); dim])
    }

    /// Coordinate basis field `∂_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut c = vec![Expr::zero(); dim];
        c[axis] = Expr::one();
        VectorFieldSpec::new(c)
    }

    /// Parses comma-separated component expressions against `metric`.
    pub fn parse(metric: &MetricSpec, text: &str) -> Result<Self, ParseError> {
        let params: Vec<String> = metric.params().keys().cloned().collect();
        let comps = text
            .split(',')
            .map(|part| parse(part.trim(), metric.coords(), &params).map(|e| simplify(&e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorFieldSpec::new(comps))
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_triangle_mirrors_upper() {
        let m = MetricSpec::builder("m", &["t", "x"])
            .set_str(0, 0, "-1")
            .unwrap()
            .set_str(0, 1, "x")
            .unwrap()
            .set_str(1, 1, "1")
            .unwrap()
            .build()
            .unwrap();
        assert!(m.component(1, 0).ptr_eq(m.component(0, 1)));
        assert!(!m.is_diagonal());
    }

    #[test]
    fn asymmetric_assignment_rejected() {
        let err = MetricSpec::builder("m", &["t", "x"])
            .set_str(0, 1, "x")
            .unwrap()
            .set_str(1, 0, "2*x")
            .unwrap_err();
        assert_eq!(err, MetricError::Asymmetric { i: 0, j: 1 });
    }

    #[test]
    fn consistent_duplicate_accepted() {
        let m = MetricSpec::builder("m", &["t", "x"])
            .set_str(0, 1, "x")
            .unwrap()
            .set_str(1, 0, "x")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(m.component(1, 0), &Expr::coord(1));
    }

    #[test]
    fn undeclared_parameter_is_a_parse_error() {
        let err = MetricSpec::builder("m", &["r"]).set_str(0, 0, "M*r").unwrap_err();
        assert!(matches!(err, MetricError::Parse { .. }));
    }
}
