use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{EvalError, Expr, Point, Tape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Upper,
    Lower,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Upper => Variance::Lower,
            Variance::Lower => Variance::Upper,
        }
    }
}

/// Builds a variance signature from a compact string such as `"ulll"`.
pub fn signature(spec: &str) -> Vec<Variance> {
    spec.chars()
        .map(|c| match c {
            'u' | 'U' => Variance::Upper,
            'l' | 'L' => Variance::Lower,
            other => panic!("bad variance character `{other}`"),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("slot {slot} is out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot {slot} has variance {found:?}, expected {expected:?}")]
    VarianceMismatch {
        slot: usize,
        found: Variance,
        expected: Variance,
    },
    #[error("cannot contract slots {0} and {1}")]
    BadContraction(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Row-major offset of a multi-index.
pub fn offset(dim: usize, index: &[usize]) -> usize {
    index.iter().fold(0, |acc, &i| acc * dim + i)
}

/// All multi-indices of the given rank in lexicographic order.
pub fn multi_indices(dim: usize, rank: usize) -> MultiIndices {
    MultiIndices {
        dim,
        current: if dim == 0 && rank > 0 { None } else { Some(vec![0; rank]) },
    }
}

pub struct MultiIndices {
    dim: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for MultiIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut k = next.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            next[k] += 1;
            if next[k] < self.dim {
                self.current = Some(next);
                break;
            }
            next[k] = 0;
        }
        Some(out)
    }
}

/// Symbolic tensor field: one expression per component.
#[derive(Clone)]
pub struct TensorField {
    label: String,
    dim: usize,
    variance: Vec<Variance>,
    components: Vec<Expr>,
}

impl TensorField {
    pub fn new(label: &str, dim: usize, variance: Vec<Variance>, components: Vec<Expr>) -> Self {
        assert_eq!(
            components.len(),
            dim.pow(variance.len() as u32),
            "component count does not match dim^rank"
        );
        TensorField {
            label: label.to_string(),
            dim,
            variance,
            components,
        }
    }

    pub fn from_fn(
        label: &str,
        dim: usize,
        variance: Vec<Variance>,
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> Self {
        let components = multi_indices(dim, variance.len()).map(|ix| f(&ix)).collect();
        TensorField::new(label, dim, variance, components)
    }

    pub fn scalar(label: &str, dim: usize, value: Expr) -> Self {
        TensorField::new(label, dim, Vec::new(), vec![value])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn get(&self, index: &[usize]) -> &Expr {
        &self.components[offset(self.dim, index)]
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Number of components that are not the structural constant zero.
    pub fn nonzero_count(&self) -> usize {
        self.components.iter().filter(|e| !e.is_zero()).count()
    }

    /// Evaluates every component at `p`.
    pub fn eval(&self, p: &Point) -> Result<PointTensor, EvalError> {
        let tape = Tape::new(&self.components);
        let data = tape.eval(p)?;
        Ok(PointTensor::new(self.dim, self.variance.clone(), data))
    }
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("variance", &self.variance)
            .field("nonzero", &self.nonzero_count())
            .finish()
    }
}

/// Evaluates a symbolic field at one point.
pub fn eval_field(f: &TensorField, p: &Point) -> Result<PointTensor, EvalError> {
    f.eval(p)
}

/// Several fields compiled into one shared tape.
#[derive(Clone)]
pub struct CompiledFields {
    tape: Tape,
    shapes: Vec<(Vec<Variance>, usize)>,
    dim: usize,
}

impl CompiledFields {
    pub fn new(fields: &[&TensorField]) -> Self {
        let dim = fields.first().map_or(0, |f| f.dim());
        let tape = Tape::new(fields.iter().flat_map(|f| f.components.iter()));
        let shapes = fields
            .iter()
            .map(|f| (f.variance.clone(), f.components.len()))
            .collect();
        CompiledFields { tape, shapes, dim }
    }

    pub fn tape_len(&self) -> usize {
        self.tape.len()
    }

    pub fn eval(&self, p: &Point) -> Result<Vec<PointTensor>, EvalError> {
        let flat = self.tape.eval(p)?;
        let point = Arc::new(p.clone());
        let mut out = Vec::with_capacity(self.shapes.len());
        let mut at = 0;
        for (variance, len) in &self.shapes {
            let mut t = PointTensor::new(self.dim, variance.clone(), flat[at..at + len].to_vec());
            t.point = Some(point.clone());
            out.push(t);
            at += len;
        }
        Ok(out)
    }
}

/// Numeric tensor at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTensor {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
    point: Option<Arc<Point>>,
}

impl PointTensor {
    pub fn new(dim: usize, variance: Vec<Variance>, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim.pow(variance.len() as u32));
        PointTensor {
            dim,
            variance,
            data,
            point: None,
        }
    }

    pub fn zeros(dim: usize, variance: Vec<Variance>) -> Self {
        let len = dim.pow(variance.len() as u32);
        PointTensor::new(dim, variance, vec![0.0; len])
    }

    pub fn from_fn(dim: usize, variance: Vec<Variance>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let data = multi_indices(dim, variance.len()).map(|ix| f(&ix)).collect();
        PointTensor::new(dim, variance, data)
    }

    /// Kronecker delta `δ^i_j`.
    pub fn identity(dim: usize) -> Self {
        PointTensor::from_fn(dim, signature("ul"), |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn point(&self) -> Option<&Point> {
        self.point.as_deref()
    }

    pub fn at(&self, index: &[usize]) -> f64 {
        self.data[offset(self.dim, index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let k = offset(self.dim, index);
        self.data[k] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> PointTensor {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PointTensor {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    fn check_shape(&self, other: &PointTensor) -> Result<(), IndexError> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(IndexError::Shape(format!(
                "{:?} vs {:?}",
                self.variance, other.variance
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &PointTensor) -> Result<PointTensor, IndexError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    pub fn add(&self, other: &PointTensor) -> Result<PointTensor, IndexError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    /// `max |self - other|` over components.
    pub fn max_abs_diff(&self, other: &PointTensor) -> Result<f64, IndexError> {
        Ok(self.sub(other)?.max_abs())
    }

    fn check_slot(&self, slot: usize, expected: Variance) -> Result<(), IndexError> {
        let found = *self.variance.get(slot).ok_or(IndexError::SlotOutOfRange {
            slot,
            rank: self.rank(),
        })?;
        if found != expected {
            return Err(IndexError::VarianceMismatch {
                slot,
                found,
                expected,
            });
        }
        Ok(())
    }

    /// Applies a rank-2 metric-like tensor to one slot:
    /// `out[..a..] = Σ_s m[a][s] self[..s..]`.
    fn transform_slot(&self, slot: usize, m: &PointTensor, new: Variance) -> PointTensor {
        let n = self.dim;
        let mut variance = self.variance.clone();
        variance[slot] = new;
        PointTensor::from_fn(n, variance, |ix| {
            let mut src = ix.to_vec();
            (0..n)
                .map(|s| {
                    src[slot] = s;
                    m.at(&[ix[slot], s]) * self.at(&src)
                })
                .sum()
        })
    }

    /// Lowers an upper slot with `g_{ij}`.
    pub fn lower(&self, slot: usize, g: &PointTensor) -> Result<PointTensor, IndexError> {
        self.check_slot(slot, Variance::Upper)?;
        Ok(self.transform_slot(slot, g, Variance::Lower))
    }

    /// Raises a lower slot with `g^{ij}`.
    pub fn raise(&self, slot: usize, g_inv: &PointTensor) -> Result<PointTensor, IndexError> {
        self.check_slot(slot, Variance::Lower)?;
        Ok(self.transform_slot(slot, g_inv, Variance::Upper))
    }

    /// Sums an upper slot against a lower slot.
    pub fn contract(&self, a: usize, b: usize) -> Result<PointTensor, IndexError> {
        if a == b || a >= self.rank() || b >= self.rank() {
            return Err(IndexError::BadContraction(a, b));
        }
        if self.variance[a] == self.variance[b] {
            return Err(IndexError::BadContraction(a, b));
        }
        let n = self.dim;
        let keep: Vec<usize> = (0..self.rank()).filter(|&s| s != a && s != b).collect();
        let variance = keep.iter().map(|&s| self.variance[s]).collect();
        Ok(PointTensor::from_fn(n, variance, |ix| {
            let mut full = vec![0; self.rank()];
            for (k, &s) in keep.iter().enumerate() {
                full[s] = ix[k];
            }
            (0..n)
                .map(|t| {
                    full[a] = t;
                    full[b] = t;
                    self.at(&full)
                })
                .sum()
        }))
    }

    /// Contracts two same-variance slots through a metric (`g^{ab}` for lower
    /// slots, `g_{ab}` for upper slots).
    pub fn trace_with(&self, a: usize, b: usize, metric: &PointTensor) -> Result<PointTensor, IndexError> {
        if a == b || a >= self.rank() || b >= self.rank() || self.variance[a] != self.variance[b] {
            return Err(IndexError::BadContraction(a, b));
        }
        let n = self.dim;
        let keep: Vec<usize> = (0..self.rank()).filter(|&s| s != a && s != b).collect();
        let variance = keep.iter().map(|&s| self.variance[s]).collect();
        Ok(PointTensor::from_fn(n, variance, |ix| {
            let mut full = vec![0; self.rank()];
            for (k, &s) in keep.iter().enumerate() {
                full[s] = ix[k];
            }
            let mut acc = 0.0;
            for p in 0..n {
                for q in 0..n {
                    let w = metric.at(&[p, q]);
                    if w != 0.0 {
                        full[a] = p;
                        full[b] = q;
                        acc += w * self.at(&full);
                    }
                }
            }
            acc
        }))
    }

    /// Reorders slots: output slot `k` is input slot `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> PointTensor {
        assert_eq!(perm.len(), self.rank());
        let variance = perm.iter().map(|&s| self.variance[s]).collect();
        PointTensor::from_fn(self.dim, variance, |ix| {
            let mut src = vec![0; ix.len()];
            for (k, &s) in perm.iter().enumerate() {
                src[s] = ix[k];
            }
            self.at(&src)
        })
    }

    /// Non-zero components as `(index, value)` in lexicographic order.
    pub fn nonzero_entries(&self, threshold: f64) -> Vec<(Vec<usize>, f64)> {
        multi_indices(self.dim, self.rank())
            .zip(&self.data)
            .filter(|(_, v)| v.abs() > threshold)
            .map(|(ix, v)| (ix, *v))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_metric() -> (PointTensor, PointTensor) {
        let g = PointTensor::new(
            2,
            signature("ll"),
            vec![-2.0, 0.5, 0.5, 3.0],
        );
        let det = -2.0 * 3.0 - 0.25;
        let g_inv = PointTensor::new(2, signature("uu"), vec![3.0 / det, -0.5 / det, -0.5 / det, -2.0 / det]);
        (g, g_inv)
    }

    #[test]
    fn lower_then_raise_is_identity() {
        let (g, g_inv) = sample_metric();
        let v = PointTensor::new(2, signature("ul"), vec![1.0, -2.0, 0.25, 7.0]);
        let back = v.lower(0, &g).unwrap().raise(0, &g_inv).unwrap();
        assert!(back.max_abs_diff(&v).unwrap() < 1e-12);
    }

    #[test]
    fn trace_of_delta_is_dimension() {
        let d = PointTensor::identity(4);
        assert_eq!(d.contract(0, 1).unwrap().data(), &[4.0]);
    }

    #[test]
    fn variance_mismatch_reported() {
        let (g, _) = sample_metric();
        let err = g.lower(0, &g).unwrap_err();
        assert!(matches!(err, IndexError::VarianceMismatch { slot: 0, .. }));
        assert!(matches!(g.contract(0, 1), Err(IndexError::BadContraction(0, 1))));
    }

    #[test]
    fn multi_index_order_is_lexicographic() {
        let all: Vec<_> = multi_indices(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(multi_indices(3, 0).count(), 1);
    }

    #[test]
    fn permute_swaps_slots() {
        let t = PointTensor::new(2, signature("ll"), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(t.permute(&[1, 0]).data(), &[1.0, 3.0, 2.0, 4.0]);
    }
}
