//! Levi-Civita connection and curvature fields of a metric.
//!
//! Sign conventions, with `R(U,V) = ∇_U∇_V − ∇_V∇_U − ∇_[U,V]`:
//!
//! * curvature operator `Rm^h_{jkl}` with `R(∂_k,∂_l)∂_j = Rm^h_{jkl} ∂_h`,
//!   i.e. `Rm^h_{jkl} = ∂_kΓ^h_{jl} − ∂_lΓ^h_{jk} + Γ^h_{ks}Γ^s_{jl} − Γ^h_{ls}Γ^s_{jk}`;
//! * Riemann tensor `R_{ijkl} = g(R(∂_i,∂_j)∂_k, ∂_l) = −g_{ih} Rm^h_{jkl}`,
//!   and `R^h_{jkl} = g^{hi} R_{ijkl}`;
//! * Ricci `R_{jk} = g^{il} R_{ijkl} = Rm^h_{jhk}`, positive on spheres and on
//!   de Sitter space.
//!
//! With these choices `∇_h R^h_{jkl} = ∇_l R_{jk} − ∇_k R_{jl}`, and a space of
//! constant curvature has `R_{ijkl} = (R/12)(g_{il}g_{jk} − g_{ik}g_{jl})` in
//! four dimensions.

use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use super::metric::{MetricSpec, VectorFieldSpec};
use super::tensor::{multi_indices, signature, CompiledFields, PointTensor, TensorField, Variance};
use crate::expr::{Differentiator, Expr, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("{what} requires dimension at least {min}, metric has {dim}")]
    DimensionTooSmall { what: &'static str, min: usize, dim: usize },
    #[error("{what} requires dimension {expected}, metric has {dim}")]
    DimensionMismatch { what: &'static str, expected: usize, dim: usize },
    #[error("symbolic inverse supports dimension up to 5, metric has {0}")]
    InverseTooLarge(usize),
    #[error("{0} requires an all-lower tensor")]
    NotCovariant(&'static str),
}

/// Symbolic curvature fields of one metric, built on first use and cached.
pub struct Geometry {
    metric: MetricSpec,
    diff: Mutex<Differentiator>,
    g: TensorField,
    g_inv: TensorField,
    christoffel: OnceLock<TensorField>,
    curvature_operator: OnceLock<TensorField>,
    riemann: OnceLock<TensorField>,
    riemann_mixed: OnceLock<TensorField>,
    ricci: OnceLock<TensorField>,
    scalar: OnceLock<TensorField>,
    basics: OnceLock<CompiledFields>,
}

impl Geometry {
    pub fn new(metric: MetricSpec) -> Result<Self, GeometryError> {
        let n = metric.dim();
        if n > 5 {
            return Err(GeometryError::InverseTooLarge(n));
        }
        let g = TensorField::new("metric", n, signature("ll"), metric.components().to_vec());
        let g_inv = inverse_metric(&metric);
        let mut diff = Differentiator::new();
        seed_inverse_derivatives(&mut diff, &g, &g_inv);
        Ok(Geometry {
            metric,
            diff: Mutex::new(diff),
            g,
            g_inv,
            christoffel: OnceLock::new(),
            curvature_operator: OnceLock::new(),
            riemann: OnceLock::new(),
            riemann_mixed: OnceLock::new(),
            ricci: OnceLock::new(),
            scalar: OnceLock::new(),
            basics: OnceLock::new(),
        })
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `g_{ij}` as a field.
    pub fn metric_tensor(&self) -> &TensorField {
        &self.g
    }

    /// `g^{ij}`: adjugate over determinant.
    pub fn inverse_metric(&self) -> &TensorField {
        &self.g_inv
    }

    fn with_diff<R>(&self, f: impl FnOnce(&mut Differentiator) -> R) -> R {
        let mut guard = self.diff.lock().unwrap_or_else(|e| e.into_inner());
        f(&mut guard)
    }

    /// `∂_m` of every component, appended as a trailing lower index.
    pub fn partial(&self, f: &TensorField) -> TensorField {
        let n = self.dim();
        let mut variance = f.variance().to_vec();
        variance.push(Variance::Lower);
        let comps = self.with_diff(|d| {
            f.components()
                .iter()
                .flat_map(|e| (0..n).map(|m| d.diff(e, m)).collect::<Vec<_>>())
                .collect()
        });
        TensorField::new(&format!("d{}", f.label()), n, variance, comps)
    }

    /// `Γ^h_{ij} = ½ g^{hs}(∂_i g_{sj} + ∂_j g_{si} − ∂_s g_{ij})`.
    pub fn christoffel(&self) -> &TensorField {
        self.christoffel.get_or_init(|| {
            let n = self.dim();
            let dg = self.partial(&self.g);
            let d = |a: usize, b: usize, c: usize| dg.get(&[a, b, c]).clone();
            let half = Expr::rational(1, 2);
            let mut first_kind = vec![Expr::zero(); n * n * n];
            for s in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let v = Expr::mul(
                            half.clone(),
                            Expr::sub(Expr::add(d(s, j, i), d(s, i, j)), d(i, j, s)),
                        );
                        first_kind[(s * n + i) * n + j] = v.clone();
                        first_kind[(s * n + j) * n + i] = v;
                    }
                }
            }
            let mut comps = vec![Expr::zero(); n * n * n];
            for h in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let v = Expr::sum((0..n).map(|s| {
                            Expr::mul(self.g_inv.get(&[h, s]).clone(), first_kind[(s * n + i) * n + j].clone())
                        }));
                        comps[(h * n + i) * n + j] = v.clone();
                        comps[(h * n + j) * n + i] = v;
                    }
                }
            }
            TensorField::new("christoffel", n, signature("ull"), comps)
        })
    }

    /// `Rm^h_{jkl}`, the component form of the curvature operator
    /// `R(∂_k,∂_l)∂_j`; this is what acts on tensors in the Ricci identity.
    pub fn curvature_operator(&self) -> &TensorField {
        self.curvature_operator.get_or_init(|| {
            let n = self.dim();
            let gamma = self.christoffel();
            let dgamma = self.partial(gamma);
            let ga = |h: usize, i: usize, j: usize| gamma.get(&[h, i, j]).clone();
            let mut comps = vec![Expr::zero(); n.pow(4)];
            for h in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in (k + 1)..n {
                            let deriv = Expr::sub(
                                dgamma.get(&[h, j, l, k]).clone(),
                                dgamma.get(&[h, j, k, l]).clone(),
                            );
                            let quad = Expr::sum((0..n).map(|s| {
                                Expr::sub(
                                    Expr::mul(ga(h, k, s), ga(s, j, l)),
                                    Expr::mul(ga(h, l, s), ga(s, j, k)),
                                )
                            }));
                            let v = Expr::add(deriv, quad);
                            comps[((h * n + j) * n + l) * n + k] = Expr::neg(v.clone());
                            comps[((h * n + j) * n + k) * n + l] = v;
                        }
                    }
                }
            }
            TensorField::new("curvature_operator", n, signature("ulll"), comps)
        })
    }

    /// `R_{ijkl} = −g_{ih} Rm^h_{jkl}`.
    pub fn riemann(&self) -> &TensorField {
        self.riemann.get_or_init(|| {
            let n = self.dim();
            let rm = self.curvature_operator();
            let mut comps = vec![Expr::zero(); n.pow(4)];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in (k + 1)..n {
                            let v = Expr::neg(Expr::sum((0..n).map(|h| {
                                Expr::mul(self.g.get(&[i, h]).clone(), rm.get(&[h, j, k, l]).clone())
                            })));
                            comps[((i * n + j) * n + l) * n + k] = Expr::neg(v.clone());
                            comps[((i * n + j) * n + k) * n + l] = v;
                        }
                    }
                }
            }
            TensorField::new("riemann", n, signature("llll"), comps)
        })
    }

    /// `R^h_{jkl} = g^{hi} R_{ijkl} = −Rm^h_{jkl}`.
    pub fn riemann_mixed(&self) -> &TensorField {
        self.riemann_mixed.get_or_init(|| {
            let rm = self.curvature_operator();
            let comps = rm.components().iter().map(|e| Expr::neg(e.clone())).collect();
            TensorField::new("riemann_mixed", self.dim(), signature("ulll"), comps)
        })
    }

    /// `R_{jk} = Rm^h_{jhk}`.
    pub fn ricci(&self) -> &TensorField {
        self.ricci.get_or_init(|| {
            let n = self.dim();
            let rm = self.curvature_operator();
            TensorField::from_fn("ricci", n, signature("ll"), |ix| {
                Expr::sum((0..n).map(|h| rm.get(&[h, ix[0], h, ix[1]]).clone()))
            })
        })
    }

    /// `R = g^{jk} R_{jk}`.
    pub fn scalar_curvature(&self) -> &TensorField {
        self.scalar.get_or_init(|| {
            let n = self.dim();
            let ric = self.ricci();
            let r = Expr::sum(multi_indices(n, 2).map(|ix| {
                Expr::mul(self.g_inv.get(&ix).clone(), ric.get(&ix).clone())
            }));
            TensorField::scalar("scalar_curvature", n, r)
        })
    }

    /// Conformal curvature (totally traceless part of Riemann), in the same
    /// sign convention as [`Geometry::riemann`]:
    ///
    /// `C_{ijkl} = R_{ijkl} − (g_{il}R_{jk} − g_{ik}R_{jl} + g_{jk}R_{il} − g_{jl}R_{ik})/(n−2)
    ///            + R (g_{il}g_{jk} − g_{ik}g_{jl})/((n−1)(n−2))`.
    pub fn weyl(&self) -> Result<TensorField, GeometryError> {
        let n = self.dim();
        if n < 3 {
            return Err(GeometryError::DimensionTooSmall { what: "Weyl tensor", min: 3, dim: n });
        }
        let riem = self.riemann();
        let ric = self.ricci();
        let r = self.scalar_curvature().components()[0].clone();
        let g = |a: usize, b: usize| self.g.get(&[a, b]).clone();
        let rc = |a: usize, b: usize| ric.get(&[a, b]).clone();
        let c1 = Expr::rational(1, n as i64 - 2);
        let c2 = Expr::mul(Expr::rational(1, (n as i64 - 1) * (n as i64 - 2)), r);
        Ok(TensorField::from_fn("weyl", n, signature("llll"), |ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let ricci_part = Expr::sum([
                Expr::mul(g(i, l), rc(j, k)),
                Expr::neg(Expr::mul(g(i, k), rc(j, l))),
                Expr::mul(g(j, k), rc(i, l)),
                Expr::neg(Expr::mul(g(j, l), rc(i, k))),
            ]);
            let metric_part = Expr::sub(Expr::mul(g(i, l), g(j, k)), Expr::mul(g(i, k), g(j, l)));
            Expr::add(
                Expr::sub(riem.get(ix).clone(), Expr::mul(c1.clone(), ricci_part)),
                Expr::mul(c2.clone(), metric_part),
            )
        }))
    }

    /// Covariant derivative with a new trailing lower index:
    /// `∇_m T = ∂_m T + Σ_upper Γ·T − Σ_lower Γ·T`.
    pub fn covariant_derivative(&self, f: &TensorField) -> TensorField {
        let n = self.dim();
        let gamma = self.christoffel();
        let partial = self.partial(f);
        let rank = f.rank();
        let mut variance = f.variance().to_vec();
        variance.push(Variance::Lower);
        TensorField::from_fn(&format!("nabla_{}", f.label()), n, variance, |ix| {
            let m = ix[rank];
            let base = &ix[..rank];
            let mut terms = vec![partial.get(ix).clone()];
            let mut src = base.to_vec();
            for (slot, var) in f.variance().iter().enumerate() {
                for s in 0..n {
                    src[slot] = s;
                    let t = f.get(&src);
                    if t.is_zero() {
                        continue;
                    }
                    let term = match var {
                        Variance::Upper => Expr::mul(gamma.get(&[base[slot], m, s]).clone(), t.clone()),
                        Variance::Lower => Expr::neg(Expr::mul(gamma.get(&[s, m, base[slot]]).clone(), t.clone())),
                    };
                    terms.push(term);
                }
                src[slot] = base[slot];
            }
            Expr::sum(terms)
        })
    }

    /// Lowers slot `slot` symbolically with `g_{ij}`.
    pub fn lower_field(&self, f: &TensorField, slot: usize) -> TensorField {
        self.transform_field(f, slot, &self.g, Variance::Lower)
    }

    /// Raises slot `slot` symbolically with `g^{ij}`.
    pub fn raise_field(&self, f: &TensorField, slot: usize) -> TensorField {
        self.transform_field(f, slot, &self.g_inv, Variance::Upper)
    }

    fn transform_field(&self, f: &TensorField, slot: usize, m: &TensorField, new: Variance) -> TensorField {
        let n = self.dim();
        let mut variance = f.variance().to_vec();
        variance[slot] = new;
        TensorField::from_fn(f.label(), n, variance, |ix| {
            let mut src = ix.to_vec();
            Expr::sum((0..n).map(|s| {
                src[slot] = s;
                Expr::mul(m.get(&[ix[slot], s]).clone(), f.get(&src).clone())
            }))
        })
    }

    /// `(L_ξ g)_{ij} = ∇_i ξ_j + ∇_j ξ_i`.
    pub fn lie_derivative_metric(&self, xi: &VectorFieldSpec) -> Result<TensorField, GeometryError> {
        let nabla_xi = self.nabla_lowered_vector(xi)?;
        Ok(TensorField::from_fn("lie_metric", self.dim(), signature("ll"), |ix| {
            Expr::add(
                nabla_xi.get(&[ix[1], ix[0]]).clone(),
                nabla_xi.get(&[ix[0], ix[1]]).clone(),
            )
        }))
    }

    /// `(L_ξ T)_{ij} = ξ^s ∇_s T_{ij} + T_{sj} ∇_i ξ^s + T_{is} ∇_j ξ^s`.
    pub fn lie_derivative_sym2(&self, xi: &VectorFieldSpec, t: &TensorField) -> Result<TensorField, GeometryError> {
        let n = self.dim();
        self.check_vector(xi)?;
        if t.variance() != [Variance::Lower, Variance::Lower] {
            return Err(GeometryError::NotCovariant("lie_derivative_sym2"));
        }
        let xi_field = TensorField::new("xi", n, signature("u"), xi.components().to_vec());
        // (∇ξ)[s, i] = ∇_i ξ^s
        let nabla_xi = self.covariant_derivative(&xi_field);
        let nabla_t = self.covariant_derivative(t);
        Ok(TensorField::from_fn("lie_sym2", n, signature("ll"), |ix| {
            let (i, j) = (ix[0], ix[1]);
            Expr::sum((0..n).flat_map(|s| {
                [
                    Expr::mul(xi.components()[s].clone(), nabla_t.get(&[i, j, s]).clone()),
                    Expr::mul(t.get(&[s, j]).clone(), nabla_xi.get(&[s, i]).clone()),
                    Expr::mul(t.get(&[i, s]).clone(), nabla_xi.get(&[s, j]).clone()),
                ]
            }))
        }))
    }

    fn check_vector(&self, xi: &VectorFieldSpec) -> Result<(), GeometryError> {
        if xi.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                what: "vector field",
                expected: self.dim(),
                dim: xi.dim(),
            });
        }
        Ok(())
    }

    /// `(∇ξ♭)[j, i] = ∇_i ξ_j`.
    fn nabla_lowered_vector(&self, xi: &VectorFieldSpec) -> Result<TensorField, GeometryError> {
        self.check_vector(xi)?;
        let n = self.dim();
        let lowered = TensorField::from_fn("xi_flat", n, signature("l"), |ix| {
            Expr::sum((0..n).map(|s| Expr::mul(self.g.get(&[ix[0], s]).clone(), xi.components()[s].clone())))
        });
        Ok(self.covariant_derivative(&lowered))
    }

    /// Compiles fields into one evaluation tape.
    pub fn compile(&self, fields: &[&TensorField]) -> CompiledFields {
        CompiledFields::new(fields)
    }

    /// Numeric metric, inverse, connection and curvature at `p`.
    pub fn at(&self, p: &Point) -> Result<PointCurvature, crate::expr::EvalError> {
        let compiled = self.basics.get_or_init(|| {
            self.compile(&[
                &self.g,
                &self.g_inv,
                self.christoffel(),
                self.curvature_operator(),
                self.riemann(),
                self.ricci(),
                self.scalar_curvature(),
            ])
        });
        let mut v = compiled.eval(p)?.into_iter();
        let mut next = || v.next().expect("seven compiled fields");
        Ok(PointCurvature {
            g: next(),
            g_inv: next(),
            christoffel: next(),
            curvature_operator: next(),
            riemann: next(),
            ricci: next(),
            scalar: next().data()[0],
        })
    }
}

/// Basic curvature quantities evaluated at one point.
#[derive(Debug, Clone)]
pub struct PointCurvature {
    pub g: PointTensor,
    pub g_inv: PointTensor,
    pub christoffel: PointTensor,
    pub curvature_operator: PointTensor,
    pub riemann: PointTensor,
    pub ricci: PointTensor,
    pub scalar: f64,
}

fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => Expr::sub(
            Expr::mul(m[0][0].clone(), m[1][1].clone()),
            Expr::mul(m[0][1].clone(), m[1][0].clone()),
        ),
        _ => Expr::sum((0..n).filter(|&c| !m[0][c].is_zero()).map(|c| {
            let minor = minor(m, 0, c);
            let term = Expr::mul(m[0][c].clone(), determinant(&minor));
            if c % 2 == 0 {
                term
            } else {
                Expr::neg(term)
            }
        })),
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(r, _)| *r != row)
        .map(|(_, line)| {
            line.iter()
                .enumerate()
                .filter(|(c, _)| *c != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Symbolic `g^{ij} = adj(g)_{ij} / det g`. For a diagonal metric the
/// cofactor ratio cancels to `1/g_{ii}`.
pub fn inverse_metric(metric: &MetricSpec) -> TensorField {
    let n = metric.dim();
    let mut comps = vec![Expr::zero(); n * n];
    if metric.is_diagonal() {
        for i in 0..n {
            comps[i * n + i] = Expr::div(Expr::one(), metric.component(i, i).clone());
        }
    } else {
        let m: Vec<Vec<Expr>> = (0..n)
            .map(|i| (0..n).map(|j| metric.component(i, j).clone()).collect())
            .collect();
        let det = determinant(&m);
        for i in 0..n {
            for j in i..n {
                let cof = determinant(&minor(&m, j, i));
                let cof = if (i + j) % 2 == 0 { cof } else { Expr::neg(cof) };
                let v = Expr::div(cof, det.clone());
                comps[i * n + j] = v.clone();
                comps[j * n + i] = v;
            }
        }
    }
    TensorField::new("inverse_metric", n, signature("uu"), comps)
}

/// Registers `∂_c g^{ij} = −g^{ia} ∂_c g_{ab} g^{bj}` so that derivatives of
/// the inverse metric stay polynomial in `g^{ij}` and derivatives of `g_{ij}`.
fn seed_inverse_derivatives(diff: &mut Differentiator, g: &TensorField, g_inv: &TensorField) {
    let n = g.dim();
    for c in 0..n {
        let dg: Vec<Expr> = g.components().iter().map(|e| diff.diff(e, c)).collect();
        for i in 0..n {
            for j in i..n {
                let target = g_inv.get(&[i, j]);
                if target.as_const().is_some() {
                    continue;
                }
                let v = Expr::neg(Expr::sum(multi_indices(n, 2).map(|ab| {
                    let (a, b) = (ab[0], ab[1]);
                    Expr::mul(
                        Expr::mul(g_inv.get(&[i, a]).clone(), dg[a * n + b].clone()),
                        g_inv.get(&[b, j]).clone(),
                    )
                })));
                diff.seed(target, c, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::derivative::commutator_via_ricci_identity;

    fn de_sitter() -> Geometry {
        let m = MetricSpec::builder("desitter", &["t", "x", "y", "z"])
            .param("H", 1.0)
            .set_str(0, 0, "-1")
            .unwrap()
            .set_str(1, 1, "exp(2*H*t)")
            .unwrap()
            .set_str(2, 2, "exp(2*H*t)")
            .unwrap()
            .set_str(3, 3, "exp(2*H*t)")
            .unwrap()
            .build()
            .unwrap();
        Geometry::new(m).unwrap()
    }

    fn schwarzschild() -> Geometry {
        let m = MetricSpec::builder("schwarzschild", &["t", "r", "theta", "phi"])
            .param("M", 1.0)
            .set_str(0, 0, "-(1-2*M/r)")
            .unwrap()
            .set_str(1, 1, "1/(1-2*M/r)")
            .unwrap()
            .set_str(2, 2, "r^2")
            .unwrap()
            .set_str(3, 3, "r^2*sin(theta)^2")
            .unwrap()
            .build()
            .unwrap();
        Geometry::new(m).unwrap()
    }

    fn skewed() -> Geometry {
        let m = MetricSpec::builder("skewed", &["t", "x", "y", "z"])
            .set_str(0, 0, "-1 - x^2*(1/10)")
            .unwrap()
            .set_str(0, 1, "t*y/20")
            .unwrap()
            .set_str(1, 1, "1 + z^2*(1/10)")
            .unwrap()
            .set_str(1, 2, "x/10")
            .unwrap()
            .set_str(2, 2, "exp(t/5)")
            .unwrap()
            .set_str(3, 3, "1 + sin(y)^2*(1/5)")
            .unwrap()
            .set_str(0, 3, "x*z/30")
            .unwrap()
            .build()
            .unwrap();
        Geometry::new(m).unwrap()
    }

    #[test]
    fn de_sitter_is_positive_einstein() {
        let geo = de_sitter();
        let p = geo.metric().point(vec![0.3, 1.0, -2.0, 0.5]);
        let c = geo.at(&p).unwrap();
        assert!((c.scalar - 12.0).abs() < 1e-12);
        let diff = c.ricci.sub(&c.g.scale(3.0)).unwrap().max_abs();
        assert!(diff < 1e-12, "{diff}");
        // R_{ijkl} = g_il g_jk − g_ik g_jl for H = 1
        for ix in multi_indices(4, 4) {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let expect = c.g.at(&[i, l]) * c.g.at(&[j, k]) - c.g.at(&[i, k]) * c.g.at(&[j, l]);
            assert!((c.riemann.at(&ix) - expect).abs() < 1e-12, "{ix:?}");
        }
    }

    #[test]
    fn schwarzschild_kretschmann() {
        let geo = schwarzschild();
        let r = 5.0;
        let p = geo.metric().point(vec![1.0, r, 1.1, 0.4]);
        let c = geo.at(&p).unwrap();
        assert!(c.ricci.max_abs() < 1e-13);
        let up = (0..4).fold(c.riemann.clone(), |t, s| t.raise(s, &c.g_inv).unwrap());
        let k: f64 = up.data().iter().zip(c.riemann.data()).map(|(a, b)| a * b).sum();
        let oracle = 48.0 / r.powi(6);
        assert!((k - oracle).abs() < 1e-12 * oracle.max(1.0), "{k} vs {oracle}");
    }

    #[test]
    fn inverse_is_inverse() {
        let geo = skewed();
        let p = geo.metric().point(vec![0.2, 0.4, -0.3, 0.7]);
        let c = geo.at(&p).unwrap();
        let prod = c.g_inv.lower(1, &c.g).unwrap();
        assert!(prod.max_abs_diff(&PointTensor::identity(4)).unwrap() < 1e-13);
    }

    #[test]
    fn riemann_symmetries_on_generic_metric() {
        let geo = skewed();
        let p = geo.metric().point(vec![0.2, 0.4, -0.3, 0.7]);
        let r = geo.at(&p).unwrap().riemann;
        let scale = r.max_abs();
        assert!(scale > 1e-3);
        for ix in multi_indices(4, 4) {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let v = r.at(&ix);
            assert!((v + r.at(&[j, i, k, l])).abs() < 1e-12 * scale);
            assert!((v + r.at(&[i, j, l, k])).abs() < 1e-12 * scale);
            assert!((v - r.at(&[k, l, i, j])).abs() < 1e-12 * scale);
            let cyc = v + r.at(&[j, k, i, l]) + r.at(&[k, i, j, l]);
            assert!(cyc.abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn ricci_contraction_of_riemann() {
        let geo = skewed();
        let p = geo.metric().point(vec![0.1, -0.2, 0.3, 0.4]);
        let c = geo.at(&p).unwrap();
        let traced = c.riemann.trace_with(0, 3, &c.g_inv).unwrap();
        assert!(traced.max_abs_diff(&c.ricci).unwrap() < 1e-12);
    }

    #[test]
    fn ricci_identity_matches_second_derivatives() {
        let geo = skewed();
        let p = geo.metric().point(vec![0.1, -0.2, 0.3, 0.4]);
        let ric = geo.ricci().clone();
        let nn = geo.covariant_derivative(&geo.covariant_derivative(&ric));
        let nn = nn.eval(&p).unwrap();
        // nn[i, j, m, n] = ∇_n ∇_m R_ij; commutator slots (μ, ν) = ∇_μ∇_ν − ∇_ν∇_μ
        let direct = crate::geometry::commutator_from_second_derivative(&nn);
        let c = geo.at(&p).unwrap();
        let via = commutator_via_ricci_identity(&c.ricci, &c.curvature_operator).unwrap();
        let err = direct.max_abs_diff(&via).unwrap();
        assert!(err < 1e-10 * (1.0 + via.max_abs()), "{err}");
    }

    #[test]
    fn contracted_bianchi_on_riemann() {
        // ∇_h R^h_{jkl} = ∇_l R_jk − ∇_k R_jl
        let geo = skewed();
        let p = geo.metric().point(vec![0.1, -0.2, 0.3, 0.4]);
        let nr = geo.covariant_derivative(geo.riemann_mixed()).eval(&p).unwrap();
        let div = nr.contract(0, 4).unwrap();
        let nric = geo.covariant_derivative(geo.ricci()).eval(&p).unwrap();
        let scale = 1.0 + nric.max_abs();
        for ix in multi_indices(4, 3) {
            let (j, k, l) = (ix[0], ix[1], ix[2]);
            let rhs = nric.at(&[j, k, l]) - nric.at(&[j, l, k]);
            assert!((div.at(&ix) - rhs).abs() < 1e-10 * scale, "{ix:?}");
        }
    }

    #[test]
    fn lie_derivative_of_killing_field_vanishes() {
        let geo = schwarzschild();
        let xi = VectorFieldSpec::coordinate(4, 3);
        let lie = geo.lie_derivative_metric(&xi).unwrap();
        let p = geo.metric().point(vec![0.0, 4.0, 0.9, 0.2]);
        assert!(lie.eval(&p).unwrap().max_abs() < 1e-13);
        let lie_ric = geo.lie_derivative_sym2(&xi, geo.ricci()).unwrap();
        assert!(lie_ric.eval(&p).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn weyl_is_traceless() {
        let geo = skewed();
        let p = geo.metric().point(vec![0.1, -0.2, 0.3, 0.4]);
        let w = geo.weyl().unwrap().eval(&p).unwrap();
        let g_inv = geo.at(&p).unwrap().g_inv;
        assert!(w.trace_with(0, 3, &g_inv).unwrap().max_abs() < 1e-12);
        assert!(w.trace_with(0, 2, &g_inv).unwrap().max_abs() < 1e-12);
    }
}
