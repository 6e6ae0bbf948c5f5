//! The W*-curvature tensor
//!
//! `W*_{ijkl} = R_{ijkl} − (g_{jk}R_{il} − g_{jl}R_{ik})/(n−1)`
//!
//! together with the identities it satisfies: its trace, its divergence, a
//! Bianchi-type cyclic identity, semi-symmetry through the Ricci identity, and
//! the traceless (Krupka) splitting of `W*^i_{klm}`.

mod checks;
mod krupka;

use std::sync::Arc;

use crate::expr::{EvalError, Expr, Point};
use crate::geometry::{signature, CompiledFields, Geometry, GeometryError, PointCurvature, PointTensor, TensorField};

pub use checks::*;
pub use krupka::{krupka_decompose, krupka_oracle, KrupkaError, KrupkaParts, KrupkaReport, Traces};

/// Symbolic W* fields of one metric.
#[derive(Debug, Clone)]
pub struct WStarBundle {
    /// `W*_{ijkl}`
    pub lower: TensorField,
    /// `W*^h_{jkl} = g^{hi} W*_{ijkl}`
    pub mixed: TensorField,
    /// `W*_{jk} = g^{il} W*_{ijkl}`
    pub contraction: TensorField,
    pub dim: usize,
}

/// Builds `W*_{ijkl}`, its `(1,3)` form and its trace. The coefficient
/// `1/(n−1)` stays an exact rational.
pub fn wstar_tensor(geo: &Geometry) -> Result<WStarBundle, GeometryError> {
    let n = geo.dim();
    if n < 2 {
        return Err(GeometryError::DimensionTooSmall { what: "W* tensor", min: 2, dim: n });
    }
    let g = geo.metric_tensor();
    let riem = geo.riemann();
    let ric = geo.ricci();
    let coef = Expr::rational(1, n as i64 - 1);
    let lower = TensorField::from_fn("wstar", n, signature("llll"), |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let bracket = Expr::sub(
            Expr::mul(g.get(&[j, k]).clone(), ric.get(&[i, l]).clone()),
            Expr::mul(g.get(&[j, l]).clone(), ric.get(&[i, k]).clone()),
        );
        Expr::sub(riem.get(ix).clone(), Expr::mul(coef.clone(), bracket))
    });
    let mixed = geo.raise_field(&lower, 0).with_label("wstar_mixed");
    let g_inv = geo.inverse_metric();
    let contraction = TensorField::from_fn("wstar_contraction", n, signature("ll"), |ix| {
        Expr::sum((0..n).flat_map(|i| {
            let lower = &lower;
            (0..n).map(move |l| Expr::mul(g_inv.get(&[i, l]).clone(), lower.get(&[i, ix[0], ix[1], l]).clone()))
        }))
    });
    Ok(WStarBundle { lower, mixed, contraction, dim: n })
}

/// Every curvature quantity the checks read, evaluated at one point.
///
/// Derivative slots follow [`Geometry::covariant_derivative`]: the new index
/// is last, so `nabla_ricci[j,k,l] = ∇_l R_{jk}`.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub point: Point,
    pub curv: PointCurvature,
    pub wstar: PointTensor,
    pub wstar_mixed: PointTensor,
    pub wstar_contraction: PointTensor,
    pub weyl: PointTensor,
    pub nabla_metric: PointTensor,
    pub nabla_scalar: PointTensor,
    pub nabla_ricci: PointTensor,
    pub nabla_riemann: PointTensor,
    pub nabla_wstar: PointTensor,
    pub nabla_wstar_mixed: PointTensor,
    pub nabla_weyl: PointTensor,
}

impl Snapshot {
    pub fn dim(&self) -> usize {
        self.curv.g.dim()
    }
}

/// Compiled W* and curvature fields of one metric.
pub struct Evaluator {
    geo: Arc<Geometry>,
    bundle: WStarBundle,
    weyl: TensorField,
    compiled: CompiledFields,
}

impl Evaluator {
    pub fn new(geo: Arc<Geometry>) -> Result<Self, GeometryError> {
        let n = geo.dim();
        if n < 3 {
            return Err(GeometryError::DimensionTooSmall { what: "W* analysis", min: 3, dim: n });
        }
        let bundle = wstar_tensor(&geo)?;
        let weyl = geo.weyl()?;
        let nabla = |f: &TensorField| geo.covariant_derivative(f);
        let derived = [
            nabla(geo.metric_tensor()),
            nabla(geo.scalar_curvature()),
            nabla(geo.ricci()),
            nabla(geo.riemann()),
            nabla(&bundle.lower),
            nabla(&bundle.mixed),
            nabla(&weyl),
        ];
        let mut fields: Vec<&TensorField> = vec![
            geo.metric_tensor(),
            geo.inverse_metric(),
            geo.christoffel(),
            geo.curvature_operator(),
            geo.riemann(),
            geo.ricci(),
            geo.scalar_curvature(),
            &bundle.lower,
            &bundle.mixed,
            &bundle.contraction,
            &weyl,
        ];
        fields.extend(derived.iter());
        let compiled = CompiledFields::new(&fields);
        Ok(Evaluator { geo, bundle, weyl, compiled })
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geo
    }

    pub fn bundle(&self) -> &WStarBundle {
        &self.bundle
    }

    pub fn weyl(&self) -> &TensorField {
        &self.weyl
    }

    pub fn tape_len(&self) -> usize {
        self.compiled.tape_len()
    }

    pub fn at(&self, p: &Point) -> Result<Snapshot, EvalError> {
        let mut v = self.compiled.eval(p)?.into_iter();
        let mut next = || v.next().expect("compiled field count");
        let curv = PointCurvature {
            g: next(),
            g_inv: next(),
            christoffel: next(),
            curvature_operator: next(),
            riemann: next(),
            ricci: next(),
            scalar: next().data()[0],
        };
        Ok(Snapshot {
            point: p.clone(),
            curv,
            wstar: next(),
            wstar_mixed: next(),
            wstar_contraction: next(),
            weyl: next(),
            nabla_metric: next(),
            nabla_scalar: next(),
            nabla_ricci: next(),
            nabla_riemann: next(),
            nabla_wstar: next(),
            nabla_wstar_mixed: next(),
            nabla_weyl: next(),
        })
    }
}
