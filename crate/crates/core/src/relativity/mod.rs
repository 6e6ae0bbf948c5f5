//! Matter content from Einstein's field equation and the space-time
//! properties that the W*-curvature tensor controls.

mod classify;
mod fluid;

use thiserror::Error;

use crate::expr::{EvalError, Expr, Point};
use crate::geometry::{
    commutator_via_ricci_identity, signature, Geometry, GeometryError, PointTensor, TensorField, VectorFieldSpec,
};
use crate::wstar::{Evaluator, Residual, Snapshot};

pub use classify::{classify, classify_snapshots, snapshots, ClassificationRecord, Flag, Pairing, Recurrence, Tolerance};
pub use fluid::{perfect_fluid_decompose, FluidDecomposition, FluidError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("gravitational coupling k must be non-zero and finite")]
    BadCoupling,
    #[error("cosmological constant must be finite")]
    BadLambda,
}

/// `R_{ij} − ½R g_{ij} + Λ g_{ij} = k T_{ij}`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldEquationConfig {
    pub k: f64,
    pub lambda: f64,
}

impl Default for FieldEquationConfig {
    fn default() -> Self {
        FieldEquationConfig { k: 1.0, lambda: 0.0 }
    }
}

impl FieldEquationConfig {
    pub fn new(k: f64, lambda: f64) -> Result<Self, ConfigError> {
        if k == 0.0 || !k.is_finite() {
            return Err(ConfigError::BadCoupling);
        }
        if !lambda.is_finite() {
            return Err(ConfigError::BadLambda);
        }
        Ok(FieldEquationConfig { k, lambda })
    }
}

/// Symbolic `T_{ij} = (R_{ij} − ½R g_{ij} + Λ g_{ij}) / k`.
pub fn energy_momentum(geo: &Geometry, cfg: &FieldEquationConfig) -> TensorField {
    let n = geo.dim();
    let ric = geo.ricci();
    let g = geo.metric_tensor();
    let r = geo.scalar_curvature().components()[0].clone();
    let coef = Expr::sub(Expr::float(cfg.lambda), Expr::mul(Expr::rational(1, 2), r));
    let inv_k = Expr::float(1.0 / cfg.k);
    TensorField::from_fn("energy_momentum", n, signature("ll"), |ix| {
        Expr::mul(
            inv_k.clone(),
            Expr::add(ric.get(ix).clone(), Expr::mul(coef.clone(), g.get(ix).clone())),
        )
    })
}

/// `T_{ij}` at a point.
pub fn energy_momentum_at(s: &Snapshot, cfg: &FieldEquationConfig) -> PointTensor {
    let c = &s.curv;
    let f = cfg.lambda - 0.5 * c.scalar;
    PointTensor::from_fn(s.dim(), signature("ll"), |ix| (c.ricci.at(ix) + f * c.g.at(ix)) / cfg.k)
}

/// `∇_m T_{ij} = (∇_m R_{ij} − ½ g_{ij} ∇_m R) / k`, using `∇g = 0`.
pub fn nabla_energy_momentum_at(s: &Snapshot, cfg: &FieldEquationConfig) -> PointTensor {
    let g = &s.curv.g;
    PointTensor::from_fn(s.dim(), signature("lll"), |ix| {
        (s.nabla_ricci.at(ix) - 0.5 * g.at(&[ix[0], ix[1]]) * s.nabla_scalar.at(&[ix[2]])) / cfg.k
    })
}

/// Einstein condition `max|R_{jk} − (R/n) g_{jk}|`.
pub fn is_einstein(s: &Snapshot, tol: &Tolerance) -> (bool, Residual) {
    let r = crate::wstar::einstein_residual(s);
    (tol.accepts(&r), r)
}

/// Under the reduction `R_{ij} = k T_{ij}` used for a purely electromagnetic
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmDistribution {
    /// `g^{ij}T_{ij}` with `T_{ij} = R_{ij}/k`.
    pub trace: f64,
    pub scalar: f64,
    /// `|R − kT|`, the literal contraction.
    pub plus_convention: f64,
    /// `|R + kT|`, the sign as printed.
    pub minus_convention: f64,
    /// `max|∇_m W*_{ijkl}|`
    pub wstar_symmetry: Residual,
    /// `max|∇_m T_{ij}|`
    pub nabla_t: Residual,
}

pub fn em_distribution_check(s: &Snapshot, cfg: &FieldEquationConfig) -> EmDistribution {
    let c = &s.curv;
    let t = c.ricci.scale(1.0 / cfg.k);
    let trace = t.trace_with(0, 1, &c.g_inv).expect("lower slots").data()[0];
    EmDistribution {
        trace,
        scalar: c.scalar,
        plus_convention: (c.scalar - cfg.k * trace).abs(),
        minus_convention: (c.scalar + cfg.k * trace).abs(),
        wstar_symmetry: crate::wstar::wstar_symmetry_residual(s),
        nabla_t: Residual::new(s.nabla_ricci.max_abs() / cfg.k.abs(), 1.0 + t.max_abs()),
    }
}

/// `b_μ = ⟨∇_μ Ric, Ric⟩ / ⟨Ric, Ric⟩`, or `None` when Ricci vanishes.
pub fn recurrence_form(s: &Snapshot) -> Option<Vec<f64>> {
    let n = s.dim();
    let ric = &s.curv.ricci;
    let norm2: f64 = ric.data().iter().map(|v| v * v).sum();
    if ric.max_abs() <= 1e-10 {
        return None;
    }
    Some(
        (0..n)
            .map(|mu| {
                let mut dot = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        dot += s.nabla_ricci.at(&[j, k, mu]) * ric.at(&[j, k]);
                    }
                }
                dot / norm2
            })
            .collect(),
    )
}

/// `max|∇_μ R_{ij} − b_μ R_{ij}|`
pub fn recurrence_fit_residual(s: &Snapshot, b: &[f64]) -> Residual {
    let ric = &s.curv.ricci;
    let gap = PointTensor::from_fn(s.dim(), signature("lll"), |ix| {
        s.nabla_ricci.at(ix) - b[ix[2]] * ric.at(&[ix[0], ix[1]])
    });
    Residual::new(gap.max_abs(), 1.0 + s.nabla_ricci.max_abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceFit {
    pub b: Vec<f64>,
    pub fit: Residual,
    /// `max|∂_μ b_ν − ∂_ν b_μ|` by central differences.
    pub closedness: Option<f64>,
}

/// Fits the recurrence form at `p` and estimates `db` with central
/// differences of step `h·(1 + |x^μ|)`.
pub fn ricci_recurrence_fit(ev: &Evaluator, p: &Point, h: f64) -> Result<Option<RecurrenceFit>, EvalError> {
    let s = ev.at(p)?;
    let Some(b) = recurrence_form(&s) else {
        return Ok(None);
    };
    let fit = recurrence_fit_residual(&s, &b);
    let n = s.dim();
    let mut db = vec![vec![0.0; n]; n];
    let mut closed = true;
    for mu in 0..n {
        let step = h * (1.0 + p.coords[mu].abs());
        let side = |d: f64| ev.at(&p.shifted(mu, d)).ok().and_then(|s| recurrence_form(&s));
        match (side(step), side(-step)) {
            (Some(bp), Some(bm)) => {
                for nu in 0..n {
                    db[mu][nu] = (bp[nu] - bm[nu]) / (2.0 * step);
                }
            }
            _ => closed = false,
        }
    }
    let closedness = closed.then(|| {
        (0..n)
            .flat_map(|mu| (0..n).map(move |nu| (mu, nu)))
            .map(|(mu, nu)| (db[mu][nu] - db[nu][mu]).abs())
            .fold(0.0, f64::max)
    });
    Ok(Some(RecurrenceFit { b, fit, closedness }))
}

/// Perfect-fluid reading of `T_{ij}` at a point.
pub fn fluid_at(s: &Snapshot, cfg: &FieldEquationConfig) -> Result<FluidDecomposition, FluidError> {
    perfect_fluid_decompose(&energy_momentum_at(s, cfg), &s.curv.g, &s.curv.g_inv)
}

/// `|R − (4Λ + k(μ − 3p))|`, the trace of the field equation. In dimension
/// `n` the prediction is `2(nΛ − k(−μ + (n−1)p))/(n−2)`.
pub fn fluid_trace_residual(s: &Snapshot, f: &FluidDecomposition, cfg: &FieldEquationConfig) -> Residual {
    let n = s.dim() as f64;
    let t_trace = -f.mu + (n - 1.0) * f.p;
    let predicted = (2.0 * n * cfg.lambda - 2.0 * cfg.k * t_trace) / (n - 2.0);
    Residual::new((s.curv.scalar - predicted).abs(), 1.0 + s.curv.scalar.abs())
}

/// Lie-derivative fits along one vector field.
pub struct SymmetryFields {
    pub lie_metric: TensorField,
    pub lie_t: TensorField,
    pub t: TensorField,
}

impl SymmetryFields {
    pub fn new(geo: &Geometry, xi: &VectorFieldSpec, cfg: &FieldEquationConfig) -> Result<Self, GeometryError> {
        let t = energy_momentum(geo, cfg);
        Ok(SymmetryFields {
            lie_metric: geo.lie_derivative_metric(xi)?,
            lie_t: geo.lie_derivative_sym2(xi, &t)?,
            t,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalFit {
    /// `φ = tr(g⁻¹ L_ξ g) / (2n)`
    pub phi: f64,
    /// `max|L_ξ g − 2φ g|`
    pub residual: Residual,
}

pub fn conformal_fit(lie_g: &PointTensor, g: &PointTensor, g_inv: &PointTensor) -> ConformalFit {
    let n = g.dim();
    let tr = lie_g.trace_with(0, 1, g_inv).expect("lower slots").data()[0];
    let phi = tr / (2.0 * n as f64);
    let gap = lie_g.sub(&g.scale(2.0 * phi)).expect("same shape").max_abs();
    ConformalFit { phi, residual: Residual::new(gap, 1.0 + lie_g.max_abs()) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InheritanceFit {
    /// `φ_T = ⟨L_ξT, T⟩ / (2⟨T, T⟩)`; `None` when `T ≈ 0`.
    pub phi: Option<f64>,
    /// `max|L_ξT − 2φ_T T|`
    pub residual: Residual,
}

pub fn matter_inheritance_check(lie_t: &PointTensor, t: &PointTensor) -> InheritanceFit {
    let tt: f64 = t.data().iter().map(|v| v * v).sum();
    if t.max_abs() <= 1e-10 {
        return InheritanceFit { phi: None, residual: Residual::new(lie_t.max_abs(), 1.0) };
    }
    let lt: f64 = lie_t.data().iter().zip(t.data()).map(|(a, b)| a * b).sum();
    let phi = lt / (2.0 * tt);
    let gap = lie_t.sub(&t.scale(2.0 * phi)).expect("same shape").max_abs();
    InheritanceFit { phi: Some(phi), residual: Residual::new(gap, 1.0 + lie_t.max_abs()) }
}

/// `max|[∇_μ,∇_ν] T_{ij}|`
pub fn t_semisymmetry_residual(s: &Snapshot, cfg: &FieldEquationConfig) -> Residual {
    let t = energy_momentum_at(s, cfg);
    let rm = &s.curv.curvature_operator;
    let c = commutator_via_ricci_identity(&t, rm).expect("covariant input");
    Residual::new(c.max_abs(), 1.0 + rm.max_abs() * t.max_abs())
}

/// `max|∇_l T_{jk} − ∇_k T_{jl}|`
pub fn t_codazzi_residual(s: &Snapshot, cfg: &FieldEquationConfig) -> Residual {
    let nt = nabla_energy_momentum_at(s, cfg);
    let gap = PointTensor::from_fn(s.dim(), signature("lll"), |ix| {
        nt.at(&[ix[0], ix[1], ix[2]]) - nt.at(&[ix[0], ix[2], ix[1]])
    });
    Residual::new(gap.max_abs(), 1.0 + nt.max_abs())
}

/// `max|∇_m T_{ij}|`
pub fn t_parallel_residual(s: &Snapshot, cfg: &FieldEquationConfig) -> Residual {
    let nt = nabla_energy_momentum_at(s, cfg);
    Residual::new(nt.max_abs(), 1.0 + energy_momentum_at(s, cfg).max_abs())
}

/// Outcome of an implication checked over a point set.
#[derive(Debug, Clone, PartialEq)]
pub enum Implication {
    Holds,
    NotApplicable(String),
    Violated(String),
}

/// Dust on a W*-flat space-time must be vacuum.
pub fn dust_vacuum_check(
    snaps: &[Snapshot],
    cfg: &FieldEquationConfig,
    tol: &Tolerance,
) -> Implication {
    let flat = snaps.iter().all(|s| tol.accepts(&crate::wstar::wstar_flat_residual(s)));
    let fluids: Vec<_> = snaps.iter().map(|s| fluid_at(s, cfg)).collect();
    let dust = fluids.iter().zip(snaps).all(|(f, s)| match f {
        Ok(f) => tol.accepts(&Residual::new(f.p.abs(), 1.0 + energy_momentum_at(s, cfg).max_abs())),
        Err(_) => false,
    });
    if !dust {
        return Implication::NotApplicable("not dust (p ≠ 0 or no fluid reading)".into());
    }
    if !flat {
        return Implication::NotApplicable("not W*-flat".into());
    }
    let worst = fluids
        .iter()
        .filter_map(|f| f.as_ref().ok())
        .fold(0.0_f64, |m, f| m.max(f.mu.abs()));
    if worst <= tol.atol {
        Implication::Holds
    } else {
        Implication::Violated(format!("dust with mu = {worst:e} on a W*-flat space-time"))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cli::catalog_metric;

    fn evaluator(name: &str) -> Evaluator {
        let geo = Geometry::new(catalog_metric(name).unwrap()).unwrap();
        Evaluator::new(Arc::new(geo)).unwrap()
    }

    #[test]
    fn de_sitter_fluid_is_lambda_like() {
        let ev = evaluator("desitter_flat");
        let p = ev.geometry().metric().point(vec![0.2, 1.0, 2.0, -1.0]);
        let s = ev.at(&p).unwrap();
        let cfg = FieldEquationConfig::default();
        let t = energy_momentum_at(&s, &cfg);
        assert!(t.max_abs_diff(&s.curv.g.scale(-3.0)).unwrap() < 1e-12);
        let f = fluid_at(&s, &cfg).unwrap();
        assert!((f.mu - 3.0).abs() < 1e-9 && (f.p + 3.0).abs() < 1e-9);
        assert!((f.w.unwrap() + 1.0).abs() < 1e-9);
        assert!(f.residual < 1e-8);
    }

    #[test]
    fn friedmann_dust_at_unit_time() {
        let ev = evaluator("flrw_dust");
        let p = ev.geometry().metric().point(vec![1.0, 0.3, -0.2, 0.9]);
        let s = ev.at(&p).unwrap();
        let cfg = FieldEquationConfig::default();
        let f = fluid_at(&s, &cfg).unwrap();
        // a = t^(2/3): H = 2/(3t), ä/a = −2/(9t²); μ = 3H², p = −(2ä/a + H²)
        let (hub, acc) = (2.0 / 3.0, -2.0 / 9.0);
        assert!((f.mu - 3.0 * hub * hub).abs() < 1e-9, "{}", f.mu);
        assert!((f.p + 2.0 * acc + hub * hub).abs() < 1e-9, "{}", f.p);
        assert!((f.u_norm(&s.curv.g_inv) + 1.0).abs() < 1e-12);
        assert!(fluid_trace_residual(&s, &f, &cfg).value < 1e-12);
        assert_eq!(f.regime(), "dust");
    }

    #[test]
    fn trace_identity_with_lambda_and_coupling() {
        let ev = evaluator("perturbed_flat");
        let p = ev.geometry().metric().point(vec![0.1, 0.2, 0.3, 0.4]);
        let s = ev.at(&p).unwrap();
        let cfg = FieldEquationConfig::new(2.5, 0.7).unwrap();
        if let Ok(f) = fluid_at(&s, &cfg) {
            assert!(fluid_trace_residual(&s, &f, &cfg).value < 1e-10);
        }
        let t = energy_momentum_at(&s, &cfg);
        let trace = t.trace_with(0, 1, &s.curv.g_inv).unwrap().data()[0];
        assert!((s.curv.scalar - (4.0 * cfg.lambda - cfg.k * trace)).abs() < 1e-12);
    }

    #[test]
    fn symbolic_and_numeric_energy_momentum_agree() {
        let ev = evaluator("flrw_dust");
        let cfg = FieldEquationConfig::new(0.5, 0.2).unwrap();
        let p = ev.geometry().metric().point(vec![2.0, 0.0, 0.0, 0.0]);
        let sym = energy_momentum(ev.geometry(), &cfg).eval(&p).unwrap();
        let num = energy_momentum_at(&ev.at(&p).unwrap(), &cfg);
        assert!(sym.max_abs_diff(&num).unwrap() < 1e-12);
    }

    #[test]
    fn killing_and_homothety() {
        let schw = evaluator("schwarzschild");
        let cfg = FieldEquationConfig::default();
        let xi = VectorFieldSpec::coordinate(4, 0);
        let f = SymmetryFields::new(schw.geometry(), &xi, &cfg).unwrap();
        let p = schw.geometry().metric().point(vec![1.0, 5.0, 1.2, 0.3]);
        let s = schw.at(&p).unwrap();
        let fit = conformal_fit(&f.lie_metric.eval(&p).unwrap(), &s.curv.g, &s.curv.g_inv);
        assert!(fit.phi.abs() < 1e-12 && fit.residual.value < 1e-10);

        let mink = evaluator("minkowski");
        let m = mink.geometry().metric();
        let euler = VectorFieldSpec::parse(m, "t, x, y, z").unwrap();
        let f = SymmetryFields::new(mink.geometry(), &euler, &cfg).unwrap();
        let p = m.point(vec![0.5, 1.0, -2.0, 3.0]);
        let s = mink.at(&p).unwrap();
        let fit = conformal_fit(&f.lie_metric.eval(&p).unwrap(), &s.curv.g, &s.curv.g_inv);
        assert!((fit.phi - 1.0).abs() < 1e-12 && fit.residual.value < 1e-10);
        let inh = matter_inheritance_check(&f.lie_t.eval(&p).unwrap(), &f.t.eval(&p).unwrap());
        assert_eq!(inh.phi, None);
    }

    #[test]
    fn recurrence_of_de_sitter_is_trivial() {
        let ev = evaluator("desitter_flat");
        let p = ev.geometry().metric().point(vec![0.1, 0.0, 1.0, 2.0]);
        let fit = ricci_recurrence_fit(&ev, &p, 1e-4).unwrap().unwrap();
        assert!(fit.b.iter().all(|b| b.abs() < 1e-12));
        assert!(fit.fit.value < 1e-8);
        assert!(fit.closedness.unwrap() < 1e-6);
        let schw = evaluator("schwarzschild");
        let p = schw.geometry().metric().point(vec![0.0, 6.0, 1.0, 1.0]);
        assert!(ricci_recurrence_fit(&schw, &p, 1e-4).unwrap().is_none());
    }

    #[test]
    fn em_reduction_reports_both_trace_conventions() {
        let ev = evaluator("desitter_flat");
        let p = ev.geometry().metric().point(vec![0.0, 0.0, 0.0, 0.0]);
        let em = em_distribution_check(&ev.at(&p).unwrap(), &FieldEquationConfig::default());
        assert!((em.trace - 12.0).abs() < 1e-12);
        assert!(em.plus_convention < 1e-12);
        assert!((em.minus_convention - 24.0).abs() < 1e-10);
        assert!(em.nabla_t.value < 1e-12);
    }
}
