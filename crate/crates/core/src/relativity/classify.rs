use rayon::prelude::*;
use serde::Serialize;

use super::{
    fluid_at, ricci_recurrence_fit, t_codazzi_residual, t_parallel_residual, t_semisymmetry_residual,
    FieldEquationConfig,
};
use crate::expr::{EvalError, Point};
use crate::wstar::{self, Evaluator, Residual, Snapshot};

/// Pass iff `residual ≤ atol + rtol·scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { atol: 1e-9, rtol: 1e-6 }
    }
}

impl Tolerance {
    pub fn accepts(&self, r: &Residual) -> bool {
        r.within(self.atol, self.rtol)
    }

    pub fn bound(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale
    }
}

/// A property required at every sampled point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub holds: bool,
    /// Largest residual over the points.
    pub worst: Residual,
    /// Sample index of the largest residual.
    pub worst_point: usize,
}

impl Flag {
    pub fn from_points(residuals: &[Residual], accept: impl Fn(&Residual) -> bool) -> Flag {
        let mut worst_point = 0;
        for (k, r) in residuals.iter().enumerate() {
            if r.value > residuals[worst_point].value {
                worst_point = k;
            }
        }
        Flag {
            holds: residuals.iter().all(&accept),
            worst: residuals.get(worst_point).copied().unwrap_or(Residual::new(0.0, 0.0)),
            worst_point,
        }
    }

    fn over(snaps: &[Snapshot], tol: &Tolerance, f: impl Fn(&Snapshot) -> Residual) -> Flag {
        let rs: Vec<Residual> = snaps.iter().map(f).collect();
        Flag::from_points(&rs, |r| tol.accepts(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recurrence {
    pub flag: Flag,
    /// Fitted `b_μ` per point.
    pub forms: Vec<Vec<f64>>,
    /// Largest `|∂_μ b_ν − ∂_ν b_μ|`, when every stencil evaluated.
    pub closedness: Option<f64>,
}

/// One theorem-consistency assertion between independently computed flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pairing {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationRecord {
    pub metric: String,
    pub ricci_flat: Flag,
    pub einstein: Flag,
    pub constant_scalar_curvature: Flag,
    pub codazzi_ricci: Flag,
    /// `None` when Ricci vanishes somewhere on the sample.
    pub ricci_recurrent: Option<Recurrence>,
    pub ricci_semisymmetric: Flag,
    pub wstar_semisymmetric: Flag,
    pub wstar_flat: Flag,
    pub wstar_divergence_free: Flag,
    pub wstar_parallel: Flag,
    pub wstar_cyclic: Flag,
    /// `max|W*_{jk}|` judged at `n/(n−1)` times the Einstein tolerance.
    pub wstar_contraction_zero: Flag,
    pub t_semisymmetric: Flag,
    pub t_codazzi: Flag,
    pub t_parallel: Flag,
    /// `μ + p ≈ 0` at points with a fluid reading; `None` if there are none.
    pub lambda_like_fluid: Option<Flag>,
    pub pairings: Vec<Pairing>,
}

impl ClassificationRecord {
    /// `(name, flag)` for every boolean, in report order.
    pub fn flags(&self) -> Vec<(&'static str, &Flag)> {
        vec![
            ("ricci_flat", &self.ricci_flat),
            ("einstein", &self.einstein),
            ("constant_scalar_curvature", &self.constant_scalar_curvature),
            ("codazzi_ricci", &self.codazzi_ricci),
            ("ricci_semisymmetric", &self.ricci_semisymmetric),
            ("wstar_semisymmetric", &self.wstar_semisymmetric),
            ("wstar_flat", &self.wstar_flat),
            ("wstar_divergence_free", &self.wstar_divergence_free),
            ("wstar_parallel", &self.wstar_parallel),
            ("wstar_cyclic", &self.wstar_cyclic),
            ("wstar_contraction_zero", &self.wstar_contraction_zero),
            ("t_semisymmetric", &self.t_semisymmetric),
            ("t_codazzi", &self.t_codazzi),
            ("t_parallel", &self.t_parallel),
        ]
    }

    pub fn consistent(&self) -> bool {
        self.pairings.iter().all(|p| p.holds)
    }
}

fn iff(name: &'static str, a: (&str, bool), b: (&str, bool)) -> Pairing {
    Pairing {
        name,
        holds: a.1 == b.1,
        detail: format!("{} = {}, {} = {}", a.0, a.1, b.0, b.1),
    }
}

fn implies(name: &'static str, a: (&str, bool), b: (&str, bool)) -> Pairing {
    Pairing {
        name,
        holds: !a.1 || b.1,
        detail: format!("{} = {}, {} = {}", a.0, a.1, b.0, b.1),
    }
}

/// Evaluates every point, in parallel, preserving sample order.
pub fn snapshots(ev: &Evaluator, points: &[Point]) -> Result<Vec<Snapshot>, EvalError> {
    points.par_iter().map(|p| ev.at(p)).collect()
}

/// Fills every flag and checks the theorem pairings on a fixed point set.
pub fn classify(
    ev: &Evaluator,
    points: &[Point],
    cfg: &FieldEquationConfig,
    tol: &Tolerance,
) -> Result<ClassificationRecord, EvalError> {
    let snaps = snapshots(ev, points)?;
    classify_snapshots(ev, points, &snaps, cfg, tol)
}

/// [`classify`] on snapshots already taken at `points`.
pub fn classify_snapshots(
    ev: &Evaluator,
    points: &[Point],
    snaps: &[Snapshot],
    cfg: &FieldEquationConfig,
    tol: &Tolerance,
) -> Result<ClassificationRecord, EvalError> {
    let n = ev.geometry().dim() as f64;
    let over = |f: &dyn Fn(&Snapshot) -> Residual| Flag::over(snaps, tol, f);

    let ricci_flat = over(&|s| Residual::new(s.curv.ricci.max_abs(), 1.0 + s.curv.riemann.max_abs()));
    let einstein = over(&wstar::einstein_residual);
    let contraction: Vec<(Residual, f64)> = snaps
        .iter()
        .map(|s| {
            let e = wstar::einstein_residual(s);
            (Residual::new(s.wstar_contraction.max_abs(), e.scale), n / (n - 1.0) * tol.bound(e.scale))
        })
        .collect();
    let wstar_contraction_zero = {
        let rs: Vec<Residual> = contraction.iter().map(|c| c.0).collect();
        let mut f = Flag::from_points(&rs, |_| true);
        f.holds = contraction.iter().all(|(r, bound)| r.value <= *bound);
        f
    };
    let constant_scalar_curvature = over(&wstar::scalar_gradient);
    let codazzi_ricci = over(&wstar::codazzi_residual);
    let ricci_semisymmetric = over(&wstar::ricci_semisymmetry_residual);
    let wstar_semisymmetric = over(&|s| wstar::wstar_semisymmetry_residual(s).wstar);
    let wstar_flat = over(&wstar::wstar_flat_residual);
    let wstar_divergence_free = over(&wstar::divergence_norm);
    let wstar_parallel = over(&wstar::wstar_symmetry_residual);
    let wstar_cyclic = over(&|s| wstar::wstar_bianchi_residual(s).cyclic);
    let t_semisymmetric = over(&|s| t_semisymmetry_residual(s, cfg));
    let t_codazzi = over(&|s| t_codazzi_residual(s, cfg));
    let t_parallel = over(&|s| t_parallel_residual(s, cfg));

    let fluid_rs: Vec<Residual> = snaps
        .iter()
        .filter_map(|s| fluid_at(s, cfg).ok().map(|f| Residual::new((f.mu + f.p).abs(), 1.0 + f.mu.abs() + f.p.abs())))
        .collect();
    let lambda_like_fluid = (!fluid_rs.is_empty()).then(|| Flag::from_points(&fluid_rs, |r| tol.accepts(r)));

    let fits: Vec<_> = points
        .par_iter()
        .map(|p| ricci_recurrence_fit(ev, p, 1e-4))
        .collect::<Result<Vec<_>, _>>()?;
    let ricci_recurrent = if fits.iter().all(Option::is_some) && !fits.is_empty() {
        let fits: Vec<_> = fits.into_iter().flatten().collect();
        let rs: Vec<Residual> = fits.iter().map(|f| f.fit).collect();
        let closedness = fits
            .iter()
            .map(|f| f.closedness)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.into_iter().fold(0.0, f64::max));
        Some(Recurrence {
            flag: Flag::from_points(&rs, |r| tol.accepts(r)),
            forms: fits.into_iter().map(|f| f.b).collect(),
            closedness,
        })
    } else {
        None
    };

    let mut pairings = vec![
        iff(
            "codazzi_iff_divergence_free",
            ("codazzi_ricci", codazzi_ricci.holds),
            ("wstar_divergence_free", wstar_divergence_free.holds),
        ),
        iff(
            "einstein_iff_contraction_zero",
            ("einstein", einstein.holds),
            ("wstar_contraction_zero", wstar_contraction_zero.holds),
        ),
        implies(
            "parallel_implies_t_semisymmetric",
            ("wstar_parallel", wstar_parallel.holds),
            ("t_semisymmetric", t_semisymmetric.holds),
        ),
        iff(
            "t_semisymmetric_iff_ricci_semisymmetric",
            ("t_semisymmetric", t_semisymmetric.holds),
            ("ricci_semisymmetric", ricci_semisymmetric.holds),
        ),
        implies(
            "flat_implies_constant_scalar",
            ("wstar_flat", wstar_flat.holds),
            ("constant_scalar_curvature", constant_scalar_curvature.holds),
        ),
        implies("flat_implies_t_parallel", ("wstar_flat", wstar_flat.holds), ("t_parallel", t_parallel.holds)),
        implies("flat_implies_einstein", ("wstar_flat", wstar_flat.holds), ("einstein", einstein.holds)),
        iff(
            "cyclic_iff_codazzi",
            ("wstar_cyclic", wstar_cyclic.holds),
            ("codazzi_ricci", codazzi_ricci.holds),
        ),
    ];
    if let Some(f) = &lambda_like_fluid {
        pairings.push(implies(
            "flat_implies_lambda_like_fluid",
            ("wstar_flat", wstar_flat.holds),
            ("mu_plus_p_zero", f.holds),
        ));
    }

    Ok(ClassificationRecord {
        metric: ev.geometry().metric().name().to_string(),
        ricci_flat,
        einstein,
        constant_scalar_curvature,
        codazzi_ricci,
        ricci_recurrent,
        ricci_semisymmetric,
        wstar_semisymmetric,
        wstar_flat,
        wstar_divergence_free,
        wstar_parallel,
        wstar_cyclic,
        wstar_contraction_zero,
        t_semisymmetric,
        t_codazzi,
        t_parallel,
        lambda_like_fluid,
        pairings,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cli::catalog_metric;
    use crate::geometry::{sample_points, Geometry};

    fn record(name: &str) -> ClassificationRecord {
        let geo = Arc::new(Geometry::new(catalog_metric(name).unwrap()).unwrap());
        let pts = sample_points(&geo, 6, 7).unwrap();
        let ev = Evaluator::new(geo).unwrap();
        classify(&ev, &pts, &FieldEquationConfig::default(), &Tolerance::default()).unwrap()
    }

    #[test]
    fn schwarzschild_is_vacuum() {
        let r = record("schwarzschild");
        assert!(r.ricci_flat.holds && r.einstein.holds && r.codazzi_ricci.holds);
        assert!(r.wstar_divergence_free.holds && r.t_parallel.holds);
        assert!(!r.wstar_flat.holds);
        assert!(r.ricci_recurrent.is_none());
        assert!(r.consistent(), "{:?}", r.pairings);
    }

    #[test]
    fn de_sitter_is_wstar_flat() {
        let r = record("desitter_flat");
        assert!(r.einstein.holds && r.wstar_flat.holds && r.wstar_parallel.holds);
        assert!(r.t_semisymmetric.holds && r.t_codazzi.holds && r.t_parallel.holds);
        assert!(r.lambda_like_fluid.as_ref().unwrap().holds);
        assert!(r.consistent(), "{:?}", r.pairings);
    }

    #[test]
    fn conformally_flat_dust_has_free_divergence_without_codazzi() {
        // div W* is minus the Cotton tensor, which vanishes on FLRW.
        let r = record("flrw_dust");
        assert!(!r.einstein.holds && !r.wstar_flat.holds);
        assert!(!r.codazzi_ricci.holds && r.wstar_divergence_free.holds);
        let a = r.pairings.iter().find(|p| p.name == "codazzi_iff_divergence_free").unwrap();
        assert!(!a.holds);
        assert!(r.pairings.iter().filter(|p| p.name != a.name).all(|p| p.holds), "{:?}", r.pairings);
    }

    #[test]
    fn perturbed_flat_agrees_on_codazzi() {
        let r = record("perturbed_flat");
        assert!(!r.codazzi_ricci.holds && !r.wstar_divergence_free.holds);
        assert!(!r.einstein.holds && !r.wstar_contraction_zero.holds);
    }
}
