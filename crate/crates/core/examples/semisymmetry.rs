// The commutator [nabla_mu, nabla_nu] acting on Ricci and on W*, through
// the Ricci identity.

use std::error::Error;
use std::sync::Arc;

use wstar::cli::catalog_metric;
use wstar::geometry::{commutator_via_ricci_identity, Geometry};
use wstar::wstar::{ricci_semisymmetry_residual, wstar_semisymmetry_residual, Evaluator};

pub fn run() -> Result<(), Box<dyn Error>> {
    for name in ["desitter_flat", "schwarzschild", "flrw_dust"] {
        let geo = Arc::new(Geometry::new(catalog_metric(name).ok_or("catalog")?)?);
        let ev = Evaluator::new(geo.clone())?;
        let mid: Vec<f64> = geo.metric().domain().iter().map(|iv| 0.5 * (iv.lo + iv.hi)).collect();
        let s = ev.at(&geo.metric().point(mid))?;
        let ww = commutator_via_ricci_identity(&s.wstar_contraction, &s.curv.curvature_operator)?;
        let r = wstar_semisymmetry_residual(&s);
        println!(
            "{name:14} |[,]R_jk| {:.3e}  |[,]W*_ijkl| {:.3e}  |[,]W*_jk| {:.3e}  identity gap {:.1e}",
            ricci_semisymmetry_residual(&s).value,
            r.wstar.value,
            ww.max_abs(),
            r.contraction.value
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
