// Energy density, pressure and equation of state read off the field
// equations for the dust universe and for de Sitter.

use std::error::Error;
use std::sync::Arc;

use wstar::cli::catalog_metric;
use wstar::geometry::Geometry;
use wstar::relativity::{fluid_at, fluid_trace_residual, FieldEquationConfig};
use wstar::wstar::Evaluator;

pub fn run() -> Result<(), Box<dyn Error>> {
    let cfg = FieldEquationConfig::default();
    for (name, t) in [("flrw_dust", 1.0), ("flrw_dust", 2.0), ("desitter_flat", 0.5)] {
        let geo = Arc::new(Geometry::new(catalog_metric(name).ok_or("catalog")?)?);
        let ev = Evaluator::new(geo.clone())?;
        let s = ev.at(&geo.metric().point(vec![t, 0.0, 0.0, 0.0]))?;
        let f = fluid_at(&s, &cfg)?;
        println!(
            "{name} t={t}: mu = {:.9}, p = {:.3e}, w = {:?} ({}), u.u = {:.12}, trace residual {:.1e}",
            f.mu,
            f.p,
            f.w,
            f.regime(),
            f.u_norm(&s.curv.g_inv),
            fluid_trace_residual(&s, &f, &cfg).value
        );
    }
    println!("Friedmann: mu = 3 (2/(3t))^2 = {:.9} at t = 1", 3.0 * (2.0_f64 / 3.0).powi(2));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
