// Three routes to the divergence of W* on the dust universe: covariant
// differentiation and trace, the displayed formula with coefficient
// 1/(n-1), and the same formula with 1/(2(n-1)).

use std::error::Error;
use std::sync::Arc;

use wstar::cli::catalog_metric;
use wstar::geometry::Geometry;
use wstar::wstar::{codazzi_residual, divergence_corrected, divergence_direct, divergence_formula, Evaluator};

pub fn run() -> Result<(), Box<dyn Error>> {
    for name in ["flrw_dust", "perturbed_flat"] {
        let geo = Arc::new(Geometry::new(catalog_metric(name).ok_or("catalog")?)?);
        let ev = Evaluator::new(geo.clone())?;
        let mid: Vec<f64> = geo.metric().domain().iter().map(|iv| 0.5 * (iv.lo + iv.hi)).collect();
        let s = ev.at(&geo.metric().point(mid))?;
        let direct = divergence_direct(&s);
        println!("{name}");
        println!("  max |div W*|                 {:.6e}", direct.max_abs());
        println!("  gap to 1/(n-1) formula       {:.6e}", direct.max_abs_diff(&divergence_formula(&s))?);
        println!("  gap to 1/(2(n-1)) formula    {:.6e}", direct.max_abs_diff(&divergence_corrected(&s))?);
        println!("  Codazzi residual             {:.6e}", codazzi_residual(&s).value);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
