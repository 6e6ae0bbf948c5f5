// Builds W*_{ijkl} on a perturbed Minkowski metric and shows that it keeps
// neither pair nor cyclic symmetry while its trace is fixed by Ricci.

use std::error::Error;
use std::sync::Arc;

use wstar::cli::catalog_metric;
use wstar::geometry::Geometry;
use wstar::wstar::{contraction_target, wstar_cyclic_gap, wstar_pair_gap, Evaluator};

pub fn run() -> Result<(), Box<dyn Error>> {
    let geo = Arc::new(Geometry::new(catalog_metric("perturbed_flat").ok_or("catalog")?)?);
    let ev = Evaluator::new(geo.clone())?;
    println!("compiled tape: {} operations", ev.tape_len());

    let s = ev.at(&geo.metric().point(vec![0.3, -0.4, 0.5, 0.2]))?;
    println!("max |W*_ijkl|                      = {:.6e}", s.wstar.max_abs());
    println!("max |W*_ijkl - W*_klij|            = {:.6e}", wstar_pair_gap(&s));
    println!("max |cyclic sum of W*|             = {:.6e}", wstar_cyclic_gap(&s));
    let target = contraction_target(&s);
    println!(
        "max |g^il W*_ijkl - 4/3 (R_jk - R g_jk / 4)| = {:.3e}",
        s.wstar_contraction.max_abs_diff(&target)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
