// Christoffel symbols, Riemann, Ricci and the Kretschmann scalar of the
// Schwarzschild exterior.

use std::error::Error;

use wstar::cli::catalog_metric;
use wstar::geometry::Geometry;

pub fn run() -> Result<(), Box<dyn Error>> {
    let geo = Geometry::new(catalog_metric("schwarzschild").ok_or("catalog")?)?;
    let p = geo.metric().point(vec![0.0, 4.0, 1.0, 0.5]);
    let c = geo.at(&p)?;

    println!("non-zero Christoffel symbols at r = 4:");
    for (ix, v) in c.christoffel.nonzero_entries(1e-12) {
        println!("  Gamma^{}_{}{} = {v:.6}", ix[0], ix[1], ix[2]);
    }

    let r = &c.riemann;
    let g_inv = &c.g_inv;
    let raised = r.raise(0, g_inv)?.raise(1, g_inv)?.raise(2, g_inv)?.raise(3, g_inv)?;
    let k: f64 = r.data().iter().zip(raised.data()).map(|(a, b)| a * b).sum();
    println!("Kretschmann R_ijkl R^ijkl = {k:.9} (48 M^2 / r^6 = {:.9})", 48.0 / 4f64.powi(6));
    println!("max |R_jk| = {:.3e}, R = {:.3e}", c.ricci.max_abs(), c.scalar);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
