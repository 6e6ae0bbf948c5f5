// Splits W*^i_{klm} into a traceless part and three Kronecker-delta terms,
// comparing the 1/33 closed forms with a direct linear solve.

use std::error::Error;
use std::sync::Arc;

use wstar::cli::catalog_metric;
use wstar::geometry::Geometry;
use wstar::wstar::{krupka_decompose, Evaluator};

pub fn run() -> Result<(), Box<dyn Error>> {
    for name in ["desitter_flat", "flrw_dust"] {
        let geo = Arc::new(Geometry::new(catalog_metric(name).ok_or("catalog")?)?);
        let ev = Evaluator::new(geo.clone())?;
        let s = ev.at(&geo.metric().point(vec![1.0, 0.1, 0.2, 0.3]))?;
        let report = krupka_decompose(&s)?;
        let solved = report.oracle.as_ref().map_err(|e| e.to_string())?;
        println!("{name}");
        println!("  reconstruction  {:.3e}", solved.reconstruction_residual(&s.wstar_mixed));
        println!("  traces of B     {:.3e}", solved.trace_residual());
        println!("  max |C| solved  {:.3e}, closed form {:.3e}", solved.c.max_abs(), report.printed_c());
        println!("  D_00 solved {:.6}, closed form {:.6}", solved.d.at(&[0, 0]), report.printed.d.at(&[0, 0]));
        println!("  closed forms vs solve  {:.3e}", report.closed_form_gap().unwrap_or(f64::NAN));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
