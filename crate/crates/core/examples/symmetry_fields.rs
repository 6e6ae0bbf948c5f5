// Conformal and matter-inheritance fits along a vector field.

use std::error::Error;
use std::sync::Arc;

use wstar::cli::catalog_metric;
use wstar::geometry::{Geometry, VectorFieldSpec};
use wstar::relativity::{conformal_fit, matter_inheritance_check, FieldEquationConfig, SymmetryFields};

pub fn run() -> Result<(), Box<dyn Error>> {
    let cfg = FieldEquationConfig::default();
    for (name, xi, at) in [
        ("schwarzschild", "1, 0, 0, 0", vec![1.0, 5.0, 1.0, 0.3]),
        ("minkowski", "t, x, y, z", vec![0.5, 1.0, -2.0, 0.7]),
        ("desitter_flat", "1, -x, -y, -z", vec![0.2, 0.4, 0.1, -0.3]),
    ] {
        let geo = Arc::new(Geometry::new(catalog_metric(name).ok_or("catalog")?)?);
        let v = VectorFieldSpec::parse(geo.metric(), xi)?;
        let fields = SymmetryFields::new(&geo, &v, &cfg)?;
        let p = geo.metric().point(at);
        let c = geo.at(&p)?;
        let conf = conformal_fit(&fields.lie_metric.eval(&p)?, &c.g, &c.g_inv);
        let inh = matter_inheritance_check(&fields.lie_t.eval(&p)?, &fields.t.eval(&p)?);
        println!(
            "{name:14} xi = ({xi}): phi = {:.6} (residual {:.1e}), phi_T = {:?} (residual {:.1e})",
            conf.phi, conf.residual.value, inh.phi, inh.residual.value
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
