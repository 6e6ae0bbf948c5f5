use crate::geometry::{MetricError, MetricSpec};

/// Names of the built-in metrics, in listing order.
pub const CATALOG: [&str; 5] = ["minkowski", "schwarzschild", "desitter_flat", "flrw_dust", "perturbed_flat"];

/// One-line description per catalog metric.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "minkowski" => "flat space-time, diag(-1, 1, 1, 1)",
        "schwarzschild" => "static vacuum black hole exterior, M = 1",
        "desitter_flat" => "de Sitter in flat slicing, a = exp(H t), H = 1",
        "flrw_dust" => "spatially flat dust universe, a = t^(2/3)",
        "perturbed_flat" => "Minkowski plus eps * h with a fixed quadratic h, eps = 0.05",
        _ => return None,
    })
}

/// Quadratic perturbation `h_{ij}` used by `perturbed_flat` (upper triangle).
pub const PERTURBATION: [(usize, usize, &str); 10] = [
    (0, 0, "x^2 + y*z"),
    (0, 1, "t*x"),
    (0, 2, "y^2"),
    (0, 3, "0"),
    (1, 1, "t^2 + z^2"),
    (1, 2, "x*y"),
    (1, 3, "t*z"),
    (2, 2, "x^2 - t*y"),
    (2, 3, "z*x"),
    (3, 3, "y^2 + t^2"),
];

pub fn catalog_metric(name: &str) -> Option<MetricSpec> {
    let built = match name {
        "minkowski" => minkowski(),
        "schwarzschild" => schwarzschild(),
        "desitter_flat" => desitter_flat(),
        "flrw_dust" => flrw_dust(),
        "perturbed_flat" => perturbed_flat(),
        _ => return None,
    };
    Some(built.expect("catalog metrics are well formed"))
}

const TXYZ: [&str; 4] = ["t", "x", "y", "z"];

fn minkowski() -> Result<MetricSpec, MetricError> {
    MetricSpec::builder("minkowski", &TXYZ)
        .dim(4)
        .domain("t", -5.0, 5.0)
        .domain("x", -5.0, 5.0)
        .domain("y", -5.0, 5.0)
        .domain("z", -5.0, 5.0)
        .signature(vec![-1, 1, 1, 1])
        .set_str(0, 0, "-1")?
        .set_str(1, 1, "1")?
        .set_str(2, 2, "1")?
        .set_str(3, 3, "1")?
        .build()
}

fn schwarzschild() -> Result<MetricSpec, MetricError> {
    MetricSpec::builder("schwarzschild", &["t", "r", "theta", "phi"])
        .dim(4)
        .param("M", 1.0)
        .domain("t", 0.0, 10.0)
        .domain("r", 3.0, 20.0)
        .domain("theta", 0.3, 2.8)
        .domain("phi", 0.0, 6.28)
        .signature(vec![-1, 1, 1, 1])
        .set_str(0, 0, "-(1 - 2*M/r)")?
        .set_str(1, 1, "1/(1 - 2*M/r)")?
        .set_str(2, 2, "r^2")?
        .set_str(3, 3, "r^2 * sin(theta)^2")?
        .build()
}

fn desitter_flat() -> Result<MetricSpec, MetricError> {
    MetricSpec::builder("desitter_flat", &TXYZ)
        .dim(4)
        .param("H", 1.0)
        .domain("t", -1.0, 1.0)
        .domain("x", -5.0, 5.0)
        .domain("y", -5.0, 5.0)
        .domain("z", -5.0, 5.0)
        .signature(vec![-1, 1, 1, 1])
        .set_str(0, 0, "-1")?
        .set_str(1, 1, "exp(2*H*t)")?
        .set_str(2, 2, "exp(2*H*t)")?
        .set_str(3, 3, "exp(2*H*t)")?
        .build()
}

fn flrw_dust() -> Result<MetricSpec, MetricError> {
    MetricSpec::builder("flrw_dust", &TXYZ)
        .dim(4)
        .domain("t", 0.5, 5.0)
        .domain("x", -5.0, 5.0)
        .domain("y", -5.0, 5.0)
        .domain("z", -5.0, 5.0)
        .signature(vec![-1, 1, 1, 1])
        .set_str(0, 0, "-1")?
        .set_str(1, 1, "t^(4/3)")?
        .set_str(2, 2, "t^(4/3)")?
        .set_str(3, 3, "t^(4/3)")?
        .build()
}

fn perturbed_flat() -> Result<MetricSpec, MetricError> {
    let mut b = MetricSpec::builder("perturbed_flat", &TXYZ)
        .dim(4)
        .param("eps", 0.05)
        .domain("t", -1.0, 1.0)
        .domain("x", -1.0, 1.0)
        .domain("y", -1.0, 1.0)
        .domain("z", -1.0, 1.0)
        .signature(vec![-1, 1, 1, 1]);
    for (i, j, h) in PERTURBATION {
        let eta = match (i == j, i) {
            (true, 0) => "-1",
            (true, _) => "1",
            _ => "0",
        };
        b = b.set_str(i, j, &format!("{eta} + eps*({h})"))?;
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::evaluate;

    #[test]
    fn every_listed_name_builds() {
        for name in CATALOG {
            let m = catalog_metric(name).unwrap();
            assert_eq!(m.name(), name);
            assert_eq!(m.dim(), 4);
            assert!(describe(name).is_some());
        }
        assert!(catalog_metric("kerr").is_none());
    }

    #[test]
    fn schwarzschild_defaults() {
        let m = catalog_metric("schwarzschild").unwrap();
        assert_eq!(m.params()["M"], 1.0);
        assert_eq!((m.domain()[1].lo, m.domain()[1].hi), (3.0, 20.0));
        let p = m.point(vec![0.0, 4.0, 1.0, 0.0]);
        assert_eq!(evaluate(m.component(1, 1), &p).unwrap(), 2.0);
    }

    #[test]
    fn perturbation_is_symmetric_and_small() {
        let m = catalog_metric("perturbed_flat").unwrap();
        assert!(!m.is_diagonal());
        let p = m.point(vec![0.5, -0.5, 0.25, 1.0]);
        let g01 = evaluate(m.component(0, 1), &p).unwrap();
        assert!((g01 - 0.05 * 0.5 * -0.5).abs() < 1e-15);
        assert_eq!(g01, evaluate(m.component(1, 0), &p).unwrap());
    }
}
