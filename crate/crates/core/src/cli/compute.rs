use std::fmt::Write as _;

use super::run::RunError;
use crate::expr::Point;
use crate::geometry::{MetricSpec, PointTensor};
use crate::relativity::{energy_momentum_at, FieldEquationConfig};
use crate::wstar::{krupka_decompose, Evaluator};

pub const TENSORS: [&str; 11] = [
    "metric",
    "inverse",
    "christoffel",
    "riemann",
    "ricci",
    "scalar",
    "weyl",
    "wstar",
    "wstar_contraction",
    "energy_momentum",
    "krupka",
];

/// Entries at or below this magnitude are not printed.
pub const ZERO: f64 = 1e-12;

/// Parses `t=1,r=4`. Coordinates left out sit at the middle of their
/// sampling interval.
pub fn parse_point(metric: &MetricSpec, text: &str) -> Result<Point, RunError> {
    let mut coords: Vec<f64> = metric.domain().iter().map(|iv| 0.5 * (iv.lo + iv.hi)).collect();
    let mut seen = vec![false; coords.len()];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| RunError::Point(format!("expected name=value, found `{part}`")))?;
        let k = metric
            .coord_index(name.trim())
            .ok_or_else(|| RunError::Point(format!("unknown coordinate `{}`", name.trim())))?;
        if std::mem::replace(&mut seen[k], true) {
            return Err(RunError::Point(format!("coordinate `{}` given twice", name.trim())));
        }
        coords[k] = value
            .trim()
            .parse()
            .map_err(|_| RunError::Point(format!("`{}` is not a number", value.trim())))?;
    }
    Ok(metric.point(coords))
}

fn render(out: &mut String, label: &str, t: &PointTensor) {
    let entries = t.nonzero_entries(ZERO);
    if t.rank() == 0 {
        let _ = writeln!(out, "{label}: {}", t.data()[0]);
        return;
    }
    if entries.is_empty() {
        let _ = writeln!(out, "{label}: all components zero");
        return;
    }
    let _ = writeln!(out, "{label}:");
    for (ix, v) in entries {
        let ix: Vec<String> = ix.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "  ({}): {v}", ix.join(","));
    }
}

/// Prints the non-zero components of one tensor at `p`, in lexicographic
/// index order.
pub fn compute_at(ev: &Evaluator, tensor: &str, p: &Point, cfg: &FieldEquationConfig) -> Result<String, RunError> {
    if !TENSORS.contains(&tensor) {
        return Err(RunError::Usage(format!("unknown tensor `{tensor}`; one of {}", TENSORS.join(", "))));
    }
    let s = ev.at(p)?;
    let mut out = String::new();
    let c = &s.curv;
    match tensor {
        "metric" => render(&mut out, "g_ij", &c.g),
        "inverse" => render(&mut out, "g^ij", &c.g_inv),
        "christoffel" => render(&mut out, "Gamma^h_ij", &c.christoffel),
        "riemann" => render(&mut out, "R_ijkl", &c.riemann),
        "ricci" => render(&mut out, "R_jk", &c.ricci),
        "scalar" => {
            let _ = writeln!(out, "R: {}", c.scalar);
        }
        "weyl" => render(&mut out, "C_ijkl", &s.weyl),
        "wstar" => render(&mut out, "W*_ijkl", &s.wstar),
        "wstar_contraction" => render(&mut out, "W*_jk", &s.wstar_contraction),
        "energy_momentum" => render(&mut out, "T_ij", &energy_momentum_at(&s, cfg)),
        "krupka" => {
            let r = krupka_decompose(&s).map_err(|e| RunError::Usage(e.to_string()))?;
            let parts = r.authoritative();
            render(&mut out, "C_lm", &parts.c);
            render(&mut out, "D_km", &parts.d);
            render(&mut out, "E_kl", &parts.e);
            render(&mut out, "B^i_klm", &parts.b);
        }
        _ => unreachable!("checked above"),
    }
    Ok(out)
}
