use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::geometry::{signature, PointTensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FluidError {
    #[error("T^i_j has complex eigenvalues (imaginary part {0:e})")]
    ComplexEigenvalues(f64),
    #[error("no timelike eigenvector")]
    NoTimelikeEigenvector,
    #[error("perfect fluid decomposition needs dimension at least 2")]
    Dimension,
}

/// `T_{ij} = (μ + p) u_i u_j + p g_{ij}` read off one point.
#[derive(Debug, Clone)]
pub struct FluidDecomposition {
    /// Energy density.
    pub mu: f64,
    /// Isotropic pressure.
    pub p: f64,
    /// Unit timelike velocity, lower index.
    pub u: PointTensor,
    /// Spread of the spacelike eigenvalues about their mean.
    pub anisotropy: f64,
    /// `max|T − ((μ+p)uu + pg)|`
    pub reconstruction: f64,
    /// `anisotropy + reconstruction`
    pub residual: f64,
    /// `p/μ`, absent when `|μ| ≤ 1e-10`.
    pub w: Option<f64>,
    /// All eigenvalues coincide (`T ∝ g`); reported with `μ = −p`.
    pub degenerate: bool,
}

impl FluidDecomposition {
    /// `g^{ij}u_iu_j`
    pub fn u_norm(&self, g_inv: &PointTensor) -> f64 {
        let n = self.u.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += g_inv.at(&[i, j]) * self.u.at(&[i]) * self.u.at(&[j]);
            }
        }
        acc
    }

    /// Equation of state label: `w = −1` is Λ-like, `−1 < w < −1/3` the
    /// quintessence band.
    pub fn regime(&self) -> &'static str {
        match self.w {
            None => "undefined",
            Some(w) if (w + 1.0).abs() <= 1e-6 => "cosmological constant",
            Some(w) if w > -1.0 && w < -1.0 / 3.0 => "quintessence",
            Some(w) if w.abs() <= 1e-6 => "dust",
            Some(_) => "other",
        }
    }
}

fn matrix(t: &PointTensor) -> DMatrix<f64> {
    let n = t.dim();
    DMatrix::from_fn(n, n, |i, j| t.at(&[i, j]))
}

fn g_norm(g: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g[(i, j)] * v[i] * v[j]).sum()
}

/// Unit timelike covector `u_i = g_{ij} v^j / sqrt(−g(v,v))`, with `v^0 ≥ 0`.
fn unit_covector(g: &DMatrix<f64>, v: &[f64]) -> PointTensor {
    let n = v.len();
    let norm = (-g_norm(g, v)).sqrt();
    let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
    PointTensor::from_fn(n, signature("l"), |ix| {
        (0..n).map(|j| g[(ix[0], j)] * v[j]).sum::<f64>() * sign / norm
    })
}

/// Null vector of `m − λ I` from the smallest singular value.
fn eigenvector(m: &DMatrix<f64>, lambda: f64) -> Vec<f64> {
    let n = m.nrows();
    let shifted = m - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty");
    v_t.row(k).iter().copied().collect()
}

/// Eigen-decomposes `T^i_j` and reads off `μ`, `p` and `u`.
///
/// The timelike eigenvector selects `μ = −λ`; `p` is the mean of the other
/// eigenvalues. When all eigenvalues coincide the fluid is the Λ-like case
/// `μ = −p` and `u` is taken along the timelike eigen-direction of `g`.
pub fn perfect_fluid_decompose(t: &PointTensor, g: &PointTensor, g_inv: &PointTensor) -> Result<FluidDecomposition, FluidError> {
    let n = t.dim();
    if n < 2 {
        return Err(FluidError::Dimension);
    }
    let gm = matrix(g);
    let mixed = matrix(g_inv) * matrix(t);
    let scale = 1.0 + mixed.amax();
    let eig = mixed.complex_eigenvalues();
    let worst_imag = eig.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
    if worst_imag > 1e-9 * scale {
        return Err(FluidError::ComplexEigenvalues(worst_imag));
    }
    let mut lambdas: Vec<f64> = eig.iter().map(|z| z.re).collect();
    lambdas.sort_by(f64::total_cmp);
    let spread = lambdas[n - 1] - lambdas[0];

    let (mu, p, u, anisotropy, degenerate) = if spread <= 1e-9 * scale {
        let p = lambdas.iter().sum::<f64>() / n as f64;
        let se = SymmetricEigen::new(gm.clone());
        let k = (0..n)
            .min_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]))
            .expect("non-empty");
        if se.eigenvalues[k] >= 0.0 {
            return Err(FluidError::NoTimelikeEigenvector);
        }
        let v: Vec<f64> = se.eigenvectors.column(k).iter().copied().collect();
        (-p, p, unit_covector(&gm, &v), spread, true)
    } else {
        let candidates: Vec<(usize, Vec<f64>, f64)> = lambdas
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                let v = eigenvector(&mixed, l);
                let len2: f64 = v.iter().map(|x| x * x).sum();
                let q = g_norm(&gm, &v) / len2;
                (k, v, q)
            })
            .collect();
        let (kt, v, q) = candidates
            .into_iter()
            .min_by(|a, b| a.2.total_cmp(&b.2))
            .expect("non-empty");
        if q >= 0.0 {
            return Err(FluidError::NoTimelikeEigenvector);
        }
        let rest: Vec<f64> = lambdas.iter().enumerate().filter(|(k, _)| *k != kt).map(|(_, l)| *l).collect();
        let p = rest.iter().sum::<f64>() / rest.len() as f64;
        let aniso = rest.iter().fold(0.0_f64, |m, l| m.max((l - p).abs()));
        (-lambdas[kt], p, unit_covector(&gm, &v), aniso, false)
    };
    let rebuilt = PointTensor::from_fn(n, signature("ll"), |ix| {
        (mu + p) * u.at(&[ix[0]]) * u.at(&[ix[1]]) + p * g.at(ix)
    });
    let reconstruction = rebuilt.max_abs_diff(t).expect("same shape");
    Ok(FluidDecomposition {
        mu,
        p,
        u,
        anisotropy,
        reconstruction,
        residual: anisotropy + reconstruction,
        w: (mu.abs() > 1e-10).then(|| p / mu),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minkowski() -> PointTensor {
        PointTensor::from_fn(4, signature("ll"), |ix| match (ix[0], ix[1]) {
            (0, 0) => -1.0,
            (a, b) if a == b => 1.0,
            _ => 0.0,
        })
    }

    #[test]
    fn boosted_dust_is_recovered() {
        let g = minkowski();
        // u^i = γ(1, v, 0, 0), v = 0.6
        let (gamma, v) = (1.25, 0.6);
        let u_low = [-gamma, gamma * v, 0.0, 0.0];
        let (mu, p) = (2.0, 0.5);
        let t = PointTensor::from_fn(4, signature("ll"), |ix| {
            (mu + p) * u_low[ix[0]] * u_low[ix[1]] + p * g.at(ix)
        });
        let f = perfect_fluid_decompose(&t, &g, &g).unwrap();
        assert!((f.mu - mu).abs() < 1e-12);
        assert!((f.p - p).abs() < 1e-12);
        assert!((f.u_norm(&g) + 1.0).abs() < 1e-12);
        assert!(f.reconstruction < 1e-12);
        assert!((f.u.at(&[0]) - u_low[0]).abs() < 1e-12);
        assert!(!f.degenerate);
    }

    #[test]
    fn pressure_times_metric_is_lambda_like() {
        let g = minkowski();
        let t = g.scale(-3.0);
        let f = perfect_fluid_decompose(&t, &g, &g).unwrap();
        assert!(f.degenerate);
        assert_eq!((f.mu, f.p), (3.0, -3.0));
        assert_eq!(f.w, Some(-1.0));
        assert_eq!(f.regime(), "cosmological constant");
        assert!(f.reconstruction < 1e-15);
    }

    #[test]
    fn null_flux_block_has_complex_eigenvalues() {
        let g = minkowski();
        let t = PointTensor::from_fn(4, signature("ll"), |ix| match (ix[0], ix[1]) {
            (0, 1) | (1, 0) => 1.0,
            _ => 0.0,
        });
        let err = perfect_fluid_decompose(&t, &g, &g).unwrap_err();
        assert!(matches!(err, FluidError::ComplexEigenvalues(im) if (im - 1.0).abs() < 1e-12));
    }
}
