use super::curvature::GeometryError;
use super::tensor::{multi_indices, PointTensor, Variance};

/// `[∇_μ, ∇_ν] T_{i_1…i_r}` from the Ricci identity,
/// `−Σ_a Rm^s_{i_a μν} T_{i_1…s…i_r}`, with `μ, ν` appended as the last two
/// slots. `rm` is the curvature operator `Rm^h_{jkl}`.
pub fn commutator_via_ricci_identity(t: &PointTensor, rm: &PointTensor) -> Result<PointTensor, GeometryError> {
    if t.variance().iter().any(|v| *v == Variance::Upper) {
        return Err(GeometryError::NotCovariant("Ricci identity"));
    }
    let n = t.dim();
    let r = t.rank();
    let mut out = PointTensor::zeros(n, vec![Variance::Lower; r + 2]);
    for ix in multi_indices(n, r + 2) {
        let (mu, nu) = (ix[r], ix[r + 1]);
        let mut src = ix[..r].to_vec();
        let mut acc = 0.0;
        for a in 0..r {
            let orig = src[a];
            for s in 0..n {
                src[a] = s;
                acc -= rm.at(&[s, orig, mu, nu]) * t.at(&src);
            }
            src[a] = orig;
        }
        out.set(&ix, acc);
    }
    Ok(out)
}

/// Antisymmetrised second derivative `∇_ν∇_μ T − ∇_μ∇_ν T` read off a second
/// covariant derivative whose last two slots are `(μ, ν)` in the order
/// `∇_ν(∇_μ T)`, i.e. `nn[…, μ, ν] = ∇_ν∇_μ T`.
///
/// Returns the tensor with slots `(…, μ, ν)` holding `∇_μ∇_ν T − ∇_ν∇_μ T`.
pub fn commutator_from_second_derivative(nn: &PointTensor) -> PointTensor {
    let r = nn.rank();
    let mut perm: Vec<usize> = (0..r).collect();
    perm.swap(r - 2, r - 1);
    nn.permute(&perm).sub(nn).expect("same shape")
}
