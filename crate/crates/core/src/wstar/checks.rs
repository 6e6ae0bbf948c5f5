use serde::Serialize;

use super::Snapshot;
use crate::geometry::{commutator_via_ricci_identity, multi_indices, signature, PointTensor};

/// A residual together with the magnitude it should be judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(value: f64, scale: f64) -> Self {
        Residual { value, scale }
    }

    /// `value ≤ atol + rtol·scale`
    pub fn within(&self, atol: f64, rtol: f64) -> bool {
        self.value <= atol + rtol * self.scale
    }

    /// Componentwise maximum, for folding over points.
    pub fn max(self, other: Residual) -> Residual {
        Residual::new(self.value.max(other.value), self.scale.max(other.scale))
    }
}

fn diff(a: &PointTensor, b: &PointTensor) -> f64 {
    a.max_abs_diff(b).expect("matching shapes")
}

fn coef(n: usize) -> f64 {
    1.0 / (n as f64 - 1.0)
}

/// `n/(n−1)·(R_{jk} − (R/n) g_{jk})`, the value the trace of W* must take.
pub fn contraction_target(s: &Snapshot) -> PointTensor {
    let n = s.dim();
    let c = &s.curv;
    let nf = n as f64;
    PointTensor::from_fn(n, signature("ll"), |ix| {
        nf / (nf - 1.0) * (c.ricci.at(ix) - c.scalar / nf * c.g.at(ix))
    })
}

/// `g^{il}W*_{ijkl}` against `(4/3)(R_{jk} − (R/4)g_{jk})`.
pub fn wstar_contraction_residual(s: &Snapshot) -> Residual {
    let value = diff(&s.wstar_contraction, &contraction_target(s));
    Residual::new(value, 1.0 + s.curv.scalar.abs() * s.curv.g.max_abs())
}

/// `∇_h W*^h_{jkl}` by differentiating the `(1,3)` field and tracing.
pub fn divergence_direct(s: &Snapshot) -> PointTensor {
    s.nabla_wstar_mixed.contract(0, 4).expect("(1,4) slots")
}

fn divergence_with(s: &Snapshot, c: f64) -> PointTensor {
    let n = s.dim();
    let nr = &s.nabla_ricci;
    let ds = &s.nabla_scalar;
    let g = &s.curv.g;
    PointTensor::from_fn(n, signature("lll"), |ix| {
        let (j, k, l) = (ix[0], ix[1], ix[2]);
        nr.at(&[j, k, l]) - nr.at(&[j, l, k]) - c * (g.at(&[j, k]) * ds.at(&[l]) - g.at(&[j, l]) * ds.at(&[k]))
    })
}

/// The closed form `∇_l R_{jk} − ∇_k R_{jl} − (1/3)[g_{jk}∇_l R − g_{jl}∇_k R]`
/// exactly as printed (general `n`: `1/(n−1)`).
pub fn divergence_formula(s: &Snapshot) -> PointTensor {
    divergence_with(s, coef(s.dim()))
}

/// The closed form with `∇_h R^h_l = ½∇_l R` carried through, giving the
/// coefficient `1/(2(n−1))`.
pub fn divergence_corrected(s: &Snapshot) -> PointTensor {
    divergence_with(s, 0.5 * coef(s.dim()))
}

/// Direct divergence against the printed closed form.
pub fn divergence_residual(s: &Snapshot) -> Residual {
    let direct = divergence_direct(s);
    Residual::new(diff(&direct, &divergence_formula(s)), 1.0 + direct.max_abs())
}

/// Direct divergence against the corrected closed form.
pub fn divergence_corrected_residual(s: &Snapshot) -> Residual {
    let direct = divergence_direct(s);
    Residual::new(diff(&direct, &divergence_corrected(s)), 1.0 + direct.max_abs())
}

/// `max|∇_h W*^h_{jkl}|`
pub fn divergence_norm(s: &Snapshot) -> Residual {
    Residual::new(divergence_direct(s).max_abs(), 1.0 + s.nabla_ricci.max_abs())
}

/// `∇_l R_{jk} − ∇_k R_{jl}`
pub fn codazzi_tensor(s: &Snapshot) -> PointTensor {
    let nr = &s.nabla_ricci;
    PointTensor::from_fn(s.dim(), signature("lll"), |ix| {
        nr.at(&[ix[0], ix[1], ix[2]]) - nr.at(&[ix[0], ix[2], ix[1]])
    })
}

pub fn codazzi_residual(s: &Snapshot) -> Residual {
    Residual::new(codazzi_tensor(s).max_abs(), 1.0 + s.nabla_ricci.max_abs())
}

/// `max|∂_l R|`
pub fn scalar_gradient(s: &Snapshot) -> Residual {
    Residual::new(s.nabla_scalar.max_abs(), 1.0 + s.curv.scalar.abs())
}

/// `∇_h C^h_{jkl}`, from the covariant derivative of `C_{ijkl}` traced with
/// `g^{hi}`.
pub fn weyl_divergence_direct(s: &Snapshot) -> PointTensor {
    s.nabla_weyl.trace_with(0, 4, &s.curv.g_inv).expect("lower slots")
}

fn weyl_divergence_with(s: &Snapshot, outer: f64, inner: f64) -> PointTensor {
    let n = s.dim();
    let ds = &s.nabla_scalar;
    let g = &s.curv.g;
    let cod = codazzi_tensor(s);
    PointTensor::from_fn(n, signature("lll"), |ix| {
        let (j, k, l) = (ix[0], ix[1], ix[2]);
        outer * cod.at(ix) + inner * (g.at(&[j, k]) * ds.at(&[l]) - g.at(&[j, l]) * ds.at(&[k]))
    })
}

/// `(n−3)/(n−2)·[∇_l R_{jk} − ∇_k R_{jl} − (g_{jk}∇_l R − g_{jl}∇_k R)/(2(n−1))]`
pub fn weyl_divergence_standard(s: &Snapshot) -> PointTensor {
    let n = s.dim() as f64;
    let outer = (n - 3.0) / (n - 2.0);
    weyl_divergence_with(s, outer, -outer / (2.0 * (n - 1.0)))
}

/// `(n−3)/(n−2)·[∇_l R_{jk} − ∇_k R_{jl}] + (g_{jk}∇_l R − g_{jl}∇_k R)/(2(n−1))`,
/// the closed form as printed alongside the divergence theorem.
pub fn weyl_divergence_printed(s: &Snapshot) -> PointTensor {
    let n = s.dim() as f64;
    weyl_divergence_with(s, (n - 3.0) / (n - 2.0), 1.0 / (2.0 * (n - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylDivergence {
    /// `max|∇_h C^h_{jkl}|`
    pub direct: Residual,
    /// Direct route against the standard closed form.
    pub standard_gap: Residual,
    /// Direct route against the printed closed form.
    pub printed_gap: Residual,
}

pub fn weyl_divergence_crosscheck(s: &Snapshot) -> WeylDivergence {
    let direct = weyl_divergence_direct(s);
    let scale = 1.0 + s.nabla_ricci.max_abs() + s.nabla_scalar.max_abs();
    WeylDivergence {
        direct: Residual::new(direct.max_abs(), scale),
        standard_gap: Residual::new(diff(&direct, &weyl_divergence_standard(s)), scale),
        printed_gap: Residual::new(diff(&direct, &weyl_divergence_printed(s)), scale),
    }
}

/// `max|∇_m W*_{ijkl}|`
pub fn wstar_symmetry_residual(s: &Snapshot) -> Residual {
    Residual::new(s.nabla_wstar.max_abs(), 1.0 + s.nabla_riemann.max_abs() + s.wstar.max_abs())
}

/// `max|∇_m R_{jk} − (1/n) g_{jk}∇_m R|`
pub fn ricci_symmetry_gap(s: &Snapshot) -> Residual {
    let n = s.dim();
    let g = &s.curv.g;
    let t = PointTensor::from_fn(n, signature("lll"), |ix| {
        s.nabla_ricci.at(ix) - g.at(&[ix[0], ix[1]]) * s.nabla_scalar.at(&[ix[2]]) / n as f64
    });
    Residual::new(t.max_abs(), 1.0 + s.nabla_ricci.max_abs())
}

/// `∇_m W*_{ijkl} + ∇_k W*_{ijlm} + ∇_l W*_{ijmk}`
pub fn wstar_cyclic_sum(s: &Snapshot) -> PointTensor {
    let nw = &s.nabla_wstar;
    PointTensor::from_fn(s.dim(), signature("lllll"), |ix| {
        let (i, j, k, l, m) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        nw.at(&[i, j, k, l, m]) + nw.at(&[i, j, l, m, k]) + nw.at(&[i, j, m, k, l])
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BianchiResiduals {
    /// Cyclic sum plus its Ricci correction; an identity.
    pub identity: Residual,
    /// Cyclic sum alone; vanishes iff the Ricci tensor is Codazzi.
    pub cyclic: Residual,
}

pub fn wstar_bianchi_residual(s: &Snapshot) -> BianchiResiduals {
    let n = s.dim();
    let c = coef(n);
    let g = &s.curv.g;
    let nr = |a: usize, b: usize, m: usize| s.nabla_ricci.at(&[a, b, m]);
    let cyc = wstar_cyclic_sum(s);
    let full = PointTensor::from_fn(n, signature("lllll"), |ix| {
        let (i, j, k, l, m) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        let corr = g.at(&[j, k]) * (nr(i, l, m) - nr(i, m, l))
            + g.at(&[j, l]) * (nr(i, m, k) - nr(i, k, m))
            + g.at(&[j, m]) * (nr(i, k, l) - nr(i, l, k));
        cyc.at(ix) + c * corr
    });
    let scale = 1.0 + s.nabla_wstar.max_abs();
    BianchiResiduals {
        identity: Residual::new(full.max_abs(), scale),
        cyclic: Residual::new(cyc.max_abs(), scale),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemisymmetryResiduals {
    /// `max|[∇_μ,∇_ν] W*_{ijkl}|`
    pub wstar: Residual,
    /// `max|[∇_μ,∇_ν] W*_{jk} − (4/3)[∇_μ,∇_ν] R_{jk}|`; an identity.
    pub contraction: Residual,
}

pub fn wstar_semisymmetry_residual(s: &Snapshot) -> SemisymmetryResiduals {
    let n = s.dim() as f64;
    let rm = &s.curv.curvature_operator;
    let comm = |t: &PointTensor| commutator_via_ricci_identity(t, rm).expect("covariant input");
    let cw = comm(&s.wstar);
    let cwc = comm(&s.wstar_contraction);
    let cr = comm(&s.curv.ricci);
    let gap = diff(&cwc, &cr.scale(n / (n - 1.0)));
    let scale = 1.0 + rm.max_abs() * (s.wstar.max_abs() + s.curv.ricci.max_abs());
    SemisymmetryResiduals {
        wstar: Residual::new(cw.max_abs(), scale),
        contraction: Residual::new(gap, scale),
    }
}

/// `max|[∇_μ,∇_ν] R_{jk}|`
pub fn ricci_semisymmetry_residual(s: &Snapshot) -> Residual {
    let rm = &s.curv.curvature_operator;
    let cr = commutator_via_ricci_identity(&s.curv.ricci, rm).expect("covariant input");
    Residual::new(cr.max_abs(), 1.0 + rm.max_abs() * s.curv.ricci.max_abs())
}

/// `max|W*_{ijkl}|` against `max|R_{ijkl}|`: W*-flat when
/// `max|W*| ≤ atol + rtol·max|R|`.
pub fn wstar_flat_residual(s: &Snapshot) -> Residual {
    Residual::new(s.wstar.max_abs(), s.curv.riemann.max_abs())
}

/// `max|W*_{ijkl} − W*_{klij}|`
pub fn wstar_pair_gap(s: &Snapshot) -> f64 {
    diff(&s.wstar, &s.wstar.permute(&[2, 3, 0, 1]))
}

/// `max|W*_{ijkl} + W*_{jkil} + W*_{kijl}|`
pub fn wstar_cyclic_gap(s: &Snapshot) -> f64 {
    let w = &s.wstar;
    multi_indices(s.dim(), 4)
        .map(|ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            (w.at(&[i, j, k, l]) + w.at(&[j, k, i, l]) + w.at(&[k, i, j, l])).abs()
        })
        .fold(0.0, f64::max)
}

/// `max|R_{jk} − (R/n)g_{jk}|`
pub fn einstein_residual(s: &Snapshot) -> Residual {
    let n = s.dim() as f64;
    let c = &s.curv;
    let t = PointTensor::from_fn(s.dim(), signature("ll"), |ix| c.ricci.at(ix) - c.scalar / n * c.g.at(ix));
    Residual::new(t.max_abs(), 1.0 + c.scalar.abs() * c.g.max_abs())
}

/// `max|g_{ia} g^{aj} − δ_i^j|`
pub fn inverse_residual(s: &Snapshot) -> Residual {
    let prod = s.curv.g_inv.lower(1, &s.curv.g).expect("upper slot");
    Residual::new(diff(&prod, &PointTensor::identity(s.dim())), 1.0)
}

/// Antisymmetry, pair symmetry and the first Bianchi identity of `R_{ijkl}`.
pub fn riemann_symmetry_residual(s: &Snapshot) -> Residual {
    let r = &s.curv.riemann;
    let worst = multi_indices(s.dim(), 4)
        .map(|ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let v = r.at(&ix);
            [
                v + r.at(&[j, i, k, l]),
                v + r.at(&[i, j, l, k]),
                v - r.at(&[k, l, i, j]),
                v + r.at(&[i, k, l, j]) + r.at(&[i, l, j, k]),
            ]
            .into_iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
        })
        .fold(0.0, f64::max);
    Residual::new(worst, 1.0 + r.max_abs())
}

/// `max|∇g|`
pub fn metric_compatibility_residual(s: &Snapshot) -> Residual {
    Residual::new(
        s.nabla_metric.max_abs(),
        1.0 + s.curv.christoffel.max_abs() * s.curv.g.max_abs(),
    )
}

/// `∇_m R_{ijkl} + ∇_k R_{ijlm} + ∇_l R_{ijmk}`
pub fn second_bianchi_residual(s: &Snapshot) -> Residual {
    let nr = &s.nabla_riemann;
    let worst = multi_indices(s.dim(), 5)
        .map(|ix| {
            let (i, j, k, l, m) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            (nr.at(&[i, j, k, l, m]) + nr.at(&[i, j, l, m, k]) + nr.at(&[i, j, m, k, l])).abs()
        })
        .fold(0.0, f64::max);
    Residual::new(worst, 1.0 + nr.max_abs())
}

/// `∇_h R^h_{jkl}` against `∇_l R_{jk} − ∇_k R_{jl}`.
pub fn contracted_bianchi_residual(s: &Snapshot) -> Residual {
    let div = s.nabla_riemann.trace_with(0, 4, &s.curv.g_inv).expect("lower slots");
    Residual::new(diff(&div, &codazzi_tensor(s)), 1.0 + s.nabla_riemann.max_abs())
}

/// `g^{ik}C_{ijkl}` and `g^{il}C_{ijkl}`.
pub fn weyl_traceless_residual(s: &Snapshot) -> Residual {
    let a = s.weyl.trace_with(0, 2, &s.curv.g_inv).expect("lower slots").max_abs();
    let b = s.weyl.trace_with(0, 3, &s.curv.g_inv).expect("lower slots").max_abs();
    Residual::new(a.max(b), 1.0 + s.curv.riemann.max_abs() * s.curv.g_inv.max_abs())
}
