use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::Snapshot;
use crate::geometry::{signature, PointTensor, Variance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KrupkaError {
    #[error("trace system is singular")]
    Singular,
    #[error("closed forms are only available in dimension 4, got {0}")]
    Dimension(usize),
    #[error("expected a (1,3) tensor")]
    Shape,
}

/// `T1_{ml} = W^t_{tml}`, `T2_{ml} = W^t_{mtl}`, `T3_{ml} = W^t_{mlt}`.
#[derive(Debug, Clone)]
pub struct Traces {
    pub t1: PointTensor,
    pub t2: PointTensor,
    pub t3: PointTensor,
}

impl Traces {
    pub fn of(w: &PointTensor) -> Result<Self, KrupkaError> {
        if w.variance() != signature("ulll").as_slice() {
            return Err(KrupkaError::Shape);
        }
        let tr = |b| w.contract(0, b).map_err(|_| KrupkaError::Shape);
        Ok(Traces { t1: tr(1)?, t2: tr(2)?, t3: tr(3)? })
    }
}

/// `W^i_{klm} = B^i_{klm} + δ^i_k C_{lm} + δ^i_l D_{km} + δ^i_m E_{kl}`.
#[derive(Debug, Clone)]
pub struct KrupkaParts {
    pub b: PointTensor,
    pub c: PointTensor,
    pub d: PointTensor,
    pub e: PointTensor,
}

impl KrupkaParts {
    /// Fixes `C, D, E` and takes `B` as what remains of `w`.
    pub fn with_coefficients(w: &PointTensor, c: PointTensor, d: PointTensor, e: PointTensor) -> Self {
        let n = w.dim();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let b = PointTensor::from_fn(n, signature("ulll"), |ix| {
            let (i, k, l, m) = (ix[0], ix[1], ix[2], ix[3]);
            w.at(ix) - delta(i, k) * c.at(&[l, m]) - delta(i, l) * d.at(&[k, m]) - delta(i, m) * e.at(&[k, l])
        });
        KrupkaParts { b, c, d, e }
    }

    /// `max|W − (B + δC + δD + δE)|`
    pub fn reconstruction_residual(&self, w: &PointTensor) -> f64 {
        let n = w.dim();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let rebuilt = PointTensor::from_fn(n, signature("ulll"), |ix| {
            let (i, k, l, m) = (ix[0], ix[1], ix[2], ix[3]);
            self.b.at(ix)
                + delta(i, k) * self.c.at(&[l, m])
                + delta(i, l) * self.d.at(&[k, m])
                + delta(i, m) * self.e.at(&[k, l])
        });
        rebuilt.max_abs_diff(w).expect("same shape")
    }

    /// Largest of the three traces of `B`.
    pub fn trace_residual(&self) -> f64 {
        (1..4)
            .map(|s| self.b.contract(0, s).expect("(1,3) tensor").max_abs())
            .fold(0.0, f64::max)
    }

    /// `max` over `C, D, E` of the componentwise gap to `other`.
    pub fn coefficient_gap(&self, other: &KrupkaParts) -> f64 {
        let gap = |a: &PointTensor, b: &PointTensor| a.max_abs_diff(b).expect("same shape");
        gap(&self.c, &other.c).max(gap(&self.d, &other.d)).max(gap(&self.e, &other.e))
    }
}

/// Solves the trace equations
///
/// ```text
/// T1_{lm} = n C_{lm} + D_{lm} + E_{ml}
/// T2_{km} = C_{km} + n D_{km} + E_{km}
/// T3_{kl} = C_{lk} + D_{kl} + n E_{kl}
/// ```
///
/// which is what tracelessness of `B` in each slot demands.
pub fn krupka_oracle(w: &PointTensor) -> Result<KrupkaParts, KrupkaError> {
    let tr = Traces::of(w)?;
    let n = w.dim();
    let nn = n * n;
    let c = |a: usize, b: usize| a * n + b;
    let d = |a: usize, b: usize| nn + a * n + b;
    let e = |a: usize, b: usize| 2 * nn + a * n + b;
    let nf = n as f64;
    let mut m = DMatrix::<f64>::zeros(3 * nn, 3 * nn);
    let mut rhs = DVector::<f64>::zeros(3 * nn);
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            m[(row, c(a, b))] += nf;
            m[(row, d(a, b))] += 1.0;
            m[(row, e(b, a))] += 1.0;
            rhs[row] = tr.t1.at(&[a, b]);

            let row = nn + a * n + b;
            m[(row, c(a, b))] += 1.0;
            m[(row, d(a, b))] += nf;
            m[(row, e(a, b))] += 1.0;
            rhs[row] = tr.t2.at(&[a, b]);

            let row = 2 * nn + a * n + b;
            m[(row, c(b, a))] += 1.0;
            m[(row, d(a, b))] += 1.0;
            m[(row, e(a, b))] += nf;
            rhs[row] = tr.t3.at(&[a, b]);
        }
    }
    let x = m.lu().solve(&rhs).ok_or(KrupkaError::Singular)?;
    let block = |off: usize| PointTensor::new(n, signature("ll"), x.as_slice()[off..off + nn].to_vec());
    Ok(KrupkaParts::with_coefficients(w, block(0), block(nn), block(2 * nn)))
}

/// The 1/33 closed forms, index strings exactly as printed:
///
/// ```text
/// C_{ml} = (1/33)[10 W^t_{tml} − 2(W^t_{mtl} + W^t_{lmt})]
/// D_{km} = (1/33)[−2(W^t_{tkm} + W^t_{mkt}) + 10 W^t_{ktm}]
/// E_{kl} = (1/33)[10 W^t_{klt} − 2(W^t_{tlk} + W^t_{ltk})]
/// ```
pub fn closed_forms(w: &PointTensor) -> Result<KrupkaParts, KrupkaError> {
    let n = w.dim();
    if n != 4 {
        return Err(KrupkaError::Dimension(n));
    }
    let tr = Traces::of(w)?;
    let (t1, t2, t3) = (&tr.t1, &tr.t2, &tr.t3);
    let ll = signature("ll");
    let c = PointTensor::from_fn(n, ll.clone(), |ix| {
        let (m, l) = (ix[0], ix[1]);
        (10.0 * t1.at(&[m, l]) - 2.0 * (t2.at(&[m, l]) + t3.at(&[l, m]))) / 33.0
    });
    let d = PointTensor::from_fn(n, ll.clone(), |ix| {
        let (k, m) = (ix[0], ix[1]);
        (-2.0 * (t1.at(&[k, m]) + t3.at(&[m, k])) + 10.0 * t2.at(&[k, m])) / 33.0
    });
    let e = PointTensor::from_fn(n, ll, |ix| {
        let (k, l) = (ix[0], ix[1]);
        (10.0 * t3.at(&[k, l]) - 2.0 * (t1.at(&[l, k]) + t2.at(&[l, k]))) / 33.0
    });
    Ok(KrupkaParts::with_coefficients(w, c, d, e))
}

/// The Ricci forms printed as the values of the closed forms:
/// `C = 0`, `D_{km} = (1/9)[R_{km} − g_{km}R/4]`, `E_{kl} = −(1/9)[R_{kl} − g_{kl}R/4]`.
pub fn reduced_forms(s: &Snapshot) -> Result<KrupkaParts, KrupkaError> {
    let n = s.dim();
    if n != 4 {
        return Err(KrupkaError::Dimension(n));
    }
    let c = &s.curv;
    let traceless = PointTensor::from_fn(n, signature("ll"), |ix| c.ricci.at(ix) - c.g.at(ix) * c.scalar / 4.0);
    Ok(KrupkaParts::with_coefficients(
        &s.wstar_mixed,
        PointTensor::zeros(n, vec![Variance::Lower; 2]),
        traceless.scale(1.0 / 9.0),
        traceless.scale(-1.0 / 9.0),
    ))
}

#[derive(Debug, Clone)]
pub struct KrupkaReport {
    pub traces: Traces,
    /// The 1/33 trace combinations.
    pub printed: KrupkaParts,
    /// The `(1/9)` Ricci forms.
    pub reduced: KrupkaParts,
    /// Linear-solve ground truth.
    pub oracle: Result<KrupkaParts, KrupkaError>,
}

impl KrupkaReport {
    /// Oracle parts when available, else the printed closed forms.
    pub fn authoritative(&self) -> &KrupkaParts {
        self.oracle.as_ref().unwrap_or(&self.printed)
    }

    /// Gap of the printed and reduced closed forms to the oracle.
    pub fn closed_form_gap(&self) -> Option<f64> {
        let o = self.oracle.as_ref().ok()?;
        Some(self.printed.coefficient_gap(o).max(self.reduced.coefficient_gap(o)))
    }

    /// `max|C|` of the printed closed form (displayed as identically zero).
    pub fn printed_c(&self) -> f64 {
        self.printed.c.max_abs()
    }
}

/// Splits `W*^i_{klm}` at one point.
pub fn krupka_decompose(s: &Snapshot) -> Result<KrupkaReport, KrupkaError> {
    let w = &s.wstar_mixed;
    Ok(KrupkaReport {
        traces: Traces::of(w)?,
        printed: closed_forms(w)?,
        reduced: reduced_forms(s)?,
        oracle: krupka_oracle(w),
    })
}
