use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use super::curvature::Geometry;
use crate::expr::Point;

const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("no admissible point after {attempts} attempts (last failure: {last})")]
    Exhausted { attempts: usize, last: String },
}

/// Uniform draw in `[0, 1)` from the top 53 bits of a 64-bit output.
pub fn unit_f64(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `count` points uniformly from the metric's domain box, rejecting
/// points where `|det g| ≤ 1e-10` or any basic curvature quantity fails to
/// evaluate. Deterministic for a given seed.
pub fn sample_points(geom: &Geometry, count: usize, seed: u64) -> Result<Vec<Point>, SamplingError> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let domain = geom.metric().domain().to_vec();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut last = String::from("none");
        let mut found = None;
        for _ in 0..MAX_ATTEMPTS {
            let coords = domain
                .iter()
                .map(|iv| iv.lo + unit_f64(&mut rng) * (iv.hi - iv.lo))
                .collect();
            let p = geom.metric().point(coords);
            match geom.at(&p) {
                Ok(c) => {
                    let det = determinant(c.g.data(), geom.dim());
                    if det.abs() > 1e-10 && det.is_finite() {
                        found = Some(p);
                        break;
                    }
                    last = format!("degenerate metric (det = {det:e})");
                }
                Err(e) => last = e.to_string(),
            }
        }
        match found {
            Some(p) => out.push(p),
            None => {
                return Err(SamplingError::Exhausted {
                    attempts: MAX_ATTEMPTS,
                    last,
                })
            }
        }
    }
    Ok(out)
}

/// Determinant of a row-major square matrix.
pub fn determinant(data: &[f64], n: usize) -> f64 {
    nalgebra::DMatrix::from_row_slice(n, n, data).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_draws_stay_in_range() {
        let mut rng = SplitMix64::seed_from_u64(7);
        for _ in 0..1000 {
            let u = unit_f64(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::seed_from_u64(42);
        let mut b = SplitMix64::seed_from_u64(42);
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
