//! Homeomorphism between the tropical simplex `Γⁿ` and the probability simplex `Δⁿ⁻¹`.
//!
//! A measure on an `n`-point space maps to `Γⁿ` by exponentiating its weights:
//! a vector in `[0, 1]ⁿ` whose largest coordinate is `1`. The map to `Δⁿ⁻¹`
//! writes `z = s·Λ + (1 − s)·𝟙` with `Λ` on the boundary `Σⁿ⁻¹` (some
//! coordinate `0`). It then sends `Λ` to the boundary of `Δⁿ⁻¹` by central
//! projection `Λ / ΣΛ` and interpolates with the same `s` toward the
//! barycenter. Centre goes to centre, boundary to boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::IdempotentMeasure;

/// Tolerance on `Σ p = 1` and on coordinate ranges.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BridgeError {
    #[error("vector is empty")]
    Empty,
    #[error("coordinate {index} = {value} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("largest coordinate is {max}, expected 1")]
    NotInTropicalSimplex { max: f64 },
    #[error("coordinates sum to {sum}, expected 1")]
    NotInSimplex { sum: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaPoint {
    pub p: Vec<f64>,
}

fn check_unit_range(v: &[f64]) -> Result<(), BridgeError> {
    if v.is_empty() {
        return Err(BridgeError::Empty);
    }
    for (index, &value) in v.iter().enumerate() {
        if !(-SIMPLEX_TOL..=1.0 + SIMPLEX_TOL).contains(&value) {
            return Err(BridgeError::OutOfRange { index, value });
        }
    }
    Ok(())
}

impl GammaPoint {
    /// Requires every `zᵢ ∈ [0, 1]` and `max zᵢ = 1` exactly.
    pub fn new(z: Vec<f64>) -> Result<Self, BridgeError> {
        check_unit_range(&z)?;
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max != 1.0 {
            return Err(BridgeError::NotInTropicalSimplex { max });
        }
        Ok(GammaPoint { z })
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// Indices with `zᵢ = 0`, the face of `Σⁿ⁻¹` the point lies on.
    pub fn zero_set(&self) -> Vec<usize> {
        zero_set(&self.z)
    }
}

impl DeltaPoint {
    /// Requires nonnegative coordinates summing to `1` within [`SIMPLEX_TOL`].
    pub fn new(p: Vec<f64>) -> Result<Self, BridgeError> {
        check_unit_range(&p)?;
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(BridgeError::NotInSimplex { sum });
        }
        Ok(DeltaPoint { p })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn zero_set(&self) -> Vec<usize> {
        zero_set(&self.p)
    }
}

fn zero_set(v: &[f64]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, &x)| x == 0.0).map(|(i, _)| i).collect()
}

/// `zᵢ = exp(λᵢ)`, with points outside the support giving `0`.
pub fn measure_to_gamma(mu: &IdempotentMeasure) -> GammaPoint {
    GammaPoint { z: mu.weights().into_iter().map(|w| w.exp()).collect() }
}

pub fn gamma_to_delta(gamma: &GammaPoint) -> DeltaPoint {
    let z = &gamma.z;
    let n = z.len() as f64;
    let floor = z.iter().copied().fold(f64::INFINITY, f64::min);
    let s = 1.0 - floor;
    if s == 0.0 {
        return DeltaPoint { p: vec![1.0 / n; z.len()] };
    }
    // Λ = (z − (1 − s)) / s has min 0 and max 1.
    let lambda: Vec<f64> = z.iter().map(|&zi| if zi == floor { 0.0 } else { (zi - floor) / s }).collect();
    let total: f64 = lambda.iter().sum();
    let p = lambda.iter().map(|&l| s * (l / total) + (1.0 - s) / n).collect();
    DeltaPoint { p }
}

pub fn delta_to_gamma(delta: &DeltaPoint) -> GammaPoint {
    let p = &delta.p;
    let len = p.len();
    let centre = 1.0 / len as f64;
    // Ray from the barycenter through p leaves the simplex at parameter t*.
    let exit = p
        .iter()
        .filter(|&&pi| pi < centre)
        .map(|&pi| centre / (centre - pi))
        .fold(f64::INFINITY, f64::min);
    if !exit.is_finite() {
        return GammaPoint { z: vec![1.0; len] };
    }
    let s = 1.0 / exit;
    let boundary: Vec<f64> = p
        .iter()
        .map(|&pi| {
            if pi == 0.0 || (pi < centre && centre / (centre - pi) == exit) {
                0.0
            } else {
                (centre + exit * (pi - centre)).max(0.0)
            }
        })
        .collect();
    let top = boundary.iter().copied().fold(0.0, f64::max);
    let z = boundary
        .iter()
        .map(|&b| {
            let lambda = if b == top { 1.0 } else { b / top };
            1.0 - s * (1.0 - lambda)
        })
        .collect();
    GammaPoint { z }
}

/// Points of `Γⁿ` on a regular grid: each face `zᵢ = 1` with the other
/// coordinates on `{0, 1/(m−1), …, 1}`.
pub fn gamma_grid(n: usize, per_axis: usize) -> Vec<GammaPoint> {
    assert!(n >= 1 && per_axis >= 2);
    let step = 1.0 / (per_axis - 1) as f64;
    let mut out = Vec::new();
    let free = n - 1;
    let total = per_axis.pow(free as u32);
    for face in 0..n {
        for code in 0..total {
            let mut rest = code;
            let mut z = Vec::with_capacity(n);
            for i in 0..n {
                if i == face {
                    z.push(1.0);
                } else {
                    z.push((rest % per_axis) as f64 * step);
                    rest /= per_axis;
                }
            }
            out.push(GammaPoint { z });
        }
    }
    out
}

/// Points of `Δⁿ⁻¹` with coordinates `kᵢ / m`, `Σ kᵢ = m`.
pub fn delta_grid(n: usize, m: usize) -> Vec<DeltaPoint> {
    assert!(n >= 1 && m >= 1);
    fn fill(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            fill(n, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut counts = Vec::new();
    fill(n, m, &mut Vec::new(), &mut counts);
    counts
        .into_iter()
        .map(|ks| DeltaPoint { p: ks.into_iter().map(|k| k as f64 / m as f64).collect() })
        .collect()
}

/// Largest coordinate-wise difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Normalization;
    use crate::rmax::RMax;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ROUND_TRIP: f64 = 1e-9;

    fn gamma(z: &[f64]) -> GammaPoint {
        GammaPoint::new(z.to_vec()).unwrap()
    }

    fn delta(p: &[f64]) -> DeltaPoint {
        DeltaPoint::new(p.to_vec()).unwrap()
    }

    #[test]
    fn measure_to_gamma_examples() {
        let s = sample::space_on_grid(&[(0, 0), (1, 0), (2, 0)]);
        assert_eq!(measure_to_gamma(&IdempotentMeasure::dirac(&s, 0).unwrap()).z, vec![1.0, 0.0, 0.0]);
        assert_eq!(measure_to_gamma(&IdempotentMeasure::uniform_j(&s)).z, vec![1.0, 1.0, 1.0]);
        let two = sample::space_on_grid(&[(0, 0), (1, 0)]);
        let mu = IdempotentMeasure::canonicalize(&two, &[(0, RMax::UNIT), (1, RMax::Finite(-(2f64.ln())))], Normalization::Strict).unwrap();
        let z = measure_to_gamma(&mu).z;
        assert_eq!(z[0], 1.0);
        assert!((z[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gamma_to_delta_examples() {
        let third = 1.0 / 3.0;
        assert_eq!(gamma_to_delta(&gamma(&[1.0, 1.0, 1.0])).p, vec![third; 3]);
        assert_eq!(gamma_to_delta(&gamma(&[1.0, 0.0, 0.0])).p, vec![1.0, 0.0, 0.0]);
        let p = gamma_to_delta(&gamma(&[1.0, 0.5])).p;
        assert!(max_abs_diff(&p, &[0.75, 0.25]) < 1e-15);
        let p = gamma_to_delta(&gamma(&[1.0, 1.0, 0.0])).p;
        assert_eq!(p, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn delta_to_gamma_examples() {
        assert_eq!(delta_to_gamma(&delta(&[0.25; 4])).z, vec![1.0; 4]);
        assert_eq!(delta_to_gamma(&delta(&[1.0, 0.0, 0.0])).z, vec![1.0, 0.0, 0.0]);
        assert_eq!(delta_to_gamma(&delta(&[0.0, 1.0])).z, vec![0.0, 1.0]);
        let z = delta_to_gamma(&delta(&[0.75, 0.25])).z;
        assert!(max_abs_diff(&z, &[1.0, 0.5]) < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(matches!(GammaPoint::new(vec![0.5, 0.5]), Err(BridgeError::NotInTropicalSimplex { .. })));
        assert!(matches!(GammaPoint::new(vec![1.0, 1.5]), Err(BridgeError::OutOfRange { index: 1, .. })));
        assert!(matches!(DeltaPoint::new(vec![0.5, 0.6]), Err(BridgeError::NotInSimplex { .. })));
        assert!(matches!(DeltaPoint::new(vec![1.5, -0.5]), Err(BridgeError::OutOfRange { index: 0, .. })));
        assert_eq!(DeltaPoint::new(vec![]), Err(BridgeError::Empty));
    }

    #[test]
    fn round_trips_and_faces_on_grids() {
        for n in 2..=4 {
            for g in gamma_grid(n, 9) {
                let p = gamma_to_delta(&g);
                DeltaPoint::new(p.p.clone()).unwrap();
                assert_eq!(p.zero_set(), g.zero_set(), "{g:?}");
                let back = delta_to_gamma(&p);
                assert!(max_abs_diff(&back.z, &g.z) <= ROUND_TRIP, "{g:?} -> {p:?} -> {back:?}");
            }
            for d in delta_grid(n, 12) {
                let z = delta_to_gamma(&d);
                GammaPoint::new(z.z.clone()).unwrap();
                assert_eq!(z.zero_set(), d.zero_set());
                let back = gamma_to_delta(&z);
                assert!(max_abs_diff(&back.p, &d.p) <= ROUND_TRIP, "{d:?} -> {z:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn distinct_measures_land_on_distinct_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..500 {
            let (space, _) = sample::grid_space(&mut rng, 3, 6);
            let (mu, nu) = sample::distinct_pair(&mut rng, &space);
            let pm = gamma_to_delta(&measure_to_gamma(&mu));
            let pn = gamma_to_delta(&measure_to_gamma(&nu));
            assert_ne!(pm, pn);
        }
    }
}
