//! Seeded random instances for property checks and the DAP demonstration.
//!
//! Spaces are distinct points of a quarter-step grid in the plane under the
//! L1 metric. Every distance is a small dyadic rational, so sums are exact and
//! the exact validation in [`FiniteMetricSpace::new`] always accepts them.
//! Measures pick a random nonempty atom subset with weights uniform on
//! `[−3, 0]` and are then normalized.

use std::sync::Arc;

use rand::Rng;

use crate::measure::{IdempotentMeasure, MetaMeasure, Normalization};
use crate::rmax::RMax;
use crate::space::{FiniteMetricSpace, PointMap};

/// Lowest sampled weight before normalization.
pub const WEIGHT_FLOOR: f64 = -3.0;

/// Grid resolution of sampled coordinates.
pub const GRID_STEP: f64 = 0.25;

/// Integer grid coordinates of a sampled point; the real position is `GRID_STEP` times these.
pub type GridPoint = (u32, u32);

fn l1(a: GridPoint, b: GridPoint) -> f64 {
    f64::from(a.0.abs_diff(b.0) + a.1.abs_diff(b.1)) * GRID_STEP
}

/// Builds the L1 space on the given distinct grid points, labelled `p0, p1, …`.
pub fn space_on_grid(points: &[GridPoint]) -> Arc<FiniteMetricSpace> {
    let labels = (0..points.len()).map(|i| format!("p{i}")).collect();
    let dist = points
        .iter()
        .map(|&a| points.iter().map(|&b| l1(a, b)).collect())
        .collect();
    Arc::new(FiniteMetricSpace::new(labels, dist).expect("grid points are distinct"))
}

/// `points` distinct points with coordinates in `0..=coord_max` grid steps.
pub fn grid_space<R: Rng + ?Sized>(rng: &mut R, points: usize, coord_max: u32) -> (Arc<FiniteMetricSpace>, Vec<GridPoint>) {
    let side = coord_max as usize + 1;
    assert!(points >= 1 && points <= side * side, "cannot place {points} points on a {side}x{side} grid");
    let mut chosen: Vec<GridPoint> = Vec::with_capacity(points);
    while chosen.len() < points {
        let p = (rng.gen_range(0..=coord_max), rng.gen_range(0..=coord_max));
        if !chosen.contains(&p) {
            chosen.push(p);
        }
    }
    (space_on_grid(&chosen), chosen)
}

fn random_support<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<usize> {
    loop {
        let subset: Vec<usize> = (0..len).filter(|_| rng.gen_bool(0.5)).collect();
        if !subset.is_empty() {
            return subset;
        }
    }
}

/// Random measure: uniform atom subset, weights uniform on `[−3, 0]`, normalized.
pub fn measure<R: Rng + ?Sized>(rng: &mut R, space: &Arc<FiniteMetricSpace>) -> IdempotentMeasure {
    let raw: Vec<(usize, RMax)> = random_support(rng, space.len())
        .into_iter()
        .map(|p| (p, RMax::Finite(rng.gen_range(WEIGHT_FLOOR..=0.0))))
        .collect();
    IdempotentMeasure::canonicalize(space, &raw, Normalization::Normalize).expect("nonempty support")
}

/// Like [`measure`] but with weights on the `1/8` grid, for checks that must be bit-exact.
pub fn dyadic_measure<R: Rng + ?Sized>(rng: &mut R, space: &Arc<FiniteMetricSpace>) -> IdempotentMeasure {
    let raw: Vec<(usize, RMax)> = random_support(rng, space.len())
        .into_iter()
        .map(|p| (p, RMax::Finite(f64::from(rng.gen_range(-24i32..=0)) / 8.0)))
        .collect();
    IdempotentMeasure::canonicalize(space, &raw, Normalization::Normalize).expect("nonempty support")
}

/// Two measures that differ in canonical form.
pub fn distinct_pair<R: Rng + ?Sized>(rng: &mut R, space: &Arc<FiniteMetricSpace>) -> (IdempotentMeasure, IdempotentMeasure) {
    let mu = measure(rng, space);
    loop {
        let nu = measure(rng, space);
        if nu != mu {
            return (mu, nu);
        }
    }
}

/// Function table with values uniform on `[−amplitude, amplitude]`.
pub fn function<R: Rng + ?Sized>(rng: &mut R, space: &FiniteMetricSpace, amplitude: f64) -> Vec<f64> {
    (0..space.len()).map(|_| rng.gen_range(-amplitude..=amplitude)).collect()
}

/// Function table on the `1/8` grid within `[−amplitude, amplitude]`.
pub fn dyadic_function<R: Rng + ?Sized>(rng: &mut R, space: &FiniteMetricSpace, amplitude: f64) -> Vec<f64> {
    let k = (amplitude * 8.0).floor() as i32;
    (0..space.len()).map(|_| f64::from(rng.gen_range(-k..=k)) / 8.0).collect()
}

/// Random element of `I²(X)` with between 1 and `max_atoms` inner measures.
pub fn meta_measure<R: Rng + ?Sized>(rng: &mut R, space: &Arc<FiniteMetricSpace>, max_atoms: usize) -> MetaMeasure {
    let count = rng.gen_range(1..=max_atoms.max(1));
    let raw = (0..count)
        .map(|_| (measure(rng, space), RMax::Finite(rng.gen_range(WEIGHT_FLOOR..=0.0))))
        .collect();
    MetaMeasure::canonicalize(raw, Normalization::Normalize).expect("nonempty meta-measure")
}

/// Uniformly random self-map of the point set.
pub fn self_map<R: Rng + ?Sized>(rng: &mut R, space: &Arc<FiniteMetricSpace>) -> PointMap {
    let assignment = (0..space.len()).map(|_| rng.gen_range(0..space.len())).collect();
    PointMap::new(space.clone(), space.clone(), assignment).expect("indices in range")
}

/// A map out of `space` that is nonexpanding in the L1 metric.
///
/// Draws from four families: projection of the grid points onto the first
/// axis, a contraction onto a scaled copy, a random self-map that passes the
/// check, or a constant map.
pub fn nonexpanding_map<R: Rng + ?Sized>(rng: &mut R, space: &Arc<FiniteMetricSpace>, coords: &[GridPoint]) -> PointMap {
    let map = match rng.gen_range(0..4) {
        0 => axis_projection(space, coords),
        1 => {
            // Halving grid coordinates (rounded down) can merge points.
            let halved: Vec<GridPoint> = coords.iter().map(|&(x, y)| (x / 2, y / 2)).collect();
            let mut distinct = halved.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let target = space_on_grid(&distinct);
            let assignment = halved.iter().map(|p| distinct.binary_search(p).unwrap()).collect();
            PointMap::new(space.clone(), target, assignment).expect("indices in range")
        }
        2 => {
            let mut found = None;
            for _ in 0..64 {
                let candidate = self_map(rng, space);
                if candidate.is_nonexpanding() {
                    found = Some(candidate);
                    break;
                }
            }
            found.unwrap_or_else(|| axis_projection(space, coords))
        }
        _ => {
            let target = rng.gen_range(0..space.len());
            PointMap::constant(space.clone(), space.clone(), target).expect("index in range")
        }
    };
    debug_assert!(map.is_nonexpanding());
    map
}

fn axis_projection(space: &Arc<FiniteMetricSpace>, coords: &[GridPoint]) -> PointMap {
    let mut xs: Vec<u32> = coords.iter().map(|p| p.0).collect();
    xs.sort_unstable();
    xs.dedup();
    let target = space_on_grid(&xs.iter().map(|&x| (x, 0)).collect::<Vec<_>>());
    let assignment = coords.iter().map(|p| xs.binary_search(&p.0).unwrap()).collect();
    PointMap::new(space.clone(), target, assignment).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samplers_produce_valid_canonical_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (space, coords) = grid_space(&mut rng, 5, 6);
            assert_eq!(space.len(), 5);
            let mu = measure(&mut rng, &space);
            assert!(mu.atoms().iter().all(|a| a.1 <= 0.0 && a.1 >= WEIGHT_FLOOR));
            assert!(mu.atoms().iter().any(|a| a.1 == 0.0));
            let f = nonexpanding_map(&mut rng, &space, &coords);
            assert!(f.is_nonexpanding());
            let meta = meta_measure(&mut rng, &space, 3);
            assert!(meta.atoms().iter().any(|a| a.1 == 0.0));
        }
    }

    #[test]
    fn same_seed_same_instances() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (space, _) = grid_space(&mut rng, 4, 8);
            measure(&mut rng, &space).atoms().to_vec()
        };
        assert_eq!(draw(9), draw(9));
    }
}
