//! Finitely supported idempotent probability measures.
//!
//! A measure `μ = ⊕ᵢ λᵢ ⊙ δ_{xᵢ}` acts on functions by the Maslov integral
//! `μ(φ) = maxᵢ (φ(xᵢ) + λᵢ)`. Every constructor returns the canonical form:
//! one atom per point, no bottom weights, largest weight exactly `0`, atoms
//! sorted by point index. Two measures are equal iff their canonical atom
//! lists are equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::rmax::RMax;
use crate::space::{same_space, FiniteMetricSpace, PointMap, SpaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("measure has no atom with a finite weight")]
    EmptyMeasure,
    #[error("largest weight is {max}, expected exactly 0")]
    NotNormalized { max: f64 },
    #[error("combination needs at least one term")]
    EmptyCombination,
    #[error("measures live on different spaces")]
    MixedSpaces,
    #[error("measure does not live on the source space of the map")]
    SpaceMismatch,
    #[error("function has no value at point {0:?}")]
    MissingValue(String),
    #[error("neighbourhood radius must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// What `canonicalize` does when the largest weight is not `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Reject with [`MeasureError::NotNormalized`].
    #[default]
    Strict,
    /// Shift every weight by `−max`.
    Normalize,
}

#[derive(Clone)]
pub struct IdempotentMeasure {
    space: Arc<FiniteMetricSpace>,
    atoms: Vec<(usize, f64)>,
}

impl IdempotentMeasure {
    /// Builds the canonical form of `⊕ λ ⊙ δ_x` over the raw atoms.
    ///
    /// Atoms at the same point merge by max and bottom weights are dropped.
    pub fn canonicalize(
        space: &Arc<FiniteMetricSpace>,
        raw: &[(usize, RMax)],
        mode: Normalization,
    ) -> Result<Self, MeasureError> {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for &(point, weight) in raw {
            space.check_index(point)?;
            if let RMax::Finite(w) = weight {
                merged
                    .entry(point)
                    .and_modify(|cur| *cur = cur.max(w))
                    .or_insert(w);
            }
        }
        Self::from_merged(space.clone(), merged, mode)
    }

    /// Same as [`canonicalize`](Self::canonicalize) with points given by label.
    pub fn from_labels(
        space: &Arc<FiniteMetricSpace>,
        raw: &[(&str, RMax)],
        mode: Normalization,
    ) -> Result<Self, MeasureError> {
        let raw = raw
            .iter()
            .map(|&(label, w)| Ok((space.index_of(label)?, w)))
            .collect::<Result<Vec<_>, SpaceError>>()?;
        Self::canonicalize(space, &raw, mode)
    }

    fn from_merged(
        space: Arc<FiniteMetricSpace>,
        merged: BTreeMap<usize, f64>,
        mode: Normalization,
    ) -> Result<Self, MeasureError> {
        let max = merged.values().copied().fold(f64::NEG_INFINITY, f64::max);
        if merged.is_empty() {
            return Err(MeasureError::EmptyMeasure);
        }
        let shift = match mode {
            _ if max == 0.0 => 0.0,
            Normalization::Strict => return Err(MeasureError::NotNormalized { max }),
            Normalization::Normalize => max,
        };
        let atoms = merged.into_iter().map(|(p, w)| (p, positive_zero(w - shift))).collect();
        Ok(IdempotentMeasure { space, atoms })
    }

    /// `δ_x`.
    pub fn dirac(space: &Arc<FiniteMetricSpace>, point: usize) -> Result<Self, MeasureError> {
        space.check_index(point)?;
        Ok(IdempotentMeasure { space: space.clone(), atoms: vec![(point, 0.0)] })
    }

    pub fn dirac_at(space: &Arc<FiniteMetricSpace>, label: &str) -> Result<Self, MeasureError> {
        Self::dirac(space, space.index_of(label)?)
    }

    /// `j_X(X)`: weight `0` at every point, so `∫ φ = max φ`.
    pub fn uniform_j(space: &Arc<FiniteMetricSpace>) -> Self {
        IdempotentMeasure {
            space: space.clone(),
            atoms: (0..space.len()).map(|p| (p, 0.0)).collect(),
        }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    /// `(point, weight)` pairs sorted by point.
    pub fn atoms(&self) -> &[(usize, f64)] {
        &self.atoms
    }

    pub fn weight(&self, point: usize) -> RMax {
        match self.atoms.binary_search_by_key(&point, |a| a.0) {
            Ok(i) => RMax::Finite(self.atoms[i].1),
            Err(_) => RMax::Bottom,
        }
    }

    /// Weights for every point of the space, bottom where there is no atom.
    pub fn weights(&self) -> Vec<RMax> {
        (0..self.space.len()).map(|p| self.weight(p)).collect()
    }

    /// The minimal carrier: points holding an atom.
    pub fn support(&self) -> Vec<usize> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    /// Largest `|λ|` over the atoms.
    pub fn max_abs_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1.abs()).fold(0.0, f64::max)
    }

    /// The Maslov integral `maxᵢ (φ(xᵢ) + λᵢ)`; `phi` is a value table over all points.
    pub fn integrate(&self, phi: &[f64]) -> Result<f64, MeasureError> {
        if phi.len() != self.space.len() {
            let missing = phi.len().min(self.space.len());
            return Err(MeasureError::MissingValue(
                self.space.labels().get(missing).cloned().unwrap_or_default(),
            ));
        }
        Ok(self.integrate_unchecked(phi))
    }

    #[inline]
    pub(crate) fn integrate_unchecked(&self, phi: &[f64]) -> f64 {
        self.atoms
            .iter()
            .map(|&(p, w)| phi[p] + w)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `I(f)(μ) = ⊕ λᵢ ⊙ δ_{f(xᵢ)}`.
    pub fn pushforward(&self, f: &PointMap) -> Result<Self, MeasureError> {
        if !same_space(&self.space, f.source()) {
            return Err(MeasureError::SpaceMismatch);
        }
        let mut merged = BTreeMap::new();
        for &(p, w) in &self.atoms {
            merged
                .entry(f.apply(p))
                .and_modify(|cur: &mut f64| *cur = cur.max(w))
                .or_insert(w);
        }
        Self::from_merged(f.target().clone(), merged, Normalization::Strict)
    }

    /// `μ ⊕ ν`.
    pub fn oplus(&self, other: &Self) -> Result<Self, MeasureError> {
        combine(&[(RMax::UNIT, self), (RMax::UNIT, other)])
    }

    /// Whether `self` lies in the basic neighbourhood `⟨μ; φ₁..φₖ; ε⟩`.
    pub fn in_basic_neighborhood(&self, mu: &Self, tests: &[Vec<f64>], eps: f64) -> Result<bool, MeasureError> {
        in_basic_neighborhood(self, mu, tests, eps)
    }

    /// Lexicographic order on canonical atom lists, for sorting measures.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.atoms.iter().zip(&other.atoms) {
            let ord = a.0.cmp(&b.0).then_with(|| a.1.total_cmp(&b.1));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.atoms.len().cmp(&other.atoms.len())
    }
}

impl PartialEq for IdempotentMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && same_space(&self.space, &other.space)
    }
}

impl fmt::Debug for IdempotentMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for &(p, w) in &self.atoms {
            m.entry(&self.space.label(p), &w);
        }
        m.finish()
    }
}

/// Maps `−0.0` to `0.0` so that `==` and `total_cmp` agree on canonical weights.
#[inline]
fn positive_zero(w: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w
    }
}

/// `⊕ᵢ αᵢ ⊙ μᵢ` for coefficients with `⊕ᵢ αᵢ = 0`.
pub fn combine(pairs: &[(RMax, &IdempotentMeasure)]) -> Result<IdempotentMeasure, MeasureError> {
    let (_, first) = pairs.first().ok_or(MeasureError::EmptyCombination)?;
    let space = first.space.clone();
    if pairs.iter().any(|(_, m)| !same_space(&space, &m.space)) {
        return Err(MeasureError::MixedSpaces);
    }
    let top = pairs.iter().fold(RMax::Bottom, |acc, (a, _)| acc.oplus(*a));
    if top != RMax::UNIT {
        return Err(MeasureError::NotNormalized { max: top.to_f64() });
    }
    let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
    for &(alpha, mu) in pairs {
        let RMax::Finite(alpha) = alpha else { continue };
        for &(p, w) in &mu.atoms {
            let shifted = alpha + w;
            merged
                .entry(p)
                .and_modify(|cur| *cur = cur.max(shifted))
                .or_insert(shifted);
        }
    }
    IdempotentMeasure::from_merged(space, merged, Normalization::Strict)
}

/// Whether `nu` lies in `⟨mu; tests; eps⟩`: every test integral differs by less than `eps`.
pub fn in_basic_neighborhood(
    nu: &IdempotentMeasure,
    mu: &IdempotentMeasure,
    tests: &[Vec<f64>],
    eps: f64,
) -> Result<bool, MeasureError> {
    if !(eps > 0.0) {
        return Err(MeasureError::NonPositiveEpsilon(eps));
    }
    for phi in tests {
        if (mu.integrate(phi)? - nu.integrate(phi)?).abs() >= eps {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tent function peaked at `peak`: `0` there and `−gap` elsewhere.
///
/// With `gap` larger than every `|λ|`, `μ(tent) = λ_peak` when `peak` is in
/// the support and `μ(tent) ≤ −gap` otherwise, so integrals against all tents
/// recover a measure.
pub fn tent_function(space: &FiniteMetricSpace, peak: usize, gap: f64) -> Vec<f64> {
    (0..space.len()).map(|z| if z == peak { 0.0 } else { -gap }).collect()
}

/// An element of `I²(X)`: a canonical max-plus combination of measures on one space.
#[derive(Clone)]
pub struct MetaMeasure {
    space: Arc<FiniteMetricSpace>,
    atoms: Vec<(IdempotentMeasure, f64)>,
}

impl MetaMeasure {
    /// Dedups equal inner measures by max weight, drops bottoms, sorts by
    /// [`IdempotentMeasure::canonical_cmp`].
    pub fn canonicalize(raw: Vec<(IdempotentMeasure, RMax)>, mode: Normalization) -> Result<Self, MeasureError> {
        let space = raw.first().ok_or(MeasureError::EmptyMeasure)?.0.space.clone();
        if raw.iter().any(|(m, _)| !same_space(&space, &m.space)) {
            return Err(MeasureError::MixedSpaces);
        }
        let mut atoms: Vec<(IdempotentMeasure, f64)> = raw
            .into_iter()
            .filter_map(|(m, w)| w.finite().map(|w| (m, positive_zero(w))))
            .collect();
        atoms.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        atoms.dedup_by(|later, kept| {
            if later.0 == kept.0 {
                kept.1 = kept.1.max(later.1);
                true
            } else {
                false
            }
        });
        if atoms.is_empty() {
            return Err(MeasureError::EmptyMeasure);
        }
        let max = atoms.iter().map(|a| a.1).fold(f64::NEG_INFINITY, f64::max);
        if max != 0.0 {
            match mode {
                Normalization::Strict => return Err(MeasureError::NotNormalized { max }),
                Normalization::Normalize => atoms.iter_mut().for_each(|a| a.1 = positive_zero(a.1 - max)),
            }
        }
        Ok(MetaMeasure { space, atoms })
    }

    /// The unit `{(μ, 0)}`.
    pub fn unit(mu: IdempotentMeasure) -> Self {
        MetaMeasure { space: mu.space.clone(), atoms: vec![(mu, 0.0)] }
    }

    /// `I(δ)(μ) = ⊕ λᵢ ⊙ δ_{δ_{xᵢ}}`.
    pub fn lift_dirac(mu: &IdempotentMeasure) -> Self {
        let atoms = mu
            .atoms
            .iter()
            .map(|&(p, w)| {
                let dirac = IdempotentMeasure { space: mu.space.clone(), atoms: vec![(p, 0.0)] };
                (dirac, w)
            })
            .collect();
        // Diracs at increasing points are already in canonical order.
        MetaMeasure { space: mu.space.clone(), atoms }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[(IdempotentMeasure, f64)] {
        &self.atoms
    }

    /// `M(Φ) = maxₖ (Φ(μₖ) + αₖ)` for `Φ` given on the atoms, in atom order.
    pub fn integrate_on_atoms(&self, values: &[f64]) -> f64 {
        self.atoms
            .iter()
            .zip(values)
            .map(|((_, w), v)| v + w)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `ζ(M) = ⊕ₖ αₖ ⊙ μₖ`, so `ζ(M)(φ) = M(μ ↦ μ(φ))`.
    pub fn flatten(&self) -> IdempotentMeasure {
        let pairs: Vec<(RMax, &IdempotentMeasure)> =
            self.atoms.iter().map(|(m, w)| (RMax::Finite(*w), m)).collect();
        combine(&pairs).expect("canonical meta-measure has a zero-weight atom on a single space")
    }
}

impl PartialEq for MetaMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl fmt::Debug for MetaMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.atoms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(x: f64) -> RMax {
        RMax::Finite(x)
    }

    fn space_ab() -> Arc<FiniteMetricSpace> {
        Arc::new(FiniteMetricSpace::from_rows(&["a", "b"], &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap())
    }

    fn space_xyz() -> Arc<FiniteMetricSpace> {
        Arc::new(
            FiniteMetricSpace::from_rows(
                &["x", "y", "z"],
                &[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0], &[2.0, 1.0, 0.0]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn canonicalize_examples() {
        let s = space_ab();
        let m = IdempotentMeasure::from_labels(&s, &[("a", f(0.0)), ("a", f(-1.0)), ("b", f(-2.0))], Normalization::Strict).unwrap();
        assert_eq!(m.atoms(), &[(0, 0.0), (1, -2.0)]);

        let m = IdempotentMeasure::from_labels(&s, &[("a", f(-1.0)), ("b", f(-2.0))], Normalization::Normalize).unwrap();
        assert_eq!(m.atoms(), &[(0, 0.0), (1, -1.0)]);
        assert_eq!(
            IdempotentMeasure::from_labels(&s, &[("a", f(-1.0)), ("b", f(-2.0))], Normalization::Strict).unwrap_err(),
            MeasureError::NotNormalized { max: -1.0 }
        );

        assert_eq!(
            IdempotentMeasure::from_labels(&s, &[("a", RMax::Bottom)], Normalization::Normalize).unwrap_err(),
            MeasureError::EmptyMeasure
        );
        assert!(matches!(
            IdempotentMeasure::from_labels(&s, &[("q", f(0.0))], Normalization::Strict),
            Err(MeasureError::Space(SpaceError::UnknownPoint(_)))
        ));
    }

    #[test]
    fn dirac_and_uniform() {
        let s = space_ab();
        let da = IdempotentMeasure::dirac_at(&s, "a").unwrap();
        assert_eq!(da.atoms(), &[(0, 0.0)]);
        assert_eq!(da.integrate(&[2.0, 5.0]).unwrap(), 2.0);
        assert_eq!(da.support(), vec![0]);
        assert!(IdempotentMeasure::dirac(&s, 7).is_err());

        let j = IdempotentMeasure::uniform_j(&s);
        assert_eq!(j.integrate(&[2.0, 5.0]).unwrap(), 5.0);
        assert_eq!(j.support(), vec![0, 1]);

        let single = Arc::new(FiniteMetricSpace::from_rows(&["o"], &[&[0.0]]).unwrap());
        assert_eq!(IdempotentMeasure::uniform_j(&single), IdempotentMeasure::dirac(&single, 0).unwrap());
    }

    #[test]
    fn integrate_examples() {
        let s = space_xyz();
        let mu = IdempotentMeasure::from_labels(&s, &[("x", f(0.0)), ("y", f(-1.0))], Normalization::Strict).unwrap();
        assert_eq!(mu.integrate(&[2.0, 5.0, 100.0]).unwrap(), 4.0);
        assert_eq!(mu.integrate(&[3.5, 3.5, 3.5]).unwrap(), 3.5);
        assert_eq!(mu.integrate(&[2.0]).unwrap_err(), MeasureError::MissingValue("y".into()));
    }

    #[test]
    fn combine_examples() {
        let s = space_xyz();
        let dx = IdempotentMeasure::dirac(&s, 0).unwrap();
        let dy = IdempotentMeasure::dirac(&s, 1).unwrap();
        let mu = IdempotentMeasure::from_labels(&s, &[("x", f(-0.5)), ("z", f(0.0))], Normalization::Strict).unwrap();

        assert_eq!(combine(&[(f(0.0), &mu)]).unwrap(), mu);
        assert_eq!(combine(&[(f(0.0), &dx), (f(-1.0), &dy)]).unwrap().atoms(), &[(0, 0.0), (1, -1.0)]);
        assert_eq!(combine(&[(f(0.0), &mu), (f(0.0), &mu)]).unwrap(), mu);
        assert_eq!(combine(&[(f(0.0), &mu), (RMax::Bottom, &dy)]).unwrap(), mu);

        assert_eq!(combine(&[(f(-1.0), &mu)]).unwrap_err(), MeasureError::NotNormalized { max: -1.0 });
        assert_eq!(combine(&[]).unwrap_err(), MeasureError::EmptyCombination);
        let other = IdempotentMeasure::dirac(&space_ab(), 0).unwrap();
        assert_eq!(combine(&[(f(0.0), &mu), (f(0.0), &other)]).unwrap_err(), MeasureError::MixedSpaces);
    }

    #[test]
    fn pushforward_examples() {
        let s = space_xyz();
        let mu = IdempotentMeasure::from_labels(&s, &[("x", f(0.0)), ("y", f(-1.0))], Normalization::Strict).unwrap();
        assert_eq!(mu.pushforward(&PointMap::identity(s.clone())).unwrap(), mu);

        let to_z = PointMap::new(s.clone(), s.clone(), vec![2, 2, 2]).unwrap();
        assert_eq!(mu.pushforward(&to_z).unwrap().atoms(), &[(2, 0.0)]);

        let other = space_ab();
        let wrong = PointMap::identity(other);
        assert_eq!(mu.pushforward(&wrong).unwrap_err(), MeasureError::SpaceMismatch);
    }

    #[test]
    fn support_is_minimal_via_tents() {
        let s = space_xyz();
        let mu = IdempotentMeasure::from_labels(&s, &[("x", f(0.0)), ("y", f(-1.0))], Normalization::Strict).unwrap();
        assert_eq!(mu.support(), vec![0, 1]);
        let gap = mu.max_abs_weight() + 1.0;
        for &p in &mu.support() {
            let rest: Vec<_> = mu.atoms().iter().filter(|a| a.0 != p).map(|&(q, w)| (q, f(w))).collect();
            let tent = tent_function(&s, p, gap);
            if let Ok(smaller) = IdempotentMeasure::canonicalize(&s, &rest, Normalization::Normalize) {
                assert_ne!(smaller.integrate(&tent).unwrap(), mu.integrate(&tent).unwrap());
            }
        }
    }

    #[test]
    fn flatten_examples() {
        let s = space_xyz();
        let dx = IdempotentMeasure::dirac(&s, 0).unwrap();
        let dy = IdempotentMeasure::dirac(&s, 1).unwrap();
        assert_eq!(MetaMeasure::unit(dx.clone()).flatten(), dx);

        let m = MetaMeasure::canonicalize(vec![(dx.clone(), f(0.0)), (dy, f(-2.0))], Normalization::Strict).unwrap();
        assert_eq!(m.flatten().atoms(), &[(0, 0.0), (1, -2.0)]);
    }

    #[test]
    fn meta_canonical_form_dedups_and_normalizes() {
        let s = space_xyz();
        let dx = IdempotentMeasure::dirac(&s, 0).unwrap();
        let dz = IdempotentMeasure::dirac(&s, 2).unwrap();
        let m = MetaMeasure::canonicalize(
            vec![(dz.clone(), f(-3.0)), (dx.clone(), f(-1.0)), (dz.clone(), f(-2.0)), (dx.clone(), RMax::Bottom)],
            Normalization::Normalize,
        )
        .unwrap();
        assert_eq!(m.atoms(), &[(dx.clone(), 0.0), (dz.clone(), -1.0)]);
        let swapped = MetaMeasure::canonicalize(vec![(dz, f(-1.0)), (dx, f(0.0))], Normalization::Strict).unwrap();
        assert_eq!(m, swapped);
    }

    #[test]
    fn neighborhood_examples() {
        let s = space_ab();
        let da = IdempotentMeasure::dirac(&s, 0).unwrap();
        let db = IdempotentMeasure::dirac(&s, 1).unwrap();
        let tests = vec![vec![0.0, 1.0]];
        assert!(da.in_basic_neighborhood(&da, &tests, 0.1).unwrap());
        assert!(!db.in_basic_neighborhood(&da, &tests, 0.5).unwrap());
        assert!(db.in_basic_neighborhood(&da, &[], 0.5).unwrap());
        assert!(da.in_basic_neighborhood(&da, &tests, 0.0).is_err());
    }

    /// Weights read back through tent integrals, independent of the atom list.
    fn weights_via_tents(mu: &IdempotentMeasure, gap: f64) -> Vec<Option<f64>> {
        (0..mu.space().len())
            .map(|p| {
                let v = mu.integrate(&tent_function(mu.space(), p, gap)).unwrap();
                (v > -gap).then_some(v)
            })
            .collect()
    }

    #[test]
    fn flatten_of_unit_matches_on_tent_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (space, _) = sample::grid_space(&mut rng, 4, 8);
            let mu = sample::measure(&mut rng, &space);
            let flat = MetaMeasure::unit(mu.clone()).flatten();
            assert_eq!(weights_via_tents(&flat, 10.0), weights_via_tents(&mu, 10.0));
        }
    }

    #[test]
    fn maslov_integral_axioms_and_monad_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let (space, _) = sample::grid_space(&mut rng, 5, 8);
            // Dyadic data keeps every sum exact, so the axioms hold bit-for-bit.
            let mu = sample::dyadic_measure(&mut rng, &space);
            let phi = sample::dyadic_function(&mut rng, &space, 5.0);
            let psi = sample::dyadic_function(&mut rng, &space, 5.0);
            let c = sample::dyadic_function(&mut rng, &space, 5.0)[0];

            assert_eq!(mu.integrate(&vec![c; space.len()]).unwrap(), c);
            let shifted: Vec<f64> = phi.iter().map(|v| c + v).collect();
            // Max commutes with adding a constant.
            assert_eq!(mu.integrate(&shifted).unwrap(), c + mu.integrate(&phi).unwrap());
            let joined: Vec<f64> = phi.iter().zip(&psi).map(|(a, b)| a.max(*b)).collect();
            assert_eq!(
                mu.integrate(&joined).unwrap(),
                mu.integrate(&phi).unwrap().max(mu.integrate(&psi).unwrap())
            );

            assert_eq!(MetaMeasure::unit(mu.clone()).flatten(), mu);
            assert_eq!(MetaMeasure::lift_dirac(&mu).flatten(), mu);

            let f1 = sample::self_map(&mut rng, &space);
            let f2 = sample::self_map(&mut rng, &space);
            let both = f1.then(&f2).unwrap();
            assert_eq!(mu.pushforward(&both).unwrap(), mu.pushforward(&f1).unwrap().pushforward(&f2).unwrap());
            let pulled = f1.pull_back(&phi);
            assert_eq!(mu.pushforward(&f1).unwrap().integrate(&phi).unwrap(), mu.integrate(&pulled).unwrap());
        }
    }

    #[test]
    fn flatten_integral_is_meta_integral_of_evaluations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let (space, _) = sample::grid_space(&mut rng, 4, 8);
            let meta = sample::meta_measure(&mut rng, &space, 4);
            let phi = sample::function(&mut rng, &space, 4.0);
            let evaluations: Vec<f64> = meta.atoms().iter().map(|(m, _)| m.integrate(&phi).unwrap()).collect();
            let gap = meta.flatten().integrate(&phi).unwrap() - meta.integrate_on_atoms(&evaluations);
            assert!(gap.abs() < 1e-12, "gap {gap}");
        }
    }
}
