//! Max-plus convex structure on `I(X)`, the contraction homotopy, and the
//! disjoint-approximation pair `g₁` / `g₂`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{hat_d, DistanceError};
use crate::measure::{combine, IdempotentMeasure, MeasureError};
use crate::rmax::RMax;
use crate::sample;
use crate::space::{nearest_net_retraction, same_space, FiniteMetricSpace, SpaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("{generators} generators but {coefficients} coefficients")]
    LengthMismatch { generators: usize, coefficients: usize },
    #[error("coefficients join to {max}, expected exactly 0")]
    NotNormalized { max: f64 },
    #[error("measures live on different spaces")]
    SpaceMismatch,
    #[error("lambda must be at most 0, got {0}")]
    LambdaPositive(f64),
    #[error("lambda must be finite")]
    LambdaNotFinite,
    #[error("the family of measures is empty")]
    EmptyFamily,
    #[error("the net covers the whole space, so no disjointness certificate exists")]
    NetIsWholeSpace,
    #[error("Lipschitz index must be a positive integer")]
    ZeroLipschitzIndex,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// A point of `F(A) = { ⊕ αᵢ ⊙ μᵢ : ⊕ αᵢ = 0 }` for a finite family `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CStructureQuery {
    generators: Vec<IdempotentMeasure>,
    coefficients: Vec<RMax>,
}

impl CStructureQuery {
    pub fn new(generators: Vec<IdempotentMeasure>, coefficients: Vec<RMax>) -> Result<Self, GeometryError> {
        if generators.len() != coefficients.len() {
            return Err(GeometryError::LengthMismatch {
                generators: generators.len(),
                coefficients: coefficients.len(),
            });
        }
        let first = generators.first().ok_or(GeometryError::EmptyFamily)?;
        if generators.iter().any(|g| !same_space(first.space(), g.space())) {
            return Err(GeometryError::SpaceMismatch);
        }
        let top = coefficients.iter().fold(RMax::Bottom, |acc, c| acc.oplus(*c));
        if top != RMax::UNIT {
            return Err(GeometryError::NotNormalized { max: top.to_f64() });
        }
        Ok(CStructureQuery { generators, coefficients })
    }

    pub fn generators(&self) -> &[IdempotentMeasure] {
        &self.generators
    }

    pub fn coefficients(&self) -> &[RMax] {
        &self.coefficients
    }

    /// The same element viewed in `F(A′)` for `A′ ⊇ A`: the extra generators get coefficient `−∞`.
    pub fn padded(&self, extra: &[IdempotentMeasure]) -> Result<Self, GeometryError> {
        let mut generators = self.generators.clone();
        generators.extend_from_slice(extra);
        let mut coefficients = self.coefficients.clone();
        coefficients.resize(generators.len(), RMax::Bottom);
        Self::new(generators, coefficients)
    }
}

/// `⊕ αᵢ ⊙ μᵢ`.
pub fn f_set_element(query: &CStructureQuery) -> Result<IdempotentMeasure, GeometryError> {
    let pairs: Vec<(RMax, &IdempotentMeasure)> = query.coefficients.iter().copied().zip(&query.generators).collect();
    Ok(combine(&pairs)?)
}

fn check_lambda(lambda: RMax) -> Result<(), GeometryError> {
    match lambda {
        RMax::Finite(l) if l > 0.0 => Err(GeometryError::LambdaPositive(l)),
        _ => Ok(()),
    }
}

/// `H(μ, λ) = μ ⊕ (λ ⊙ μ₀)` for `λ ∈ [−∞, 0]`.
pub fn homotopy_h(mu: &IdempotentMeasure, mu0: &IdempotentMeasure, lambda: RMax) -> Result<IdempotentMeasure, GeometryError> {
    check_lambda(lambda)?;
    if !same_space(mu.space(), mu0.space()) {
        return Err(GeometryError::SpaceMismatch);
    }
    Ok(combine(&[(RMax::UNIT, mu), (lambda, mu0)])?)
}

/// `max A`: pointwise max of atom weights, the top element of `F(A)`.
pub fn max_of(family: &[IdempotentMeasure]) -> Result<IdempotentMeasure, GeometryError> {
    if family.is_empty() {
        return Err(GeometryError::EmptyFamily);
    }
    let pairs: Vec<(RMax, &IdempotentMeasure)> = family.iter().map(|m| (RMax::UNIT, m)).collect();
    combine(&pairs).map_err(|e| match e {
        MeasureError::MixedSpaces => GeometryError::SpaceMismatch,
        other => other.into(),
    })
}

/// `g₂(μ) = μ ⊕ λ ⊙ j_X(X)`; its support is all of `X`.
pub fn saturate_g2(mu: &IdempotentMeasure, lambda: f64) -> Result<IdempotentMeasure, GeometryError> {
    if !lambda.is_finite() {
        return Err(GeometryError::LambdaNotFinite);
    }
    homotopy_h(mu, &IdempotentMeasure::uniform_j(mu.space()), RMax::Finite(lambda))
}

/// Upper bound on `d̂ₙ(g₂μ, μ)`: `max(0, λ + n·diam X)`.
pub fn g2_displacement_bound(n: u32, lambda: f64, space: &FiniteMetricSpace) -> f64 {
    (lambda + f64::from(n) * space.diameter()).max(0.0)
}

/// `g₁(μ)`: pushforward along the nearest-point retraction onto `net`.
pub fn discretize_g1(mu: &IdempotentMeasure, net: &[usize]) -> Result<IdempotentMeasure, GeometryError> {
    let r = nearest_net_retraction(mu.space(), net)?;
    Ok(mu.pushforward(&r)?)
}

/// Upper bound on `d̂ₙ(g₁μ, μ)`: `n` times the covering radius of `net`.
pub fn g1_displacement_bound(n: u32, space: &FiniteMetricSpace, net: &[usize]) -> Result<f64, GeometryError> {
    Ok(f64::from(n) * space.covering_radius(net)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DapReport {
    pub n: u32,
    pub samples: usize,
    /// Larger of the two derived displacement bounds: how close to the identity both maps are.
    pub epsilon_used: f64,
    /// Union of the supports of all `g₁` images.
    pub g1_image_support: Vec<String>,
    /// Intersection of the supports of all `g₂` images.
    pub g2_image_support: Vec<String>,
    pub disjoint: bool,
    pub displacement_bound_g1: f64,
    pub displacement_bound_g2: f64,
    pub max_displacement_g1: f64,
    pub max_displacement_g2: f64,
    pub within_bounds: bool,
}

/// Desk-scale disjoint-approximation check on `samples` random measures.
///
/// Every `g₂` image has full support while every `g₁` image is supported in
/// `net ⊊ X`, so the two image sets cannot share a measure.
pub fn dap_demo<R: Rng + ?Sized>(
    space: &Arc<FiniteMetricSpace>,
    net: &[usize],
    lambda: f64,
    samples: usize,
    n: u32,
    rng: &mut R,
) -> Result<DapReport, GeometryError> {
    if n == 0 {
        return Err(GeometryError::ZeroLipschitzIndex);
    }
    if !lambda.is_finite() {
        return Err(GeometryError::LambdaNotFinite);
    }
    check_lambda(RMax::Finite(lambda))?;
    let net_set: BTreeSet<usize> = net.iter().copied().collect();
    for &p in &net_set {
        space.check_index(p)?;
    }
    if net_set.is_empty() {
        return Err(SpaceError::EmptyNet.into());
    }
    if net_set.len() == space.len() {
        return Err(GeometryError::NetIsWholeSpace);
    }

    let bound_g1 = g1_displacement_bound(n, space, net)?;
    let bound_g2 = g2_displacement_bound(n, lambda, space);
    let mut g1_union = BTreeSet::new();
    let mut g2_meet: BTreeSet<usize> = (0..space.len()).collect();
    let (mut max_g1, mut max_g2) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let mu = sample::measure(rng, space);
        let g1 = discretize_g1(&mu, net)?;
        let g2 = saturate_g2(&mu, lambda)?;
        g1_union.extend(g1.support());
        let full: BTreeSet<usize> = g2.support().into_iter().collect();
        g2_meet = g2_meet.intersection(&full).copied().collect();
        max_g1 = max_g1.max(hat_d(n, &g1, &mu)?.value);
        max_g2 = max_g2.max(hat_d(n, &g2, &mu)?.value);
    }

    let disjoint = g2_meet.len() == space.len() && g1_union.is_subset(&net_set);
    let names = |s: &BTreeSet<usize>| s.iter().map(|&p| space.label(p).to_owned()).collect();
    Ok(DapReport {
        n,
        samples,
        epsilon_used: bound_g1.max(bound_g2),
        g1_image_support: names(&g1_union),
        g2_image_support: names(&g2_meet),
        disjoint,
        displacement_bound_g1: bound_g1,
        displacement_bound_g2: bound_g2,
        max_displacement_g1: max_g1,
        max_displacement_g2: max_g2,
        within_bounds: max_g1 <= bound_g1 && max_g2 <= bound_g2,
    })
}
