//! Lipschitz-dual pseudometrics on idempotent measures.
//!
//! `d̂ₙ(μ, ν) = sup { |μ(φ) − ν(φ)| : φ is n-Lipschitz }`. For finitely
//! supported measures the supremum has a closed form. Write `μ = ⊕ λᵢ ⊙ δ_{xᵢ}`
//! and `ν = ⊕ κⱼ ⊙ δ_{yⱼ}`. Then
//!
//! ```text
//! sup_φ μ(φ) − ν(φ) = maxᵢ minⱼ (λᵢ − κⱼ + n·d(xᵢ, yⱼ))
//! ```
//!
//! The Lipschitz constraint `φ(xᵢ) − φ(yⱼ) ≤ n·d(xᵢ, yⱼ)` gives the upper bound.
//! The cone `φ = −n·d(xᵢ*, ·)` at the maximizing atom attains it. `d̂ₙ` is the
//! larger of the two one-sided suprema. [`oracle_sup`] recomputes the same
//! quantity by brute force over tightened grid functions without using the
//! formula.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{IdempotentMeasure, MeasureError, MetaMeasure};
use crate::space::{same_space, tighten_in_place, FiniteMetricSpace};

/// Largest space [`oracle_sup`] will enumerate.
pub const ORACLE_MAX_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistanceError {
    #[error("measures live on different spaces")]
    SpaceMismatch,
    #[error("Lipschitz index must be a positive integer")]
    ZeroLipschitzIndex,
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("grid step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("oracle enumeration is limited to {max} points, space has {points}")]
    TooManyPoints { points: usize, max: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Which one-sided supremum attains `d̂ₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessDirection {
    /// `sup μ(φ) − ν(φ)`; the witness atom indexes `μ`'s atoms.
    MuOverNu,
    /// `sup ν(φ) − μ(φ)`; the witness atom indexes `ν`'s atoms.
    NuOverMu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub n: u32,
    pub value: f64,
    pub direction: WitnessDirection,
    /// Index into the atom list of the measure named by `direction`.
    pub atom: usize,
}

impl DistanceReport {
    /// The extremal function `−n·d(x*, ·)` centred at the witness atom.
    ///
    /// Integrating it against both measures reproduces `value` on the side
    /// given by `direction`.
    pub fn witness_function(&self, mu: &IdempotentMeasure, nu: &IdempotentMeasure) -> Vec<f64> {
        let (owner, space) = match self.direction {
            WitnessDirection::MuOverNu => (mu, mu.space()),
            WitnessDirection::NuOverMu => (nu, nu.space()),
        };
        let centre = owner.atoms()[self.atom].0;
        let n = f64::from(self.n);
        (0..space.len()).map(|z| -n * space.d(centre, z)).collect()
    }
}

/// `maxᵢ minⱼ term(i, j)` with the first maximizing `i`.
fn max_min(rows: usize, cols: usize, term: impl Fn(usize, usize) -> f64) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..rows {
        let inner = (0..cols).map(|j| term(i, j)).fold(f64::INFINITY, f64::min);
        if inner > best.0 {
            best = (inner, i);
        }
    }
    best
}

fn check(n: u32, mu: &IdempotentMeasure, nu: &IdempotentMeasure) -> Result<(), DistanceError> {
    if n == 0 {
        return Err(DistanceError::ZeroLipschitzIndex);
    }
    if !same_space(mu.space(), nu.space()) {
        return Err(DistanceError::SpaceMismatch);
    }
    Ok(())
}

/// Both one-sided suprema, computed with a caller-supplied per-pair term.
fn both_sides(
    mu: &IdempotentMeasure,
    nu: &IdempotentMeasure,
    term: impl Fn(f64, f64, f64) -> f64,
) -> ((f64, usize), (f64, usize)) {
    let space = mu.space();
    let (a, b) = (mu.atoms(), nu.atoms());
    let forward = max_min(a.len(), b.len(), |i, j| term(a[i].1, b[j].1, space.d(a[i].0, b[j].0)));
    let backward = max_min(b.len(), a.len(), |j, i| term(b[j].1, a[i].1, space.d(b[j].0, a[i].0)));
    (forward, backward)
}

/// `d̂ₙ(μ, ν)` by the closed form, with the attaining atom.
///
/// Ties go to the `μ` side, then to the lowest atom index.
pub fn hat_d(n: u32, mu: &IdempotentMeasure, nu: &IdempotentMeasure) -> Result<DistanceReport, DistanceError> {
    check(n, mu, nu)?;
    let nf = f64::from(n);
    let ((fwd, i), (bwd, j)) = both_sides(mu, nu, |wl, wr, d| (wl - wr) + nf * d);
    Ok(if fwd >= bwd {
        DistanceReport { n, value: fwd, direction: WitnessDirection::MuOverNu, atom: i }
    } else {
        DistanceReport { n, value: bwd, direction: WitnessDirection::NuOverMu, atom: j }
    })
}

/// `d̃ₙ = d̂ₙ / n`.
///
/// Evaluated as `maxᵢ minⱼ ((λᵢ − κⱼ)/n + d(xᵢ, yⱼ))` rather than by dividing
/// the `d̂ₙ` value, so `d̃ₙ(δₓ, δ_y)` is exactly `d(x, y)` in floating point.
pub fn tilde_d(n: u32, mu: &IdempotentMeasure, nu: &IdempotentMeasure) -> Result<f64, DistanceError> {
    check(n, mu, nu)?;
    let nf = f64::from(n);
    let ((fwd, _), (bwd, _)) = both_sides(mu, nu, |wl, wr, d| (wl - wr) / nf + d);
    Ok(fwd.max(bwd))
}

/// Number of series terms `N` for which the tail `bound · 2^−N` drops below `tol`.
pub fn aggregate_terms(bound: f64, tol: f64) -> u32 {
    let mut terms = 1;
    let mut tail = bound / 2.0;
    while tail >= tol && terms < 1100 {
        terms += 1;
        tail /= 2.0;
    }
    terms
}

/// The metric `d̃(μ, ν) = Σₖ d̃ₖ(μ, ν) / 2ᵏ`, truncated once the tail is below `tol`.
///
/// Each term is at most `diam X + W`, with `W` the largest `|weight|` in
/// either measure, which bounds the tail after `N` terms by `(diam X + W)·2^−N`.
pub fn aggregate_d(mu: &IdempotentMeasure, nu: &IdempotentMeasure, tol: f64) -> Result<f64, DistanceError> {
    if !(tol > 0.0) {
        return Err(DistanceError::NonPositiveTolerance(tol));
    }
    check(1, mu, nu)?;
    let bound = mu.space().diameter() + mu.max_abs_weight().max(nu.max_abs_weight());
    let terms = aggregate_terms(bound, tol);
    let mut sum = 0.0;
    let mut scale = 1.0;
    for k in 1..=terms {
        scale /= 2.0;
        sum += tilde_d(k, mu, nu)? * scale;
    }
    Ok(sum)
}

/// Brute-force lower bound on `d̂ₙ`, independent of the closed form.
///
/// Enumerates seed vectors on a grid of spacing `grid_step`, projects each
/// onto the `n`-Lipschitz functions by [`tighten`](crate::space::tighten), and
/// returns the largest `|μ(φ) − ν(φ)|` seen. Both integrals shift by the same
/// constant when `φ` does, so the seed is pinned to `0` at the first point and
/// the other coordinates range over `[−n·diam, n·diam]`. That interval holds
/// every `n`-Lipschitz function pinned this way. Rounding each coordinate of
/// such a function down to the grid and tightening moves it by at most
/// `grid_step`, so the result is within `2·grid_step` of the supremum.
pub fn oracle_sup(n: u32, mu: &IdempotentMeasure, nu: &IdempotentMeasure, grid_step: f64) -> Result<f64, DistanceError> {
    check(n, mu, nu)?;
    if !(grid_step > 0.0) {
        return Err(DistanceError::NonPositiveStep(grid_step));
    }
    let space: &FiniteMetricSpace = mu.space();
    let len = space.len();
    if len > ORACLE_MAX_POINTS {
        return Err(DistanceError::TooManyPoints { points: len, max: ORACLE_MAX_POINTS });
    }
    let nf = f64::from(n);
    let half = (nf * space.diameter() / grid_step).ceil() as i64;
    let free = len - 1;

    let mut ticks = vec![-half; free];
    let mut seed = vec![0.0; len];
    let mut phi = vec![0.0; len];
    let mut scratch = vec![0.0; len];
    let mut best = 0.0f64;
    loop {
        for (slot, &t) in seed[1..].iter_mut().zip(&ticks) {
            *slot = t as f64 * grid_step;
        }
        phi.copy_from_slice(&seed);
        tighten_in_place(&mut phi, &mut scratch, nf, space);
        let gap = (mu.integrate_unchecked(&phi) - nu.integrate_unchecked(&phi)).abs();
        best = best.max(gap);

        // Odometer over the free coordinates.
        let mut k = 0;
        loop {
            if k == free {
                return Ok(best);
            }
            if ticks[k] < half {
                ticks[k] += 1;
                break;
            }
            ticks[k] = -half;
            k += 1;
        }
    }
}

/// Result of the second-level pseudometric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaDistance {
    pub value: f64,
    /// Two distinct inner measures sit at ground distance zero, so the
    /// ground space is only pseudometric. The value is still the supremum.
    pub ground_not_metric: bool,
}

/// `d̂ₙ` one level up, on `I²(X)`.
///
/// The ground points are the inner measures of `M` and `N`, at distance
/// `d̃_{ground_n}`. An `n`-Lipschitz function on that finite set extends to
/// all of `I(X)` with the same constant, so the closed form over pairwise
/// ground distances is again the supremum.
pub fn hat_d_meta(n: u32, ground_n: u32, big_m: &MetaMeasure, big_n: &MetaMeasure) -> Result<MetaDistance, DistanceError> {
    if n == 0 || ground_n == 0 {
        return Err(DistanceError::ZeroLipschitzIndex);
    }
    if !same_space(big_m.space(), big_n.space()) {
        return Err(DistanceError::SpaceMismatch);
    }
    let (a, b) = (big_m.atoms(), big_n.atoms());
    let ground = a
        .iter()
        .map(|(mu, _)| b.iter().map(|(nu, _)| tilde_d(ground_n, mu, nu)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let nf = f64::from(n);
    let (fwd, _) = max_min(a.len(), b.len(), |i, j| (a[i].1 - b[j].1) + nf * ground[i][j]);
    let (bwd, _) = max_min(b.len(), a.len(), |j, i| (b[j].1 - a[i].1) + nf * ground[i][j]);

    let mut inner: Vec<&IdempotentMeasure> = a.iter().chain(b).map(|(m, _)| m).collect();
    inner.sort_by(|x, y| x.canonical_cmp(y));
    inner.dedup_by(|x, y| x == y);
    let mut ground_not_metric = false;
    'outer: for (i, x) in inner.iter().enumerate() {
        for y in &inner[i + 1..] {
            if tilde_d(ground_n, x, y)? == 0.0 {
                ground_not_metric = true;
                break 'outer;
            }
        }
    }
    Ok(MetaDistance { value: fwd.max(bwd), ground_not_metric })
}

/// Least `n ≤ n_max` with `d̂ₙ(μ, ν) > 0`.
pub fn separates(mu: &IdempotentMeasure, nu: &IdempotentMeasure, n_max: u32) -> Result<Option<u32>, DistanceError> {
    check(1, mu, nu)?;
    for n in 1..=n_max {
        if hat_d(n, mu, nu)?.value > 0.0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
