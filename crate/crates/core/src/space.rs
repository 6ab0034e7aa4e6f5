//! Finite metric spaces, Lipschitz functions and point maps.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Slack for Lipschitz checks, relative to the magnitude of the values compared.
pub const LIPSCHITZ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("a metric space needs at least one point")]
    EmptySpace,
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("distance matrix has {rows} rows (row {row} has {cols} entries) but there are {points} points")]
    DimensionMismatch {
        points: usize,
        rows: usize,
        row: usize,
        cols: usize,
    },
    #[error("distance d({a},{b}) = {value} is not finite")]
    NonFiniteDistance { a: String, b: String, value: f64 },
    #[error("diagonal entry d({a},{a}) = {value} is not zero")]
    NonZeroDiagonal { a: String, value: f64 },
    #[error("negative distance d({a},{b}) = {value}")]
    NegativeDistance { a: String, b: String, value: f64 },
    #[error("distinct points {a} and {b} are at distance zero")]
    ZeroOffDiagonal { a: String, b: String },
    #[error("asymmetric distance: d({a},{b}) = {ab} but d({b},{a}) = {ba}")]
    AsymmetricDistance { a: String, b: String, ab: f64, ba: f64 },
    #[error("triangle inequality violated for ({a},{b},{c}): d({a},{c}) = {ac} > d({a},{b}) + d({b},{c}) = {via}")]
    TriangleViolation {
        a: String,
        b: String,
        c: String,
        ac: f64,
        via: f64,
    },
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("the net must contain at least one point")]
    EmptyNet,
    #[error("function table has {got} values for a space of {expected} points")]
    WrongLength { expected: usize, got: usize },
    #[error("Lipschitz index must be a positive integer")]
    ZeroLipschitzIndex,
    #[error("|f({a}) - f({b})| = {gap} exceeds {n} * d({a},{b}) = {bound}")]
    LipschitzViolation {
        a: String,
        b: String,
        gap: f64,
        n: u32,
        bound: f64,
    },
    #[error("point map assigns {got} images for a source of {expected} points")]
    IncompleteMap { expected: usize, got: usize },
}

/// A finite set of labelled points with a validated distance matrix.
#[derive(Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
    diameter: f64,
    index: HashMap<String, usize>,
}

impl FiniteMetricSpace {
    /// Validates `dist` as a metric on `labels`.
    ///
    /// Every comparison is exact on the values as given; callers that build
    /// distances from floating computations must round them first.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let n = labels.len();
        if n == 0 {
            return Err(SpaceError::EmptySpace);
        }
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(SpaceError::DuplicateLabel(label.clone()));
            }
        }
        if let Some((row, r)) = dist.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(SpaceError::DimensionMismatch {
                points: n,
                rows: dist.len(),
                row,
                cols: r.len(),
            });
        }
        if dist.len() != n {
            return Err(SpaceError::DimensionMismatch {
                points: n,
                rows: dist.len(),
                row: dist.len().min(n),
                cols: n,
            });
        }

        let name = |i: usize| labels[i].clone();
        for i in 0..n {
            for j in 0..n {
                let v = dist[i][j];
                if !v.is_finite() {
                    return Err(SpaceError::NonFiniteDistance { a: name(i), b: name(j), value: v });
                }
                if i == j {
                    if v != 0.0 {
                        return Err(SpaceError::NonZeroDiagonal { a: name(i), value: v });
                    }
                    continue;
                }
                if v < 0.0 {
                    return Err(SpaceError::NegativeDistance { a: name(i), b: name(j), value: v });
                }
                if v == 0.0 {
                    return Err(SpaceError::ZeroOffDiagonal { a: name(i), b: name(j) });
                }
                if v != dist[j][i] {
                    return Err(SpaceError::AsymmetricDistance {
                        a: name(i),
                        b: name(j),
                        ab: v,
                        ba: dist[j][i],
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = dist[i][j] + dist[j][k];
                    if dist[i][k] > via {
                        return Err(SpaceError::TriangleViolation {
                            a: name(i),
                            b: name(j),
                            c: name(k),
                            ac: dist[i][k],
                            via,
                        });
                    }
                }
            }
        }

        let diameter = dist.iter().flatten().copied().fold(0.0, f64::max);
        Ok(FiniteMetricSpace { labels, dist, diameter, index })
    }

    /// Convenience constructor from string slices.
    pub fn from_rows<S: AsRef<str>>(labels: &[S], dist: &[&[f64]]) -> Result<Self, SpaceError> {
        Self::new(
            labels.iter().map(|s| s.as_ref().to_owned()).collect(),
            dist.iter().map(|r| r.to_vec()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SpaceError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| SpaceError::UnknownPoint(label.to_owned()))
    }

    pub fn check_index(&self, i: usize) -> Result<(), SpaceError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(SpaceError::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `max_z min_{p ∈ net} d(p, z)`.
    pub fn covering_radius(&self, net: &[usize]) -> Result<f64, SpaceError> {
        let net = self.validate_net(net)?;
        Ok((0..self.len())
            .map(|z| net.iter().map(|&p| self.d(p, z)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max))
    }

    fn validate_net(&self, net: &[usize]) -> Result<Vec<usize>, SpaceError> {
        if net.is_empty() {
            return Err(SpaceError::EmptyNet);
        }
        let mut net = net.to_vec();
        for &p in &net {
            self.check_index(p)?;
        }
        net.sort_unstable();
        net.dedup();
        Ok(net)
    }
}

impl PartialEq for FiniteMetricSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.dist == other.dist
    }
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("points", &self.labels)
            .field("dist", &self.dist)
            .finish()
    }
}

/// Same space, by pointer or by value.
pub fn same_space(a: &Arc<FiniteMetricSpace>, b: &Arc<FiniteMetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A real function on the points of a space with Lipschitz constant at most `lip_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipFunction {
    values: Vec<f64>,
    lip_bound: u32,
}

impl LipFunction {
    /// Checks `|f(p) − f(q)| ≤ n·d(p, q)` over all pairs, up to [`LIPSCHITZ_TOL`].
    pub fn new(space: &FiniteMetricSpace, values: Vec<f64>, n: u32) -> Result<Self, SpaceError> {
        if n == 0 {
            return Err(SpaceError::ZeroLipschitzIndex);
        }
        if values.len() != space.len() {
            return Err(SpaceError::WrongLength { expected: space.len(), got: values.len() });
        }
        let nf = f64::from(n);
        for p in 0..values.len() {
            for q in (p + 1)..values.len() {
                let gap = (values[p] - values[q]).abs();
                let bound = nf * space.d(p, q);
                let slack = LIPSCHITZ_TOL * values[p].abs().max(values[q].abs()).max(1.0);
                if gap > bound + slack {
                    return Err(SpaceError::LipschitzViolation {
                        a: space.label(p).to_owned(),
                        b: space.label(q).to_owned(),
                        gap,
                        n,
                        bound,
                    });
                }
            }
        }
        Ok(LipFunction { values, lip_bound: n })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lip_bound(&self) -> u32 {
        self.lip_bound
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Largest `n`-Lipschitz function below `raw`: `φ(z) = min_p raw[p] + n·d(p, z)`.
pub fn tighten(raw: &[f64], n: u32, space: &FiniteMetricSpace) -> Result<LipFunction, SpaceError> {
    if n == 0 {
        return Err(SpaceError::ZeroLipschitzIndex);
    }
    if raw.len() != space.len() {
        return Err(SpaceError::WrongLength { expected: space.len(), got: raw.len() });
    }
    let mut values = raw.to_vec();
    let mut scratch = vec![0.0; raw.len()];
    tighten_in_place(&mut values, &mut scratch, f64::from(n), space);
    Ok(LipFunction { values, lip_bound: n })
}

/// In-place McShane projection, iterated to a floating-point fixed point.
///
/// One pass is the exact projection in real arithmetic. Rounding in
/// `raw[p] + n·d` can leave a value one ulp above some cone, so passes repeat
/// until nothing moves; the result is then a fixed point and tightening it
/// again returns it unchanged.
pub(crate) fn tighten_in_place(values: &mut [f64], scratch: &mut [f64], n: f64, space: &FiniteMetricSpace) {
    const MAX_PASSES: usize = 32;
    let len = values.len();
    for _ in 0..MAX_PASSES {
        let mut changed = false;
        for z in 0..len {
            let mut best = values[z];
            for p in 0..len {
                let candidate = values[p] + n * space.d(p, z);
                if candidate < best {
                    best = candidate;
                }
            }
            scratch[z] = best;
            changed |= best != values[z];
        }
        values.copy_from_slice(&scratch[..len]);
        if !changed {
            break;
        }
    }
}

/// A total map between the point sets of two spaces.
#[derive(Debug, Clone)]
pub struct PointMap {
    source: Arc<FiniteMetricSpace>,
    target: Arc<FiniteMetricSpace>,
    assignment: Vec<usize>,
}

impl PointMap {
    pub fn new(
        source: Arc<FiniteMetricSpace>,
        target: Arc<FiniteMetricSpace>,
        assignment: Vec<usize>,
    ) -> Result<Self, SpaceError> {
        if assignment.len() != source.len() {
            return Err(SpaceError::IncompleteMap { expected: source.len(), got: assignment.len() });
        }
        for &t in &assignment {
            target.check_index(t)?;
        }
        Ok(PointMap { source, target, assignment })
    }

    pub fn identity(space: Arc<FiniteMetricSpace>) -> Self {
        let assignment = (0..space.len()).collect();
        PointMap { source: space.clone(), target: space, assignment }
    }

    pub fn constant(source: Arc<FiniteMetricSpace>, target: Arc<FiniteMetricSpace>, point: usize) -> Result<Self, SpaceError> {
        let assignment = vec![point; source.len()];
        Self::new(source, target, assignment)
    }

    pub fn source(&self) -> &Arc<FiniteMetricSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteMetricSpace> {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// `next ∘ self`. Returns `None` if `next` does not start where `self` ends.
    pub fn then(&self, next: &PointMap) -> Option<PointMap> {
        if !same_space(&self.target, &next.source) {
            return None;
        }
        Some(PointMap {
            source: self.source.clone(),
            target: next.target.clone(),
            assignment: self.assignment.iter().map(|&i| next.assignment[i]).collect(),
        })
    }

    /// `d_target(f p, f q) ≤ d_source(p, q)` for every pair, compared exactly.
    pub fn is_nonexpanding(&self) -> bool {
        let n = self.source.len();
        (0..n).all(|p| {
            (0..n).all(|q| self.target.d(self.assignment[p], self.assignment[q]) <= self.source.d(p, q))
        })
    }

    /// Pulls a function on the target back to the source: `φ ∘ f`.
    pub fn pull_back(&self, phi: &[f64]) -> Vec<f64> {
        self.assignment.iter().map(|&t| phi[t]).collect()
    }
}

/// Nearest-point retraction of a space onto `net`.
///
/// Ties go to the net point with the smallest index, so net points are fixed
/// and every point moves at most the covering radius of the net.
pub fn nearest_net_retraction(space: &Arc<FiniteMetricSpace>, net: &[usize]) -> Result<PointMap, SpaceError> {
    let net = space.validate_net(net)?;
    let assignment = (0..space.len())
        .map(|z| {
            let mut best = net[0];
            for &p in &net[1..] {
                if space.d(p, z) < space.d(best, z) {
                    best = p;
                }
            }
            best
        })
        .collect();
    Ok(PointMap { source: space.clone(), target: space.clone(), assignment })
}
