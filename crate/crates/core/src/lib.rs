//! Idempotent (Maslov) probability measures on finite metric spaces.
//!
//! A measure is a finite max-plus combination of Dirac measures,
//! `μ = ⊕ λᵢ ⊙ δ_{xᵢ}` with `max λᵢ = 0`, acting on functions by
//! `μ(φ) = maxᵢ (φ(xᵢ) + λᵢ)`. The crate provides:
//!
//! - [`rmax`]: the max-plus scalar semiring and its metric.
//! - [`space`]: validated finite metric spaces, Lipschitz projection, point maps
//!   and nearest-net retractions.
//! - [`measure`]: canonical measures, Maslov integration, Dirac / flatten /
//!   pushforward.
//! - [`distance`]: the Lipschitz-dual pseudometrics `d̂ₙ`, `d̃ₙ`, the aggregate
//!   metric, a brute-force oracle, and the second-level pseudometric.
//! - [`geometry`]: max-plus convex combinations, the contraction homotopy and
//!   the disjoint-approximation maps.
//! - [`bridge`]: the homeomorphism between the tropical simplex and the
//!   probability simplex.
//! - [`sample`]: seeded random instances.
//!
//! ```
//! use std::sync::Arc;
//! use tropimeas::{hat_d, FiniteMetricSpace, IdempotentMeasure, Normalization, RMax};
//!
//! let space = Arc::new(FiniteMetricSpace::from_rows(&["a", "b"], &[&[0.0, 1.0], &[1.0, 0.0]])?);
//! let raw = [(0, RMax::Finite(0.0)), (1, RMax::Finite(-0.5))];
//! let mu = IdempotentMeasure::canonicalize(&space, &raw, Normalization::Strict)?;
//! let nu = IdempotentMeasure::dirac(&space, 1)?;
//! assert_eq!(hat_d(2, &mu, &nu)?.value, 2.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bridge;
pub mod distance;
pub mod geometry;
pub mod measure;
pub mod rmax;
pub mod sample;
pub mod space;

pub use bridge::{delta_to_gamma, gamma_to_delta, measure_to_gamma, BridgeError, DeltaPoint, GammaPoint};
pub use distance::{
    aggregate_d, hat_d, hat_d_meta, oracle_sup, separates, tilde_d, DistanceError, DistanceReport, MetaDistance,
    WitnessDirection,
};
pub use geometry::{
    dap_demo, discretize_g1, f_set_element, homotopy_h, max_of, saturate_g2, CStructureQuery, DapReport, GeometryError,
};
pub use measure::{combine, in_basic_neighborhood, IdempotentMeasure, MeasureError, MetaMeasure, Normalization};
pub use rmax::RMax;
pub use space::{nearest_net_retraction, tighten, FiniteMetricSpace, LipFunction, PointMap, SpaceError};
