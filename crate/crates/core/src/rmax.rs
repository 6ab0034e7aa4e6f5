//! Max-plus scalars.
//!
//! `RMax` is the semiring `ℝ ∪ {−∞}` with `⊕ = max` and `⊙ = +`. Bottom (`−∞`)
//! is a separate variant rather than `f64::NEG_INFINITY`, so absorption under
//! `⊙` is exact and never depends on float overflow behaviour.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A max-plus scalar: a finite real or bottom (`−∞`).
///
/// The derived order puts `Bottom` below every finite value, which is the
/// natural order of `ℝ_max`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub enum RMax {
    #[default]
    Bottom,
    Finite(f64),
}

impl RMax {
    /// The `⊙` identity, `0`.
    pub const UNIT: RMax = RMax::Finite(0.0);
    /// The `⊕` identity, `−∞`.
    pub const BOTTOM: RMax = RMax::Bottom;

    /// Converts an `f64`, mapping `−∞` to bottom. Returns `None` for NaN and `+∞`.
    pub fn from_f64(x: f64) -> Option<RMax> {
        if x.is_nan() || x == f64::INFINITY {
            None
        } else if x == f64::NEG_INFINITY {
            Some(RMax::Bottom)
        } else {
            Some(RMax::Finite(x))
        }
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, RMax::Bottom)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RMax::Bottom => None,
            RMax::Finite(x) => Some(x),
        }
    }

    /// The value as an `f64`, with bottom mapped to `−∞`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::NEG_INFINITY)
    }

    /// `a ⊕ b = max(a, b)`.
    pub fn oplus(self, other: RMax) -> RMax {
        match (self, other) {
            (RMax::Bottom, x) | (x, RMax::Bottom) => x,
            (RMax::Finite(a), RMax::Finite(b)) => RMax::Finite(a.max(b)),
        }
    }

    /// `a ⊙ b = a + b`, with bottom absorbing.
    pub fn odot(self, other: RMax) -> RMax {
        match (self, other) {
            (RMax::Finite(a), RMax::Finite(b)) => RMax::Finite(a + b),
            _ => RMax::Bottom,
        }
    }

    /// `exp(a)`, with `exp(−∞) = 0`.
    pub fn exp(self) -> f64 {
        match self {
            RMax::Bottom => 0.0,
            RMax::Finite(x) => x.exp(),
        }
    }

    /// The metric `ϱ(a, b) = |eᵃ − eᵇ|` on `ℝ_max`.
    pub fn rho(self, other: RMax) -> f64 {
        match (self, other) {
            (RMax::Bottom, RMax::Bottom) => 0.0,
            _ => (self.exp() - other.exp()).abs(),
        }
    }

    /// Total order on `ℝ_max`, using `f64::total_cmp` for the finite part.
    pub fn total_cmp(&self, other: &RMax) -> Ordering {
        match (self, other) {
            (RMax::Bottom, RMax::Bottom) => Ordering::Equal,
            (RMax::Bottom, _) => Ordering::Less,
            (_, RMax::Bottom) => Ordering::Greater,
            (RMax::Finite(a), RMax::Finite(b)) => a.total_cmp(b),
        }
    }
}

/// Free-function form of [`RMax::oplus`].
pub fn oplus(a: RMax, b: RMax) -> RMax {
    a.oplus(b)
}

/// Free-function form of [`RMax::odot`].
pub fn odot(a: RMax, b: RMax) -> RMax {
    a.odot(b)
}

/// Free-function form of [`RMax::rho`].
pub fn rho(a: RMax, b: RMax) -> f64 {
    a.rho(b)
}

impl From<f64> for RMax {
    /// Panics on NaN or `+∞`; use [`RMax::from_f64`] for untrusted input.
    fn from(x: f64) -> Self {
        RMax::from_f64(x).unwrap_or_else(|| panic!("{x} is not an element of R_max"))
    }
}

impl fmt::Display for RMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RMax::Bottom => f.write_str("-inf"),
            RMax::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for RMax {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            RMax::Bottom => serializer.serialize_str("-inf"),
            RMax::Finite(x) => serializer.serialize_f64(*x),
        }
    }
}

struct RMaxVisitor;

impl<'de> Visitor<'de> for RMaxVisitor {
    type Value = RMax;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a finite number or the string \"-inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<RMax, E> {
        RMax::from_f64(v).ok_or_else(|| E::custom(format!("{v} is not an element of R_max")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<RMax, E> {
        Ok(RMax::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<RMax, E> {
        Ok(RMax::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<RMax, E> {
        match v {
            "-inf" => Ok(RMax::Bottom),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for RMax {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<RMax, D::Error> {
        deserializer.deserialize_any(RMaxVisitor)
    }
}
