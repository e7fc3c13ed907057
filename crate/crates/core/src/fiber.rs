//! Fiber descriptions.  A fiber is the closed m-manifold N of a warped
//! product [r_min, r_max) ×_s N; the engine discretizes circles S¹(R) and
//! round spheres S²(R), while any other fiber participates abstractly through
//! its dimension, total volume, first Laplace eigenvalue, and Ricci lower
//! bound.

use crate::error::{Error, Result};
use serde::Serialize;

/// How (and whether) the fiber is realized for discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FiberRealization {
    /// Circle of the given radius (m = 1).
    CircleOfRadius(f64),
    /// Round 2-sphere of the given radius (m = 2).
    RoundSphereOfRadius(f64),
    /// Data-only fiber: no grids, radial quantities only.
    Abstract,
}

/// Closed fiber manifold data.
#[derive(Debug, Clone, Serialize)]
pub struct FiberSpec {
    /// Intrinsic dimension m ≥ 1.
    dimension: usize,
    /// Total volume |N|.
    total_volume: f64,
    /// First nonzero Laplace eigenvalue λ₁(g_N), when known.
    lambda1: Option<f64>,
    /// K such that Ric_N ≥ (m−1)·K·g_N, when known.
    ricci_lower: Option<f64>,
    realization: FiberRealization,
}

impl FiberSpec {
    /// Circle of radius R: |N| = 2πR, λ₁ = 1/R², flat (K = 0 vacuously for
    /// m = 1, where the Ricci condition is empty).
    pub fn circle(radius: f64) -> FiberSpec {
        assert!(radius > 0.0, "circle fiber needs a positive radius");
        FiberSpec {
            dimension: 1,
            total_volume: 2.0 * std::f64::consts::PI * radius,
            lambda1: Some(1.0 / (radius * radius)),
            ricci_lower: None,
            realization: FiberRealization::CircleOfRadius(radius),
        }
    }

    /// Round sphere of radius R: |N| = 4πR², λ₁ = 2/R², constant curvature
    /// K = 1/R² (so Ric = (m−1)K g_N exactly).
    pub fn sphere(radius: f64) -> FiberSpec {
        assert!(radius > 0.0, "sphere fiber needs a positive radius");
        FiberSpec {
            dimension: 2,
            total_volume: 4.0 * std::f64::consts::PI * radius * radius,
            lambda1: Some(2.0 / (radius * radius)),
            ricci_lower: Some(1.0 / (radius * radius)),
            realization: FiberRealization::RoundSphereOfRadius(radius),
        }
    }

    /// Abstract fiber with caller-supplied invariants.
    pub fn abstract_fiber(
        dimension: usize,
        total_volume: f64,
        lambda1: Option<f64>,
        ricci_lower: Option<f64>,
    ) -> Result<FiberSpec> {
        if dimension == 0 {
            return Err(Error::range("fiber dimension must be ≥ 1"));
        }
        if !(total_volume > 0.0) || !total_volume.is_finite() {
            return Err(Error::range("fiber volume must be positive and finite"));
        }
        if let Some(l) = lambda1 {
            if !(l > 0.0) {
                return Err(Error::range("λ₁ must be positive when supplied"));
            }
        }
        Ok(FiberSpec {
            dimension,
            total_volume,
            lambda1,
            ricci_lower,
            realization: FiberRealization::Abstract,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn lambda1(&self) -> Option<f64> {
        self.lambda1
    }

    pub fn ricci_lower(&self) -> Option<f64> {
        self.ricci_lower
    }

    pub fn realization(&self) -> FiberRealization {
        self.realization
    }

    /// True when Ric_N ≥ (m−1)·K·g_N can be certified for the given K.
    /// For m = 1 the condition is vacuous, hence always true.
    pub fn ricci_at_least(&self, k: f64) -> Option<bool> {
        if self.dimension == 1 {
            return Some(true);
        }
        self.ricci_lower.map(|kn| kn >= k - 1e-14)
    }

    /// A one-line label for reports.
    pub fn label(&self) -> String {
        match self.realization {
            FiberRealization::CircleOfRadius(r) => format!("circle({r})"),
            FiberRealization::RoundSphereOfRadius(r) => format!("sphere({r})"),
            FiberRealization::Abstract => {
                format!("abstract(m={}, vol={})", self.dimension, self.total_volume)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn realized_fibers_carry_their_invariants() {
        let c = FiberSpec::circle(2.0);
        assert_eq!(c.dimension(), 1);
        assert_relative_eq!(c.total_volume(), 4.0 * std::f64::consts::PI);
        assert_relative_eq!(c.lambda1().unwrap(), 0.25);

        let s = FiberSpec::sphere(1.0);
        assert_eq!(s.dimension(), 2);
        assert_relative_eq!(s.total_volume(), 4.0 * std::f64::consts::PI);
        assert_relative_eq!(s.lambda1().unwrap(), 2.0);
        assert_eq!(s.ricci_at_least(1.0), Some(true));
        assert_eq!(s.ricci_at_least(1.5), Some(false));
    }

    #[test]
    fn abstract_fibers_validate_their_data() {
        assert!(FiberSpec::abstract_fiber(0, 1.0, None, None).is_err());
        assert!(FiberSpec::abstract_fiber(3, -1.0, None, None).is_err());
        let s3 = FiberSpec::abstract_fiber(
            3,
            2.0 * std::f64::consts::PI.powi(2),
            Some(3.0),
            Some(1.0),
        )
        .unwrap();
        assert_eq!(s3.dimension(), 3);
        // m = 1 never blocks the Ricci condition.
        let c = FiberSpec::circle(1.0);
        assert_eq!(c.ricci_at_least(123.0), Some(true));
    }
}
