use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Bounds `[lower, upper]` on a scalar parameter, or an empty identified set
/// when the model is refuted by the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifiedInterval {
    bounds: Option<(f64, f64)>,
}

impl IdentifiedInterval {
    pub const EMPTY: Self = Self { bounds: None };

    /// Swapped endpoints within `1e-9` (solver noise) are collapsed to a point.
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) {
            return Err(Error::Internal(format!("non-finite bounds [{lower}, {upper}]")));
        }
        if lower > upper + 1e-9 {
            return Err(Error::Internal(format!("lower bound {lower} exceeds upper bound {upper}")));
        }
        let bounds = if lower > upper {
            let mid = 0.5 * (lower + upper);
            (mid, mid)
        } else {
            (lower, upper)
        };
        Ok(Self { bounds: Some(bounds) })
    }

    pub fn is_feasible(&self) -> bool {
        self.bounds.is_some()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn lower(&self) -> Option<f64> {
        self.bounds.map(|b| b.0)
    }

    pub fn upper(&self) -> Option<f64> {
        self.bounds.map(|b| b.1)
    }

    pub fn width(&self) -> Option<f64> {
        self.bounds.map(|(l, u)| u - l)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.bounds.is_some_and(|(l, u)| l <= value && value <= u)
    }

    /// `self` lies inside `other`, allowing `tol` of slack at each end. An empty
    /// set is a subset of everything.
    pub fn is_subset_of(&self, other: &Self, tol: f64) -> bool {
        match (self.bounds, other.bounds) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((l, u)), Some((ol, ou))) => l >= ol - tol && u <= ou + tol,
        }
    }

    /// Applies an increasing affine map `v -> shift + scale * v`.
    pub fn map_affine(&self, shift: f64, scale: f64) -> Self {
        Self {
            bounds: self.bounds.map(|(l, u)| (shift + scale * l, shift + scale * u)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub theta: f64,
    pub interval: IdentifiedInterval,
}

/// Identified intervals tabulated over an increasing `theta` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    points: Vec<CurvePoint>,
}

impl SensitivityCurve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].theta >= w[1].theta) {
            return Err(Error::InvalidInput("theta grid must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of consecutive pairs where the earlier interval is not inside the
    /// later one.
    pub fn nesting_violations(&self, tol: f64) -> usize {
        self.points
            .windows(2)
            .filter(|w| !w[0].interval.is_subset_of(&w[1].interval, tol))
            .count()
    }
}

/// Checks that a theta grid is strictly increasing inside `[0, 1]`.
pub fn validate_theta_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("theta grid is empty".into()));
    }
    if grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidParameter("theta grid must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("theta grid must be strictly increasing".into()));
    }
    Ok(())
}
