use alloc::format;
use alloc::vec::Vec;

use super::Dataset;
use crate::{Error, Result};

/// `y' = (y - shift) / scale`, so original-unit values are `shift + scale * y'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub shift: f64,
    pub scale: f64,
}

impl AffineMap {
    pub const IDENTITY: Self = Self {
        shift: 0.0,
        scale: 1.0,
    };

    pub fn forward(&self, y: f64) -> f64 {
        (y - self.shift) / self.scale
    }

    /// Maps a unit-interval location (mean, quantile) back to original units.
    pub fn inverse(&self, u: f64) -> f64 {
        self.shift + self.scale * u
    }

    /// Maps a difference of locations (ATE, QTE) back to original units.
    pub fn inverse_difference(&self, d: f64) -> f64 {
        self.scale * d
    }
}

impl Default for AffineMap {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Smallest observed value whose weighted empirical CDF reaches `q`.
pub fn empirical_quantile(data: &Dataset, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile {q} is not in (0,1)")));
    }
    let mut pairs: Vec<(f64, f64)> = data.rows().iter().map(|r| (r.y, r.weight)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if pairs.is_empty() || total <= 0.0 {
        return Err(Error::InvalidInput("no observations with positive weight".into()));
    }
    let mut acc = 0.0;
    for (y, w) in &pairs {
        acc += w;
        if acc / total >= q - 1e-12 {
            return Ok(*y);
        }
    }
    Ok(pairs[pairs.len() - 1].0)
}

fn outcome_range(data: &Dataset) -> Result<(f64, f64)> {
    let (lo, hi) = data
        .outcomes()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
    if data.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    if lo == hi {
        return Err(Error::DegenerateOutcome(format!("every outcome equals {lo}")));
    }
    Ok((lo, hi))
}

/// Replaces `y` by `1(y <= cut)` where `cut` is the empirical `quantile`.
/// Ties at the cut count as below it.
pub fn discretize_outcome(data: &Dataset, quantile: f64) -> Result<Dataset> {
    outcome_range(data)?;
    let cut = empirical_quantile(data, quantile)?;
    Ok(data.map_outcomes(|y| if y <= cut { 1.0 } else { 0.0 }))
}

/// Affinely maps outcomes onto `[0, 1]`. Data already inside `[0, 1]` is left
/// untouched, which makes the transform idempotent.
pub fn rescale_outcome(data: &Dataset) -> Result<(Dataset, AffineMap)> {
    let (lo, hi) = outcome_range(data)?;
    if lo >= 0.0 && hi <= 1.0 {
        return Ok((data.clone(), AffineMap::IDENTITY));
    }
    let map = AffineMap {
        shift: lo,
        scale: hi - lo,
    };
    Ok((data.map_outcomes(|y| map.forward(y).clamp(0.0, 1.0)), map))
}
