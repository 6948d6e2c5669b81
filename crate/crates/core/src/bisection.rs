//! Bisection over `theta` for monotone predicates.
//!
//! Identified sets only grow with `theta`, so "nonempty" and "contains a value"
//! are both false up to some threshold and true beyond it.

use alloc::format;

use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 60;
pub const DEFAULT_TOL: f64 = 1e-6;

/// Outcome of a breakdown search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Breakdown {
    /// Smallest `theta` (within tolerance) at which the value is in the set.
    At(f64),
    /// The value lies outside the identified set even at `theta = 1`.
    Never,
}

impl Breakdown {
    pub fn theta(self) -> Option<f64> {
        match self {
            Breakdown::At(t) => Some(t),
            Breakdown::Never => None,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")))
    }
}

/// Given `pred(lo) == false` and `pred(hi) == true`, shrinks the bracket until it
/// is narrower than `tol` (or the iteration cap is hit) and returns its upper end,
/// which always satisfies `pred`.
pub fn threshold<F>(mut lo: f64, mut hi: f64, tol: f64, mut pred: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    check_tol(tol)?;
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `theta` in `[0, 1]` at which `feasible` holds; zero when it already
/// holds at zero.
pub fn falsification_search<F>(tol: f64, mut feasible: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    check_tol(tol)?;
    if feasible(0.0)? {
        return Ok(0.0);
    }
    if !feasible(1.0)? {
        return Err(Error::Internal("identified set is empty even without restrictions".into()));
    }
    threshold(0.0, 1.0, tol, feasible)
}

/// Smallest `theta >= start` at which `contains` holds, where `start` is the
/// falsification point.
pub fn breakdown_search<F>(start: f64, tol: f64, mut contains: F) -> Result<Breakdown>
where
    F: FnMut(f64) -> Result<bool>,
{
    check_tol(tol)?;
    if contains(start)? {
        return Ok(Breakdown::At(start));
    }
    if !contains(1.0)? {
        return Ok(Breakdown::Never);
    }
    threshold(start, 1.0, tol, contains).map(Breakdown::At)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_narrower_than_tolerance() {
        let t = threshold(0.0, 1.0, 1e-6, |x| Ok(x >= 0.3)).unwrap();
        assert!(t >= 0.3 && t - 0.3 <= 1e-6);
    }

    #[test]
    fn iteration_cap() {
        let mut calls = 0;
        threshold(0.0, 1.0, 1e-300, |x| {
            calls += 1;
            Ok(x > 0.5)
        })
        .unwrap();
        assert_eq!(calls, MAX_ITERATIONS);
    }

    #[test]
    fn falsification_shortcuts() {
        assert_eq!(falsification_search(1e-6, |_| Ok(true)).unwrap(), 0.0);
        assert!(falsification_search(1e-6, |_| Ok(false)).is_err());
        assert!(falsification_search(0.0, |_| Ok(true)).is_err());
    }

    #[test]
    fn breakdown_cases() {
        assert_eq!(breakdown_search(0.2, 1e-6, |_| Ok(true)).unwrap(), Breakdown::At(0.2));
        assert_eq!(breakdown_search(0.2, 1e-6, |_| Ok(false)).unwrap(), Breakdown::Never);
        let b = breakdown_search(0.2, 1e-6, |t| Ok(t >= 0.7)).unwrap().theta().unwrap();
        assert!((b - 0.7).abs() <= 1e-6);
    }
}
