//! Bounds for continuous outcomes through a Bernstein sieve.
//!
//! Outcomes live on `[0, 1]` (see [`crate::distributions::rescale_outcome`]).
//! Each conditional density of `Y(x)` given `Z = z` is approximated by
//! `sum_m W[z, m] b_m(y)` with simplex weights, and the observed data pin down
//! the part of `W` that comes from units with `X = x`. Every functional that is
//! linear in the densities then has sharp sieve bounds given by two linear
//! programs. Internally each arm is solved separately over the unobserved
//! weights only; [`build_sieve_lp`] assembles the joint program for inspection
//! and cross-checking.

mod bernstein;
mod sieve;

use alloc::format;
use alloc::vec::Vec;

pub use bernstein::{bernstein_approx, bernstein_basis};
pub use sieve::{build_sieve_lp, sieve_var, FunctionalSpec, SieveConfig};

use crate::bisection::{breakdown_search, falsification_search, Breakdown};
use crate::distributions::CondDensityTable;
use crate::sensitivity::{ModelKind, Sensitivity};
use crate::{validate_theta_grid, CurvePoint, Error, IdentifiedInterval, Result, SensitivityCurve};
use bernstein::basis_unchecked;
use sieve::{objective_weights, ArmSieve, Sieve};

/// Largest drop tolerated in a CDF band before monotonisation without a warning.
pub const MONOTONE_WARN: f64 = 0.01;

/// Tolerance on the refutation integral.
pub const REFUTATION_TOL: f64 = 1e-6;

/// `a_i = i / 255`, `i = 0..=255`.
pub fn default_a_grid() -> Vec<f64> {
    (0..256).map(|i| i as f64 / 255.0).collect()
}

/// Bounds on a linear functional of the densities of `Y(0)` and `Y(1)`.
///
/// [`FunctionalSpec::Ate`] is reported in original outcome units (scaled by the
/// table's affine map); CDF values and custom functionals are unit-free.
pub fn functional_bounds(
    table: &CondDensityTable,
    model: Sensitivity,
    cfg: &SieveConfig,
    spec: &FunctionalSpec,
) -> Result<IdentifiedInterval> {
    let unit = Sieve::build(table, model, cfg)?.bounds(spec)?;
    Ok(match spec {
        FunctionalSpec::Ate => unit.map_affine(0.0, table.affine().scale),
        _ => unit,
    })
}

/// Whether the sieve identified set is nonempty for both arms.
pub fn sieve_is_feasible(table: &CondDensityTable, model: Sensitivity, cfg: &SieveConfig) -> Result<bool> {
    Sieve::build(table, model, cfg)?.is_feasible()
}

/// Pointwise bounds on `P(Y(x) <= a)` over a grid of `a` on the unit scale.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfBand {
    a: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    feasible: bool,
    max_violation: f64,
}

impl CdfBand {
    pub fn a_grid(&self) -> &[f64] {
        &self.a
    }

    /// Monotonised lower envelope (running maximum); empty when infeasible.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Monotonised upper envelope (running minimum from the right).
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    /// Largest decrease found in either envelope before monotonisation.
    pub fn max_violation(&self) -> f64 {
        self.max_violation
    }

    pub fn intervals(&self) -> Vec<IdentifiedInterval> {
        if !self.feasible {
            return self.a.iter().map(|_| IdentifiedInterval::EMPTY).collect();
        }
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| IdentifiedInterval::new(*l, *u).expect("band envelopes are ordered"))
            .collect()
    }
}

fn validate_a_grid(a_grid: &[f64]) -> Result<()> {
    if a_grid.is_empty() {
        return Err(Error::InvalidInput("CDF grid is empty".into()));
    }
    if a_grid.iter().any(|a| !(0.0..=1.0).contains(a)) || a_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("CDF grid must be strictly increasing inside [0, 1]".into()));
    }
    Ok(())
}

fn check_arm(arm: usize) -> Result<()> {
    if arm < 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("treatment index {arm} is not 0 or 1")))
    }
}

fn band_on(sieve: &mut Sieve, arm: usize, a_grid: &[f64], cfg: &SieveConfig) -> Result<CdfBand> {
    let infeasible = CdfBand {
        a: a_grid.to_vec(),
        lower: Vec::new(),
        upper: Vec::new(),
        feasible: false,
        max_violation: 0.0,
    };
    if !sieve.arms[1 - arm].is_feasible()? {
        return Ok(infeasible);
    }
    let pz = sieve.pz().to_vec();
    let mut lower = Vec::with_capacity(a_grid.len());
    let mut upper = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        let w = objective_weights(&FunctionalSpec::CdfAt { arm, a }, &pz, cfg, &sieve.quad_basis)?;
        match sieve.arms[arm].range(&w[arm])? {
            Some((l, u)) => {
                lower.push(l.clamp(0.0, 1.0));
                upper.push(u.clamp(0.0, 1.0));
            }
            None => return Ok(infeasible),
        }
    }
    let mut violation = 0.0f64;
    for i in 1..lower.len() {
        violation = violation.max(lower[i - 1] - lower[i]);
        lower[i] = lower[i].max(lower[i - 1]);
    }
    for i in (0..upper.len().saturating_sub(1)).rev() {
        violation = violation.max(upper[i] - upper[i + 1]);
        upper[i] = upper[i].min(upper[i + 1]);
    }
    if violation > MONOTONE_WARN {
        log::warn!("CDF band for arm {arm} dropped by {violation:.4} before monotonisation");
    }
    for (l, u) in lower.iter_mut().zip(upper.iter_mut()) {
        if *l > *u {
            let mid = 0.5 * (*l + *u);
            *l = mid;
            *u = mid;
        }
    }
    Ok(CdfBand {
        a: a_grid.to_vec(),
        lower,
        upper,
        feasible: true,
        max_violation: violation,
    })
}

/// Bounds on the CDF of `Y(arm)` at each point of `a_grid` (unit scale).
///
/// The envelopes are monotonised in `a`; the largest correction is reported by
/// [`CdfBand::max_violation`] and logged when it exceeds [`MONOTONE_WARN`].
pub fn cdf_bounds(
    table: &CondDensityTable,
    model: Sensitivity,
    cfg: &SieveConfig,
    arm: usize,
    a_grid: &[f64],
) -> Result<CdfBand> {
    check_arm(arm)?;
    validate_a_grid(a_grid)?;
    let mut sieve = Sieve::build(table, model, cfg)?;
    band_on(&mut sieve, arm, a_grid, cfg)
}

/// Quantile treatment effect bounds and the per-arm quantile bounds behind them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QteBounds {
    /// `Q_1(tau) - Q_0(tau)` in original outcome units.
    pub interval: IdentifiedInterval,
    /// `[lower, upper]` bounds on `Q_x(tau)` in original units, by arm.
    pub quantiles: [Option<(f64, f64)>; 2],
    /// Some quantile bound fell off the grid and was set to the end of the
    /// outcome support.
    pub clamped: bool,
}

/// Outer bounds on the `tau`-quantile from a monotone CDF band on a grid.
///
/// The lower quantile is the last grid point where the upper CDF is still below
/// `tau` (zero if there is none); the upper quantile is the first grid point where
/// the lower CDF reaches `tau` (one if there is none).
fn invert_band(band: &CdfBand, tau: f64) -> ((f64, f64), bool) {
    let a = band.a_grid();
    let mut clamped = false;
    let lo = match band.upper().iter().position(|u| *u >= tau) {
        Some(0) => {
            clamped = a[0] > 0.0;
            0.0
        }
        Some(i) => a[i - 1],
        None => a[a.len() - 1],
    };
    let hi = match band.lower().iter().position(|l| *l >= tau) {
        Some(i) => a[i],
        None => {
            clamped = true;
            1.0
        }
    };
    ((lo, hi), clamped)
}

/// Bounds on `QTE(tau) = Q_{Y(1)}(tau) - Q_{Y(0)}(tau)` by inverting both arms'
/// CDF bands on `a_grid` (see [`default_a_grid`]).
pub fn qte_bounds(
    table: &CondDensityTable,
    model: Sensitivity,
    cfg: &SieveConfig,
    tau: f64,
    a_grid: &[f64],
) -> Result<QteBounds> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile level {tau} is not in (0, 1)")));
    }
    validate_a_grid(a_grid)?;
    let mut sieve = Sieve::build(table, model, cfg)?;
    let map = table.affine();
    let mut quantiles = [None; 2];
    let mut unit = [(0.0, 0.0); 2];
    let mut clamped = false;
    for arm in 0..2 {
        let band = band_on(&mut sieve, arm, a_grid, cfg)?;
        if !band.is_feasible() {
            return Ok(QteBounds {
                interval: IdentifiedInterval::EMPTY,
                quantiles: [None; 2],
                clamped: false,
            });
        }
        let (q, c) = invert_band(&band, tau);
        clamped |= c;
        unit[arm] = q;
        quantiles[arm] = Some((map.inverse(q.0), map.inverse(q.1)));
    }
    let interval = IdentifiedInterval::new(
        map.inverse_difference(unit[1].0 - unit[0].1),
        map.inverse_difference(unit[1].1 - unit[0].0),
    )?;
    Ok(QteBounds {
        interval,
        quantiles,
        clamped,
    })
}

/// Result of the check that `int max_z pi(x | z) f(y | x, z) dy <= 1` per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct Refutation {
    pub refuted: bool,
    /// Integral per arm, by treatment index.
    pub integrals: Vec<f64>,
}

/// Necessary condition for any instrument-independence model: the upper
/// envelope of the observed sub-densities must not carry more than unit mass.
/// The integral uses `quad` left-endpoint nodes on the Bernstein
/// approximations of the table rows.
pub fn refutation_check(table: &CondDensityTable, quad: usize) -> Result<Refutation> {
    if quad < 2 {
        return Err(Error::InvalidParameter(format!("need at least two quadrature nodes, got {quad}")));
    }
    let degree = table.degree();
    let k = (degree + 1) as f64;
    let mut integrals = Vec::with_capacity(table.s_x());
    for x in 0..table.s_x() {
        let xi = table.xi(x);
        let mut total = 0.0;
        for n in 0..quad {
            let b = basis_unchecked(degree, n as f64 / quad as f64);
            let top = (0..table.s_z())
                .map(|j| {
                    let f: f64 = xi.row(j).iter().zip(&b).map(|(v, b)| v * b).sum::<f64>() / k;
                    table.propensity(x, j) * f
                })
                .fold(f64::NEG_INFINITY, f64::max);
            total += top;
        }
        integrals.push(total / quad as f64);
    }
    Ok(Refutation {
        refuted: integrals.iter().any(|v| *v > 1.0 + REFUTATION_TOL),
        integrals,
    })
}

/// Smallest `theta` at which the sieve identified set is nonempty, combining the
/// per-arm thresholds with `max`.
pub fn falsification_point_continuous(
    table: &CondDensityTable,
    kind: ModelKind,
    cfg: &SieveConfig,
    tol: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for arm in 0..2 {
        let t = falsification_search(tol, |theta| {
            ArmSieve::build(table, kind.at(theta)?, cfg, arm)?.is_feasible()
        })?;
        worst = worst.max(t);
    }
    Ok(worst)
}

/// Smallest `theta` at which `value` lies in the bounds of `spec`.
pub fn breakdown_point_continuous(
    table: &CondDensityTable,
    kind: ModelKind,
    cfg: &SieveConfig,
    spec: &FunctionalSpec,
    value: f64,
    tol: f64,
) -> Result<Breakdown> {
    let start = falsification_point_continuous(table, kind, cfg, tol)?;
    breakdown_search(start, tol, |theta| {
        Ok(functional_bounds(table, kind.at(theta)?, cfg, spec)?.contains(value))
    })
}

/// [`functional_bounds`] over a `theta` grid.
pub fn functional_curve(
    table: &CondDensityTable,
    kind: ModelKind,
    cfg: &SieveConfig,
    spec: &FunctionalSpec,
    grid: &[f64],
) -> Result<SensitivityCurve> {
    validate_theta_grid(grid)?;
    let points = grid
        .iter()
        .map(|&theta| {
            Ok(CurvePoint {
                theta,
                interval: functional_bounds(table, kind.at(theta)?, cfg, spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SensitivityCurve::new(points)
}

/// [`qte_bounds`] over a `theta` grid.
pub fn qte_curve(
    table: &CondDensityTable,
    kind: ModelKind,
    cfg: &SieveConfig,
    tau: f64,
    a_grid: &[f64],
    grid: &[f64],
) -> Result<SensitivityCurve> {
    validate_theta_grid(grid)?;
    let points = grid
        .iter()
        .map(|&theta| {
            Ok(CurvePoint {
                theta,
                interval: qte_bounds(table, kind.at(theta)?, cfg, tau, a_grid)?.interval,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SensitivityCurve::new(points)
}
