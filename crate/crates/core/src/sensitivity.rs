//! Linear constraint sets `A_x(theta)` for the three sensitivity models.
//!
//! `theta` is used directly as the model parameter: `lambda = 1 - 1/Lambda` for
//! the marginal sensitivity model, `c` for c-dependence and `K` for the
//! Kolmogorov-Smirnov / sup-distance model. At `theta = 0` every model forces the
//! law of `Y(x)` to be the same across instrument values; at `theta = 1` none of
//! them restricts anything.
//!
//! Three coordinate systems are supported:
//!
//! * [`ConstraintForm::DiscreteBinary`]: `(p_0, p_1)` with `p_z = P(Y(x) = 1 | Z = z)`.
//! * [`ConstraintForm::DiscreteGeneral`]: `p(y | z)` stored at index `z * s_y + y`.
//! * [`ConstraintForm::Density`]: one density value per instrument value; the rows
//!   hold pointwise at every outcome `y`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::distributions::JointDiscreteDist;
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Marginal sensitivity model.
    Msm,
    /// c-dependence.
    CDep,
    /// Kolmogorov-Smirnov distance (discrete) or sup-distance between densities.
    Ks,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Msm, ModelKind::CDep, ModelKind::Ks];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Msm => "msm",
            ModelKind::CDep => "cdep",
            ModelKind::Ks => "ks",
        }
    }

    pub fn at(self, theta: f64) -> Result<Sensitivity> {
        Sensitivity::new(self, theta)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "msm" => Ok(ModelKind::Msm),
            "cdep" | "c-dep" | "c-dependence" => Ok(ModelKind::CDep),
            "ks" | "sup" => Ok(ModelKind::Ks),
            other => Err(Error::InvalidParameter(format!(
                "unknown sensitivity model `{other}` (expected msm, cdep or ks)"
            ))),
        }
    }
}

/// A sensitivity model at a fixed `theta` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    kind: ModelKind,
    theta: f64,
}

impl Sensitivity {
    pub fn new(kind: ModelKind, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self { kind, theta })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("theta = {theta} is not in [0, 1]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintForm {
    DiscreteBinary,
    DiscreteGeneral,
    Density,
}

/// Rows `lhs * v <= rhs` over the coordinates described by `form`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraintSet {
    lhs: Matrix,
    rhs: Vec<f64>,
    form: ConstraintForm,
}

impl LinearConstraintSet {
    fn new(cols: usize, form: ConstraintForm) -> Self {
        Self {
            lhs: Matrix::with_cols(cols),
            rhs: Vec::new(),
            form,
        }
    }

    fn push(&mut self, row: &[f64], rhs: f64) {
        self.lhs.push_row(row).expect("builder rows have the set's width");
        self.rhs.push(rhs);
    }

    pub fn lhs(&self) -> &Matrix {
        &self.lhs
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn form(&self) -> ConstraintForm {
        self.form
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lhs.cols()
    }

    /// Largest positive part of `lhs * v - rhs`; zero when every row holds.
    pub fn max_violation(&self, v: &[f64]) -> f64 {
        self.lhs
            .mul_vec(v)
            .iter()
            .zip(&self.rhs)
            .map(|(l, r)| (l - r).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.max_violation(v) <= tol
    }
}

/// `k_z(c) = P(Z=z) max(P(Z=1-z) - c, 0) / (P(Z=1-z) min(P(Z=z) + c, 1))` for
/// `z = 0, 1`, with `pz = (P(Z=0), P(Z=1))`.
pub fn kz(c: f64, pz: [f64; 2]) -> Result<(f64, f64)> {
    check_theta(c)?;
    if pz.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(Error::InvalidInput(format!("instrument marginal {pz:?} must lie in (0,1)")));
    }
    let k = |z: usize| pz[z] * (pz[1 - z] - c).max(0.0) / (pz[1 - z] * (pz[z] + c).min(1.0));
    Ok((k(0), k(1)))
}

fn binary_pz(pz: &[f64]) -> Result<[f64; 2]> {
    match pz {
        [a, b] => Ok([*a, *b]),
        _ => Err(Error::FormMismatch(format!(
            "the two-instrument form needs two instrument values, got {}",
            pz.len()
        ))),
    }
}

/// Rows over `(p_0, p_1)` for a binary outcome and binary instrument.
pub fn binary_constraints(model: Sensitivity, pz: &[f64]) -> Result<LinearConstraintSet> {
    let pz = binary_pz(pz)?;
    let t = model.theta;
    let mut set = LinearConstraintSet::new(2, ConstraintForm::DiscreteBinary);
    match model.kind {
        ModelKind::Msm => {
            set.push(&[1.0 - t, -1.0], 0.0);
            set.push(&[-1.0, 1.0 - t], 0.0);
            set.push(&[t - 1.0, 1.0], t);
            set.push(&[1.0, t - 1.0], t);
        }
        ModelKind::CDep => {
            let (k0, k1) = kz(t, pz)?;
            set.push(&[k0, -1.0], 0.0);
            set.push(&[-1.0, k1], 0.0);
            set.push(&[-k0, 1.0], 1.0 - k0);
            set.push(&[1.0, -k1], 1.0 - k1);
        }
        ModelKind::Ks => {
            set.push(&[1.0, -1.0], t);
            set.push(&[-1.0, 1.0], t);
        }
    }
    Ok(set)
}

/// Rows over `p(y | z)` (index `z * s_y + y`) for any finite supports.
///
/// The marginal sensitivity model bounds every pairwise ratio
/// `p(y | z) / p(y | z')` below by `1 - lambda`. c-dependence bounds
/// `|P(Z = z | Y(x) = y) - P(Z = z)|` by `c`, multiplied through by
/// `q(y) = sum_z' P(Z = z') p(y | z')` to stay linear. The KS model bounds every
/// pairwise difference of conditional CDFs by `K`.
pub fn general_constraints(model: Sensitivity, pz: &[f64], s_y: usize) -> Result<LinearConstraintSet> {
    let s_z = pz.len();
    if s_y == 0 || s_z < 2 {
        return Err(Error::InvalidInput(format!(
            "need a nonempty outcome support and two instrument values (got {s_y}, {s_z})"
        )));
    }
    let t = model.theta;
    let dim = s_y * s_z;
    let idx = |z: usize, y: usize| z * s_y + y;
    let mut set = LinearConstraintSet::new(dim, ConstraintForm::DiscreteGeneral);
    let mut row = vec![0.0; dim];
    match model.kind {
        ModelKind::Msm => {
            for z in 0..s_z {
                for zp in (0..s_z).filter(|&zp| zp != z) {
                    for y in 0..s_y {
                        row.fill(0.0);
                        row[idx(zp, y)] = 1.0 - t;
                        row[idx(z, y)] = -1.0;
                        set.push(&row, 0.0);
                    }
                }
            }
        }
        ModelKind::CDep => {
            for z in 0..s_z {
                for y in 0..s_y {
                    for sign in [1.0, -1.0] {
                        // sign * (P(z) p(y|z) - P(z) q(y)) - c q(y) <= 0
                        row.fill(0.0);
                        for zp in 0..s_z {
                            row[idx(zp, y)] = -(sign * pz[z] + t) * pz[zp];
                        }
                        row[idx(z, y)] += sign * pz[z];
                        set.push(&row, 0.0);
                    }
                }
            }
        }
        ModelKind::Ks => {
            for z in 0..s_z {
                for zp in (0..s_z).filter(|&zp| zp != z) {
                    for k in 0..s_y.saturating_sub(1) {
                        row.fill(0.0);
                        for y in 0..=k {
                            row[idx(z, y)] = 1.0;
                            row[idx(zp, y)] = -1.0;
                        }
                        set.push(&row, t);
                    }
                }
            }
        }
    }
    Ok(set)
}

/// Constraint set for treatment arm `arm` of `dist` in the requested form.
///
/// None of the three models depends on the observed cells, only on the
/// instrument marginal and the supports; `arm` is validated for consistency.
pub fn build_discrete_constraints(
    model: Sensitivity,
    dist: &JointDiscreteDist,
    arm: usize,
    form: ConstraintForm,
) -> Result<LinearConstraintSet> {
    if arm >= dist.s_x() {
        return Err(Error::InvalidInput(format!(
            "treatment index {arm} outside a support of {} values",
            dist.s_x()
        )));
    }
    match form {
        ConstraintForm::DiscreteBinary => {
            if !dist.is_binary() {
                return Err(Error::FormMismatch(format!(
                    "the binary form needs binary Y, X and Z (supports {}x{}x{})",
                    dist.s_y(),
                    dist.s_x(),
                    dist.s_z()
                )));
            }
            binary_constraints(model, dist.pz())
        }
        ConstraintForm::DiscreteGeneral => general_constraints(model, dist.pz(), dist.s_y()),
        ConstraintForm::Density => Err(Error::FormMismatch(
            "density rows come from build_density_constraints".into(),
        )),
    }
}

/// Pointwise rows over `(f(y | z_1), ..., f(y | z_{s_z}))` for conditional
/// densities of `Y(x)`.
///
/// With two instrument values the rows are the familiar 2x2 systems; the KS
/// right-hand side is `K / (1 - K)` and `K = 1` yields no rows at all. With more
/// instrument values the marginal sensitivity and sup-distance models use every
/// ordered pair and c-dependence uses the same Bayes-rule rows as the general
/// discrete form.
pub fn build_density_constraints(model: Sensitivity, pz: &[f64], _arm: usize) -> Result<LinearConstraintSet> {
    let s_z = pz.len();
    if s_z < 2 {
        return Err(Error::InvalidInput("need at least two instrument values".into()));
    }
    if pz.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(Error::InvalidInput(format!("instrument marginal {pz:?} must lie in (0,1)")));
    }
    let t = model.theta;
    let mut set = LinearConstraintSet::new(s_z, ConstraintForm::Density);
    let mut row = vec![0.0; s_z];
    match model.kind {
        ModelKind::Msm => {
            for z in 0..s_z {
                for zp in (0..s_z).filter(|&zp| zp != z) {
                    row.fill(0.0);
                    row[z] = -1.0;
                    row[zp] = 1.0 - t;
                    set.push(&row, 0.0);
                }
            }
        }
        ModelKind::CDep if s_z == 2 => {
            let (k0, k1) = kz(t, [pz[0], pz[1]])?;
            set.push(&[-1.0, k1], 0.0);
            set.push(&[k0, -1.0], 0.0);
        }
        ModelKind::CDep => {
            let mut general = general_constraints(model, pz, 1)?;
            general.form = ConstraintForm::Density;
            return Ok(general);
        }
        ModelKind::Ks => {
            if t < 1.0 {
                let bound = t / (1.0 - t);
                for z in 0..s_z {
                    for zp in (0..s_z).filter(|&zp| zp != z) {
                        row.fill(0.0);
                        row[z] = 1.0;
                        row[zp] = -1.0;
                        set.push(&row, bound);
                    }
                }
            }
        }
    }
    Ok(set)
}
