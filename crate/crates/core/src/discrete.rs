//! Sharp bounds for discrete outcomes.
//!
//! For each treatment arm `x` the identified set of the conditional pmfs
//! `p(y | z) = P(Y(x) = y | Z = z)` is the polytope `H_x ∩ A_x(theta)`: the
//! no-assumption box from the observed cells (plus the simplex when the outcome
//! is not binary) intersected with the sensitivity rows. Every bound is a pair of
//! linear programs over that polytope; the two arms never interact.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bisection::{breakdown_search, falsification_search, Breakdown};
use crate::distributions::JointDiscreteDist;
use crate::lp::{program_is_feasible, solve_lp, LinearProgram, LpStatus, Sense, SolverOptions};
use crate::sensitivity::{build_discrete_constraints, ConstraintForm, ModelKind, Sensitivity};
use crate::{validate_theta_grid, CurvePoint, Error, IdentifiedInterval, Result, SensitivityCurve};

/// Per-arm intervals `[P(Y=y, X=x | z), P(Y=y, X=x | z) + pi(not x | z)]`,
/// capped at one.
#[derive(Debug, Clone, PartialEq)]
pub struct NoAssumptionBox {
    s_y: usize,
    s_z: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl NoAssumptionBox {
    pub fn s_y(&self) -> usize {
        self.s_y
    }

    pub fn s_z(&self) -> usize {
        self.s_z
    }

    /// Interval for `P(Y(x) = y | Z = z)` by support index.
    pub fn interval(&self, y: usize, z: usize) -> (f64, f64) {
        let i = z * self.s_y + y;
        (self.lower[i], self.upper[i])
    }

    /// Lower corners in `p(y | z)` order (index `z * s_y + y`).
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

pub fn noassumption_box(dist: &JointDiscreteDist, arm: usize) -> Result<NoAssumptionBox> {
    check_arm(dist, arm)?;
    let (s_y, s_z) = (dist.s_y(), dist.s_z());
    let mut lower = Vec::with_capacity(s_y * s_z);
    let mut upper = Vec::with_capacity(s_y * s_z);
    for z in 0..s_z {
        let slack = 1.0 - dist.propensity(arm, z);
        for y in 0..s_y {
            let c = dist.cell(y, arm, z);
            lower.push(c);
            upper.push((c + slack).min(1.0));
        }
    }
    Ok(NoAssumptionBox { s_y, s_z, lower, upper })
}

fn check_arm(dist: &JointDiscreteDist, arm: usize) -> Result<()> {
    if arm < dist.s_x() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "treatment index {arm} outside a support of {} values",
            dist.s_x()
        )))
    }
}

fn check_two_arms(dist: &JointDiscreteDist, what: &str) -> Result<()> {
    if dist.s_x() == 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{what} needs a binary treatment, got {} values",
            dist.s_x()
        )))
    }
}

/// Variables, bounds and rows of `H_x ∩ A_x(theta)` in one coordinate system.
struct ArmPolytope {
    form: ConstraintForm,
    program: LinearProgram,
}

impl ArmPolytope {
    fn build(dist: &JointDiscreteDist, model: Sensitivity, arm: usize, form: ConstraintForm) -> Result<Self> {
        let bx = noassumption_box(dist, arm)?;
        let rows = build_discrete_constraints(model, dist, arm, form)?;
        let n = rows.dim();
        let mut program = LinearProgram::new(vec![0.0; n], Sense::Minimize);
        for (r, b) in rows.lhs().iter_rows().zip(rows.rhs()) {
            program.add_le(r, *b)?;
        }
        match form {
            ConstraintForm::DiscreteBinary => {
                for z in 0..2 {
                    let (lo, hi) = bx.interval(1, z);
                    program.set_bounds(z, lo, hi);
                }
            }
            _ => {
                let s_y = dist.s_y();
                for i in 0..n {
                    program.set_bounds(i, bx.lower[i], bx.upper[i]);
                }
                let mut row = vec![0.0; n];
                for z in 0..dist.s_z() {
                    row.fill(0.0);
                    row[z * s_y..(z + 1) * s_y].fill(1.0);
                    program.add_eq(&row, 1.0)?;
                }
            }
        }
        Ok(Self { form, program })
    }

    fn feasible(&self) -> Result<bool> {
        program_is_feasible(&self.program, &SolverOptions::default())
    }

    /// Min and max of `objective . v` over the polytope.
    fn range(&mut self, objective: Vec<f64>) -> Result<IdentifiedInterval> {
        self.program.objective = objective;
        let mut ends = [0.0; 2];
        for (slot, sense) in ends.iter_mut().zip([Sense::Minimize, Sense::Maximize]) {
            self.program.sense = sense;
            let sol = solve_lp(&self.program)?;
            match sol.status {
                LpStatus::Optimal => *slot = sol.value,
                LpStatus::Infeasible => return Ok(IdentifiedInterval::EMPTY),
                LpStatus::Unbounded => {
                    return Err(Error::Internal("bounded identified set reported unbounded".into()))
                }
            }
        }
        IdentifiedInterval::new(ends[0], ends[1])
    }
}

fn natural_form(dist: &JointDiscreteDist) -> ConstraintForm {
    if dist.is_binary() {
        ConstraintForm::DiscreteBinary
    } else {
        ConstraintForm::DiscreteGeneral
    }
}

/// Whether `H_x ∩ A_x(theta)` is nonempty for arm `arm`.
pub fn arm_is_feasible(dist: &JointDiscreteDist, model: Sensitivity, arm: usize) -> Result<bool> {
    ArmPolytope::build(dist, model, arm, natural_form(dist))?.feasible()
}

/// Bounds on `P(Y(x) = 1)` for binary `Y`, `X` and `Z`, optimising
/// `(1 - p_Z) a_0 + p_Z a_1` over the two-coordinate polytope.
pub fn potential_prob_bounds(dist: &JointDiscreteDist, model: Sensitivity, arm: usize) -> Result<IdentifiedInterval> {
    let mut poly = ArmPolytope::build(dist, model, arm, ConstraintForm::DiscreteBinary)?;
    poly.range(dist.pz().to_vec())
}

/// Bounds on `P(Y(x) = y)` for any finite supports, `y` a support index.
pub fn pmf_bounds(dist: &JointDiscreteDist, model: Sensitivity, arm: usize, y: usize) -> Result<IdentifiedInterval> {
    if y >= dist.s_y() {
        return Err(Error::InvalidInput(format!(
            "outcome index {y} outside a support of {} values",
            dist.s_y()
        )));
    }
    let mut poly = ArmPolytope::build(dist, model, arm, ConstraintForm::DiscreteGeneral)?;
    let s_y = dist.s_y();
    let mut obj = vec![0.0; s_y * dist.s_z()];
    for (z, p) in dist.pz().iter().enumerate() {
        obj[z * s_y + y] = *p;
    }
    poly.range(obj)
}

/// Bounds on `E[Y(x)]`.
pub fn mean_bounds(dist: &JointDiscreteDist, model: Sensitivity, arm: usize) -> Result<IdentifiedInterval> {
    let mut poly = ArmPolytope::build(dist, model, arm, natural_form(dist))?;
    let obj = match poly.form {
        ConstraintForm::DiscreteBinary => dist.pz().to_vec(),
        _ => dist
            .pz()
            .iter()
            .flat_map(|p| dist.y_support().iter().map(move |y| p * y))
            .collect(),
    };
    poly.range(obj)
}

/// `[lower(E[Y(1)]) - upper(E[Y(0)]), upper(E[Y(1)]) - lower(E[Y(0)])]`.
pub fn ate_bounds(dist: &JointDiscreteDist, model: Sensitivity) -> Result<IdentifiedInterval> {
    check_two_arms(dist, "the ATE")?;
    let m1 = mean_bounds(dist, model, 1)?;
    let m0 = mean_bounds(dist, model, 0)?;
    match (m1.bounds(), m0.bounds()) {
        (Some((l1, u1)), Some((l0, u0))) => IdentifiedInterval::new(l1 - u0, u1 - l0),
        _ => Ok(IdentifiedInterval::EMPTY),
    }
}

/// Bounds on `E[Y(1) - Y(0) | X = 1]` through
/// `E[Y(0) | X = 1] = (E[Y(0)] - E[Y | X = 0] P(X = 0)) / P(X = 1)`.
///
/// Both arms must be feasible; otherwise the model is refuted and the set is empty.
pub fn att_bounds(dist: &JointDiscreteDist, model: Sensitivity) -> Result<IdentifiedInterval> {
    check_two_arms(dist, "the ATT")?;
    let m0 = mean_bounds(dist, model, 0)?;
    if !arm_is_feasible(dist, model, 1)? {
        return Ok(IdentifiedInterval::EMPTY);
    }
    let Some((l0, u0)) = m0.bounds() else {
        return Ok(IdentifiedInterval::EMPTY);
    };
    let (p1, p0) = (dist.p_x(1), dist.p_x(0));
    let observed = dist.cond_mean(0) * p0;
    let treated = dist.cond_mean(1);
    IdentifiedInterval::new(treated - (u0 - observed) / p1, treated - (l0 - observed) / p1)
}

/// Parameters with discrete bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscreteTarget {
    Ate,
    Att,
    /// `E[Y(x)]`.
    Mean(usize),
    /// `P(Y(x) = 1)` for binary data.
    Prob(usize),
    /// `P(Y(x) = y_support[y])`.
    Pmf { arm: usize, y: usize },
}

pub fn target_bounds(dist: &JointDiscreteDist, model: Sensitivity, target: DiscreteTarget) -> Result<IdentifiedInterval> {
    match target {
        DiscreteTarget::Ate => ate_bounds(dist, model),
        DiscreteTarget::Att => att_bounds(dist, model),
        DiscreteTarget::Mean(arm) => mean_bounds(dist, model, arm),
        DiscreteTarget::Prob(arm) => potential_prob_bounds(dist, model, arm),
        DiscreteTarget::Pmf { arm, y } => pmf_bounds(dist, model, arm, y),
    }
}

/// Smallest `theta` at which every arm's identified set is nonempty: the
/// per-arm thresholds found by bisection, combined with `max`.
pub fn falsification_point(dist: &JointDiscreteDist, kind: ModelKind, tol: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for arm in 0..dist.s_x() {
        let t = falsification_search(tol, |theta| arm_is_feasible(dist, kind.at(theta)?, arm))?;
        worst = worst.max(t);
    }
    Ok(worst)
}

/// Smallest `theta` at which `value` enters the identified set of `target`.
pub fn breakdown_point(
    dist: &JointDiscreteDist,
    kind: ModelKind,
    target: DiscreteTarget,
    value: f64,
    tol: f64,
) -> Result<Breakdown> {
    let start = falsification_point(dist, kind, tol)?;
    breakdown_search(start, tol, |theta| {
        Ok(target_bounds(dist, kind.at(theta)?, target)?.contains(value))
    })
}

/// Bounds at each `theta` of an increasing grid in `[0, 1]`.
pub fn sensitivity_curve(
    dist: &JointDiscreteDist,
    kind: ModelKind,
    grid: &[f64],
    target: DiscreteTarget,
) -> Result<SensitivityCurve> {
    validate_theta_grid(grid)?;
    let points = grid
        .iter()
        .map(|&theta| {
            Ok(CurvePoint {
                theta,
                interval: target_bounds(dist, kind.at(theta)?, target)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SensitivityCurve::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisection::DEFAULT_TOL;

    fn d1() -> JointDiscreteDist {
        JointDiscreteDist::binary(0.5, [0.4, 0.6], [0.2, 0.5], [0.3, 0.1]).unwrap()
    }

    fn d2() -> JointDiscreteDist {
        JointDiscreteDist::binary(0.5, [0.3, 0.9], [0.05, 0.8], [0.3, 0.05]).unwrap()
    }

    fn assert_interval(i: IdentifiedInterval, lo: f64, hi: f64) {
        let (l, u) = i.bounds().expect("feasible");
        assert!((l - lo).abs() < 1e-9 && (u - hi).abs() < 1e-9, "[{l}, {u}] vs [{lo}, {hi}]");
    }

    #[test]
    fn boxes_of_first_distribution() {
        let b1 = noassumption_box(&d1(), 1).unwrap();
        let b0 = noassumption_box(&d1(), 0).unwrap();
        let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
        assert!(close(b1.interval(1, 0), (0.2, 0.8)));
        assert!(close(b1.interval(1, 1), (0.5, 0.9)));
        assert!(close(b0.interval(1, 0), (0.3, 0.7)));
        assert!(close(b0.interval(1, 1), (0.1, 0.7)));
    }

    #[test]
    fn box_width_is_the_other_arm_share() {
        let eps = 0.03;
        let d = JointDiscreteDist::binary(0.4, [1.0 - eps, 1.0 - eps], [0.0, 0.0], [0.0, 0.0]).unwrap();
        let b = noassumption_box(&d, 1).unwrap();
        for z in 0..2 {
            let (l, u) = b.interval(1, z);
            assert!((u - l - eps).abs() < 1e-12);
        }
    }

    #[test]
    fn potential_probabilities_of_first_distribution() {
        for kind in ModelKind::ALL {
            assert_interval(potential_prob_bounds(&d1(), kind.at(1.0).unwrap(), 1).unwrap(), 0.35, 0.85);
            assert_interval(potential_prob_bounds(&d1(), kind.at(0.0).unwrap(), 1).unwrap(), 0.5, 0.8);
        }
    }

    #[test]
    fn ate_of_first_distribution() {
        for kind in ModelKind::ALL {
            assert_interval(ate_bounds(&d1(), kind.at(1.0).unwrap()).unwrap(), -0.35, 0.65);
            assert_interval(ate_bounds(&d1(), kind.at(0.0).unwrap()).unwrap(), -0.2, 0.5);
        }
    }

    #[test]
    fn second_distribution_is_refuted_at_independence() {
        for kind in ModelKind::ALL {
            let s = kind.at(0.0).unwrap();
            assert!(!potential_prob_bounds(&d2(), s, 1).unwrap().is_feasible());
            assert!(!ate_bounds(&d2(), s).unwrap().is_feasible());
            assert!(!att_bounds(&d2(), s).unwrap().is_feasible());
        }
    }

    #[test]
    fn falsification_points() {
        let t = falsification_point(&d2(), ModelKind::Ks, 1e-6).unwrap();
        assert!((t - 0.05).abs() < 1e-5, "{t}");
        for kind in ModelKind::ALL {
            assert_eq!(falsification_point(&d1(), kind, DEFAULT_TOL).unwrap(), 0.0);
        }
    }

    #[test]
    fn breakdown_points() {
        for kind in ModelKind::ALL {
            assert_eq!(
                breakdown_point(&d1(), kind, DiscreteTarget::Ate, 0.0, DEFAULT_TOL).unwrap(),
                Breakdown::At(0.0)
            );
            assert_eq!(
                breakdown_point(&d1(), kind, DiscreteTarget::Ate, 0.9, DEFAULT_TOL).unwrap(),
                Breakdown::Never
            );
        }
        // E[Y(1)] is pinned above E[Y(0)] at independence.
        let d = JointDiscreteDist::binary(0.5, [0.8, 0.2], [0.7, 0.15], [0.05, 0.1]).unwrap();
        let at0 = ate_bounds(&d, ModelKind::Ks.at(0.0).unwrap()).unwrap();
        assert!(at0.lower().unwrap() > 0.0);
        let t = breakdown_point(&d, ModelKind::Ks, DiscreteTarget::Ate, 0.0, 1e-7)
            .unwrap()
            .theta()
            .unwrap();
        assert!(t > 0.0);
        let lower = ate_bounds(&d, ModelKind::Ks.at(t).unwrap()).unwrap().lower().unwrap();
        assert!(lower.abs() < 1e-6, "{lower}");
    }

    #[test]
    fn att_of_first_distribution_matches_arm_zero_extremes() {
        let d = d1();
        let (p1, p0) = (d.p_x(1), d.p_x(0));
        let (m1, m0) = (d.cond_mean(1), d.cond_mean(0));
        // Arm-0 box at theta = 1 gives E[Y(0)] in [0.2, 0.7].
        let expect = |e0: f64| m1 - (e0 - m0 * p0) / p1;
        assert_interval(att_bounds(&d, ModelKind::Msm.at(1.0).unwrap()).unwrap(), expect(0.7), expect(0.2));
    }

    #[test]
    fn att_is_a_point_when_arm_zero_is_pinned() {
        // Arm-0 intervals [0.2, 0.5] and [0.5, 0.9] meet only at 0.5.
        let d = JointDiscreteDist::binary(0.5, [0.3, 0.4], [0.1, 0.2], [0.2, 0.5]).unwrap();
        let att = att_bounds(&d, ModelKind::CDep.at(0.0).unwrap()).unwrap();
        assert!(att.width().unwrap().abs() < 1e-9);
    }

    #[test]
    fn pmf_reduces_to_binary_probability() {
        for kind in ModelKind::ALL {
            for theta in [0.0, 0.05, 0.3, 1.0] {
                let s = kind.at(theta).unwrap();
                for arm in 0..2 {
                    let a = pmf_bounds(&d1(), s, arm, 1).unwrap();
                    let b = potential_prob_bounds(&d1(), s, arm).unwrap();
                    let (al, au) = a.bounds().unwrap();
                    let (bl, bu) = b.bounds().unwrap();
                    assert!((al - bl).abs() < 1e-9 && (au - bu).abs() < 1e-9, "{kind} {theta}");
                }
            }
        }
    }

    #[test]
    fn curve_matches_pointwise_bounds() {
        let c = sensitivity_curve(&d1(), ModelKind::CDep, &[0.0, 0.5, 1.0], DiscreteTarget::Ate).unwrap();
        for p in c.points() {
            assert_eq!(p.interval, ate_bounds(&d1(), ModelKind::CDep.at(p.theta).unwrap()).unwrap());
        }
        assert_eq!(c.nesting_violations(1e-12), 0);
        assert!(sensitivity_curve(&d1(), ModelKind::CDep, &[0.5, 0.1], DiscreteTarget::Ate).is_err());
    }

    #[test]
    fn three_valued_outcome_at_no_restriction_matches_box() {
        let d = JointDiscreteDist::new(
            vec![0.0, 1.0, 2.0],
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into()],
            vec![0.5, 0.5],
            vec![0.1, 0.2, 0.2, 0.1, 0.2, 0.2, 0.2, 0.2, 0.1, 0.1, 0.2, 0.2],
        )
        .unwrap();
        // Arm 1, y = 2: cells 0.2 and 0.2 with slack 0.5 and 0.5.
        assert_interval(pmf_bounds(&d, ModelKind::Msm.at(1.0).unwrap(), 1, 2).unwrap(), 0.2, 0.7);
        // E[Y(1)]: mass not in arm 1 goes to 0 or to 2.
        let lo = 0.2 + 2.0 * 0.2;
        let hi = lo + 2.0 * 0.5;
        assert_interval(mean_bounds(&d, ModelKind::Msm.at(1.0).unwrap(), 1).unwrap(), lo, hi);
    }
}
