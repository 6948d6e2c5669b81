use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::bernstein::{basis_integral_to, basis_unchecked};
use crate::distributions::CondDensityTable;
use crate::lp::{program_is_feasible, solve_lp, LinearProgram, LpStatus, Sense, SolverOptions};
use crate::sensitivity::{build_density_constraints, Sensitivity};
use crate::{Error, IdentifiedInterval, Matrix, Result};

/// Sizes of the sieve approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Bernstein degree `M`; must match the density table.
    pub degree: usize,
    /// Number `N` of constraint points `n / (N + 1)`, `n = 1..=N`.
    pub grid: usize,
    /// Number `L` of left-endpoint quadrature nodes `n / L`, `n = 0..L`.
    pub quad: usize,
    /// Also impose the sensitivity rows at `y = 0` and `y = 1`.
    pub include_endpoints: bool,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            degree: 30,
            grid: 128,
            quad: 512,
            include_endpoints: false,
        }
    }
}

impl SieveConfig {
    pub fn new(degree: usize, grid: usize, quad: usize) -> Result<Self> {
        let cfg = Self {
            degree,
            grid,
            quad,
            include_endpoints: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 || self.grid < 1 || self.quad < 2 {
            return Err(Error::InvalidParameter(format!(
                "need M >= 1, N >= 1 and L >= 2 (got {}, {}, {})",
                self.degree, self.grid, self.quad
            )));
        }
        Ok(())
    }

    /// Outcome points at which the sensitivity rows are imposed.
    pub fn constraint_points(&self) -> Vec<f64> {
        let n = self.grid;
        let mut pts: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        if self.include_endpoints {
            pts.insert(0, 0.0);
            pts.push(1.0);
        }
        pts
    }

    fn check_table(&self, table: &CondDensityTable) -> Result<()> {
        self.validate()?;
        if table.degree() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "density table has degree {} but the sieve uses M = {}",
                table.degree(),
                self.degree
            )));
        }
        if table.s_x() != 2 {
            return Err(Error::InvalidInput(format!(
                "the sieve needs a binary treatment, got {} values",
                table.s_x()
            )));
        }
        Ok(())
    }
}

type Weight = dyn Fn(usize, f64) -> Vec<f64> + Send + Sync;

/// Linear functional `sum_x int omega_x(y)' f_x(y) dy` of the conditional
/// densities `f_x(y) = (f(y | z_1; x), ..., f(y | z_{s_z}; x))` of `Y(x)`.
#[derive(Clone)]
pub enum FunctionalSpec {
    /// `E[Y(1)] - E[Y(0)]`: `omega_1(y) = -omega_0(y) = y * P(Z = z)`.
    Ate,
    /// `P(Y(arm) <= a)` with `omega_arm(y) = 1(y <= a) * P(Z = z)`, integrated
    /// exactly rather than by quadrature so that `a = 1` gives one.
    CdfAt { arm: usize, a: f64 },
    /// `omega(x, y)` returns one weight per instrument value.
    Custom(Arc<Weight>),
}

impl FunctionalSpec {
    pub fn custom<F>(omega: F) -> Self
    where
        F: Fn(usize, f64) -> Vec<f64> + Send + Sync + 'static,
    {
        FunctionalSpec::Custom(Arc::new(omega))
    }
}

impl fmt::Debug for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalSpec::Ate => f.write_str("Ate"),
            FunctionalSpec::CdfAt { arm, a } => f.debug_struct("CdfAt").field("arm", arm).field("a", a).finish(),
            FunctionalSpec::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Basis values `b_m(n / L)` at the quadrature nodes, `L x (M + 1)`.
pub(crate) fn quadrature_basis(degree: usize, quad: usize) -> Matrix {
    let mut q = Matrix::with_cols(degree + 1);
    for n in 0..quad {
        q.push_row(&basis_unchecked(degree, n as f64 / quad as f64))
            .expect("row has M + 1 entries");
    }
    q
}

/// Objective weights on `W_x[j, m]`, laid out `j * (M + 1) + m`, per arm.
pub(crate) fn objective_weights(
    spec: &FunctionalSpec,
    pz: &[f64],
    cfg: &SieveConfig,
    quad_basis: &Matrix,
) -> Result<[Vec<f64>; 2]> {
    let (k, s_z) = (cfg.degree + 1, pz.len());
    let mut out = [vec![0.0; s_z * k], vec![0.0; s_z * k]];
    let riemann = |omega: &dyn Fn(usize, f64) -> Result<Vec<f64>>, out: &mut [Vec<f64>; 2]| -> Result<()> {
        let l = cfg.quad as f64;
        for (x, w) in out.iter_mut().enumerate() {
            for (n, b) in quad_basis.iter_rows().enumerate() {
                let om = omega(x, n as f64 / l)?;
                for j in 0..s_z {
                    if om[j] == 0.0 {
                        continue;
                    }
                    for m in 0..k {
                        w[j * k + m] += om[j] * b[m] / l;
                    }
                }
            }
        }
        Ok(())
    };
    match spec {
        FunctionalSpec::Ate => {
            let omega = |x: usize, y: f64| {
                let sign = if x == 1 { 1.0 } else { -1.0 };
                Ok(pz.iter().map(|p| sign * y * p).collect())
            };
            riemann(&omega, &mut out)?;
        }
        FunctionalSpec::CdfAt { arm, a } => {
            if *arm > 1 {
                return Err(Error::InvalidInput(format!("treatment index {arm} is not 0 or 1")));
            }
            if !(0.0..=1.0).contains(a) {
                return Err(Error::InvalidInput(format!("CDF point {a} is outside [0, 1]")));
            }
            for j in 0..s_z {
                for m in 0..k {
                    out[*arm][j * k + m] = pz[j] * basis_integral_to(cfg.degree, m, *a);
                }
            }
        }
        FunctionalSpec::Custom(f) => {
            let omega = |x: usize, y: f64| {
                let v = f(x, y);
                if v.len() != s_z || v.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "custom weight at x={x}, y={y} must be {s_z} finite values"
                    )));
                }
                Ok(v)
            };
            riemann(&omega, &mut out)?;
        }
    }
    Ok(out)
}

/// Variable index of entry `(j, m)` of weight block `block` in the full program:
/// blocks are `W_1, W_{1,0}, W_0, W_{0,1}`, each stored column-major.
pub fn sieve_var(block: usize, j: usize, m: usize, s_z: usize, degree: usize) -> usize {
    block * s_z * (degree + 1) + m * s_z + j
}

fn arm_blocks(x: usize) -> (usize, usize) {
    if x == 1 {
        (0, 1)
    } else {
        (2, 3)
    }
}

/// The full sieve program over `vec(W_1), vec(W_{1,0}), vec(W_0), vec(W_{0,1})`.
///
/// Equalities tie each `W_x` to the observed part `pi(x | z) Xi_x / (M + 1)` plus
/// the unobserved part `pi(1 - x | z) W_{x,1-x}`; every weight row lies in the
/// simplex; the sensitivity rows hold at each constraint point for both arms.
pub fn build_sieve_lp(
    table: &CondDensityTable,
    model: Sensitivity,
    cfg: &SieveConfig,
    spec: &FunctionalSpec,
    sense: Sense,
) -> Result<LinearProgram> {
    cfg.check_table(table)?;
    let (s_z, degree) = (table.s_z(), cfg.degree);
    let k = degree + 1;
    let n_vars = 4 * s_z * k;
    let var = |b, j, m| sieve_var(b, j, m, s_z, degree);

    let qb = quadrature_basis(degree, cfg.quad);
    let weights = objective_weights(spec, table.pz(), cfg, &qb)?;
    let mut objective = vec![0.0; n_vars];
    for x in 0..2 {
        let (wb, _) = arm_blocks(x);
        for j in 0..s_z {
            for m in 0..k {
                objective[var(wb, j, m)] = weights[x][j * k + m];
            }
        }
    }
    let mut lp = LinearProgram::new(objective, sense);
    let mut row = vec![0.0; n_vars];

    for x in 0..2 {
        let (wb, ub) = arm_blocks(x);
        let xi = table.xi(x);
        for m in 0..k {
            for j in 0..s_z {
                row.fill(0.0);
                row[var(wb, j, m)] = 1.0;
                row[var(ub, j, m)] = -table.propensity(1 - x, j);
                lp.add_eq(&row, table.propensity(x, j) * xi[(j, m)] / k as f64)?;
            }
        }
    }
    for block in 0..4 {
        for j in 0..s_z {
            row.fill(0.0);
            for m in 0..k {
                row[var(block, j, m)] = 1.0;
            }
            lp.add_eq(&row, 1.0)?;
        }
    }
    for x in 0..2 {
        let (wb, _) = arm_blocks(x);
        let rows = build_density_constraints(model, table.pz(), x)?;
        for y in cfg.constraint_points() {
            let b = basis_unchecked(degree, y);
            for (a, rhs) in rows.lhs().iter_rows().zip(rows.rhs()) {
                row.fill(0.0);
                for j in 0..s_z {
                    for m in 0..k {
                        row[var(wb, j, m)] = a[j] * b[m];
                    }
                }
                lp.add_le(&row, *rhs)?;
            }
        }
    }
    Ok(lp)
}

/// One arm of the sieve with `W_x` substituted out.
///
/// The only free variables are the weights `V = W_{x,1-x}` (layout
/// `j * (M + 1) + m`); `W_x = C + diag(pi(1 - x | z)) V` with
/// `C = diag(pi(x | z)) Xi_x / (M + 1)`. Simplex rows of `W_x` follow from those
/// of `V` because the rows of `Xi_x / (M + 1)` sum to one, so the program is
/// exactly the arm's share of the full sieve program.
pub(crate) struct ArmSieve {
    s_z: usize,
    k: usize,
    observed: Vec<f64>,
    unobserved_share: Vec<f64>,
    program: LinearProgram,
}

impl ArmSieve {
    pub(crate) fn build(table: &CondDensityTable, model: Sensitivity, cfg: &SieveConfig, x: usize) -> Result<Self> {
        cfg.check_table(table)?;
        let (s_z, degree) = (table.s_z(), cfg.degree);
        let k = degree + 1;
        let xi = table.xi(x);
        let mut observed = vec![0.0; s_z * k];
        for j in 0..s_z {
            for m in 0..k {
                observed[j * k + m] = table.propensity(x, j) * xi[(j, m)] / k as f64;
            }
        }
        let unobserved_share: Vec<f64> = (0..s_z).map(|j| table.propensity(1 - x, j)).collect();

        let mut program = LinearProgram::new(vec![0.0; s_z * k], Sense::Minimize);
        let mut row = vec![0.0; s_z * k];
        for j in 0..s_z {
            row.fill(0.0);
            row[j * k..(j + 1) * k].fill(1.0);
            program.add_eq(&row, 1.0)?;
        }
        let rows = build_density_constraints(model, table.pz(), x)?;
        for y in cfg.constraint_points() {
            let b = basis_unchecked(degree, y);
            let fixed: Vec<f64> = (0..s_z)
                .map(|j| (0..k).map(|m| observed[j * k + m] * b[m]).sum())
                .collect();
            for (a, rhs) in rows.lhs().iter_rows().zip(rows.rhs()) {
                for j in 0..s_z {
                    for m in 0..k {
                        row[j * k + m] = a[j] * unobserved_share[j] * b[m];
                    }
                }
                let shift: f64 = a.iter().zip(&fixed).map(|(a, f)| a * f).sum();
                program.add_le(&row, rhs - shift)?;
            }
        }
        Ok(Self {
            s_z,
            k,
            observed,
            unobserved_share,
            program,
        })
    }

    pub(crate) fn is_feasible(&self) -> Result<bool> {
        program_is_feasible(&self.program, &SolverOptions::default())
    }

    /// Min and max of `weights . vec(W_x)` (layout `j * (M + 1) + m`).
    pub(crate) fn range(&mut self, weights: &[f64]) -> Result<Option<(f64, f64)>> {
        let constant: f64 = weights.iter().zip(&self.observed).map(|(w, c)| w * c).sum();
        for j in 0..self.s_z {
            for m in 0..self.k {
                let i = j * self.k + m;
                self.program.objective[i] = weights[i] * self.unobserved_share[j];
            }
        }
        let mut ends = [0.0; 2];
        for (slot, sense) in ends.iter_mut().zip([Sense::Minimize, Sense::Maximize]) {
            self.program.sense = sense;
            let sol = solve_lp(&self.program)?;
            match sol.status {
                LpStatus::Optimal => *slot = constant + sol.value,
                LpStatus::Infeasible => return Ok(None),
                LpStatus::Unbounded => {
                    return Err(Error::Internal("sieve program reported unbounded".into()))
                }
            }
        }
        Ok(Some((ends[0], ends[1])))
    }
}

/// Both arms of the reduced sieve at one `theta`.
pub(crate) struct Sieve {
    pub(crate) arms: [ArmSieve; 2],
    pub(crate) quad_basis: Matrix,
    pz: Vec<f64>,
    cfg: SieveConfig,
}

impl Sieve {
    pub(crate) fn build(table: &CondDensityTable, model: Sensitivity, cfg: &SieveConfig) -> Result<Self> {
        Ok(Self {
            arms: [
                ArmSieve::build(table, model, cfg, 0)?,
                ArmSieve::build(table, model, cfg, 1)?,
            ],
            quad_basis: quadrature_basis(cfg.degree, cfg.quad),
            pz: table.pz().to_vec(),
            cfg: *cfg,
        })
    }

    pub(crate) fn pz(&self) -> &[f64] {
        &self.pz
    }

    pub(crate) fn is_feasible(&self) -> Result<bool> {
        Ok(self.arms[0].is_feasible()? && self.arms[1].is_feasible()?)
    }

    /// Bounds on the functional on the unit outcome scale.
    pub(crate) fn bounds(&mut self, spec: &FunctionalSpec) -> Result<IdentifiedInterval> {
        let w = objective_weights(spec, &self.pz, &self.cfg, &self.quad_basis)?;
        let mut lo = 0.0;
        let mut hi = 0.0;
        for x in 0..2 {
            if w[x].iter().all(|v| *v == 0.0) {
                if !self.arms[x].is_feasible()? {
                    return Ok(IdentifiedInterval::EMPTY);
                }
                continue;
            }
            match self.arms[x].range(&w[x])? {
                Some((l, u)) => {
                    lo += l;
                    hi += u;
                }
                None => return Ok(IdentifiedInterval::EMPTY),
            }
        }
        IdentifiedInterval::new(lo, hi)
    }
}
