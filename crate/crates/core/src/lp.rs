//! Small dense linear programs and a two-phase tableau simplex.
//!
//! Programs have the shape
//!
//! ```text
//! min / max  c'v
//! s.t.       G v <= h
//!            E v  = d
//!            l <= v <= u
//! ```
//!
//! with finite lower bounds. Upper bounds may be `+inf`. Everything the bound
//! computations build has at most a few thousand rows, so a dense tableau is
//! fast enough and keeps the arithmetic easy to audit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub sense: Sense,
    /// Rows mean `ineq_lhs * v <= ineq_rhs`.
    pub ineq_lhs: Matrix,
    pub ineq_rhs: Vec<f64>,
    pub eq_lhs: Matrix,
    pub eq_rhs: Vec<f64>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
}

impl LinearProgram {
    /// A program with no constraints and bounds `[0, +inf)` on every variable.
    pub fn new(objective: Vec<f64>, sense: Sense) -> Self {
        let n = objective.len();
        Self {
            objective,
            sense,
            ineq_lhs: Matrix::with_cols(n),
            ineq_rhs: Vec::new(),
            eq_lhs: Matrix::with_cols(n),
            eq_rhs: Vec::new(),
            var_lower: vec![0.0; n],
            var_upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, row: &[f64], rhs: f64) -> Result<()> {
        self.ineq_lhs.push_row(row)?;
        self.ineq_rhs.push(rhs);
        Ok(())
    }

    pub fn add_ge(&mut self, row: &[f64], rhs: f64) -> Result<()> {
        let neg: Vec<f64> = row.iter().map(|a| -a).collect();
        self.add_le(&neg, -rhs)
    }

    pub fn add_eq(&mut self, row: &[f64], rhs: f64) -> Result<()> {
        self.eq_lhs.push_row(row)?;
        self.eq_rhs.push(rhs);
        Ok(())
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.var_lower[var] = lower;
        self.var_upper[var] = upper;
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.ineq_lhs.cols() != n || self.eq_lhs.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint matrices have {} / {} columns for {} variables",
                self.ineq_lhs.cols(),
                self.eq_lhs.cols(),
                n
            )));
        }
        if self.ineq_lhs.rows() != self.ineq_rhs.len() || self.eq_lhs.rows() != self.eq_rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} inequality rows vs {} rhs entries, {} equality rows vs {} rhs entries",
                self.ineq_lhs.rows(),
                self.ineq_rhs.len(),
                self.eq_lhs.rows(),
                self.eq_rhs.len()
            )));
        }
        if self.var_lower.len() != n || self.var_upper.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "bounds of length {} / {} for {} variables",
                self.var_lower.len(),
                self.var_upper.len(),
                n
            )));
        }
        let finite = self.objective.iter().all(|x| x.is_finite())
            && self.ineq_lhs.is_finite()
            && self.eq_lhs.is_finite()
            && self.ineq_rhs.iter().all(|x| x.is_finite())
            && self.eq_rhs.iter().all(|x| x.is_finite())
            && self.var_lower.iter().all(|x| x.is_finite())
            && self.var_upper.iter().all(|x| !x.is_nan() && *x != f64::NEG_INFINITY);
        if !finite {
            return Err(Error::InvalidInput(
                "non-finite coefficient, right-hand side or lower bound".into(),
            ));
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `v`.
    pub fn max_violation(&self, v: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (row, rhs) in self.ineq_lhs.iter_rows().zip(&self.ineq_rhs) {
            worst = worst.max(dot(row, v) - rhs);
        }
        for (row, rhs) in self.eq_lhs.iter_rows().zip(&self.eq_rhs) {
            worst = worst.max((dot(row, v) - rhs).abs());
        }
        for ((x, lo), hi) in v.iter().zip(&self.var_lower).zip(&self.var_upper) {
            worst = worst.max(lo - x).max(x - hi);
        }
        worst
    }

    pub fn objective_value(&self, v: &[f64]) -> f64 {
        dot(&self.objective, v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value; NaN unless `status` is optimal.
    pub value: f64,
    /// Optimal point; empty unless `status` is optimal.
    pub argument: Vec<f64>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        Self {
            status,
            value: f64::NAN,
            argument: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Phase-one optimum above this means the region is empty.
    pub feasibility_tol: f64,
    /// Reduced costs above `-value_tol` count as optimal.
    pub value_tol: f64,
    /// Smallest pivot magnitude accepted in the ratio test.
    pub pivot_tol: f64,
    pub max_pivots: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-9,
            value_tol: 1e-9,
            pivot_tol: 1e-10,
            max_pivots: 200_000,
            bland_after: 20,
        }
    }
}

pub fn solve_lp(program: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(program, &SolverOptions::default())
}

pub fn solve_lp_with(program: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution> {
    program.validate()?;
    let Some(mut tab) = StandardForm::build(program, opts)?.into_tableau() else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    };
    if !tab.phase_one(opts)? {
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    }
    let sign = match program.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let cost: Vec<f64> = program.objective.iter().map(|c| sign * c).collect();
    if !tab.phase_two(&cost, opts)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }
    let shifted = tab.primal(program.num_vars());
    let argument: Vec<f64> = shifted
        .iter()
        .zip(&program.var_lower)
        .map(|(x, lo)| x + lo)
        .collect();
    let value = program.objective_value(&argument);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        argument,
    })
}

/// True iff `{v : G v <= h, E v = d, l <= v <= u}` is nonempty.
pub fn check_feasible(
    ineq_lhs: &Matrix,
    ineq_rhs: &[f64],
    eq_lhs: &Matrix,
    eq_rhs: &[f64],
    var_lower: &[f64],
    var_upper: &[f64],
) -> Result<bool> {
    let program = LinearProgram {
        objective: vec![0.0; var_lower.len()],
        sense: Sense::Minimize,
        ineq_lhs: ineq_lhs.clone(),
        ineq_rhs: ineq_rhs.to_vec(),
        eq_lhs: eq_lhs.clone(),
        eq_rhs: eq_rhs.to_vec(),
        var_lower: var_lower.to_vec(),
        var_upper: var_upper.to_vec(),
    };
    program_is_feasible(&program, &SolverOptions::default())
}

/// Phase one only; the objective of `program` is ignored.
pub fn program_is_feasible(program: &LinearProgram, opts: &SolverOptions) -> Result<bool> {
    program.validate()?;
    match StandardForm::build(program, opts)?.into_tableau() {
        None => Ok(false),
        Some(mut tab) => tab.phase_one(opts),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rows over the shifted variables `w = v - l >= 0`, all of the form
/// `row . w <= rhs` or `row . w = rhs`.
struct StandardForm {
    n: usize,
    le_rows: Vec<(Vec<f64>, f64)>,
    eq_rows: Vec<(Vec<f64>, f64)>,
    trivially_infeasible: bool,
}

impl StandardForm {
    fn build(program: &LinearProgram, opts: &SolverOptions) -> Result<Self> {
        let n = program.num_vars();
        let lower = &program.var_lower;
        let tol = opts.feasibility_tol;
        let mut out = Self {
            n,
            le_rows: Vec::new(),
            eq_rows: Vec::new(),
            trivially_infeasible: false,
        };
        for (row, rhs) in program.ineq_lhs.iter_rows().zip(&program.ineq_rhs) {
            let shifted = rhs - dot(row, lower);
            if row.iter().all(|a| *a == 0.0) {
                if shifted < -tol {
                    out.trivially_infeasible = true;
                }
                continue;
            }
            out.le_rows.push((row.to_vec(), shifted));
        }
        for (row, rhs) in program.eq_lhs.iter_rows().zip(&program.eq_rhs) {
            let shifted = rhs - dot(row, lower);
            if row.iter().all(|a| *a == 0.0) {
                if shifted.abs() > tol {
                    out.trivially_infeasible = true;
                }
                continue;
            }
            out.eq_rows.push((row.to_vec(), shifted));
        }
        for (i, (lo, hi)) in lower.iter().zip(&program.var_upper).enumerate() {
            if hi < lo {
                out.trivially_infeasible = true;
            } else if hi.is_finite() {
                let mut row = vec![0.0; n];
                row[i] = 1.0;
                out.le_rows.push((row, hi - lo));
            }
        }
        Ok(out)
    }

    fn into_tableau(self) -> Option<Tableau> {
        if self.trivially_infeasible {
            return None;
        }
        let n = self.n;
        let n_slack = self.le_rows.len();
        let n_art = self.le_rows.iter().filter(|(_, b)| *b < 0.0).count() + self.eq_rows.len();
        let m = n_slack + self.eq_rows.len();
        let cols = n + n_slack + n_art;
        let width = cols + 1;
        let mut a = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut next_art = n + n_slack;

        for (i, (row, b)) in self.le_rows.iter().enumerate() {
            let r = &mut a[i * width..(i + 1) * width];
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            for (dst, src) in r[..n].iter_mut().zip(row) {
                *dst = sign * src;
            }
            r[n + i] = sign;
            r[cols] = sign * b;
            if *b < 0.0 {
                r[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = n + i;
            }
        }
        for (k, (row, b)) in self.eq_rows.iter().enumerate() {
            let i = n_slack + k;
            let r = &mut a[i * width..(i + 1) * width];
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            for (dst, src) in r[..n].iter_mut().zip(row) {
                *dst = sign * src;
            }
            r[cols] = sign * b;
            r[next_art] = 1.0;
            basis[i] = next_art;
            next_art += 1;
        }
        Some(Tableau {
            m,
            cols,
            art_start: n + n_slack,
            a,
            basis,
            obj: vec![0.0; width],
            pivots: 0,
        })
    }
}

struct Tableau {
    m: usize,
    cols: usize,
    art_start: usize,
    /// `m x (cols + 1)`, last column is the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs; last entry is minus the current objective value.
    obj: Vec<f64>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.width() + self.cols]
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let width = self.width();
        self.obj.iter_mut().for_each(|x| *x = 0.0);
        self.obj[..cost.len()].copy_from_slice(cost);
        for i in 0..self.m {
            let cb = self.obj[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * width..(i + 1) * width];
                for (o, r) in self.obj.iter_mut().zip(row) {
                    *o -= cb * r;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let width = self.width();
        let p = self.a[r * width + s];
        {
            let row = &mut self.a[r * width..(r + 1) * width];
            for x in row.iter_mut() {
                *x /= p;
            }
            row[s] = 1.0;
        }
        let (before, rest) = self.a.split_at_mut(r * width);
        let (prow, after) = rest.split_at_mut(width);
        for row in before.chunks_exact_mut(width).chain(after.chunks_exact_mut(width)) {
            let f = row[s];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[s] = 0.0;
            }
        }
        let f = self.obj[s];
        if f != 0.0 {
            for (x, y) in self.obj.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            self.obj[s] = 0.0;
        }
        self.basis[r] = s;
        self.pivots += 1;
    }

    /// Primal simplex over columns `0..limit`.
    fn iterate(&mut self, limit: usize, opts: &SolverOptions) -> Result<Outcome> {
        let width = self.width();
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= opts.bland_after;
            let mut entering = None;
            let mut best = -opts.value_tol;
            for j in 0..limit {
                let d = self.obj[j];
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(s) = entering else {
                return Ok(Outcome::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aij = self.a[i * width + s];
                if aij > opts.pivot_tol {
                    let ratio = self.rhs(i).max(0.0) / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best_ratio)) => {
                            let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                            if ratio < best_ratio && !tie {
                                Some((i, ratio))
                            } else if tie && self.basis[i] < self.basis[k] {
                                Some((i, ratio.min(best_ratio)))
                            } else {
                                Some((k, best_ratio))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            if ratio <= opts.feasibility_tol {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, s);
            for i in 0..self.m {
                let idx = i * width + self.cols;
                if self.a[idx] < 0.0 && self.a[idx] > -opts.feasibility_tol {
                    self.a[idx] = 0.0;
                }
            }
            if self.pivots >= opts.max_pivots {
                return Err(Error::IterationLimit(self.pivots));
            }
        }
    }

    /// Minimises the artificial sum, then drops artificials. Returns
    /// feasibility.
    fn phase_one(&mut self, opts: &SolverOptions) -> Result<bool> {
        if self.art_start == self.cols {
            return Ok(true);
        }
        let mut cost = vec![0.0; self.cols];
        cost[self.art_start..].iter_mut().for_each(|c| *c = 1.0);
        self.set_costs(&cost);
        match self.iterate(self.cols, opts)? {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return Err(Error::Internal("phase one reported unbounded".into()));
            }
        }
        let infeasibility = -self.obj[self.cols];
        if infeasibility > opts.feasibility_tol {
            return Ok(false);
        }
        self.drop_artificials();
        Ok(true)
    }

    fn drop_artificials(&mut self) {
        let width = self.width();
        let mut keep = vec![true; self.m];
        for i in 0..self.m {
            if self.basis[i] < self.art_start {
                continue;
            }
            let row = &self.a[i * width..(i + 1) * width];
            let mut best: Option<(usize, f64)> = None;
            for (j, v) in row[..self.art_start].iter().enumerate() {
                let mag = v.abs();
                if mag > 1e-9 && best.is_none_or(|(_, b)| mag > b) {
                    best = Some((j, mag));
                }
            }
            match best {
                Some((j, _)) => self.pivot(i, j),
                None => keep[i] = false,
            }
        }
        let new_cols = self.art_start;
        let new_width = new_cols + 1;
        let mut a = Vec::with_capacity(self.m * new_width);
        let mut basis = Vec::with_capacity(self.m);
        for i in 0..self.m {
            if !keep[i] {
                continue;
            }
            let row = &self.a[i * width..(i + 1) * width];
            a.extend_from_slice(&row[..new_cols]);
            a.push(row[self.cols].max(0.0));
            basis.push(self.basis[i]);
        }
        self.m = basis.len();
        self.cols = new_cols;
        self.a = a;
        self.basis = basis;
        self.obj = vec![0.0; new_width];
    }

    /// Returns false when the objective is unbounded below.
    fn phase_two(&mut self, cost: &[f64], opts: &SolverOptions) -> Result<bool> {
        debug_assert_eq!(self.art_start, self.cols);
        self.set_costs(cost);
        Ok(matches!(self.iterate(self.cols, opts)?, Outcome::Optimal))
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn boxed(obj: Vec<f64>, sense: Sense, lo: Vec<f64>, hi: Vec<f64>) -> LinearProgram {
        let mut lp = LinearProgram::new(obj, sense);
        lp.var_lower = lo;
        lp.var_upper = hi;
        lp
    }

    #[test]
    fn separable_box_maximum() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0], Sense::Maximize);
        lp.add_le(&[1.0, 0.0], 0.3).unwrap();
        lp.add_le(&[0.0, 1.0], 0.4).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 0.7).abs() < 1e-12);
        assert!((sol.argument[0] - 0.3).abs() < 1e-12);
        assert!((sol.argument[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new(vec![1.0], Sense::Minimize);
        lp.var_lower = vec![-10.0];
        lp.add_ge(&[1.0], 0.0).unwrap();
        lp.add_le(&[1.0], -1.0).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn box_arithmetic_on_first_test_distribution() {
        let lp = boxed(vec![0.5, 0.5], Sense::Maximize, vec![0.2, 0.5], vec![0.8, 0.9]);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 0.85).abs() < 1e-12);
    }

    #[test]
    fn unbounded_when_upper_bound_missing() {
        let lp = LinearProgram::new(vec![1.0, 0.0], Sense::Maximize);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_constraints_and_negative_rhs() {
        // min x + 2y  s.t. x + y = 1, x - y <= -0.2, x,y in [0,1]
        let mut lp = boxed(vec![1.0, 2.0], Sense::Minimize, vec![0.0; 2], vec![1.0; 2]);
        lp.add_eq(&[1.0, 1.0], 1.0).unwrap();
        lp.add_le(&[1.0, -1.0], -0.2).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 1.6).abs() < 1e-12, "{sol:?}");
        assert!(lp.max_violation(&sol.argument) < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_removed() {
        let mut lp = boxed(vec![1.0, -1.0], Sense::Minimize, vec![0.0; 2], vec![1.0; 2]);
        lp.add_eq(&[1.0, 1.0], 1.0).unwrap();
        lp.add_eq(&[2.0, 2.0], 2.0).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_zero_rows() {
        let mut lp = LinearProgram::new(vec![1.0], Sense::Minimize);
        lp.add_le(&[0.0], 0.5).unwrap();
        assert!(solve_lp(&lp).unwrap().is_optimal());
        lp.add_le(&[0.0], -0.5).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn lower_above_upper_is_infeasible() {
        let lp = boxed(vec![1.0], Sense::Minimize, vec![0.5], vec![0.4]);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn dimension_and_finiteness_errors() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0], Sense::Minimize);
        lp.ineq_rhs.push(1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::DimensionMismatch(_))));

        let mut lp = LinearProgram::new(vec![f64::NAN], Sense::Minimize);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidInput(_))));
        lp.objective[0] = 1.0;
        lp.var_lower[0] = f64::NEG_INFINITY;
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn feasibility_oracle() {
        let empty = Matrix::with_cols(2);
        assert!(check_feasible(&empty, &[], &empty, &[], &[0.0, 0.0], &[1.0, 1.0]).unwrap());

        let g = Matrix::from_rows(2, &[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        assert!(!check_feasible(&g, &[0.75, -0.8], &empty, &[], &[0.0, 0.0], &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn klee_minty_three_dimensions() {
        // max 100x1 + 10x2 + x3, the classic worst case for Dantzig pricing.
        let mut lp = LinearProgram::new(vec![100.0, 10.0, 1.0], Sense::Maximize);
        lp.add_le(&[1.0, 0.0, 0.0], 1.0).unwrap();
        lp.add_le(&[20.0, 1.0, 0.0], 100.0).unwrap();
        lp.add_le(&[200.0, 20.0, 1.0], 10_000.0).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 10_000.0).abs() < 1e-9);
    }

    #[test]
    fn cycling_example_terminates() {
        // Beale's example cycles under textbook Dantzig pricing without an
        // anti-cycling rule.
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0], Sense::Minimize);
        lp.add_le(&[0.25, -60.0, -0.04, 9.0], 0.0).unwrap();
        lp.add_le(&[0.5, -90.0, -0.02, 3.0], 0.0).unwrap();
        lp.add_le(&[0.0, 0.0, 1.0, 0.0], 1.0).unwrap();
        let opts = SolverOptions {
            bland_after: 0,
            ..SolverOptions::default()
        };
        let sol = solve_lp_with(&lp, &opts).unwrap();
        assert!((sol.value + 0.05).abs() < 1e-12, "{sol:?}");
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value + 0.05).abs() < 1e-12, "{sol:?}");
    }
}
