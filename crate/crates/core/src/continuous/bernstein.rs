use alloc::format;
use alloc::vec::Vec;

use crate::math::{binomial, powi};
use crate::{Error, Result};

fn check_unit(y: f64) -> Result<()> {
    if (0.0..=1.0).contains(&y) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("evaluation point {y} is outside [0, 1]")))
    }
}

/// Scaled basis `b_m(y) = (M + 1) C(M, m) y^m (1 - y)^(M - m)`, `m = 0..=M`.
///
/// Each `b_m` integrates to one over `[0, 1]`, so simplex weights give densities.
pub fn bernstein_basis(degree: usize, y: f64) -> Result<Vec<f64>> {
    check_unit(y)?;
    Ok(basis_unchecked(degree, y))
}

pub(crate) fn basis_unchecked(degree: usize, y: f64) -> Vec<f64> {
    let k = (degree + 1) as f64;
    (0..=degree)
        .map(|m| k * binomial(degree, m) * powi(y, m) * powi(1.0 - y, degree - m))
        .collect()
}

/// `(B_M f)(y) = (1 / (M + 1)) sum_m f(m / M) b_m(y)` from the grid values
/// `f(0), f(1/M), ..., f(1)`.
pub fn bernstein_approx(f_grid: &[f64], y: f64) -> Result<f64> {
    if f_grid.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need f at M + 1 >= 2 grid points, got {}",
            f_grid.len()
        )));
    }
    let degree = f_grid.len() - 1;
    let b = bernstein_basis(degree, y)?;
    Ok(f_grid.iter().zip(&b).map(|(f, b)| f * b).sum::<f64>() / (degree + 1) as f64)
}

/// `int_0^a b_m(y) dy = P(Binomial(M + 1, a) >= m + 1)`.
pub(crate) fn basis_integral_to(degree: usize, m: usize, a: f64) -> f64 {
    let n = degree + 1;
    (m + 1..=n)
        .map(|i| binomial(n, i) * powi(a, i) * powi(1.0 - a, n - i))
        .sum()
}
