use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::Dataset;
use crate::{Error, Result};

const SUM_TOL: f64 = 1e-9;

/// Finite-support joint law of `(Y, X, Z)`.
///
/// Stored as the instrument marginal `P(Z = z)` and the conditional cells
/// `P(Y = y, X = x | Z = z)`; propensities `pi(x | z)` and the conditional means
/// `E[Y | X = x]` are derived.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDiscreteDist {
    y_support: Vec<f64>,
    x_support: Vec<String>,
    z_support: Vec<String>,
    pz: Vec<f64>,
    /// `pi[z * s_x + x]`
    pi: Vec<f64>,
    /// `cells[(z * s_x + x) * s_y + y]`
    cells: Vec<f64>,
    cond_mean: Vec<f64>,
}

impl JointDiscreteDist {
    /// `cells` is laid out z-major, then x, then y.
    pub fn new(
        y_support: Vec<f64>,
        x_support: Vec<String>,
        z_support: Vec<String>,
        pz: Vec<f64>,
        cells: Vec<f64>,
    ) -> Result<Self> {
        let (sy, sx, sz) = (y_support.len(), x_support.len(), z_support.len());
        if sy == 0 || sx < 2 || sz < 2 {
            return Err(Error::InvalidInput(format!(
                "supports need at least one outcome, two treatments and two instrument values (got {sy}, {sx}, {sz})"
            )));
        }
        if pz.len() != sz || cells.len() != sy * sx * sz {
            return Err(Error::DimensionMismatch(format!(
                "pz has {} entries and cells {} for supports {sy}x{sx}x{sz}",
                pz.len(),
                cells.len()
            )));
        }
        if y_support.iter().any(|y| !y.is_finite()) || y_support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("outcome support must be finite and strictly increasing".into()));
        }
        if pz.iter().any(|p| !(*p > 0.0 && *p < 1.0)) || (pz.iter().sum::<f64>() - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "instrument marginal {pz:?} must lie in (0,1) and sum to one"
            )));
        }
        if cells.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidInput("cell probabilities must be finite and nonnegative".into()));
        }
        let mut pi = vec![0.0; sz * sx];
        for z in 0..sz {
            let block = &cells[z * sx * sy..(z + 1) * sx * sy];
            let total: f64 = block.iter().sum();
            if (total - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidInput(format!(
                    "cells given Z={} sum to {total}, not one",
                    z_support[z]
                )));
            }
            for x in 0..sx {
                let p: f64 = block[x * sy..(x + 1) * sy].iter().sum();
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "propensity P(X={} | Z={}) = {p} lies outside (0,1)",
                        x_support[x], z_support[z]
                    )));
                }
                pi[z * sx + x] = p;
            }
        }
        let mut dist = Self {
            y_support,
            x_support,
            z_support,
            pz,
            pi,
            cells,
            cond_mean: Vec::new(),
        };
        dist.cond_mean = (0..sx)
            .map(|x| {
                let px = dist.p_x(x);
                let num: f64 = (0..sz)
                    .map(|z| {
                        dist.pz[z]
                            * (0..sy).map(|y| dist.y_support[y] * dist.cell(y, x, z)).sum::<f64>()
                    })
                    .sum();
                num / px
            })
            .collect();
        Ok(dist)
    }

    /// Binary `(Y, X, Z)` from `P(Z=1)`, `pi(1|z)`, `P(Y=1,X=1|Z=z)` and
    /// `P(Y=1,X=0|Z=z)`, each indexed by `z = 0, 1`.
    pub fn binary(pz1: f64, pi1: [f64; 2], p_y1_x1: [f64; 2], p_y1_x0: [f64; 2]) -> Result<Self> {
        let mut cells = Vec::with_capacity(8);
        for z in 0..2 {
            let pi0 = 1.0 - pi1[z];
            cells.extend_from_slice(&[pi0 - p_y1_x0[z], p_y1_x0[z]]);
            cells.extend_from_slice(&[pi1[z] - p_y1_x1[z], p_y1_x1[z]]);
        }
        Self::new(
            vec![0.0, 1.0],
            vec!["0".to_string(), "1".to_string()],
            vec!["0".to_string(), "1".to_string()],
            vec![1.0 - pz1, pz1],
            cells,
        )
    }

    pub fn y_support(&self) -> &[f64] {
        &self.y_support
    }

    pub fn x_support(&self) -> &[String] {
        &self.x_support
    }

    pub fn z_support(&self) -> &[String] {
        &self.z_support
    }

    pub fn s_y(&self) -> usize {
        self.y_support.len()
    }

    pub fn s_x(&self) -> usize {
        self.x_support.len()
    }

    pub fn s_z(&self) -> usize {
        self.z_support.len()
    }

    pub fn pz(&self) -> &[f64] {
        &self.pz
    }

    /// `pi(x | z) = P(X = x | Z = z)`.
    pub fn propensity(&self, x: usize, z: usize) -> f64 {
        self.pi[z * self.s_x() + x]
    }

    /// `P(Y = y, X = x | Z = z)` by support index.
    pub fn cell(&self, y: usize, x: usize, z: usize) -> f64 {
        self.cells[(z * self.s_x() + x) * self.s_y() + y]
    }

    pub fn p_x(&self, x: usize) -> f64 {
        (0..self.s_z()).map(|z| self.pz[z] * self.propensity(x, z)).sum()
    }

    /// `E[Y | X = x]`.
    pub fn cond_mean(&self, x: usize) -> f64 {
        self.cond_mean[x]
    }

    /// Binary outcome `{0, 1}`, treatment and instrument.
    pub fn is_binary(&self) -> bool {
        self.y_support == [0.0, 1.0] && self.s_x() == 2 && self.s_z() == 2
    }

    pub fn x_index(&self, label: &str) -> Option<usize> {
        self.x_support.iter().position(|l| l == label)
    }
}

/// Plug-in (weighted) cell frequencies within each instrument stratum.
pub fn estimate_discrete(
    data: &Dataset,
    y_support: &[f64],
    x_support: &[String],
    z_support: &[String],
) -> Result<JointDiscreteDist> {
    let (sy, sx, sz) = (y_support.len(), x_support.len(), z_support.len());
    let mut mass = vec![0.0; sy * sx * sz];
    let mut offending = Vec::new();
    for (i, r) in data.rows().iter().enumerate() {
        let y = y_support.iter().position(|v| *v == r.y);
        let x = x_support.iter().position(|v| *v == r.x);
        let z = z_support.iter().position(|v| *v == r.z);
        match (y, x, z) {
            (Some(y), Some(x), Some(z)) => mass[(z * sx + x) * sy + y] += r.weight,
            _ => offending.push(i),
        }
    }
    if !offending.is_empty() {
        let shown: Vec<String> = offending.iter().take(10).map(|i| i.to_string()).collect();
        return Err(Error::InvalidInput(format!(
            "{} row(s) outside the declared supports, e.g. rows {}",
            offending.len(),
            shown.join(", ")
        )));
    }
    let mut pz = vec![0.0; sz];
    for z in 0..sz {
        let block = &mut mass[z * sx * sy..(z + 1) * sx * sy];
        let total: f64 = block.iter().sum();
        if total <= 0.0 {
            return Err(Error::Estimation(format!("instrument stratum Z={} is empty", z_support[z])));
        }
        block.iter_mut().for_each(|c| *c /= total);
        pz[z] = total;
    }
    let grand: f64 = pz.iter().sum();
    pz.iter_mut().for_each(|p| *p /= grand);
    JointDiscreteDist::new(y_support.to_vec(), x_support.to_vec(), z_support.to_vec(), pz, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Observation;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn degenerate_propensity_is_rejected() {
        let data = Dataset::new(vec![
            Observation::new(1.0, "1", "1"),
            Observation::new(0.0, "1", "1"),
            Observation::new(1.0, "0", "0"),
            Observation::new(0.0, "0", "0"),
        ])
        .unwrap();
        let err = estimate_discrete(&data, &[0.0, 1.0], &labels(&["0", "1"]), &labels(&["0", "1"]))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(ref m) if m.contains("outside (0,1)")), "{err}");
    }

    #[test]
    fn uniform_cells() {
        let mut rows = Vec::new();
        for z in ["0", "1"] {
            for x in ["0", "1"] {
                for y in [0.0, 1.0] {
                    rows.push(Observation::new(y, x, z));
                }
            }
        }
        let data = Dataset::new(rows).unwrap();
        let d = estimate_discrete(&data, &[0.0, 1.0], &labels(&["0", "1"]), &labels(&["0", "1"])).unwrap();
        assert_eq!(d.pz(), &[0.5, 0.5]);
        for z in 0..2 {
            for x in 0..2 {
                assert_eq!(d.propensity(x, z), 0.5);
                for y in 0..2 {
                    assert_eq!(d.cell(y, x, z), 0.25);
                }
            }
        }
    }

    #[test]
    fn support_violation_lists_rows() {
        let data = Dataset::new(vec![Observation::new(2.0, "0", "0"), Observation::new(0.0, "7", "0")]).unwrap();
        let err = estimate_discrete(&data, &[0.0, 1.0], &labels(&["0", "1"]), &labels(&["0", "1"]))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(ref m) if m.contains("rows 0, 1")), "{err}");
    }

    #[test]
    fn empty_stratum_is_named() {
        let data = Dataset::new(vec![Observation::new(0.0, "0", "0"), Observation::new(1.0, "1", "0")]).unwrap();
        let err = estimate_discrete(&data, &[0.0, 1.0], &labels(&["0", "1"]), &labels(&["0", "1"]))
            .unwrap_err();
        assert!(matches!(err, Error::Estimation(ref m) if m.contains("Z=1")), "{err}");
    }

    #[test]
    fn binary_constructor_and_derived_quantities() {
        let d = JointDiscreteDist::binary(0.5, [0.4, 0.6], [0.2, 0.5], [0.3, 0.1]).unwrap();
        assert!(d.is_binary());
        assert!((d.propensity(1, 0) - 0.4).abs() < 1e-15);
        assert!((d.cell(1, 1, 1) - 0.5).abs() < 1e-15);
        assert!((d.p_x(1) - 0.5).abs() < 1e-15);
        // E[Y | X=1] = (0.5*0.2 + 0.5*0.5) / 0.5
        assert!((d.cond_mean(1) - 0.7).abs() < 1e-12);
        assert!((d.cond_mean(0) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn cells_must_sum_to_one() {
        let r = JointDiscreteDist::new(
            vec![0.0, 1.0],
            labels(&["0", "1"]),
            labels(&["0", "1"]),
            vec![0.5, 0.5],
            vec![0.25, 0.25, 0.25, 0.3, 0.25, 0.25, 0.25, 0.25],
        );
        assert!(r.is_err());
    }
}
