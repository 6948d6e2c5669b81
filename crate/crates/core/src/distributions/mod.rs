//! Observed distributions consumed by the bound computations.
//!
//! [`JointDiscreteDist`] is the finite-support law of `(Y, X, Z)` used by the
//! discrete programs; [`CondDensityTable`] holds the conditional outcome
//! densities on the Bernstein grid used by the continuous programs. Both can be
//! built directly or estimated from a [`Dataset`].

mod density;
mod joint;
mod transform;

pub use density::{
    estimate_cond_density, reflected_kde, silverman_bandwidth, CondDensityTable,
    DEFAULT_MIN_STRATUM,
};
pub use joint::{estimate_discrete, JointDiscreteDist};
pub use transform::{discretize_outcome, empirical_quantile, rescale_outcome, AffineMap};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub y: f64,
    pub x: String,
    pub z: String,
    pub weight: f64,
}

impl Observation {
    pub fn new(y: f64, x: impl Into<String>, z: impl Into<String>) -> Self {
        Self {
            y,
            x: x.into(),
            z: z.into(),
            weight: 1.0,
        }
    }

    pub fn weighted(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// Microdata rows `(y, x, z[, w])`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    rows: Vec<Observation>,
}

impl Dataset {
    pub fn new(rows: Vec<Observation>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if !r.y.is_finite() {
                return Err(Error::InvalidInput(format!("row {i}: outcome is not finite")));
            }
            if !r.weight.is_finite() || r.weight < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "row {i}: weight {} is negative or not finite",
                    r.weight
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.y)
    }

    /// Same rows with every outcome passed through `f`.
    pub fn map_outcomes(&self, f: impl Fn(f64) -> f64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| Observation {
                y: f(r.y),
                ..r.clone()
            })
            .collect();
        Self { rows }
    }

    /// Sorted distinct outcome values.
    pub fn y_support(&self) -> Vec<f64> {
        let mut ys: Vec<f64> = self.outcomes().collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        ys
    }

    pub fn x_support(&self) -> Vec<String> {
        sorted_labels(self.rows.iter().map(|r| r.x.as_str()))
    }

    pub fn z_support(&self) -> Vec<String> {
        sorted_labels(self.rows.iter().map(|r| r.z.as_str()))
    }
}

/// Distinct labels, numerically ordered when every label parses as a number.
fn sorted_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in labels {
        if !out.iter().any(|o| o == l) {
            out.push(l.into());
        }
    }
    let numeric: Option<Vec<f64>> = out.iter().map(|l| l.trim().parse::<f64>().ok()).collect();
    match numeric {
        Some(_) => out.sort_by(|a, b| {
            let (a, b) = (a.trim().parse::<f64>().unwrap(), b.trim().parse::<f64>().unwrap());
            a.total_cmp(&b)
        }),
        None => out.sort(),
    }
    out
}
