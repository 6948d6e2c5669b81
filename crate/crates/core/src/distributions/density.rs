use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{AffineMap, Dataset};
use crate::math::{exp, sqrt};
use crate::{Error, Matrix, Result};

/// Smallest `(x, z)` stratum accepted by [`estimate_cond_density`].
pub const DEFAULT_MIN_STRATUM: usize = 30;

const MASS_LOW: f64 = 0.9;
const MASS_HIGH: f64 = 1.1;

/// Conditional outcome densities `f(m / M | x, z)` on the Bernstein grid for an
/// outcome already mapped onto `[0, 1]`, together with the instrument marginal
/// and the propensities.
///
/// Each row of each `xi` matrix is rescaled on construction so that
/// `sum_m xi[j, m] / (M + 1) = 1`; the scaled rows `xi / (M + 1)` are then
/// simplex weights of a Bernstein density.
#[derive(Debug, Clone, PartialEq)]
pub struct CondDensityTable {
    x_support: Vec<String>,
    z_support: Vec<String>,
    pz: Vec<f64>,
    /// `pi[z * s_x + x]`
    pi: Vec<f64>,
    xi: Vec<Matrix>,
    affine: AffineMap,
}

impl CondDensityTable {
    /// `pi` is laid out z-major; `xi[x]` is `s_z x (M + 1)`.
    pub fn new(
        x_support: Vec<String>,
        z_support: Vec<String>,
        pz: Vec<f64>,
        pi: Vec<f64>,
        mut xi: Vec<Matrix>,
        affine: AffineMap,
    ) -> Result<Self> {
        let (sx, sz) = (x_support.len(), z_support.len());
        if sx < 2 || sz < 2 {
            return Err(Error::InvalidInput("need at least two treatment and two instrument values".into()));
        }
        if pz.len() != sz || pi.len() != sz * sx || xi.len() != sx {
            return Err(Error::DimensionMismatch(format!(
                "pz {} / pi {} / xi {} entries for {sx} treatments and {sz} instrument values",
                pz.len(),
                pi.len(),
                xi.len()
            )));
        }
        if pz.iter().any(|p| !(*p > 0.0 && *p < 1.0)) || (pz.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("instrument marginal {pz:?} is not an interior pmf")));
        }
        for z in 0..sz {
            let row = &pi[z * sx..(z + 1) * sx];
            if row.iter().any(|p| !(*p > 0.0 && *p < 1.0)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "propensities given Z={} ({row:?}) must lie in (0,1) and sum to one",
                    z_support[z]
                )));
            }
        }
        if !(scale_ok(affine.scale) && affine.shift.is_finite()) {
            return Err(Error::InvalidInput("affine map must have finite shift and positive scale".into()));
        }
        let cols = xi[0].cols();
        if cols < 2 {
            return Err(Error::InvalidInput("Bernstein degree must be at least one".into()));
        }
        for (x, m) in xi.iter_mut().enumerate() {
            if m.rows() != sz || m.cols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "xi for X={} is {}x{}, expected {sz}x{cols}",
                    x_support[x],
                    m.rows(),
                    m.cols()
                )));
            }
            for j in 0..sz {
                let row = m.row_mut(j);
                if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "density values for X={}, Z={} must be finite and nonnegative",
                        x_support[x], z_support[j]
                    )));
                }
                let mass = row.iter().sum::<f64>() / cols as f64;
                if !(MASS_LOW..=MASS_HIGH).contains(&mass) {
                    return Err(Error::Estimation(format!(
                        "density for X={}, Z={} has Bernstein mass {mass}, outside [{MASS_LOW}, {MASS_HIGH}]",
                        x_support[x], z_support[j]
                    )));
                }
                row.iter_mut().for_each(|v| *v /= mass);
            }
        }
        Ok(Self {
            x_support,
            z_support,
            pz,
            pi,
            xi,
            affine,
        })
    }

    /// Builds the table from Bernstein simplex weights, i.e. `xi = (M + 1) w`.
    pub fn from_weights(
        x_support: Vec<String>,
        z_support: Vec<String>,
        pz: Vec<f64>,
        pi: Vec<f64>,
        weights: Vec<Matrix>,
        affine: AffineMap,
    ) -> Result<Self> {
        let xi = weights
            .into_iter()
            .map(|w| {
                let k = w.cols() as f64;
                let data = w.as_slice().iter().map(|v| v * k).collect();
                Matrix::from_vec(w.rows(), w.cols(), data)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(x_support, z_support, pz, pi, xi, affine)
    }

    pub fn degree(&self) -> usize {
        self.xi[0].cols() - 1
    }

    pub fn s_x(&self) -> usize {
        self.x_support.len()
    }

    pub fn s_z(&self) -> usize {
        self.z_support.len()
    }

    pub fn x_support(&self) -> &[String] {
        &self.x_support
    }

    pub fn z_support(&self) -> &[String] {
        &self.z_support
    }

    pub fn pz(&self) -> &[f64] {
        &self.pz
    }

    pub fn propensity(&self, x: usize, z: usize) -> f64 {
        self.pi[z * self.s_x() + x]
    }

    /// Density values at `m / M`, one row per instrument value.
    pub fn xi(&self, x: usize) -> &Matrix {
        &self.xi[x]
    }

    /// `xi[x] / (M + 1)`: rows are simplex weights on the scaled basis.
    pub fn bernstein_weights(&self, x: usize) -> Matrix {
        let k = (self.degree() + 1) as f64;
        let m = &self.xi[x];
        let data = m.as_slice().iter().map(|v| v / k).collect();
        Matrix::from_vec(m.rows(), m.cols(), data).expect("same shape")
    }

    pub fn affine(&self) -> AffineMap {
        self.affine
    }
}

fn scale_ok(s: f64) -> bool {
    s.is_finite() && s > 0.0
}

fn gaussian(u: f64) -> f64 {
    exp(-0.5 * u * u) / sqrt(2.0 * PI)
}

/// Gaussian kernel density on `[0, 1]` with reflection at both boundaries.
pub fn reflected_kde(samples: &[f64], weights: &[f64], bandwidth: f64, y: f64) -> f64 {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for (s, w) in samples.iter().zip(weights) {
        let k = gaussian((y - s) / bandwidth)
            + gaussian((y + s) / bandwidth)
            + gaussian((y - (2.0 - s)) / bandwidth);
        acc += w * k;
    }
    acc / (total * bandwidth)
}

/// Silverman's rule `0.9 min(sd, IQR / 1.34) n^(-1/5)` with Kish's effective
/// sample size for weighted data. Falls back to `sd` when the IQR is zero.
pub fn silverman_bandwidth(samples: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    if samples.is_empty() || total <= 0.0 {
        return f64::NAN;
    }
    let n_eff = total * total / sum_sq;
    let mean = samples.iter().zip(weights).map(|(s, w)| s * w).sum::<f64>() / total;
    let var = samples
        .iter()
        .zip(weights)
        .map(|(s, w)| w * (s - mean) * (s - mean))
        .sum::<f64>()
        / total;
    let sd = sqrt(var * n_eff / (n_eff - 1.0).max(1.0));

    let mut pairs: Vec<(f64, f64)> = samples.iter().copied().zip(weights.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let quantile = |q: f64| {
        let mut acc = 0.0;
        for (s, w) in &pairs {
            acc += w;
            if acc >= q * total {
                return *s;
            }
        }
        pairs[pairs.len() - 1].0
    };
    let iqr = quantile(0.75) - quantile(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * libm::pow(n_eff, -0.2)
}

/// Reflection-corrected KDE of `Y | X = x, Z = z` at the grid `m / degree`,
/// row-normalised to unit Bernstein mass. Outcomes must already be on `[0, 1]`
/// (see [`super::rescale_outcome`]); `affine` records that map.
pub fn estimate_cond_density(
    data: &Dataset,
    affine: AffineMap,
    degree: usize,
    min_stratum: usize,
) -> Result<CondDensityTable> {
    if degree == 0 {
        return Err(Error::InvalidParameter("Bernstein degree must be at least one".into()));
    }
    if data.outcomes().any(|y| !(0.0..=1.0).contains(&y)) {
        return Err(Error::InvalidInput("outcomes must be rescaled onto [0, 1] first".into()));
    }
    let xs = data.x_support();
    let zs = data.z_support();
    let (sx, sz) = (xs.len(), zs.len());
    let mut samples: Vec<Vec<(f64, f64)>> = vec![Vec::new(); sx * sz];
    for r in data.rows() {
        let x = xs.iter().position(|l| *l == r.x).expect("label from data");
        let z = zs.iter().position(|l| *l == r.z).expect("label from data");
        samples[z * sx + x].push((r.y, r.weight));
    }
    let mut z_mass = vec![0.0; sz];
    let mut pi = vec![0.0; sz * sx];
    for z in 0..sz {
        for x in 0..sx {
            pi[z * sx + x] = samples[z * sx + x].iter().map(|p| p.1).sum();
        }
        z_mass[z] = pi[z * sx..(z + 1) * sx].iter().sum();
        if z_mass[z] <= 0.0 {
            return Err(Error::Estimation(format!("instrument stratum Z={} has no weight", zs[z])));
        }
        for x in 0..sx {
            pi[z * sx + x] /= z_mass[z];
        }
    }
    let total: f64 = z_mass.iter().sum();
    let pz: Vec<f64> = z_mass.iter().map(|m| m / total).collect();

    let mut xi = Vec::with_capacity(sx);
    for x in 0..sx {
        let mut m = Matrix::zeros(sz, degree + 1);
        for z in 0..sz {
            let stratum = &samples[z * sx + x];
            if stratum.len() < min_stratum {
                return Err(Error::Estimation(format!(
                    "stratum X={}, Z={} has {} rows, fewer than {min_stratum}",
                    xs[x],
                    zs[z],
                    stratum.len()
                )));
            }
            let (ys, ws): (Vec<f64>, Vec<f64>) = stratum.iter().copied().unzip();
            let h = silverman_bandwidth(&ys, &ws);
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Estimation(format!(
                    "bandwidth {h} for stratum X={}, Z={} is not positive and finite",
                    xs[x], zs[z]
                )));
            }
            let row = m.row_mut(z);
            for (k, v) in row.iter_mut().enumerate() {
                *v = reflected_kde(&ys, &ws, h, k as f64 / degree as f64);
            }
            let mass = row.iter().sum::<f64>() / (degree + 1) as f64;
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::Estimation(format!(
                    "density for X={}, Z={} vanishes on the grid",
                    xs[x], zs[z]
                )));
            }
            row.iter_mut().for_each(|v| *v /= mass);
        }
        xi.push(m);
    }
    CondDensityTable::new(xs, zs, pz, pi, xi, affine)
}
