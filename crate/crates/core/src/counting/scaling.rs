use super::count_monochromatic;
use crate::arith::split_seed;
use crate::colourings::{congruence_colouring, extremal_colouring, random_colouring, Colouring};
use crate::equations::DiagonalEquation;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(x, y)` pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
    /// `ln y - (intercept + slope ln x)` per fitted point.
    pub residuals: Vec<f64>,
    /// `x` values dropped because `y` was zero.
    pub excluded: Vec<f64>,
}

impl PowerFit {
    /// `exp(intercept)`, the fitted constant in `y ~ C x^slope`.
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Fit `y ~ C x^slope`. Points with `y = 0` are excluded; at least three
/// must remain.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y >= 0.0)) {
        return Err(Error::Fit("x must be positive and y nonnegative".into()));
    }
    let (used, zero): (Vec<_>, Vec<_>) = points.iter().partition(|&&(_, y)| y > 0.0);
    if used.len() < 3 {
        return Err(Error::Fit(format!("{} nonzero points, at least 3 needed", used.len())));
    }
    let xs: Vec<f64> = used.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|&(_, y)| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all x values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok(PowerFit {
        slope,
        intercept,
        points: used,
        residuals,
        excluded: zero.into_iter().map(|(x, _)| x).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColouringFamily {
    Extremal,
    /// `1 + (x mod r)`.
    Congruence,
    /// Each grid point gets its own stream derived from `seed` and `N`.
    Random {
        seed: u64,
    },
}

impl ColouringFamily {
    pub fn build(&self, n: u64, r: u32) -> Result<Colouring> {
        match *self {
            ColouringFamily::Extremal => extremal_colouring(n, r),
            ColouringFamily::Congruence => congruence_colouring(n, r),
            ColouringFamily::Random { seed } => random_colouring(n, r, split_seed(seed, n)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: u64,
    pub r: u32,
    pub per_colour: Vec<u128>,
    pub max_count: u128,
    /// 1-based colour attaining `max_count`, lowest on ties.
    pub argmax: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    /// Slope of log(max count) against log N.
    pub fit: PowerFit,
}

/// Max-colour monochromatic counts over an `N` grid and their log-log slope.
pub fn scaling_experiment(
    eq: &DiagonalEquation,
    family: ColouringFamily,
    r: u32,
    n_grid: &[u64],
) -> Result<ScalingResult> {
    if n_grid.len() < 4 {
        return Err(Error::precondition("the N grid needs at least 4 points"));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("the N grid must be strictly increasing"));
    }
    let rows = n_grid
        .iter()
        .map(|&n| scaling_row(eq, family, r, n))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.max_count as f64)).collect();
    let fit = fit_power_law(&points)?;
    Ok(ScalingResult { rows, fit })
}

/// One grid point of [`scaling_experiment`].
pub fn scaling_row(eq: &DiagonalEquation, family: ColouringFamily, r: u32, n: u64) -> Result<ScalingRow> {
    let c = family.build(n, r)?;
    let counts = count_monochromatic(eq, &c)?;
    Ok(ScalingRow {
        n,
        r,
        per_colour: counts.per_colour,
        max_count: counts.max,
        argmax: counts.argmax,
    })
}
