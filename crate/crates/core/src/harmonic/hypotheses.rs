//! Numerical probes of the majorant hypotheses: Hua-type `L^2` control,
//! Fourier decay towards `1_[N]`, and minor-arc smallness.

use super::approx::{rational_approx, rational_approx_within};
use super::expsum::interval_transform;
use super::majorant::{build_majorant, Majorant};
use crate::arith::{e_ratio, gcd_u64, isqrt_u64, pairwise_sum_by};
use crate::counting::{count_convolution, fit_power_law, CountQuery, PowerFit, Term, WeightedSet};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The four composite weights whose `L^2/L^1` ratio the Hua hypothesis controls.
///
/// `I = [eta (N/W2)^(1/2), (N/W2)^(1/2)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HuaMajorant {
    /// `sum_{b1 x + b2 y = n} nu(x) nu(y)`
    NuNu,
    /// `sum_{b1 x + b2 W2 y^2 = n} nu(x) 1_I(y)`
    NuSquare,
    /// `sum_{b1 x + b2 y = n} nu(x) 1_I(y)`
    NuInterval,
    /// `sum_{b1 W2 x^2 + b2 y = n} 1_I(x) 1_I(y)`
    SquareInterval,
}

impl HuaMajorant {
    pub const ALL: [HuaMajorant; 4] = [
        HuaMajorant::NuNu,
        HuaMajorant::NuSquare,
        HuaMajorant::NuInterval,
        HuaMajorant::SquareInterval,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuaParams {
    pub w1: u64,
    pub xi: u64,
    pub w2: u64,
    /// Lower end of `I` relative to `(N/W2)^(1/2)`, in `(0, 1]`.
    pub eta: f64,
    pub b1: i64,
    pub b2: i64,
}

impl Default for HuaParams {
    fn default() -> Self {
        HuaParams {
            w1: 2,
            xi: 1,
            w2: 1,
            eta: 0.5,
            b1: 1,
            b2: 1,
        }
    }
}

/// `||mu||_1` and `||mu||_2^2` of one composite weight at one `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuaNorms {
    pub n: u64,
    pub l1: u128,
    pub l2_squared: u128,
}

impl HuaNorms {
    /// `||mu||_2 / ||mu||_1`.
    pub fn ratio(&self) -> f64 {
        (self.l2_squared as f64).sqrt() / self.l1 as f64
    }
}

fn interval_i(n: u64, params: &HuaParams) -> Result<WeightedSet> {
    let top = isqrt_u64(n / params.w2);
    let bottom = ((params.eta * top as f64).ceil() as u64).max(1);
    WeightedSet::interval(bottom, top)
}

/// Exact norms of one composite weight. The `L^2` norm squared is the
/// weighted count of `b1 u1 + b2 v1 = b1 u2 + b2 v2`.
pub fn hua_norms(kind: HuaMajorant, params: &HuaParams, n: u64) -> Result<HuaNorms> {
    if params.b1 <= 0 || params.b2 <= 0 || params.w2 == 0 || !(params.eta > 0.0 && params.eta <= 1.0) {
        return Err(Error::precondition("b1, b2, W2 must be positive and eta in (0, 1]"));
    }
    let nu = build_majorant(n, params.w1, params.xi)?.weighted_set();
    let i = interval_i(n, params)?;
    let (b1, b2, w2) = (params.b1, params.b2, params.w2);
    let (first, second) = match kind {
        HuaMajorant::NuNu => (Term::linear(b1, nu.clone())?, Term::linear(b2, nu)?),
        HuaMajorant::NuSquare => (Term::linear(b1, nu)?, Term::square(b2, i)?.with_scale(w2)?),
        HuaMajorant::NuInterval => (Term::linear(b1, nu)?, Term::linear(b2, i)?),
        HuaMajorant::SquareInterval => (Term::square(b1, i.clone())?.with_scale(w2)?, Term::linear(b2, i)?),
    };
    let l1 = first
        .support()
        .total_weight()
        .checked_mul(second.support().total_weight())
        .ok_or(Error::Overflow("composite l1 norm"))?;
    let side = vec![first, second];
    let l2_squared = count_convolution(&CountQuery::new(side.clone(), side)?)?;
    Ok(HuaNorms { n, l1, l2_squared })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuaReport {
    pub kind: HuaMajorant,
    pub rows: Vec<HuaNorms>,
    /// Log-log fit of `||mu||_2/||mu||_1` against `N`.
    pub fit: PowerFit,
}

pub fn hua_check(kind: HuaMajorant, params: &HuaParams, n_grid: &[u64]) -> Result<HuaReport> {
    let rows = n_grid
        .iter()
        .map(|&n| hua_norms(kind, params, n))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.ratio())).collect();
    Ok(HuaReport {
        kind,
        fit: fit_power_law(&points)?,
        rows,
    })
}

/// Log-log fit of `||nu||_2/||nu||_1` for the plain majorant.
pub fn majorant_norm_fit(w: u64, xi: u64, n_grid: &[u64]) -> Result<PowerFit> {
    let points = n_grid
        .iter()
        .map(|&n| {
            let nu = build_majorant(n, w, xi)?;
            Ok((n as f64, (nu.l2_squared() as f64).sqrt() / nu.l1() as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_power_law(&points)
}

/// `2 prod_{p <= w} p`.
pub fn primorial_modulus(w: u64) -> u64 {
    (2..=w)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .fold(2, |acc, p| acc * p)
}

/// Torus points `k/M` for `k < M` together with every Farey fraction
/// `a/q`, `q <= q_max`, as `(numerator, denominator)` pairs.
pub fn decay_grid(q_max: u64, m: u64) -> Vec<(i128, u64)> {
    let mut pts: Vec<(i128, u64)> = (0..m as i128).map(|k| (k, m)).collect();
    for q in 2..=q_max {
        pts.extend((1..q).filter(|&a| gcd_u64(a, q) == 1).map(|a| (a as i128, q)));
    }
    pts
}

/// `max |nu^(alpha) - 1_[N]^(alpha)| / N` over the given rational points.
pub fn fourier_decay_sup(nu: &Majorant, points: &[(i128, u64)]) -> f64 {
    let support = nu.support();
    let n = nu.n();
    points
        .iter()
        .map(|&(k, m)| {
            let mi = m as i128;
            let k = k.rem_euclid(mi);
            let val = pairwise_sum_by(support.len(), &|j| {
                let (pos, w) = support[j];
                e_ratio(k * (pos as i128 % mi) % mi, m) * w as f64
            });
            let alpha = k as f64 / m as f64;
            (val - interval_transform(n, alpha)).norm() / n as f64
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorArcSample {
    pub alphas: Vec<f64>,
    /// `|nu^(alpha)| / ||nu||_1` per sample.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// `count` seeded `alpha` on the minor arcs: no `q <= q_cap` with
/// `||q alpha|| <= q_cap/N`.
pub fn minor_arc_sample(nu: &Majorant, count: usize, q_cap: u64, seed: u64) -> Result<MinorArcSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = q_cap as f64 / nu.n() as f64;
    let f = nu.exp_sum();
    let l1 = nu.l1() as f64;
    let mut alphas = Vec::with_capacity(count);
    let mut ratios = Vec::with_capacity(count);
    while alphas.len() < count {
        let alpha: f64 = rng.random_range(0.0..1.0);
        if rational_approx_within(alpha, q_cap, tol)?.is_some() {
            continue;
        }
        ratios.push(f.eval(alpha).norm() / l1);
        alphas.push(alpha);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(MinorArcSample {
        alphas,
        ratios,
        max_ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylRow {
    pub alpha: f64,
    /// `|nu^(alpha)| / ||nu||_1`.
    pub ratio: f64,
    pub a: u64,
    pub q: u64,
    /// `N ||q alpha||_T`.
    pub scaled_distance: f64,
}

/// For every `alpha` where `|nu^(alpha)| >= delta ||nu||_1`, the best
/// approximation with `q <= q_cap`, to set against `delta^(-O(1))`.
pub fn weyl_report(nu: &Majorant, alphas: &[f64], delta: f64, q_cap: u64) -> Result<Vec<WeylRow>> {
    let f = nu.exp_sum();
    let l1 = nu.l1() as f64;
    let mut rows = Vec::new();
    for &alpha in alphas {
        let ratio = f.eval(alpha).norm() / l1;
        if ratio < delta {
            continue;
        }
        let r = rational_approx(alpha, q_cap)?;
        rows.push(WeylRow {
            alpha,
            ratio,
            a: r.a,
            q: r.q,
            scaled_distance: nu.n() as f64 * r.q as f64 * r.err,
        });
    }
    Ok(rows)
}

/// `|nu^(a/q)|/||nu||_1` at an exact rational point.
pub fn ratio_at(nu: &Majorant, a: i128, q: u64) -> f64 {
    let f = nu.exp_sum();
    let z: Complex64 = f.eval_ratio(a, q);
    z.norm() / nu.l1() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primorials() {
        assert_eq!(primorial_modulus(3), 12);
        assert_eq!(primorial_modulus(5), 60);
        assert_eq!(primorial_modulus(7), 420);
        assert_eq!(primorial_modulus(11), 4620);
    }

    #[test]
    fn nu_nu_norms_match_direct_sum() {
        let params = HuaParams::default();
        let n = 300;
        let nu = build_majorant(n, 2, 1).unwrap();
        let mut conv = vec![0u128; 2 * n as usize + 1];
        for &(x, wx) in nu.support() {
            for &(y, wy) in nu.support() {
                conv[(x + y) as usize] += wx as u128 * wy as u128;
            }
        }
        let norms = hua_norms(HuaMajorant::NuNu, &params, n).unwrap();
        assert_eq!(norms.l1, conv.iter().sum::<u128>());
        assert_eq!(norms.l2_squared, conv.iter().map(|c| c * c).sum::<u128>());
    }

    #[test]
    fn square_interval_norms_match_direct_sum() {
        let params = HuaParams {
            w2: 3,
            b1: 2,
            ..HuaParams::default()
        };
        let n = 2000;
        let i = interval_i(n, &params).unwrap();
        let mut conv = std::collections::BTreeMap::<u64, u128>::new();
        for x in i.elements() {
            for y in i.elements() {
                *conv.entry(2 * 3 * x * x + y).or_default() += 1;
            }
        }
        let norms = hua_norms(HuaMajorant::SquareInterval, &params, n).unwrap();
        assert_eq!(norms.l1, conv.values().sum::<u128>());
        assert_eq!(norms.l2_squared, conv.values().map(|c| c * c).sum::<u128>());
    }

    #[test]
    fn decay_at_zero_is_small() {
        let nu = build_majorant(1 << 16, 12, 5).unwrap();
        let gap = fourier_decay_sup(&nu, &[(0, 1)]);
        assert!(gap < 0.05, "{gap}");
    }

    #[test]
    fn minor_arc_sample_is_seeded() {
        let nu = build_majorant(1 << 12, 2, 1).unwrap();
        let a = minor_arc_sample(&nu, 10, 20, 3).unwrap();
        let b = minor_arc_sample(&nu, 10, 20, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.alphas.len(), 10);
    }

    #[test]
    fn weyl_report_flags_major_arcs() {
        let nu = build_majorant(1 << 14, 2, 1).unwrap();
        let rows = weyl_report(&nu, &[0.0, 1.0 / 3.0, 0.123456789], 0.3, 20).unwrap();
        assert!(rows.iter().any(|r| r.q == 1));
        assert!(rows.iter().all(|r| r.ratio >= 0.3));
    }
}
