use crate::arith::{e, e_ratio, pairwise_sum, pairwise_sum_by};
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// A finite exponential sum `F(alpha) = sum_j w_j e(alpha n_j)`.
///
/// Quadratic transforms `sum_x f(x) e(alpha x^2)` are the same object with
/// frequencies `x^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSum {
    /// `(frequency, weight)`, frequencies strictly increasing.
    terms: Vec<(i128, f64)>,
}

impl ExpSum {
    /// Weights at repeated frequencies add up.
    pub fn new(terms: impl IntoIterator<Item = (i128, f64)>) -> Self {
        let mut v: Vec<(i128, f64)> = terms.into_iter().collect();
        v.sort_by_key(|&(n, _)| n);
        let mut merged: Vec<(i128, f64)> = Vec::with_capacity(v.len());
        for (n, w) in v {
            match merged.last_mut() {
                Some((m, acc)) if *m == n => *acc += w,
                _ => merged.push((n, w)),
            }
        }
        ExpSum { terms: merged }
    }

    /// `sum_x f(x) e(alpha x)`.
    pub fn linear(f: impl IntoIterator<Item = (i64, f64)>) -> Self {
        Self::new(f.into_iter().map(|(x, w)| (x as i128, w)))
    }

    /// `sum_x f(x) e(alpha scale x^2)`.
    pub fn quadratic(f: impl IntoIterator<Item = (i64, f64)>, scale: u64) -> Self {
        Self::new(f.into_iter().map(|(x, w)| (scale as i128 * x as i128 * x as i128, w)))
    }

    /// `1_[lo, hi]` with linear phases.
    pub fn indicator(lo: i64, hi: i64) -> Self {
        Self::linear((lo..=hi).map(|x| (x, 1.0)))
    }

    pub fn terms(&self) -> &[(i128, f64)] {
        &self.terms
    }

    /// `sum |w_j|`, the trivial bound on `|F|`.
    pub fn l1(&self) -> f64 {
        pairwise_sum(&self.terms.iter().map(|&(_, w)| w.abs()).collect::<Vec<_>>())
    }

    /// `sum |w_j|^2`, which is `int |F|^2` by Parseval.
    pub fn l2_squared(&self) -> f64 {
        pairwise_sum(&self.terms.iter().map(|&(_, w)| w * w).collect::<Vec<_>>())
    }

    /// Largest `|n_j|`.
    pub fn max_frequency(&self) -> u128 {
        self.terms.iter().map(|&(n, _)| n.unsigned_abs()).max().unwrap_or(0)
    }

    /// `F(alpha)` for real `alpha`.
    pub fn eval(&self, alpha: f64) -> Complex64 {
        let t = &self.terms;
        pairwise_sum_by(t.len(), &|j| {
            // reduce alpha * n mod 1 before the trig call
            let (n, w) = t[j];
            let prod = alpha * n as f64;
            e(prod - prod.floor()) * w
        })
    }

    /// `F(k/m)` with every phase reduced exactly modulo `m`.
    pub fn eval_ratio(&self, k: i128, m: u64) -> Complex64 {
        let mi = m as i128;
        let k = k.rem_euclid(mi);
        let t = &self.terms;
        pairwise_sum_by(t.len(), &|j| {
            let (n, w) = t[j];
            e_ratio(k * n.rem_euclid(mi) % mi, m) * w
        })
    }

    /// Values at `alpha = k/m`, one term at a time (cost `len * m`).
    pub fn grid_direct(&self, m: usize) -> Result<ExpSumGrid> {
        if m == 0 {
            return Err(Error::precondition("grid size must be positive"));
        }
        let values = (0..m).map(|k| self.eval_ratio(k as i128, m as u64)).collect();
        ExpSumGrid::new(values, self.l1(), self.max_frequency())
    }

    /// Values at `alpha = k/m` by folding frequencies modulo `m` and one
    /// inverse FFT. Requires `m` to be a power of two.
    pub fn grid_fft(&self, m: usize) -> Result<ExpSumGrid> {
        if !m.is_power_of_two() {
            return Err(Error::precondition(format!("FFT grid size {m} is not a power of two")));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for &(n, w) in &self.terms {
            buf[n.rem_euclid(m as i128) as usize] += w;
        }
        // the inverse transform computes sum_r x_r e(kr/m), unnormalised
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        ExpSumGrid::new(buf, self.l1(), self.max_frequency())
    }

    /// Direct evaluation for sparse sums, FFT when `m` is a power of two and
    /// the sum has enough terms to make it cheaper.
    pub fn grid(&self, m: usize) -> Result<ExpSumGrid> {
        let log_m = m.max(2).ilog2() as usize;
        if m.is_power_of_two() && self.terms.len() > 4 * log_m {
            self.grid_fft(m)
        } else {
            self.grid_direct(m)
        }
    }
}

/// Samples of an exponential sum at `alpha = k/M`, `k = 0..M`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSumGrid {
    values: Vec<Complex64>,
    /// `sum |w_j|` of the underlying sum.
    weight_l1: f64,
    /// Largest `|frequency|` of the underlying sum.
    max_frequency: u128,
}

impl ExpSumGrid {
    /// Fails if any value breaks the triangle inequality `|F| <= sum |w_j|`.
    pub fn new(values: Vec<Complex64>, weight_l1: f64, max_frequency: u128) -> Result<Self> {
        let slack = 1e-9 * weight_l1.max(1.0);
        if let Some(k) = values.iter().position(|v| !(v.norm() <= weight_l1 + slack)) {
            return Err(Error::Invariant(format!(
                "grid value {} at k = {k} exceeds the weight sum {weight_l1}",
                values[k].norm()
            )));
        }
        Ok(ExpSumGrid {
            values,
            weight_l1,
            max_frequency,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn weight_l1(&self) -> f64 {
        self.weight_l1
    }

    pub fn max_frequency(&self) -> u128 {
        self.max_frequency
    }

    /// `max_k |F(k/M)|`.
    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `(1/M) sum_k |F(k/M)|^p`, the Riemann mean approximating `int |F|^p`.
///
/// Requires `M >= 8 * max|frequency|`; for even `p` the mean is then the
/// exact integral up to rounding.
pub fn lp_norm_quadrature(g: &ExpSumGrid, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::precondition(format!("exponent p = {p} must be positive")));
    }
    let need = 8u128.saturating_mul(g.max_frequency).max(1);
    if (g.grid_size() as u128) < need {
        return Err(Error::precondition(format!(
            "grid of {} points undersamples frequency {} (need at least {need})",
            g.grid_size(),
            g.max_frequency
        )));
    }
    let powers: Vec<f64> = g.values.iter().map(|v| v.norm().powf(p)).collect();
    Ok(pairwise_sum(&powers) / g.grid_size() as f64)
}

/// `1_[N]^(alpha) = sum_{x=1..N} e(alpha x)` in closed form.
pub fn interval_transform(n: u64, alpha: f64) -> Complex64 {
    let t = alpha - alpha.round();
    if t == 0.0 {
        return Complex64::new(n as f64, 0.0);
    }
    let ratio = (PI * n as f64 * t).sin() / (PI * t).sin();
    e(t * (n as f64 + 1.0) / 2.0) * ratio
}

/// Fejér kernel `N^-1 |1_[N]^(alpha)|^2`, equal to `N` at integers.
pub fn fejer_kernel(n: u64, alpha: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let t = alpha - alpha.round();
    if t == 0.0 {
        return n as f64;
    }
    let num = (PI * n as f64 * t).sin();
    let den = (PI * t).sin();
    num * num / (n as f64 * den * den)
}
