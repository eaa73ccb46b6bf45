use super::expsum::{ExpSum, ExpSumGrid};
use super::gauss::gauss_sum;
use crate::arith::{e, gcd_u64};
use crate::counting::WeightedSet;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The weighted square majorant `nu_{W, xi}` on `[N]`.
///
/// Position `n = ((Wx + xi)^2 - xi^2)/(2W) = W x^2/2 + xi x` carries weight
/// `Wx + xi` for every `x >= 1` with `n <= N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Majorant {
    n: u64,
    w: u64,
    xi: u64,
    /// `(position, weight)`, positions strictly increasing.
    support: Vec<(u64, u64)>,
}

pub fn build_majorant(n: u64, w: u64, xi: u64) -> Result<Majorant> {
    if w == 0 || w % 2 == 1 {
        return Err(Error::precondition(format!("W = {w} must be even and positive")));
    }
    if xi == 0 || xi > w || gcd_u64(xi, w) != 1 {
        return Err(Error::precondition(format!(
            "xi = {xi} must lie in [W] and be coprime to W = {w}"
        )));
    }
    let mut support = Vec::new();
    for x in 1u128.. {
        let pos = (w as u128 / 2) * x * x + xi as u128 * x;
        if pos > n as u128 {
            break;
        }
        support.push((pos as u64, (w as u128 * x + xi as u128) as u64));
    }
    Ok(Majorant { n, w, xi, support })
}

impl Majorant {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    pub fn xi(&self) -> u64 {
        self.xi
    }

    pub fn support(&self) -> &[(u64, u64)] {
        &self.support
    }

    /// `||nu||_1 = nu^(0)`.
    pub fn l1(&self) -> u128 {
        self.support.iter().map(|&(_, w)| w as u128).sum()
    }

    /// `||nu||_2^2`.
    pub fn l2_squared(&self) -> u128 {
        self.support.iter().map(|&(_, w)| w as u128 * w as u128).sum()
    }

    pub fn weighted_set(&self) -> WeightedSet {
        WeightedSet::from_weighted(self.support.iter().copied()).expect("majorant positions are positive")
    }

    /// `nu^(alpha) = sum_n nu(n) e(alpha n)`.
    pub fn exp_sum(&self) -> ExpSum {
        ExpSum::new(self.support.iter().map(|&(n, w)| (n as i128, w as f64)))
    }
}

/// `nu^(k/M)` for `k = 0..M`, evaluated directly over the sparse support.
pub fn majorant_fourier(nu: &Majorant, m: usize) -> Result<ExpSumGrid> {
    nu.exp_sum().grid_direct(m)
}

/// `int_0^N e(beta t) dt = N e(beta N/2) sinc(pi beta N)`.
pub fn interval_integral(n: f64, beta: f64) -> Complex64 {
    let x = PI * beta * n;
    let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
    e(beta * n / 2.0) * (n * sinc)
}

/// Main term of `nu^` near `a/q`:
/// `E_{r in [q]} e_q(a(W r^2/2 + xi r)) * int_0^N e((alpha - a/q) t) dt`,
/// with `alpha - a/q` taken as the nearest representative mod 1.
pub fn major_arc_approx(nu: &Majorant, a: i128, q: u64, alpha: f64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::precondition("q must be positive"));
    }
    let qi = q as i128;
    let a_red = a.rem_euclid(qi);
    if gcd_u64(a_red as u64, q) != 1 {
        return Err(Error::precondition(format!("a = {a} is not coprime to q = {q}")));
    }
    let local = gauss_sum(q, a_red * ((nu.w / 2) as i128 % qi), a_red * (nu.xi as i128 % qi))?;
    let beta = alpha - a_red as f64 / q as f64;
    let beta = beta - beta.round();
    Ok(local * interval_integral(nu.n as f64, beta))
}
