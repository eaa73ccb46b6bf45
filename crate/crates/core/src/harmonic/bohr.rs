use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const MAX_BOHR_DIM: usize = 4;
pub const MAX_BOHR_N: u64 = 10_000_000;

/// A torus frequency. Rational frequencies are reduced exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    Rational { num: i64, den: u64 },
    Real(f64),
}

impl Frequency {
    /// `||self * m||_T` for an integer `m`.
    pub fn torus_norm_times(&self, m: u128) -> f64 {
        match *self {
            Frequency::Rational { num, den } => {
                let d = den as u128;
                let r = (num.rem_euclid(den as i64) as u128) * (m % d) % d;
                r.min(d - r) as f64 / den as f64
            }
            Frequency::Real(t) => {
                let frac_t = t - t.floor();
                // split m so each product stays well inside f64 precision
                let hi = (m >> 26) as f64;
                let lo = (m & ((1 << 26) - 1)) as f64;
                let scaled = frac_t * (1u64 << 26) as f64;
                let s = (scaled - scaled.floor()) * hi + frac_t * lo;
                let s = s - s.floor();
                s.min(1.0 - s)
            }
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Rational { num, den } => write!(f, "{num}/{den}"),
            Frequency::Real(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for Frequency {
    type Err = Error;

    /// `p/q` or a decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num: i64 = p
                .trim()
                .parse()
                .map_err(|_| Error::precondition(format!("bad numerator in {s:?}")))?;
            let den: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::precondition(format!("bad denominator in {s:?}")))?;
            if den == 0 || den > i64::MAX as u64 {
                return Err(Error::precondition(format!("denominator out of range in {s:?}")));
            }
            return Ok(Frequency::Rational { num, den });
        }
        let t: f64 = s
            .parse()
            .map_err(|_| Error::precondition(format!("bad frequency {s:?}")))?;
        if !t.is_finite() {
            return Err(Error::precondition(format!("frequency {s:?} is not finite")));
        }
        Ok(Frequency::Real(t))
    }
}

/// `{x in [N] : c | x, ||theta_i W x^2/c||_T <= eta, ||beta_i x/c||_T <= eta}`.
///
/// `beta = None` uses `theta` for the linear conditions as well. With `x = ck`
/// the phases are `theta_i W c k^2` and `beta_i k`, reduced exactly for
/// rational frequencies.
pub fn quadratic_bohr_set(
    n: u64,
    theta: &[Frequency],
    beta: Option<&[Frequency]>,
    eta: f64,
    c: u64,
    w: u64,
) -> Result<Vec<u64>> {
    if theta.len() > MAX_BOHR_DIM {
        return Err(Error::precondition(format!("at most {MAX_BOHR_DIM} frequencies")));
    }
    if n > MAX_BOHR_N {
        return Err(Error::precondition(format!("N = {n} exceeds {MAX_BOHR_N}")));
    }
    let beta = beta.unwrap_or(theta);
    if beta.len() != theta.len() {
        return Err(Error::precondition("theta and beta lists differ in length"));
    }
    if c == 0 || w == 0 {
        return Err(Error::precondition("c and W must be positive"));
    }
    if !(eta >= 0.0) {
        return Err(Error::precondition("eta must be nonnegative"));
    }
    let mut out = Vec::new();
    for k in 1..=n / c {
        let quad = w as u128 * c as u128 * k as u128 * k as u128;
        let ok = theta.iter().all(|t| t.torus_norm_times(quad) <= eta)
            && beta.iter().all(|b| b.torus_norm_times(k as u128) <= eta);
        if ok {
            out.push(c * k);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(num: i64, den: u64) -> Frequency {
        Frequency::Rational { num, den }
    }

    #[test]
    fn example() {
        let set = quadratic_bohr_set(30, &[rat(1, 5)], Some(&[rat(0, 1)]), 0.1, 1, 1).unwrap();
        assert_eq!(set, vec![5, 10, 15, 20, 25, 30]);
    }

    #[test]
    fn real_and_rational_agree() {
        let a = quadratic_bohr_set(2000, &[rat(3, 7)], Some(&[rat(1, 8)]), 0.2, 2, 3).unwrap();
        let b = quadratic_bohr_set(
            2000,
            &[Frequency::Real(3.0 / 7.0)],
            Some(&[Frequency::Real(0.125)]),
            0.2,
            2,
            3,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn beta_defaults_to_theta() {
        let a = quadratic_bohr_set(500, &[rat(2, 9)], None, 0.15, 1, 1).unwrap();
        let b = quadratic_bohr_set(500, &[rat(2, 9)], Some(&[rat(2, 9)]), 0.15, 1, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse() {
        assert_eq!("1/5".parse::<Frequency>().unwrap(), rat(1, 5));
        assert_eq!("-2/7".parse::<Frequency>().unwrap(), rat(-2, 7));
        assert_eq!("0.25".parse::<Frequency>().unwrap(), Frequency::Real(0.25));
        assert!("1/0".parse::<Frequency>().is_err());
        assert!("x".parse::<Frequency>().is_err());
    }

    #[test]
    fn preconditions() {
        let t = [rat(1, 2); 5];
        assert!(quadratic_bohr_set(10, &t, None, 0.1, 1, 1).is_err());
        assert!(quadratic_bohr_set(MAX_BOHR_N + 1, &[], None, 0.1, 1, 1).is_err());
        assert!(quadratic_bohr_set(10, &[rat(1, 2)], Some(&[]), 0.1, 1, 1).is_err());
        assert!(quadratic_bohr_set(10, &[], None, 0.1, 0, 1).is_err());
    }
}
