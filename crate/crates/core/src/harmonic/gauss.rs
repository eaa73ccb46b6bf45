use crate::arith::{e_ratio, gcd_u64, pairwise_sum_by};
use crate::{Error, Result};
use num_complex::Complex64;

/// Largest modulus accepted by [`gauss_sum`].
pub const MAX_GAUSS_MODULUS: u64 = 1_000_000;

/// Roots of unity `e(k/q)` for one modulus, reusable across many `(a, b)`.
#[derive(Clone, Debug)]
pub struct GaussTable {
    q: u64,
    roots: Vec<Complex64>,
}

impl GaussTable {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > MAX_GAUSS_MODULUS {
            return Err(Error::precondition(format!(
                "modulus q = {q} outside [1, {MAX_GAUSS_MODULUS}]"
            )));
        }
        let roots = (0..q).map(|k| e_ratio(k as i128, q)).collect();
        Ok(GaussTable { q, roots })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `(1/q) sum_{r=1..q} e((a r^2 + b r)/q)`.
    ///
    /// Residues are accumulated exactly into a histogram; only the final
    /// weighted sum of roots is done in floating point, pairwise.
    pub fn mean(&self, a: i128, b: i128) -> Complex64 {
        let q = self.q as i128;
        let a = a.rem_euclid(q);
        let b = b.rem_euclid(q);
        let mut hist = vec![0u32; self.q as usize];
        // phase(r) = a r^2 + b r, stepped by phase(r+1) - phase(r) = a(2r+1) + b
        let mut phase = 0i128;
        let mut step = (a + b) % q;
        let two_a = (2 * a) % q;
        // all three stay in [0, q), so one conditional subtraction reduces
        let wrap = |v: i128| if v >= q { v - q } else { v };
        for _ in 0..self.q {
            phase = wrap(phase + step);
            step = wrap(step + two_a);
            hist[phase as usize] += 1;
        }
        let sum = pairwise_sum_by(hist.len(), &|k| self.roots[k] * hist[k] as f64);
        sum / self.q as f64
    }
}

/// Normalised quadratic Gauss sum `(1/q) sum_{r=1..q} e((a r^2 + b r)/q)`.
///
/// Satisfies `|E|^2 <= gcd(2a, q)/q`.
pub fn gauss_sum(q: u64, a: i128, b: i128) -> Result<Complex64> {
    Ok(GaussTable::new(q)?.mean(a, b))
}

/// `gcd(2a, q)/q`, the exact upper bound for `|gauss_sum(q, a, b)|^2`.
pub fn gauss_bound(q: u64, a: i128) -> f64 {
    let two_a = (2 * a.rem_euclid(q as i128)) as u64;
    gcd_u64(two_a, q) as f64 / q as f64
}

fn check_w_params(w: u64, xi: u64, a: i128, q: u64) -> Result<()> {
    if w == 0 || w % 2 == 1 {
        return Err(Error::precondition(format!("W = {w} must be even and positive")));
    }
    if gcd_u64(xi, w) != 1 {
        return Err(Error::precondition(format!("xi = {xi} is not coprime to W = {w}")));
    }
    if q == 0 {
        return Err(Error::precondition("q must be positive"));
    }
    if gcd_u64(a.rem_euclid(q as i128) as u64, q) != 1 {
        return Err(Error::precondition(format!("a = {a} is not coprime to q = {q}")));
    }
    Ok(())
}

/// `(1/q) sum_{r=1..q} e(a (W r^2/2 + xi r)/q)`, the local factor of the
/// majorant's exponential sum.
///
/// Zero when `gcd(q, W/2) > 1`; otherwise `|E|^2 <= gcd(W, q)/q`.
pub fn w_gauss_vanishing_check(w: u64, xi: u64, a: i128, q: u64) -> Result<Complex64> {
    check_w_params(w, xi, a, q)?;
    let qi = q as i128;
    let a = a.rem_euclid(qi);
    let quad = a * ((w / 2) as i128 % qi) % qi;
    let lin = a * (xi as i128 % qi) % qi;
    gauss_sum(q, quad, lin)
}

/// Whether the local factor vanishes identically: `gcd(q, W/2) > 1`.
pub fn w_gauss_vanishes(w: u64, q: u64) -> bool {
    gcd_u64(q, w / 2) > 1
}

/// `sqrt(gcd(W, q)/q)`, the bound on the local factor when it does not vanish.
pub fn w_gauss_bound(w: u64, q: u64) -> f64 {
    (gcd_u64(w, q) as f64 / q as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(z: Complex64, re: f64, im: f64) -> bool {
        (z.re - re).abs() < 1e-12 && (z.im - im).abs() < 1e-12
    }

    #[test]
    fn gauss_examples() {
        assert!(close(gauss_sum(1, 0, 0).unwrap(), 1.0, 0.0));
        let z = gauss_sum(4, 1, 0).unwrap();
        assert!(close(z, 0.5, 0.5));
        assert!((z.norm_sqr() - gauss_bound(4, 1)).abs() < 1e-12);
        assert!(close(gauss_sum(2, 1, 1).unwrap(), 1.0, 0.0));
        assert!(gauss_sum(0, 1, 1).is_err());
        assert!(gauss_sum(MAX_GAUSS_MODULUS + 1, 1, 1).is_err());
    }

    #[test]
    fn matches_direct_sum() {
        for q in 1..40u64 {
            let t = GaussTable::new(q).unwrap();
            for a in -3..(q as i128 + 3) {
                for b in [-5i128, 0, 1, 7] {
                    let direct: Complex64 = (1..=q as i128)
                        .map(|r| e_ratio(a * r * r + b * r, q))
                        .sum::<Complex64>()
                        / q as f64;
                    assert!((t.mean(a, b) - direct).norm() < 1e-12, "q={q} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn w_gauss_examples() {
        assert!(w_gauss_vanishing_check(4, 1, 1, 2).unwrap().norm() < 1e-12);
        assert!(close(w_gauss_vanishing_check(2, 1, 1, 1).unwrap(), 1.0, 0.0));
        assert!(w_gauss_vanishing_check(6, 5, 1, 3).unwrap().norm() < 1e-10);
        // non-vanishing but above q^(-1/2): the bound needs gcd(W, q)
        let z = w_gauss_vanishing_check(2, 1, 1, 2).unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-12);
        assert!(z.norm() <= w_gauss_bound(2, 2) + 1e-12);
    }

    #[test]
    fn w_gauss_preconditions() {
        assert!(w_gauss_vanishing_check(3, 1, 1, 2).is_err());
        assert!(w_gauss_vanishing_check(4, 2, 1, 3).is_err());
        assert!(w_gauss_vanishing_check(4, 1, 2, 4).is_err());
        assert!(w_gauss_vanishing_check(4, 1, 1, 0).is_err());
    }
}
