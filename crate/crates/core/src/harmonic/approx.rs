use crate::arith::torus_norm;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest denominator cap accepted by [`rational_approx`].
pub const MAX_APPROX_DENOMINATOR: u64 = 1 << 31;

/// `a/q` in lowest terms with `0 <= a < q`, and `err = ||alpha - a/q||_T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    pub a: u64,
    pub q: u64,
    pub err: f64,
}

/// Best approximation `a/q` to `alpha` with `q <= cap`, ties to the smaller `q`.
///
/// `alpha` is reduced mod 1 and read as the exact dyadic rational it stores.
/// The best approximation is the last convergent or the last semiconvergent
/// with denominator `<= cap`; the two are compared exactly through the
/// Euclidean remainders `q alpha D - p D` (`D` the dyadic denominator).
pub fn rational_approx(alpha: f64, cap: u64) -> Result<RationalApprox> {
    if !alpha.is_finite() {
        return Err(Error::precondition("alpha must be finite"));
    }
    if cap == 0 || cap > MAX_APPROX_DENOMINATOR {
        return Err(Error::precondition(format!(
            "denominator cap {cap} outside [1, {MAX_APPROX_DENOMINATOR}]"
        )));
    }
    let x = alpha - alpha.floor();
    let Some((m, k)) = dyadic(x) else {
        return Ok(RationalApprox { a: 0, q: 1, err: 0.0 });
    };
    // x < 2^-37: every a >= 1 with q <= 2^31 is further away than 0/1
    if k > 90 {
        return Ok(RationalApprox { a: 0, q: 1, err: x });
    }
    let d = 1i128 << k;
    let cap = cap as i128;

    // (p, q, theta) with theta = q m - p d; start from j = -1 and j = 0
    let mut prev = (1i128, 0i128, -d);
    let mut cur = (0i128, 1i128, m as i128);
    let best = loop {
        if cur.2 == 0 {
            break cur;
        }
        let step = prev.2.abs() / cur.2.abs();
        let next_q = step * cur.1 + prev.1;
        if next_q > cap {
            let t = (cap - prev.1) / cur.1;
            if t >= 1 {
                let semi = (prev.0 + t * cur.0, prev.1 + t * cur.1, prev.2 + t * cur.2);
                // |theta_s|/q_s < |theta_c|/q_c
                if (semi.2.unsigned_abs()) * (cur.1 as u128) < (cur.2.unsigned_abs()) * (semi.1 as u128) {
                    break semi;
                }
            }
            break cur;
        }
        let next = (step * cur.0 + prev.0, next_q, prev.2 + step * cur.2);
        prev = cur;
        cur = next;
    };
    let (p, q, theta) = best;
    let err = theta.unsigned_abs() as f64 / (q as f64 * d as f64);
    Ok(RationalApprox {
        a: p.rem_euclid(q) as u64,
        q: q as u64,
        err,
    })
}

/// Smallest `q <= cap` with `||q alpha||_T <= tol`, if any.
pub fn rational_approx_within(alpha: f64, cap: u64, tol: f64) -> Result<Option<RationalApprox>> {
    if !alpha.is_finite() {
        return Err(Error::precondition("alpha must be finite"));
    }
    if cap == 0 {
        return Err(Error::precondition("denominator cap must be positive"));
    }
    let x = alpha - alpha.floor();
    for q in 1..=cap {
        let qx = q as f64 * x;
        if torus_norm(qx) <= tol {
            let a = (qx.round() as u64) % q;
            return Ok(Some(RationalApprox {
                a,
                q,
                err: torus_norm(x - a as f64 / q as f64),
            }));
        }
    }
    Ok(None)
}

/// `x = m / 2^k` with `m` odd, for `x` in `(0, 1)`.
fn dyadic(x: f64) -> Option<(u64, u32)> {
    if x == 0.0 {
        return None;
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    debug_assert!(e < 0);
    Some((m, (-e) as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd_u64;
    use proptest::prelude::*;

    fn brute(alpha: f64, cap: u64) -> (u64, u64) {
        let x = alpha - alpha.floor();
        let mut best = (0u64, 1u64, x.min(1.0 - x));
        for q in 1..=cap {
            let a = (q as f64 * x).round() as u64;
            let err = (x - a as f64 / q as f64).abs();
            if err < best.2 {
                best = (a % q, q, err);
            }
        }
        (best.0, best.1)
    }

    #[test]
    fn examples() {
        let r = rational_approx(0.5, 10).unwrap();
        assert_eq!((r.a, r.q, r.err), (1, 2, 0.0));
        let r = rational_approx(0.333, 10).unwrap();
        assert_eq!((r.a, r.q), (1, 3));
        let r = rational_approx(0.1415926, 10).unwrap();
        assert_eq!((r.a, r.q), (1, 7));
        let r = rational_approx(0.999, 10).unwrap();
        assert_eq!((r.a, r.q), (0, 1));
        assert!((r.err - 0.001).abs() < 1e-12);
        assert_eq!(rational_approx(0.0, 5).unwrap().q, 1);
        assert_eq!(rational_approx(1e-300, 1 << 30).unwrap().q, 1);
        assert!(rational_approx(f64::NAN, 5).is_err());
        assert!(rational_approx(0.3, 0).is_err());
    }

    #[test]
    fn within_examples() {
        let r = rational_approx_within(0.2501, 10, 0.001).unwrap().unwrap();
        assert_eq!((r.a, r.q), (1, 4));
        assert!(rational_approx_within(0.2501, 3, 0.001).unwrap().is_none());
    }

    proptest! {
        #[test]
        fn best_approximation_matches_brute(alpha in 0.0f64..1.0, cap in 1u64..400) {
            let r = rational_approx(alpha, cap).unwrap();
            prop_assert!(r.q <= cap);
            prop_assert_eq!(gcd_u64(r.a, r.q), 1);
            let (a, q) = brute(alpha, cap);
            let brute_err = (alpha - a as f64 / q as f64).abs().min((alpha - 1.0 - a as f64 / q as f64).abs());
            // brute force in floating point can only mis-rank near-ties
            if (a, q) != (r.a, r.q) {
                prop_assert!((r.err - brute_err).abs() < 1e-15, "{alpha} {cap}: {:?} vs {a}/{q}", r);
            }
        }
    }
}
