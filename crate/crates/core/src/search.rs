//! Hindman configurations `{x, y, x + y, xy}` and the lifting identities that
//! turn monochromatic configurations into solutions of
//! `a_1 x_1^2 + ... + a_s x_s^2 = b_1 y_1 + ... + b_t y_t`.

use crate::colourings::Colouring;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HindmanConfig {
    pub x: u64,
    pub y: u64,
    pub colour: u32,
    /// `x = y` or `x + y = xy`.
    pub degenerate: bool,
}

impl HindmanConfig {
    pub fn sum(&self) -> u64 {
        self.x + self.y
    }

    pub fn product(&self) -> u64 {
        self.x * self.y
    }

    pub fn values(&self) -> [u64; 4] {
        [self.x, self.y, self.sum(), self.product()]
    }
}

/// All monochromatic `{x, y, x + y, xy}` with `x <= y` and all four values
/// in `[limit]`, sorted by `(x, y)`.
pub fn hindman_search(c: &Colouring, limit: u64) -> Result<Vec<HindmanConfig>> {
    let n = c.n();
    if limit > n {
        return Err(Error::precondition(format!("limit {limit} exceeds N = {n}")));
    }
    let mut out = Vec::new();
    for x in 1..=limit {
        if x.saturating_mul(x) > limit {
            break;
        }
        let colour = c.colour(x);
        for y in x..=limit {
            let p = x * y;
            if p > limit {
                break;
            }
            if x + y > limit {
                continue;
            }
            if c.colour(y) == colour && c.colour(x + y) == colour && c.colour(p) == colour {
                out.push(HindmanConfig {
                    x,
                    y,
                    colour,
                    degenerate: x == y || x + y == p,
                });
            }
        }
    }
    Ok(out)
}

/// A solution of `x1^2 - x2^2 = y^2 + z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadSolution {
    pub x1: u64,
    pub x2: u64,
    pub y: u64,
    pub z: u64,
}

impl BadSolution {
    pub fn holds(&self) -> bool {
        let sq = |v: u64| v as i128 * v as i128;
        sq(self.x1) - sq(self.x2) == sq(self.y) + self.z as i128
    }
}

/// `((x + y)/2, x/2, y/2, xy/2)`, which solves `x1^2 - x2^2 = y^2 + z`.
pub fn config_to_bad_solution(cfg: &HindmanConfig) -> Result<BadSolution> {
    if let Some(odd) = cfg.values().into_iter().find(|v| v % 2 == 1) {
        return Err(Error::precondition(format!(
            "configuration ({}, {}) contains the odd value {odd}",
            cfg.x, cfg.y
        )));
    }
    let sol = BadSolution {
        x1: cfg.sum() / 2,
        x2: cfg.x / 2,
        y: cfg.y / 2,
        z: cfg.product() / 2,
    };
    if !sol.holds() {
        return Err(Error::Invariant(format!("identity failed for {sol:?}")));
    }
    Ok(sol)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoreiraCheck {
    /// `u` after the sign normalisation making `sum a_i u_i > 0`.
    pub u: Vec<i64>,
    /// `2 sum a_i u_i`.
    pub a: i128,
    /// `sum b_j`.
    pub b: i128,
    pub xs: Vec<i128>,
    pub ys: Vec<i128>,
    pub lhs: i128,
    pub rhs: i128,
    pub holds: bool,
}

/// Build `x_i = b(x + u_i y)/a`, `y_j = b(xy + v_j z)/a` and check
/// `sum a_i x_i^2 = sum b_j y_j` in exact integers.
///
/// Requires `sum a_i = 0`, `sum a_i u_i^2 = 0`, `sum b_j v_j = 0` and `u != 0`.
pub fn moreira_identity_check(
    u: &[i64],
    v: &[i64],
    a_coeffs: &[i64],
    b_coeffs: &[i64],
    x: i64,
    y: i64,
    z: i64,
) -> Result<MoreiraCheck> {
    if u.len() != a_coeffs.len() || v.len() != b_coeffs.len() {
        return Err(Error::precondition("u must match a and v must match b in length"));
    }
    if a_coeffs.is_empty() || b_coeffs.is_empty() {
        return Err(Error::precondition("need s >= 1 and t >= 1"));
    }
    let sum = |xs: &[i64]| xs.iter().map(|&c| c as i128).sum::<i128>();
    let dot = |p: &[i64], q: &[i64]| p.iter().zip(q).map(|(&s, &t)| s as i128 * t as i128).sum::<i128>();
    if sum(a_coeffs) != 0 {
        return Err(Error::precondition("the quadratic coefficients must sum to 0"));
    }
    let squares: Vec<i128> = u.iter().map(|&c| c as i128 * c as i128).collect();
    if a_coeffs
        .iter()
        .zip(&squares)
        .map(|(&s, &q)| s as i128 * q)
        .sum::<i128>()
        != 0
    {
        return Err(Error::precondition("u must solve sum a_i u_i^2 = 0"));
    }
    if dot(b_coeffs, v) != 0 {
        return Err(Error::precondition("v must solve sum b_j v_j = 0"));
    }
    let Some(first) = u.iter().position(|&c| c != 0) else {
        return Err(Error::precondition("u is zero, so a = 0"));
    };

    let mut u = u.to_vec();
    if dot(a_coeffs, &u) == 0 {
        u[first] = -u[first];
    }
    if dot(a_coeffs, &u) < 0 {
        u.iter_mut().for_each(|c| *c = -*c);
    }
    let a = 2 * dot(a_coeffs, &u);
    if a == 0 {
        return Err(Error::Invariant("a vanished after sign normalisation".into()));
    }
    let b = sum(b_coeffs);
    let (x, y, z) = (x as i128, y as i128, z as i128);

    let divisible = |name: String, value: i128| {
        if value % a == 0 {
            Ok(())
        } else {
            Err(Error::Divisibility {
                name,
                value,
                divisor: a,
            })
        }
    };
    divisible("y".into(), y)?;
    divisible("x".into(), x)?;
    divisible("x + y".into(), x + y)?;
    divisible("xy".into(), x * y)?;
    let mut xs = Vec::with_capacity(u.len());
    for (i, &ui) in u.iter().enumerate() {
        let value = x + ui as i128 * y;
        divisible(format!("x + u_{} y", i + 1), value)?;
        xs.push(b * value / a);
    }
    let mut ys = Vec::with_capacity(v.len());
    for (j, &vj) in v.iter().enumerate() {
        let value = x * y + vj as i128 * z;
        divisible(format!("xy + v_{} z", j + 1), value)?;
        ys.push(b * value / a);
    }
    let lhs = a_coeffs.iter().zip(&xs).map(|(&c, &xi)| c as i128 * xi * xi).sum();
    let rhs = b_coeffs.iter().zip(&ys).map(|(&c, &yj)| c as i128 * yj).sum();
    Ok(MoreiraCheck {
        u,
        a,
        b,
        xs,
        ys,
        lhs,
        rhs,
        holds: lhs == rhs,
    })
}
