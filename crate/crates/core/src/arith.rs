//! Small exact-arithmetic and summation helpers shared by the other modules.

use num_complex::Complex64;
use std::f64::consts::TAU;

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

/// Floor of the square root, exact for every `u64`.
pub fn isqrt_u64(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    // the float estimate is off by at most a couple of units near 2^64
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Floor of the square root, exact for every `u128`.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// `floor(n^(1/2^j))`, computed as `j` nested integer square roots.
///
/// Nested floors commute with monotone roots, so this is exact.
pub fn iterated_isqrt(n: u64, j: u32) -> u64 {
    (0..j).fold(n, |acc, _| isqrt_u64(acc))
}

/// Distance from `x` to the nearest integer.
pub fn torus_norm(x: f64) -> f64 {
    let frac = x - x.floor();
    frac.min(1.0 - frac)
}

/// `e(x) = exp(2 pi i x)`.
pub fn e(x: f64) -> Complex64 {
    let frac = x - x.floor();
    Complex64::from_polar(1.0, TAU * frac)
}

/// `e(k / q)` with the residue reduced exactly before going to floating point.
pub fn e_ratio(k: i128, q: u64) -> Complex64 {
    let r = k.rem_euclid(q as i128) as f64;
    Complex64::from_polar(1.0, TAU * r / q as f64)
}

/// Pairwise (tree) summation. The reduction tree depends only on the length,
/// so results are bit-identical across runs.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}

/// [`pairwise_sum_complex`] over `f(0), ..., f(n - 1)` without materialising
/// the terms. Same reduction tree as the slice version.
pub fn pairwise_sum_by(n: usize, f: &impl Fn(usize) -> Complex64) -> Complex64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> Complex64) -> Complex64 {
        const LEAF: usize = 16;
        if hi - lo <= LEAF {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, n, f)
}

/// SplitMix64 finalizer; used to derive independent child seeds from one
/// experiment-level seed.
pub fn split_seed(seed: u64, key: u64) -> u64 {
    let mut z = seed ^ key.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
