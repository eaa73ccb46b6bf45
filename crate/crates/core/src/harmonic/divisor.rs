use crate::{Error, Result};

/// Enumeration budget for [`divisor_moment`]: `X * Q`.
pub const DIVISOR_BUDGET: u128 = 1_000_000_000;

/// `d(n, Q) = #{q <= Q : q | n}`; every `q` divides 0, so `d(0, Q) = Q`.
pub fn divisor_partial(n: i128, cap: u64) -> u64 {
    let n = n.unsigned_abs();
    if n == 0 {
        return cap;
    }
    let cap = cap as u128;
    let mut count = 0;
    let mut d = 1u128;
    while d * d <= n && d <= cap {
        if n % d == 0 {
            count += 1;
            let e = n / d;
            if e != d && e <= cap {
                count += 1;
            }
        }
        d += 1;
    }
    // divisors e > sqrt(n) whose cofactor d was beyond the cap are never
    // reached above; they exceed the cap too, since e > sqrt(n) >= d > cap
    count
}

/// `sum_{|n| <= X} d(n, Q)^B`, exactly.
pub fn divisor_moment(x: u64, cap: u64, b: u32) -> Result<u128> {
    let work = x as u128 * cap as u128;
    if work > DIVISOR_BUDGET {
        return Err(Error::Capacity {
            what: "divisor enumeration X*Q",
            value: work,
            limit: DIVISOR_BUDGET,
        });
    }
    let pow = |v: u64| (v as u128).checked_pow(b).ok_or(Error::Overflow("divisor moment"));
    let mut positive = 0u128;
    const SEG: u64 = 1 << 20;
    let mut counts = vec![0u32; SEG as usize];
    let mut lo = 1u64;
    while lo <= x {
        let hi = x.min(lo + SEG - 1);
        let len = (hi - lo + 1) as usize;
        counts[..len].fill(0);
        for q in 1..=cap.min(hi) {
            let mut m = lo.div_ceil(q) * q;
            while m <= hi {
                counts[(m - lo) as usize] += 1;
                m += q;
            }
        }
        for &c in &counts[..len] {
            positive = positive
                .checked_add(pow(c as u64)?)
                .ok_or(Error::Overflow("divisor moment"))?;
        }
        lo = hi + 1;
    }
    positive
        .checked_mul(2)
        .and_then(|s| s.checked_add(pow(cap).ok()?))
        .ok_or(Error::Overflow("divisor moment"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_examples() {
        assert_eq!(divisor_partial(6, 3), 3);
        assert_eq!(divisor_partial(1, 100), 1);
        assert_eq!(divisor_partial(12, 4), 4);
        assert_eq!(divisor_partial(0, 7), 7);
        assert_eq!(divisor_partial(-12, 4), 4);
    }

    #[test]
    fn partial_matches_naive() {
        for n in 1..400i128 {
            for cap in [1, 2, 5, 17, 50, 1000] {
                let naive = (1..=cap).filter(|&q| n % q as i128 == 0).count() as u64;
                assert_eq!(divisor_partial(n, cap), naive, "n={n} Q={cap}");
            }
        }
    }

    #[test]
    fn moment_matches_naive() {
        for (x, cap, b) in [(0, 5, 2), (30, 6, 1), (100, 10, 3), (2000, 40, 2)] {
            let naive: u128 = (-(x as i128)..=x as i128)
                .map(|n| (divisor_partial(n, cap) as u128).pow(b))
                .sum();
            assert_eq!(divisor_moment(x, cap, b).unwrap(), naive);
        }
    }

    #[test]
    fn budget() {
        assert!(divisor_moment(1_000_000, 1001, 1).unwrap_err().is_capacity());
    }
}
