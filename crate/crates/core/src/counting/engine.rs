//! Convolution engine behind [`super::count_convolution`].
//!
//! All terms are moved to one side, so the count is the number of weighted
//! tuples summing to 0. Each term is clipped to the values that can still
//! take part in a solution, then the terms are split into two groups `A` and
//! `B` and the answer is `sum_m S_A(m) S_B(-m)` with `S` the series of the
//! group sum. A group series is either computed in full or, when only a
//! narrow window is needed, as a windowed convolution of two fully computed
//! subgroups. The split is chosen by exhaustive search over bipartitions
//! against a cost and memory model.

use super::ntt::{conv_window, estimate, Dense, Series, Shape};
use super::CountQuery;
use crate::arith::{gcd_u128, gcd_u64};
use crate::{Error, Result};
use std::collections::HashMap;

/// Largest total value range (after clipping, in units of the common gcd).
pub const MAX_RANGE: u128 = 1 << 34;
/// Memory budget in 64-bit slots for simultaneously live dense arrays.
pub const MAX_SLOTS: f64 = (1u64 << 28) as f64;
/// Above this many terms the split is chosen heuristically.
const EXHAUSTIVE_TERMS: usize = 12;

struct TermVals {
    /// Strictly increasing.
    vals: Vec<i64>,
    weights: Vec<u64>,
    gcd: u64,
}

impl TermVals {
    fn lo(&self) -> i64 {
        self.vals[0]
    }

    fn hi(&self) -> i64 {
        self.vals[self.vals.len() - 1]
    }
}

pub(crate) fn count(q: &CountQuery) -> Result<u128> {
    let mut terms = q.signed_terms()?;
    if terms.iter().any(|t| t.is_empty()) {
        return Ok(0);
    }
    for t in &mut terms {
        t.sort_unstable_by_key(|&(v, _)| v);
    }
    if !propagate(&mut terms)? {
        return Ok(0);
    }
    if terms.len() == 1 {
        return Ok(terms[0].iter().find(|&&(v, _)| v == 0).map_or(0, |&(_, w)| w as u128));
    }

    let g_all = terms
        .iter()
        .flatten()
        .fold(0u128, |g, &(v, _)| gcd_u128(g, v.unsigned_abs()));
    let range: u128 = terms.iter().map(|t| (t[t.len() - 1].0 - t[0].0) as u128 / g_all).sum();
    if range > MAX_RANGE {
        return Err(Error::Capacity {
            what: "value range after clipping",
            value: range,
            limit: MAX_RANGE,
        });
    }
    let terms = terms
        .into_iter()
        .map(|t| {
            let vals = t
                .iter()
                .map(|&(v, _)| i64::try_from(v / g_all as i128).map_err(|_| Error::Overflow("term value")))
                .collect::<Result<Vec<_>>>()?;
            let gcd = vals.iter().fold(0, |g, &v| gcd_u64(g, v.unsigned_abs()));
            Ok(TermVals {
                vals,
                weights: t.iter().map(|&(_, w)| w).collect(),
                gcd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if terms.len() > 64 {
        return Err(Error::Capacity {
            what: "number of terms",
            value: terms.len() as u128,
            limit: 64,
        });
    }

    let planner = Planner::new(&terms);
    let plan = planner.best()?;
    execute(&terms, &planner, &plan)
}

/// Interval propagation: drop values no solution can use. Returns `false`
/// when no solution is possible.
fn propagate(terms: &mut [Vec<(i128, u64)>]) -> Result<bool> {
    loop {
        let mut lo_sum = 0i128;
        let mut hi_sum = 0i128;
        for t in terms.iter() {
            lo_sum = lo_sum.checked_add(t[0].0).ok_or(Error::Overflow("value range"))?;
            hi_sum = hi_sum
                .checked_add(t[t.len() - 1].0)
                .ok_or(Error::Overflow("value range"))?;
        }
        if lo_sum > 0 || hi_sum < 0 {
            return Ok(false);
        }
        let mut changed = false;
        for t in terms.iter_mut() {
            let allowed_lo = -(hi_sum - t[t.len() - 1].0);
            let allowed_hi = -(lo_sum - t[0].0);
            let start = t.partition_point(|&(v, _)| v < allowed_lo);
            let end = t.partition_point(|&(v, _)| v <= allowed_hi);
            if end <= start {
                return Ok(false);
            }
            if start > 0 || end < t.len() {
                t.truncate(end);
                t.drain(..start);
                changed = true;
            }
        }
        if !changed {
            return Ok(true);
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum GroupPlan {
    Full(u64),
    Split(u64, u64),
}

#[derive(Clone, Copy, Debug)]
struct Plan {
    a: GroupPlan,
    b: Option<GroupPlan>,
    cost: f64,
}

#[derive(Clone, Copy, Debug)]
struct FullCost {
    cost: f64,
    peak: f64,
    shape: Shape,
}

struct Planner<'a> {
    terms: &'a [TermVals],
    full_memo: std::cell::RefCell<HashMap<(u64, u64), Option<FullCost>>>,
}

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

impl<'a> Planner<'a> {
    fn new(terms: &'a [TermVals]) -> Self {
        Planner {
            terms,
            full_memo: Default::default(),
        }
    }

    fn gcd(&self, mask: u64) -> u64 {
        members(mask).fold(0, |g, i| gcd_u64(g, self.terms[i].gcd))
    }

    /// Sum of the member ranges, in units of the common gcd.
    fn bounds(&self, mask: u64) -> (i64, i64) {
        members(mask).fold((0, 0), |(lo, hi), i| (lo + self.terms[i].lo(), hi + self.terms[i].hi()))
    }

    fn term_shape(&self, i: usize, g: u64) -> Shape {
        let t = &self.terms[i];
        Shape {
            len: ((t.hi() - t.lo()) as u64 / g + 1) as f64,
            nnz: t.vals.len() as f64,
        }
    }

    /// Members of a group in the order they are convolved.
    fn chain_order(&self, mask: u64, g: u64) -> Vec<usize> {
        let mut order: Vec<usize> = members(mask).collect();
        order.sort_by(|&i, &j| {
            self.term_shape(i, g)
                .len
                .total_cmp(&self.term_shape(j, g).len)
                .then(i.cmp(&j))
        });
        order
    }

    /// Cost of the full series of `mask` in units of `g`; `None` if over budget.
    fn full(&self, mask: u64, g: u64) -> Option<FullCost> {
        if let Some(hit) = self.full_memo.borrow().get(&(mask, g)) {
            return *hit;
        }
        let order = self.chain_order(mask, g);
        let mut acc = self.term_shape(order[0], g);
        let dense = |s: Shape| if s.nnz * 8.0 <= s.len { s.nnz * 2.0 } else { s.len };
        let mut cost = acc.nnz;
        let mut peak = dense(acc);
        for &i in &order[1..] {
            let next = self.term_shape(i, g);
            let len = acc.len + next.len - 1.0;
            cost += estimate(acc, next, len as u64) + len;
            peak = peak.max(dense(acc) + dense(next) + len);
            acc = Shape {
                len,
                nnz: len.min(acc.nnz * next.nnz),
            };
        }
        let result = (peak <= MAX_SLOTS).then_some(FullCost { cost, peak, shape: acc });
        self.full_memo.borrow_mut().insert((mask, g), result);
        result
    }

    /// Cheapest way to produce the series of `mask` on a window of width `w`.
    /// Returns `(plan, cost, peak memory)`.
    fn group(&self, mask: u64, w: u64) -> Option<(GroupPlan, f64, f64)> {
        let g = self.gcd(mask);
        let mut best = self
            .full(mask, g)
            .map(|f| (GroupPlan::Full(mask), f.cost, f.peak + w as f64));
        let n = mask.count_ones() as usize;
        if n < 2 {
            return best;
        }
        let mut consider = |m1: u64, m2: u64| {
            let (Some(f1), Some(f2)) = (self.full(m1, g), self.full(m2, g)) else {
                return;
            };
            let cost = f1.cost + f2.cost + estimate(f1.shape, f2.shape, w) + w as f64;
            let peak = f1
                .peak
                .max(f1.shape.len + f2.peak)
                .max(f1.shape.len + f2.shape.len + w as f64);
            if peak <= MAX_SLOTS && best.is_none_or(|(_, c, _)| cost < c) {
                best = Some((GroupPlan::Split(m1, m2), cost, peak));
            }
        };
        if n <= EXHAUSTIVE_TERMS {
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            // every proper split, the lowest member always in the first half
            let mut sub = rest;
            loop {
                let m1 = low | sub;
                if m1 != mask {
                    consider(m1, mask ^ m1);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        } else {
            let (m1, m2) = self.balanced_split(mask);
            consider(m1, m2);
        }
        best
    }

    /// Greedy split equalising the log-lengths of the two halves.
    fn balanced_split(&self, mask: u64) -> (u64, u64) {
        let g = self.gcd(mask);
        let mut order: Vec<usize> = members(mask).collect();
        order.sort_by(|&i, &j| {
            self.term_shape(j, g)
                .len
                .total_cmp(&self.term_shape(i, g).len)
                .then(i.cmp(&j))
        });
        let (mut m1, mut m2, mut l1, mut l2) = (0u64, 0u64, 0f64, 0f64);
        for i in order {
            let l = self.term_shape(i, g).len.ln();
            if l1 <= l2 {
                m1 |= 1 << i;
                l1 += l;
            } else {
                m2 |= 1 << i;
                l2 += l;
            }
        }
        (m1, m2)
    }

    /// Window of group `a` that can meet `-S_b`, in units of `a`'s gcd.
    fn window(&self, a: u64, b: u64) -> (i64, i64) {
        let ga = self.gcd(a) as i64;
        let (alo, ahi) = self.bounds(a);
        let (blo, bhi) = if b == 0 { (0, 0) } else { self.bounds(b) };
        let lo = alo.max(-bhi);
        let hi = ahi.min(-blo);
        (lo.div_euclid(ga) + (lo.rem_euclid(ga) != 0) as i64, hi.div_euclid(ga))
    }

    fn evaluate(&self, a: u64, b: u64) -> Option<Plan> {
        let (alo, ahi) = self.window(a, b);
        let wa = (ahi - alo + 1).max(1) as u64;
        let (pa, ca, peak_a) = self.group(a, wa)?;
        if b == 0 {
            return Some(Plan {
                a: pa,
                b: None,
                cost: ca,
            });
        }
        let (blo, bhi) = self.window(b, a);
        let wb = (bhi - blo + 1).max(1) as u64;
        let (pb, cb, peak_b) = self.group(b, wb)?;
        let peak = peak_a.max(wa as f64 + peak_b);
        (peak <= MAX_SLOTS).then_some(Plan {
            a: pa,
            b: Some(pb),
            cost: ca + cb + wa.min(wb) as f64,
        })
    }

    fn best(&self) -> Result<Plan> {
        let n = self.terms.len();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut best: Option<Plan> = None;
        let mut keep = |p: Option<Plan>| {
            if let Some(p) = p {
                if best.is_none_or(|b| p.cost < b.cost) {
                    best = Some(p);
                }
            }
        };
        if n <= EXHAUSTIVE_TERMS {
            // term 0 always in A; B may be empty
            for sub in 0..1u64 << (n - 1) {
                let a = 1 | (sub << 1);
                keep(self.evaluate(a, all ^ a));
            }
        } else {
            keep(self.evaluate(all, 0));
            let (m1, m2) = self.balanced_split(all);
            keep(self.evaluate(m1, m2));
        }
        best.ok_or_else(|| {
            let (lo, hi) = self.bounds(all);
            Error::Capacity {
                what: "convolution memory (value range)",
                value: (hi - lo) as u128 + 1,
                limit: MAX_SLOTS as u128,
            }
        })
    }
}

fn term_series(t: &TermVals, g: u64) -> Series {
    let g = g as i64;
    Series::from_sorted_pairs(t.vals.iter().map(|&v| v / g).zip(t.weights.iter().copied()).collect())
}

fn full_series(terms: &[TermVals], planner: &Planner<'_>, mask: u64, g: u64) -> Result<Series> {
    let order = planner.chain_order(mask, g);
    let mut acc = term_series(&terms[order[0]], g);
    for &i in &order[1..] {
        let next = term_series(&terms[i], g);
        let (lo, hi) = (span(&acc).0 + span(&next).0, span(&acc).1 + span(&next).1);
        acc = Series::Dense(conv_window(&acc, &next, lo, hi)?);
    }
    Ok(acc)
}

fn span(s: &Series) -> (i64, i64) {
    match s {
        Series::Dense(d) => (d.offset, d.offset + d.data.len() as i64 - 1),
        Series::Sparse(p) => (p[0].0, p[p.len() - 1].0),
    }
}

fn realize(terms: &[TermVals], planner: &Planner<'_>, plan: GroupPlan, lo: i64, hi: i64) -> Result<Dense> {
    match plan {
        GroupPlan::Full(mask) => {
            let g = planner.gcd(mask);
            let order = planner.chain_order(mask, g);
            if order.len() == 1 {
                let t = &terms[order[0]];
                let mut out = Dense::zeros(lo, hi);
                for (&v, &w) in t.vals.iter().zip(&t.weights) {
                    let m = v / g as i64;
                    if (lo..=hi).contains(&m) {
                        out.data[(m - lo) as usize] = w;
                    }
                }
                return Ok(out);
            }
            // all but the last member in full, the last step only on the window
            let last = *order.last().unwrap();
            let head = full_series(terms, planner, mask & !(1 << last), g)?;
            conv_window(&head, &term_series(&terms[last], g), lo, hi)
        }
        GroupPlan::Split(m1, m2) => {
            let g = planner.gcd(m1 | m2);
            let s1 = full_series(terms, planner, m1, g)?;
            let s2 = full_series(terms, planner, m2, g)?;
            conv_window(&s1, &s2, lo, hi)
        }
    }
}

fn execute(terms: &[TermVals], planner: &Planner<'_>, plan: &Plan) -> Result<u128> {
    let mask_of = |p: GroupPlan| match p {
        GroupPlan::Full(m) => m,
        GroupPlan::Split(m1, m2) => m1 | m2,
    };
    let a = mask_of(plan.a);
    let (alo, ahi) = planner.window(a, plan.b.map_or(0, mask_of));
    if alo > ahi {
        return Ok(0);
    }
    let sa = realize(terms, planner, plan.a, alo, ahi)?;
    let Some(pb) = plan.b else {
        return Ok(sa.get(0) as u128);
    };
    let b = mask_of(pb);
    let (blo, bhi) = planner.window(b, a);
    if blo > bhi {
        return Ok(0);
    }
    let sb = realize(terms, planner, pb, blo, bhi)?;

    let ga = planner.gcd(a) as i64;
    let gb = planner.gcd(b) as i64;
    let l = ga / gcd_u64(ga as u64, gb as u64) as i64 * gb;
    // common values m (in base units) with S_A(m) S_B(-m)
    let lo = (alo * ga).max(-bhi * gb);
    let hi = (ahi * ga).min(-blo * gb);
    let mut total = 0u128;
    let mut m = lo.div_euclid(l) * l;
    if m < lo {
        m += l;
    }
    while m <= hi {
        let x = sa.get(m / ga);
        if x != 0 {
            let y = sb.get(-m / gb);
            total = total
                .checked_add(x as u128 * y as u128)
                .ok_or(Error::Overflow("solution count"))?;
        }
        m += l;
    }
    Ok(total)
}
