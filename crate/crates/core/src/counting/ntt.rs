//! Exact convolution of nonnegative integer series.
//!
//! Three backends: sparse schoolbook, a single number-theoretic transform of
//! the whole product, and a blocked transform that only produces an output
//! window. Transforms run modulo one or two primes depending on an a-priori
//! bound on the result; above the two-prime range the inputs are split into
//! digits.

use crate::{Error, Result};

pub(crate) const P1: u64 = 469_762_049; // 7 * 2^26 + 1
pub(crate) const P2: u64 = 167_772_161; // 5 * 2^25 + 1
const G: u64 = 3; // primitive root of both

/// Largest transform length (both primes have 2^25-th roots of unity).
const MAX_LOG: u32 = 25;
/// Operands at most this long always use schoolbook.
pub(crate) const SCHOOLBOOK_LEN: usize = 1 << 10;
/// Relative cost of one butterfly against one schoolbook multiply-add.
const BUTTERFLY_COST: f64 = 4.0;
/// Output windows wider than this are produced chunk by chunk.
const CHUNK_WIDTH: u64 = 1 << 23;

/// `data[i]` is the value at `offset + i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Dense {
    pub offset: i64,
    pub data: Vec<u64>,
}

impl Dense {
    pub fn zeros(lo: i64, hi: i64) -> Self {
        let len = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
        Dense {
            offset: lo,
            data: vec![0; len],
        }
    }

    pub fn get(&self, m: i64) -> u64 {
        m.checked_sub(self.offset)
            .and_then(|i| usize::try_from(i).ok())
            .and_then(|i| self.data.get(i))
            .copied()
            .unwrap_or(0)
    }
}

/// A series stored densely or as sorted `(position, value)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Series {
    Dense(Dense),
    /// Strictly increasing positions, nonzero values.
    Sparse(Vec<(i64, u64)>),
}

impl Series {
    /// Sparse when at most one slot in eight is occupied.
    pub fn from_sorted_pairs(pairs: Vec<(i64, u64)>) -> Series {
        let (Some(&(lo, _)), Some(&(hi, _))) = (pairs.first(), pairs.last()) else {
            return Series::Sparse(Vec::new());
        };
        let len = (hi - lo + 1) as usize;
        if pairs.len().saturating_mul(8) <= len {
            Series::Sparse(pairs)
        } else {
            let mut d = Dense::zeros(lo, hi);
            for (m, c) in pairs {
                d.data[(m - lo) as usize] += c;
            }
            Series::Dense(d)
        }
    }

    pub fn view(&self) -> View<'_> {
        match self {
            Series::Dense(d) => View::Dense {
                offset: d.offset,
                data: &d.data,
            }
            .trimmed(i64::MIN, i64::MAX),
            Series::Sparse(p) => View::Sparse(p),
        }
    }
}

/// Borrowed series restricted to its nonzero span.
#[derive(Clone, Copy, Debug)]
pub(crate) enum View<'a> {
    Dense { offset: i64, data: &'a [u64] },
    Sparse(&'a [(i64, u64)]),
}

impl<'a> View<'a> {
    fn is_empty(&self) -> bool {
        match self {
            View::Dense { data, .. } => data.is_empty(),
            View::Sparse(p) => p.is_empty(),
        }
    }

    fn lo(&self) -> i64 {
        match self {
            View::Dense { offset, .. } => *offset,
            View::Sparse(p) => p[0].0,
        }
    }

    fn hi(&self) -> i64 {
        match self {
            View::Dense { offset, data } => offset + data.len() as i64 - 1,
            View::Sparse(p) => p[p.len() - 1].0,
        }
    }

    fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.hi() - self.lo() + 1) as usize
        }
    }

    /// Restrict to `[lo, hi]` and drop zero entries at both ends.
    fn trimmed(self, lo: i64, hi: i64) -> View<'a> {
        match self {
            View::Dense { offset, data } => {
                let lo = lo.max(offset);
                let hi = hi.min(offset + data.len() as i64 - 1);
                if lo > hi {
                    return View::Dense { offset, data: &[] };
                }
                let slice = &data[(lo - offset) as usize..=(hi - offset) as usize];
                match slice.iter().position(|&c| c != 0) {
                    None => View::Dense { offset, data: &[] },
                    Some(first) => {
                        let last = slice.iter().rposition(|&c| c != 0).unwrap();
                        View::Dense {
                            offset: lo + first as i64,
                            data: &slice[first..=last],
                        }
                    }
                }
            }
            View::Sparse(p) => {
                let start = p.partition_point(|&(m, _)| m < lo);
                let end = p.partition_point(|&(m, _)| m <= hi);
                View::Sparse(&p[start..end.max(start)])
            }
        }
    }

    fn nonzeros(&self) -> Vec<(i64, u64)> {
        match self {
            View::Dense { offset, data } => data
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (offset + i as i64, c))
                .collect(),
            View::Sparse(p) => p.to_vec(),
        }
    }

    fn nnz(&self) -> usize {
        match self {
            View::Dense { data, .. } => data.iter().filter(|&&c| c != 0).count(),
            View::Sparse(p) => p.len(),
        }
    }

    fn stats(&self) -> (u128, u64) {
        let mut sum = 0u128;
        let mut max = 0u64;
        let mut visit = |c: u64| {
            sum += c as u128;
            max = max.max(c);
        };
        match self {
            View::Dense { data, .. } => data.iter().for_each(|&c| visit(c)),
            View::Sparse(p) => p.iter().for_each(|&(_, c)| visit(c)),
        }
        (sum, max)
    }

    /// `buf[k] = value at start + k`.
    fn fill(&self, start: i64, buf: &mut [u64]) -> bool {
        buf.fill(0);
        let end = start + buf.len() as i64 - 1;
        let mut any = false;
        match *self {
            View::Dense { offset, data } => {
                let lo = start.max(offset);
                let hi = end.min(offset + data.len() as i64 - 1);
                if lo <= hi {
                    let src = &data[(lo - offset) as usize..=(hi - offset) as usize];
                    buf[(lo - start) as usize..=(hi - start) as usize].copy_from_slice(src);
                    any = src.iter().any(|&c| c != 0);
                }
            }
            View::Sparse(p) => {
                let first = p.partition_point(|&(m, _)| m < start);
                for &(m, c) in p[first..].iter().take_while(|&&(m, _)| m <= end) {
                    buf[(m - start) as usize] = c;
                    any = true;
                }
            }
        }
        any
    }

    fn map_values(&self, f: impl Fn(u64) -> u64) -> Series {
        match *self {
            View::Dense { offset, data } => Series::Dense(Dense {
                offset,
                data: data.iter().map(|&c| f(c)).collect(),
            }),
            View::Sparse(p) => Series::Sparse(p.iter().map(|&(m, c)| (m, f(c))).filter(|&(_, c)| c != 0).collect()),
        }
    }
}

/// Shape summary used for cost estimates.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Shape {
    pub len: f64,
    pub nnz: f64,
}

fn ceil_log2(n: u64) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros()
}

fn transform_cost(log: u32) -> f64 {
    // two primes, three transforms each
    2.0 * 3.0 * (1u64 << log) as f64 * log as f64 / 2.0 * BUTTERFLY_COST
}

/// Block transform length (log2) and block size for an output window of width `w`.
fn block_geometry(w: u64) -> (u32, u64) {
    let log = ceil_log2(4 * w).clamp(12, MAX_LOG);
    let l = 1u64 << log;
    (log, l.saturating_sub(w - 1).max(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Schoolbook,
    Direct,
    Blocked,
}

fn costs(a: Shape, b: Shape, w: u64) -> [(Method, f64); 3] {
    let school = a.nnz.min(b.nnz) * a.nnz.max(b.nnz).min(w as f64) + a.nnz + b.nnz;
    let full_len = (a.len + b.len - 1.0).max(1.0) as u64;
    let direct = if ceil_log2(full_len) <= MAX_LOG {
        transform_cost(ceil_log2(full_len))
    } else {
        f64::INFINITY
    };
    let chunks = w.div_ceil(CHUNK_WIDTH) as f64;
    let (log, block) = block_geometry(w.min(CHUNK_WIDTH));
    let blocks = (a.len.max(b.len) / block as f64).ceil();
    let blocked = chunks * blocks * transform_cost(log);
    [
        (Method::Schoolbook, school),
        (Method::Direct, direct),
        (Method::Blocked, blocked),
    ]
}

fn choose(a: Shape, b: Shape, w: u64) -> (Method, f64) {
    let all = costs(a, b, w);
    if a.len.max(b.len) <= SCHOOLBOOK_LEN as f64 {
        return all[0];
    }
    all.into_iter().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap()
}

/// Estimated cost of [`conv_window`] for operands of the given shapes and an
/// output window of width `w`.
pub(crate) fn estimate(a: Shape, b: Shape, w: u64) -> f64 {
    choose(a, b, w).1
}

/// `out[m] = sum_i a[i] b[m - i]` for `m` in `[lo, hi]`.
pub(crate) fn conv_window(a: &Series, b: &Series, lo: i64, hi: i64) -> Result<Dense> {
    conv_views(a.view(), b.view(), lo, hi)
}

fn conv_views(a: View<'_>, b: View<'_>, lo: i64, hi: i64) -> Result<Dense> {
    let mut out = Dense::zeros(lo, hi);
    if out.data.is_empty() || a.is_empty() || b.is_empty() {
        return Ok(out);
    }
    let a = a.trimmed(lo - b.hi(), hi - b.lo());
    if a.is_empty() {
        return Ok(out);
    }
    let b = b.trimmed(lo - a.hi(), hi - a.lo());
    if b.is_empty() {
        return Ok(out);
    }
    let wlo = lo.max(a.lo() + b.lo());
    let whi = hi.min(a.hi() + b.hi());
    if wlo > whi {
        return Ok(out);
    }
    let part = conv_exact(a, b, wlo, whi)?;
    let start = (wlo - lo) as usize;
    out.data[start..start + part.len()].copy_from_slice(&part);
    Ok(out)
}

fn conv_exact(a: View<'_>, b: View<'_>, wlo: i64, whi: i64) -> Result<Vec<u64>> {
    let (sum_a, max_a) = a.stats();
    let (sum_b, max_b) = b.stats();
    let bound = (sum_a.saturating_mul(max_b as u128)).min(sum_b.saturating_mul(max_a as u128));
    if bound >= P1 as u128 * P2 as u128 {
        return split_digits(a, b, max_a, max_b, wlo, whi);
    }
    let primes = if bound < P1 as u128 { 1 } else { 2 };
    let w = (whi - wlo + 1) as u64;
    let shape = |v: &View<'_>| Shape {
        len: v.len() as f64,
        nnz: v.nnz() as f64,
    };
    match choose(shape(&a), shape(&b), w).0 {
        Method::Schoolbook => schoolbook(a, b, wlo, whi),
        Method::Direct => Ok(direct(a, b, wlo, whi, primes)),
        Method::Blocked => {
            let (x, y) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            let mut out = Vec::with_capacity(w as usize);
            let mut clo = wlo;
            while clo <= whi {
                let chi = whi.min(clo + CHUNK_WIDTH as i64 - 1);
                out.extend(blocked(x, y, clo, chi, primes));
                clo = chi + 1;
            }
            Ok(out)
        }
    }
}

/// Split the operand with the larger entries into low and high digits.
fn split_digits(a: View<'_>, b: View<'_>, max_a: u64, max_b: u64, wlo: i64, whi: i64) -> Result<Vec<u64>> {
    let (x, y, max_x) = if max_a >= max_b { (a, b, max_a) } else { (b, a, max_b) };
    let shift = (64 - max_x.leading_zeros()).div_ceil(2);
    let mask = (1u64 << shift) - 1;
    let low = x.map_values(|c| c & mask);
    let high = x.map_values(|c| c >> shift);
    let lo_part = conv_views(low.view(), y, wlo, whi)?;
    let hi_part = conv_views(high.view(), y, wlo, whi)?;
    lo_part
        .data
        .iter()
        .zip(&hi_part.data)
        .map(|(&l, &h)| {
            h.checked_mul(1 << shift)
                .and_then(|h| h.checked_add(l))
                .ok_or(Error::Overflow("convolution entry"))
        })
        .collect()
}

fn schoolbook(a: View<'_>, b: View<'_>, wlo: i64, whi: i64) -> Result<Vec<u64>> {
    let mut out = vec![0u64; (whi - wlo + 1) as usize];
    let (a, b) = if a.nnz() <= b.nnz() { (a, b) } else { (b, a) };
    let nz_b = b.nonzeros();
    for (ia, ca) in a.nonzeros() {
        let start = nz_b.partition_point(|&(j, _)| j < wlo - ia);
        for &(j, cb) in nz_b[start..].iter().take_while(|&&(j, _)| j <= whi - ia) {
            let slot = &mut out[(ia + j - wlo) as usize];
            *slot = ca
                .checked_mul(cb)
                .and_then(|p| slot.checked_add(p))
                .ok_or(Error::Overflow("convolution entry"))?;
        }
    }
    Ok(out)
}

fn direct(a: View<'_>, b: View<'_>, wlo: i64, whi: i64, primes: usize) -> Vec<u64> {
    let l = (a.len() + b.len() - 1).next_power_of_two();
    let mut xa = vec![0u64; a.len()];
    let mut xb = vec![0u64; b.len()];
    a.fill(a.lo(), &mut xa);
    b.fill(b.lo(), &mut xb);
    let first = (wlo - a.lo() - b.lo()) as usize;
    let count = (whi - wlo + 1) as usize;
    let r1 = cyclic::<P1>(&xa, &xb, l);
    if primes == 1 {
        return r1[first..first + count].to_vec();
    }
    let r2 = cyclic::<P2>(&xa, &xb, l);
    (first..first + count).map(|t| crt(r1[t], r2[t])).collect()
}

/// Window of `x * y` computed block by block over `x`; each block meets the
/// slice of `y` that can reach the window, in one cyclic transform.
fn blocked(x: View<'_>, y: View<'_>, wlo: i64, whi: i64, primes: usize) -> Vec<u64> {
    let w = (whi - wlo + 1) as usize;
    let (log, block) = block_geometry(w as u64);
    let l = 1usize << log;
    let block = block as usize;
    let mut acc1 = vec![0u64; w];
    let mut acc2 = if primes == 2 { vec![0u64; w] } else { Vec::new() };
    let mut xs = vec![0u64; block];
    let mut ys = vec![0u64; block + w - 1];
    let off = block - 1;
    let mut start = x.lo();
    while start <= x.hi() {
        let block_start = start;
        start += block as i64;
        if !x.fill(block_start, &mut xs) {
            continue;
        }
        // y positions that meet this block inside the window
        if !y.fill(wlo - block_start - block as i64 + 1, &mut ys) {
            continue;
        }
        let r1 = cyclic::<P1>(&xs, &ys, l);
        for (t, acc) in acc1.iter_mut().enumerate() {
            *acc = (*acc + r1[off + t]) % P1;
        }
        if primes == 2 {
            let r2 = cyclic::<P2>(&xs, &ys, l);
            for (t, acc) in acc2.iter_mut().enumerate() {
                *acc = (*acc + r2[off + t]) % P2;
            }
        }
    }
    if primes == 1 {
        acc1
    } else {
        acc1.iter().zip(&acc2).map(|(&u, &v)| crt(u, v)).collect()
    }
}

const fn pow_mod<const P: u64>(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    base %= P;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % P;
        }
        base = base * base % P;
        exp >>= 1;
    }
    acc
}

fn transform<const P: u64>(a: &mut [u64], inverse: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut twiddles = Vec::with_capacity(n / 2);
    let mut len = 2;
    while len <= n {
        let mut root = pow_mod::<P>(G, (P - 1) / len as u64);
        if inverse {
            root = pow_mod::<P>(root, P - 2);
        }
        twiddles.clear();
        let mut t = 1;
        for _ in 0..len / 2 {
            twiddles.push(t);
            t = t * root % P;
        }
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for ((u, v), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let x = *u;
                let y = *v * tw % P;
                *u = if x + y >= P { x + y - P } else { x + y };
                *v = if x >= y { x - y } else { x + P - y };
            }
        }
        len <<= 1;
    }
    if inverse {
        let n_inv = pow_mod::<P>(n as u64, P - 2);
        for v in a.iter_mut() {
            *v = *v * n_inv % P;
        }
    }
}

/// Cyclic convolution of length `l` modulo `P`.
fn cyclic<const P: u64>(a: &[u64], b: &[u64], l: usize) -> Vec<u64> {
    let mut fa = vec![0u64; l];
    let mut fb = vec![0u64; l];
    for (d, &s) in fa.iter_mut().zip(a) {
        *d = s % P;
    }
    for (d, &s) in fb.iter_mut().zip(b) {
        *d = s % P;
    }
    transform::<P>(&mut fa, false);
    transform::<P>(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % P;
    }
    transform::<P>(&mut fa, true);
    fa
}

/// The unique value below `P1 * P2` with the given residues.
fn crt(r1: u64, r2: u64) -> u64 {
    const INV: u64 = pow_mod::<P2>(P1, P2 - 2);
    let diff = (r2 + P2 - r1 % P2) % P2;
    r1 + P1 * (diff * INV % P2)
}
