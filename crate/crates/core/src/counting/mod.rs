//! Exact solution counts for diagonal equations with per-variable constraints.
//!
//! A [`CountQuery`] is `sum(lhs terms) = sum(rhs terms)`, each [`Term`] being
//! `scale * coeff * x^e` with `x` drawn from its own [`WeightedSet`]. A tuple
//! contributes the product of the weights of its entries, so plain sets
//! (weight 1) give ordinary counts.
//!
//! [`count_brute`] enumerates; [`count_convolution`] convolves representation
//! series exactly. Both return `u128`.

mod brute;
mod engine;
mod ntt;
mod scaling;

pub use brute::count_brute;
pub use scaling::{
    fit_power_law, scaling_experiment, scaling_row, ColouringFamily, PowerFit, ScalingResult, ScalingRow,
};

use crate::colourings::Colouring;
use crate::equations::DiagonalEquation;
use crate::{Error, Result};

/// Largest dense series [`representation_series`] will materialise.
pub const MAX_SERIES_LEN: u128 = 1 << 28;

/// Largest interval [`WeightedSet::interval`] will materialise (1 GiB of pairs).
pub const MAX_SET_LEN: u64 = 1 << 26;

/// A finite set of positive integers with positive integer weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedSet {
    /// Strictly increasing elements, each with weight >= 1.
    elems: Vec<(u64, u64)>,
}

impl WeightedSet {
    /// Plain set (weight 1); duplicates are merged.
    pub fn from_elements(elems: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::from_weighted(elems.into_iter().map(|x| (x, 1)))
    }

    /// Weighted multiset; weights of repeated elements add up, zero weights are dropped.
    pub fn from_weighted(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut elems: Vec<(u64, u64)> = pairs.into_iter().filter(|&(_, w)| w > 0).collect();
        if elems.iter().any(|&(x, _)| x == 0) {
            return Err(Error::precondition("constraint sets hold positive integers only"));
        }
        elems.sort_unstable_by_key(|&(x, _)| x);
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(elems.len());
        for (x, w) in elems {
            match merged.last_mut() {
                Some((y, acc)) if *y == x => {
                    *acc = acc.checked_add(w).ok_or(Error::Overflow("set weight"))?;
                }
                _ => merged.push((x, w)),
            }
        }
        Ok(WeightedSet { elems: merged })
    }

    /// `{lo, ..., hi}`; empty when `lo > hi`.
    pub fn interval(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 && hi > 0 {
            return Err(Error::precondition("constraint sets hold positive integers only"));
        }
        let len = hi.saturating_sub(lo.max(1)).saturating_add(1);
        if lo.max(1) <= hi && len > MAX_SET_LEN {
            return Err(Error::Capacity {
                what: "interval length",
                value: len as u128,
                limit: MAX_SET_LEN as u128,
            });
        }
        Ok(WeightedSet {
            elems: (lo.max(1)..=hi).map(|x| (x, 1)).collect(),
        })
    }

    pub fn empty() -> Self {
        WeightedSet::default()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.elems.iter().copied()
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        self.elems.iter().map(|&(x, _)| x)
    }

    pub fn total_weight(&self) -> u128 {
        self.elems.iter().map(|&(_, w)| w as u128).sum()
    }

    pub fn max(&self) -> Option<u64> {
        self.elems.last().map(|&(x, _)| x)
    }

    pub fn weight(&self, x: u64) -> u64 {
        self.elems
            .binary_search_by_key(&x, |&(y, _)| y)
            .map_or(0, |i| self.elems[i].1)
    }
}

/// `scale * coeff * x^exponent` with `x` ranging over `support`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    coeff: i64,
    exponent: u32,
    scale: u64,
    support: WeightedSet,
}

impl Term {
    pub fn new(coeff: i64, exponent: u32, scale: u64, support: WeightedSet) -> Result<Self> {
        if coeff == 0 {
            return Err(Error::precondition("term coefficient must be nonzero"));
        }
        if !(1..=2).contains(&exponent) {
            return Err(Error::precondition(format!("exponent {exponent} is not 1 or 2")));
        }
        if scale == 0 {
            return Err(Error::precondition("term scale must be positive"));
        }
        Ok(Term {
            coeff,
            exponent,
            scale,
            support,
        })
    }

    pub fn linear(coeff: i64, support: WeightedSet) -> Result<Self> {
        Self::new(coeff, 1, 1, support)
    }

    pub fn square(coeff: i64, support: WeightedSet) -> Result<Self> {
        Self::new(coeff, 2, 1, support)
    }

    pub fn with_scale(mut self, scale: u64) -> Result<Self> {
        if scale == 0 {
            return Err(Error::precondition("term scale must be positive"));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn coeff(&self) -> i64 {
        self.coeff
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn support(&self) -> &WeightedSet {
        &self.support
    }

    /// `scale * coeff * x^exponent`, checked.
    pub fn value(&self, x: u64) -> Result<i128> {
        let power = (x as i128)
            .checked_pow(self.exponent)
            .ok_or(Error::Overflow("term value"))?;
        (self.scale as i128)
            .checked_mul(self.coeff as i128)
            .and_then(|m| m.checked_mul(power))
            .ok_or(Error::Overflow("term value"))
    }

    /// `(value, weight)` pairs sorted by value, with `sign` (+1 / -1) applied.
    pub(crate) fn signed_values(&self, sign: i128) -> Result<Vec<(i128, u64)>> {
        let mut out = self
            .support
            .iter()
            .map(|(x, w)| Ok((sign * self.value(x)?, w)))
            .collect::<Result<Vec<_>>>()?;
        // values are monotone in x; reverse for negative effective coefficients
        if sign * (self.coeff as i128) < 0 {
            out.reverse();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountQuery {
    lhs: Vec<Term>,
    rhs: Vec<Term>,
}

impl CountQuery {
    /// An empty side stands for the constant 0.
    pub fn new(lhs: Vec<Term>, rhs: Vec<Term>) -> Result<Self> {
        if lhs.is_empty() && rhs.is_empty() {
            return Err(Error::precondition("a count query needs at least one term"));
        }
        Ok(CountQuery { lhs, rhs })
    }

    /// The equation `sum a_i x_i^2 = sum b_j y_j` with `x_i` in `quad_sets[i]`
    /// and `y_j` in `lin_sets[j]`.
    pub fn from_equation(
        eq: &DiagonalEquation,
        quad_sets: Vec<WeightedSet>,
        lin_sets: Vec<WeightedSet>,
    ) -> Result<Self> {
        if quad_sets.len() != eq.quad().len() || lin_sets.len() != eq.lin().len() {
            return Err(Error::precondition("one constraint set per variable is required"));
        }
        let lhs = eq
            .quad()
            .iter()
            .zip(quad_sets)
            .map(|(&a, s)| Term::square(a, s))
            .collect::<Result<_>>()?;
        let rhs = eq
            .lin()
            .iter()
            .zip(lin_sets)
            .map(|(&b, s)| Term::linear(b, s))
            .collect::<Result<_>>()?;
        Self::new(lhs, rhs)
    }

    /// Every variable constrained to the same set.
    pub fn uniform(eq: &DiagonalEquation, set: &WeightedSet) -> Result<Self> {
        Self::from_equation(
            eq,
            vec![set.clone(); eq.quad().len()],
            vec![set.clone(); eq.lin().len()],
        )
    }

    pub fn lhs(&self) -> &[Term] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[Term] {
        &self.rhs
    }

    pub fn swapped(&self) -> Self {
        CountQuery {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }

    /// All terms moved to the left: `(value, weight)` lists whose entries must sum to 0.
    pub(crate) fn signed_terms(&self) -> Result<Vec<Vec<(i128, u64)>>> {
        self.lhs
            .iter()
            .map(|t| t.signed_values(1))
            .chain(self.rhs.iter().map(|t| t.signed_values(-1)))
            .collect()
    }
}

/// Dense `m -> #{x in support : scale * coeff * x^e = m}` (weighted), from the
/// smallest attained value `offset` to the largest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationSeries {
    pub offset: i128,
    pub counts: Vec<u64>,
}

impl RepresentationSeries {
    pub fn get(&self, m: i128) -> u64 {
        m.checked_sub(self.offset)
            .and_then(|i| usize::try_from(i).ok())
            .and_then(|i| self.counts.get(i))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// `(value, count)` for the nonzero entries.
    pub fn support(&self) -> impl Iterator<Item = (i128, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (self.offset + i as i128, c))
    }
}

pub fn representation_series(t: &Term) -> Result<RepresentationSeries> {
    let values = t.signed_values(1)?;
    let (Some(&(lo, _)), Some(&(hi, _))) = (values.first(), values.last()) else {
        return Ok(RepresentationSeries {
            offset: 0,
            counts: Vec::new(),
        });
    };
    let len = (hi - lo) as u128 + 1;
    if len > MAX_SERIES_LEN {
        return Err(Error::Capacity {
            what: "representation series length",
            value: len,
            limit: MAX_SERIES_LEN,
        });
    }
    let mut counts = vec![0u64; len as usize];
    for (v, w) in values {
        counts[(v - lo) as usize] += w;
    }
    Ok(RepresentationSeries { offset: lo, counts })
}

/// Exact count through convolution of representation series.
pub fn count_convolution(q: &CountQuery) -> Result<u128> {
    engine::count(q)
}

/// Per-colour monochromatic counts for one equation under one colouring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonochromaticCounts {
    /// Entry `j - 1` is the count with every variable in colour class `j`.
    pub per_colour: Vec<u128>,
    /// Colour (1-based) with the largest count; lowest index on ties.
    pub argmax: u32,
    pub max: u128,
}

pub fn count_monochromatic(eq: &DiagonalEquation, c: &Colouring) -> Result<MonochromaticCounts> {
    let per_colour = c
        .classes()
        .into_iter()
        .map(|class| {
            if class.is_empty() {
                return Ok(0);
            }
            let set = WeightedSet::from_elements(class)?;
            count_convolution(&CountQuery::uniform(eq, &set)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let (argmax, max) = per_colour
        .iter()
        .enumerate()
        .fold((0, 0), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(MonochromaticCounts {
        per_colour,
        argmax: argmax as u32 + 1,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u64]) -> WeightedSet {
        WeightedSet::from_elements(xs.iter().copied()).unwrap()
    }

    #[test]
    fn series_examples() {
        let sq = representation_series(&Term::square(1, set(&[1, 2, 3])).unwrap()).unwrap();
        assert_eq!(sq.offset, 1);
        assert_eq!(sq.support().collect::<Vec<_>>(), vec![(1, 1), (4, 1), (9, 1)]);

        let neg = representation_series(&Term::linear(-1, set(&[1, 2])).unwrap()).unwrap();
        assert_eq!(neg.offset, -2);
        assert_eq!(neg.counts, vec![1, 1]);

        let scaled = Term::square(2, set(&[1, 2])).unwrap().with_scale(3).unwrap();
        let s = representation_series(&scaled).unwrap();
        assert_eq!(s.support().collect::<Vec<_>>(), vec![(6, 1), (24, 1)]);
        assert_eq!(s.total(), 2);
    }

    #[test]
    fn series_capacity() {
        let t = Term::square(1, set(&[1, 1 << 20])).unwrap();
        assert!(representation_series(&t).unwrap_err().is_capacity());
        let huge = Term::square(i64::MAX, set(&[u64::MAX])).unwrap();
        assert!(representation_series(&huge).unwrap_err().is_capacity());
    }

    #[test]
    fn weighted_set_merges() {
        let s = WeightedSet::from_weighted([(3, 2), (1, 1), (3, 5), (2, 0)]).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(1, 1), (3, 7)]);
        assert!(WeightedSet::from_elements([0]).is_err());
        assert!(WeightedSet::interval(5, 4).unwrap().is_empty());
    }

    #[test]
    fn monochromatic_examples() {
        let eq = DiagonalEquation::new(vec![1], vec![1, -1]).unwrap();
        let one = Colouring::new(1, vec![1; 5]).unwrap();
        let res = count_monochromatic(&eq, &one).unwrap();
        assert_eq!(res.per_colour, vec![5]);

        let parity = crate::colourings::congruence_colouring(8, 2).unwrap();
        let res = count_monochromatic(&eq, &parity).unwrap();
        // colour 1 = even numbers, colour 2 = odd numbers
        assert_eq!(res.per_colour, vec![2, 0]);
        assert_eq!(res.argmax, 1);
        assert_eq!(res.max, 2);
    }
}
