use crate::counting::{count_convolution, CountQuery, Term, WeightedSet};
use crate::{Error, Result};

/// `int_T |F_1(alpha) ... F_k(alpha)|^p d alpha` for even `p`, exactly.
///
/// Component `c` is `F_c(alpha) = sum_x w_c(x) e(alpha coeff scale x^e)`,
/// described by a [`Term`]. By orthogonality the integral is the weighted
/// number of solutions of the equation with `p/2` copies of every component
/// on each side, which is handed to the counting engine.
pub fn lp_moment_even(components: &[Term], p: u32) -> Result<u128> {
    if !matches!(p, 2 | 4 | 6 | 8) {
        return Err(Error::precondition(format!("p = {p} must be one of 2, 4, 6, 8")));
    }
    if components.is_empty() {
        return Err(Error::precondition("at least one component is needed"));
    }
    let side: Vec<Term> = components
        .iter()
        .flat_map(|c| std::iter::repeat(c.clone()).take(p as usize / 2))
        .collect();
    count_convolution(&CountQuery::new(side.clone(), side)?)
}

/// `int |sum_{x in (N/2, N]} e(W alpha x^2) sum_{y in (N/2, N]} e(alpha y)|^p`.
pub fn mixed_moment(n: u64, w: u64, p: u32) -> Result<u128> {
    let range = WeightedSet::interval(n / 2 + 1, n)?;
    let quad = Term::square(1, range.clone())?.with_scale(w)?;
    let lin = Term::linear(1, range)?;
    lp_moment_even(&[quad, lin], p)
}
