use super::CountQuery;
use crate::{Error, Result};

/// Enumeration budget: product of constraint-set sizes.
pub const BRUTE_LIMIT: u128 = 100_000_000;

/// Exact count by nested enumeration.
///
/// Variables are visited smallest set first. At each level only values that
/// keep the partial sum reachable by the remaining variables are tried, and
/// the last variable is found by binary search.
pub fn count_brute(q: &CountQuery) -> Result<u128> {
    let mut terms = q.signed_terms()?;
    if terms.iter().any(|t| t.is_empty()) {
        return Ok(0);
    }
    let size = terms
        .iter()
        .try_fold(1u128, |acc, t| acc.checked_mul(t.len() as u128))
        .unwrap_or(u128::MAX);
    if size > BRUTE_LIMIT {
        return Err(Error::Capacity {
            what: "brute-force enumeration size",
            value: size,
            limit: BRUTE_LIMIT,
        });
    }
    terms.sort_by_key(|t| t.len());
    for t in &mut terms {
        t.sort_unstable_by_key(|&(v, _)| v);
    }

    // suffix_min[k] / suffix_max[k]: extreme sums of terms k..
    let n = terms.len();
    let mut suffix_min = vec![0i128; n + 1];
    let mut suffix_max = vec![0i128; n + 1];
    for k in (0..n).rev() {
        suffix_min[k] = suffix_min[k + 1] + terms[k][0].0;
        suffix_max[k] = suffix_max[k + 1] + terms[k].last().unwrap().0;
    }

    let mut total = 0u128;
    descend(&terms, &suffix_min, &suffix_max, 0, 0, 1, &mut total)?;
    Ok(total)
}

fn descend(
    terms: &[Vec<(i128, u64)>],
    suffix_min: &[i128],
    suffix_max: &[i128],
    k: usize,
    partial: i128,
    weight: u128,
    total: &mut u128,
) -> Result<()> {
    let need = -partial;
    let values = &terms[k];
    if k + 1 == terms.len() {
        if let Ok(i) = values.binary_search_by_key(&need, |&(v, _)| v) {
            let add = weight
                .checked_mul(values[i].1 as u128)
                .ok_or(Error::Overflow("brute-force count"))?;
            *total = total.checked_add(add).ok_or(Error::Overflow("brute-force count"))?;
        }
        return Ok(());
    }
    let lo = need - suffix_max[k + 1];
    let hi = need - suffix_min[k + 1];
    let start = values.partition_point(|&(v, _)| v < lo);
    for &(v, w) in values[start..].iter().take_while(|&&(v, _)| v <= hi) {
        let next = weight
            .checked_mul(w as u128)
            .ok_or(Error::Overflow("brute-force count"))?;
        descend(terms, suffix_min, suffix_max, k + 1, partial + v, next, total)?;
    }
    Ok(())
}
