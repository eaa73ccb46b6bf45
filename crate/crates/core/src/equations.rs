//! Diagonal linear–quadratic equations and their partition-regularity verdicts.
//!
//! An equation `a_1 x_1^2 + ... + a_s x_s^2 = b_1 y_1 + ... + b_t y_t` is
//! stored as its two coefficient lists. [`classify`] applies the algebraic
//! criterion: a zero-sum subset of coefficients on either side is necessary,
//! and it is sufficient except for the single shape `a(x_1^2 - x_2^2) = b y^2 + c z`,
//! which is reported as conjecturally regular.

use crate::arith::gcd_u64;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Exhaustive subset search refuses lists longer than this.
pub const MAX_SUBSET_LEN: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawEquation", into = "RawEquation")]
pub struct DiagonalEquation {
    quad: Vec<i64>,
    lin: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquation {
    #[serde(default)]
    quad: Vec<i64>,
    #[serde(default)]
    lin: Vec<i64>,
}

impl TryFrom<RawEquation> for DiagonalEquation {
    type Error = Error;

    fn try_from(raw: RawEquation) -> Result<Self> {
        DiagonalEquation::new(raw.quad, raw.lin)
    }
}

impl From<DiagonalEquation> for RawEquation {
    fn from(eq: DiagonalEquation) -> Self {
        RawEquation {
            quad: eq.quad,
            lin: eq.lin,
        }
    }
}

impl DiagonalEquation {
    pub fn new(quad: Vec<i64>, lin: Vec<i64>) -> Result<Self> {
        if quad.is_empty() && lin.is_empty() {
            return Err(Error::precondition("equation has no terms"));
        }
        if quad.iter().chain(&lin).any(|&c| c == 0) {
            return Err(Error::precondition("coefficients must be nonzero"));
        }
        Ok(DiagonalEquation { quad, lin })
    }

    /// Quadratic coefficients `a_1..a_s`.
    pub fn quad(&self) -> &[i64] {
        &self.quad
    }

    /// Linear coefficients `b_1..b_t`.
    pub fn lin(&self) -> &[i64] {
        &self.lin
    }

    pub fn num_vars(&self) -> usize {
        self.quad.len() + self.lin.len()
    }

    /// The same equation multiplied through by -1.
    pub fn negated(&self) -> Self {
        DiagonalEquation {
            quad: self.quad.iter().map(|c| -c).collect(),
            lin: self.lin.iter().map(|c| -c).collect(),
        }
    }

    /// Divide every coefficient by their common gcd. Never applied implicitly.
    pub fn normalized(&self) -> Self {
        let g = self
            .quad
            .iter()
            .chain(&self.lin)
            .fold(0u64, |g, c| gcd_u64(g, c.unsigned_abs()));
        let g = g as i64;
        DiagonalEquation {
            quad: self.quad.iter().map(|c| c / g).collect(),
            lin: self.lin.iter().map(|c| c / g).collect(),
        }
    }
}

impl fmt::Display for DiagonalEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, coeffs: &[i64], var: &str, pow: &str) -> fmt::Result {
            if coeffs.is_empty() {
                return write!(f, "0");
            }
            for (i, &c) in coeffs.iter().enumerate() {
                let sign = if c < 0 { "-" } else { "+" };
                if i == 0 {
                    if c < 0 {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                let mag = c.unsigned_abs();
                if mag != 1 {
                    write!(f, "{mag}")?;
                }
                write!(f, "{var}{}{pow}", i + 1)?;
            }
            Ok(())
        }
        side(f, &self.quad, "x", "^2")?;
        write!(f, " = ")?;
        side(f, &self.lin, "y", "")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityStatus {
    Regular,
    NotRegular,
    ConjecturallyRegular,
    /// The criterion holds but no theorem covers this shape yet.
    OpenTheory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Quadratic,
    Linear,
}

/// A zero-sum subset of one side's coefficients (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub side: Side,
    pub indices: Vec<usize>,
}

/// Which result the verdict rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Justification {
    /// Linear equations: regular iff some nonempty coefficient subset sums to zero.
    RadoCriterion,
    /// No zero-sum subset on either side, so not partition regular.
    NecessaryCondition,
    /// Mixed equations outside the bad case: the subset condition is sufficient.
    LinearQuadraticCriterion,
    /// The bad case `a(x_1^2 - x_2^2) = b y^2 + c z`, conjectured regular.
    BadCaseConjecture,
    /// Homogeneous diagonal quadrics in at least five variables.
    DiagonalQuadricCriterion,
    /// Homogeneous quadric in fewer than five variables satisfying the subset condition.
    FewVariablesOpen,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub status: RegularityStatus,
    pub witness: Option<Witness>,
    pub justification: Justification,
}

/// Lexicographically least nonempty index subset (0-based, increasing) whose
/// entries sum to zero, or `None` when no such subset exists.
pub fn subset_sum_zero(coeffs: &[i64]) -> Result<Option<Vec<usize>>> {
    if coeffs.is_empty() {
        return Err(Error::precondition("subset search needs a nonempty list"));
    }
    if coeffs.len() > MAX_SUBSET_LEN {
        return Err(Error::Capacity {
            what: "subset search length",
            value: coeffs.len() as u128,
            limit: MAX_SUBSET_LEN as u128,
        });
    }
    if coeffs.contains(&0) {
        return Err(Error::precondition("coefficients must be nonzero"));
    }
    let values: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();

    // Grow the answer one index at a time, always taking the smallest index
    // that still admits a zero-sum completion. A zero partial sum stops the
    // walk because a prefix sorts before all of its extensions.
    let mut chosen = Vec::new();
    let mut sum = 0i128;
    let mut start = 0;
    loop {
        let next = (start..values.len()).find(|&j| subset_reaches(&values[j + 1..], -(sum + values[j])));
        let Some(j) = next else {
            debug_assert!(chosen.is_empty());
            return Ok(None);
        };
        chosen.push(j);
        sum += values[j];
        start = j + 1;
        if sum == 0 {
            return Ok(Some(chosen));
        }
    }
}

/// Whether some subset of `values` (the empty subset included) sums to `target`.
fn subset_reaches(values: &[i128], target: i128) -> bool {
    if target == 0 {
        return true;
    }
    let (left, right) = values.split_at(values.len() / 2);
    let left_sums = all_subset_sums(left);
    let mut right_sums = all_subset_sums(right);
    right_sums.sort_unstable();
    left_sums
        .iter()
        .any(|s| right_sums.binary_search(&(target - s)).is_ok())
}

fn all_subset_sums(values: &[i128]) -> Vec<i128> {
    let mut sums = Vec::with_capacity(1 << values.len());
    sums.push(0);
    for &v in values {
        let len = sums.len();
        for i in 0..len {
            sums.push(sums[i] + v);
        }
    }
    sums
}

/// `s = 3`, `t = 1` and two quadratic coefficients cancel.
pub fn is_bad_case(eq: &DiagonalEquation) -> bool {
    let a = eq.quad();
    if a.len() != 3 || eq.lin().len() != 1 {
        return false;
    }
    (0..3).any(|i| (i + 1..3).any(|j| a[i] + a[j] == 0))
}

pub fn classify(eq: &DiagonalEquation) -> Result<RegularityVerdict> {
    let quad_witness = if eq.quad().is_empty() {
        None
    } else {
        subset_sum_zero(eq.quad())?.map(|indices| Witness {
            side: Side::Quadratic,
            indices,
        })
    };
    let lin_witness = if eq.lin().is_empty() {
        None
    } else {
        subset_sum_zero(eq.lin())?.map(|indices| Witness {
            side: Side::Linear,
            indices,
        })
    };

    let verdict = |status, witness, justification| RegularityVerdict {
        status,
        witness,
        justification,
    };

    use Justification::*;
    use RegularityStatus::*;
    let s = eq.quad().len();
    let t = eq.lin().len();
    Ok(if s == 0 {
        match lin_witness {
            Some(w) => verdict(Regular, Some(w), RadoCriterion),
            None => verdict(NotRegular, None, RadoCriterion),
        }
    } else if t == 0 {
        match quad_witness {
            None => verdict(NotRegular, None, NecessaryCondition),
            Some(w) if s >= 5 => verdict(Regular, Some(w), DiagonalQuadricCriterion),
            Some(w) => verdict(OpenTheory, Some(w), FewVariablesOpen),
        }
    } else {
        match quad_witness.or(lin_witness) {
            None => verdict(NotRegular, None, NecessaryCondition),
            Some(w) if is_bad_case(eq) => verdict(ConjecturallyRegular, Some(w), BadCaseConjecture),
            Some(w) => verdict(Regular, Some(w), LinearQuadraticCriterion),
        }
    })
}

impl RegularityVerdict {
    /// Sum of the witnessed coefficients, in exact integer arithmetic.
    pub fn witness_sum(&self, eq: &DiagonalEquation) -> Option<i128> {
        self.witness.as_ref().map(|w| {
            let side = match w.side {
                Side::Quadratic => eq.quad(),
                Side::Linear => eq.lin(),
            };
            w.indices.iter().map(|&i| side[i] as i128).sum()
        })
    }
}
