use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::AlgebraError;

/// Parses `"a/b"` or `"a"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, AlgebraError> {
    let bad = || AlgebraError::BadRational(text.to_string());
    let (num, den) = match text.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// `ε² (2 - 2ε)^(k-2)` for `k ≥ 2`.
pub fn gs_bound(epsilon: &BigRational, k: usize) -> BigRational {
    assert!(k >= 2, "the bound is stated for k >= 2");
    let two = BigRational::from_integer(2.into());
    let base = &two - &two * epsilon;
    epsilon * epsilon * Pow::pow(base, (k - 2) as u32)
}

/// Generator counts `n_k` together with the chosen `ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsBudget {
    epsilon: BigRational,
    counts: BTreeMap<usize, usize>,
}

impl GsBudget {
    pub fn new(epsilon: BigRational) -> Result<Self, AlgebraError> {
        if epsilon <= BigRational::zero() || epsilon > BigRational::one() {
            return Err(AlgebraError::Epsilon(epsilon.to_string()));
        }
        Ok(Self { epsilon, counts: BTreeMap::new() })
    }

    pub fn with_counts(
        epsilon: BigRational,
        counts: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, AlgebraError> {
        let mut budget = Self::new(epsilon)?;
        for (k, n) in counts {
            budget.set(k, n);
        }
        Ok(budget)
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn set(&mut self, k: usize, n: usize) {
        if n == 0 {
            self.counts.remove(&k);
        } else {
            self.counts.insert(k, n);
        }
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GsVerdict {
    Pass { checked_through: usize },
    Fail { degree: usize, count: usize, bound: BigRational },
    /// `n_0` or `n_1` is nonzero.
    Precondition { degree: usize, count: usize },
}

impl GsVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, GsVerdict::Pass { .. })
    }
}

impl fmt::Display for GsVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GsVerdict::Pass { checked_through } => write!(f, "pass through k = {checked_through}"),
            GsVerdict::Fail { degree, count, bound } => {
                write!(f, "fail at k = {degree}: n_k = {count} > {bound}")
            }
            GsVerdict::Precondition { degree, count } => {
                write!(f, "precondition violated: n_{degree} = {count}, must be 0")
            }
        }
    }
}

/// Checks `n_k ≤ ε²(2-2ε)^(k-2)` for `2 ≤ k ≤ max_k` in exact arithmetic and
/// reports the first failing degree.
pub fn gs_audit(budget: &GsBudget, max_k: usize) -> GsVerdict {
    for degree in 0..2 {
        let count = budget.count(degree);
        if count > 0 {
            return GsVerdict::Precondition { degree, count };
        }
    }
    for k in 2..=max_k {
        let count = budget.count(k);
        if count == 0 {
            continue;
        }
        let bound = gs_bound(&budget.epsilon, k);
        if BigRational::from_integer(count.into()) > bound {
            return GsVerdict::Fail { degree: k, count, bound };
        }
    }
    GsVerdict::Pass { checked_through: max_k }
}
