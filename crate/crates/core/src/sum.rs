//! Lower and upper bounds on the sum of variances `V(A) + V(B)`.
//!
//! Starting from the parallelogram identity
//! `|x|^2 + |y|^2 = 1/2 |x + y|^2 + 1/2 |x - y|^2`, each half is lowered with
//! the rearrangement inequality by pairing a component with a relabeled one.

use serde::{Deserialize, Serialize};

use crate::config::BoundConfig;
use crate::error::{Error, Result};
use crate::perm::{argsort_desc, Permutation};
use crate::product::{best_of, UpperBound};
use crate::quantum::{coefficients_basis, variance, Basis, CoefficientPair, Observable, QuantumState};

/// Direct, relabeled and reverse pairings of two descending sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RearrangementSums {
    pub direct: f64,
    pub random: f64,
    pub reverse: f64,
    pub permutation_used: Permutation,
}

pub fn rearrangement_sums(x: &[f64], y: &[f64], pi: &Permutation) -> Result<RearrangementSums> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.len() });
    }
    pi.check_len(n)?;
    for v in [x, y] {
        if let Some(index) = v.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidCoefficient { index });
        }
        if let Some(i) = v.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::Unsorted { index: i + 1 });
        }
    }
    Ok(RearrangementSums {
        direct: x.iter().zip(y).map(|(a, b)| a * b).sum(),
        random: (0..n).map(|i| x[i] * y[pi.apply(i)]).sum(),
        reverse: (0..n).map(|i| x[i] * y[n - 1 - i]).sum(),
        permutation_used: pi.clone(),
    })
}

/// `(1/2 sum (x_i + y_i)^2, 1/2 sum (x_i - y_i)^2)`.
pub fn parallelogram(pair: &CoefficientPair) -> (f64, f64) {
    let (mut plus, mut minus) = (0.0, 0.0);
    for (&x, &y) in pair.x().iter().zip(pair.y()) {
        plus += (x + y) * (x + y);
        minus += (x - y) * (x - y);
    }
    (0.5 * plus, 0.5 * minus)
}

/// `x_i + y_i` and `|x_i - y_i|`, each sorted descending.
fn sorted_frames(pair: &CoefficientPair) -> (Vec<f64>, Vec<f64>) {
    let s: Vec<f64> = pair.x().iter().zip(pair.y()).map(|(a, b)| a + b).collect();
    let d: Vec<f64> = pair.x().iter().zip(pair.y()).map(|(a, b)| (a - b).abs()).collect();
    (argsort_desc(&s).permute(&s), argsort_desc(&d).permute(&d))
}

/// `1/2 sum s_i s_{pi1(i)} + 1/2 sum d_i d_{pi2(i)}` where `s = x + y` and
/// `d = |x - y|` are each sorted descending before pairing. Identity
/// permutations reproduce `V(A) + V(B)`; anything else lowers it.
pub fn permuted_sum_bound(pair: &CoefficientPair, pi1: &Permutation, pi2: &Permutation) -> Result<f64> {
    let n = pair.n();
    pi1.check_len(n)?;
    pi2.check_len(n)?;
    let (s, d) = sorted_frames(pair);
    let plus: f64 = (0..n).map(|i| s[i] * s[pi1.apply(i)]).sum();
    let minus: f64 = (0..n).map(|i| d[i] * d[pi2.apply(i)]).sum();
    Ok(0.5 * plus + 0.5 * minus)
}

/// [`permuted_sum_bound`] with `pi1 = id` and `pi2` the n-cycle `i -> i + 1`.
pub fn l2(pair: &CoefficientPair) -> f64 {
    l2_with(pair, &Permutation::cycle(pair.n())).expect("cycle has the pair's length")
}

/// [`permuted_sum_bound`] with `pi1 = id` and a caller-chosen `pi2`.
pub fn l2_with(pair: &CoefficientPair, pi2: &Permutation) -> Result<f64> {
    permuted_sum_bound(pair, &Permutation::identity(pair.n()), pi2)
}

/// `1/2 sum (x_i + y_i)^2`: the sum bound with the difference half dropped.
pub fn mondal_sum_bound(pair: &CoefficientPair) -> f64 {
    parallelogram(pair).0
}

/// `sum (x_i + y_i)^2`, an upper bound on `|x|^2 + |y|^2`.
pub fn u2(pair: &CoefficientPair) -> f64 {
    2.0 * parallelogram(pair).0
}

/// [`u2`] for coefficients expanded in `basis`; requires a pure state.
pub fn u2_state(state: &QuantumState, a: &Observable, b: &Observable, basis: &Basis) -> Result<f64> {
    Ok(u2(&coefficients_basis(state, a, b, basis)?))
}

/// `[lower, upper]` bracketing `V(A) + V(B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumInterval {
    pub lower: f64,
    pub lower_label: String,
    pub upper: UpperBound,
    pub sum: f64,
}

impl SumInterval {
    pub fn contains(&self, rel: f64) -> bool {
        use crate::tolerance::le_within;
        le_within(self.lower, self.sum, rel) && self.upper.finite().is_none_or(|u| le_within(self.sum, u, rel))
    }
}

pub fn sum_interval(state: &QuantumState, a: &Observable, b: &Observable, config: &BoundConfig) -> Result<SumInterval> {
    let pair = config.coefficients(state, a, b)?;
    let sum = variance(state, a)? + variance(state, b)?;
    let l2 = l2_with(&pair, &config.pi2_for(pair.n()))?;
    let (lower, lower_label) = best_of(&[("l2", l2), ("mondal_sum", mondal_sum_bound(&pair))]);
    Ok(SumInterval { lower, lower_label, upper: UpperBound::Finite(u2(&pair)), sum })
}
