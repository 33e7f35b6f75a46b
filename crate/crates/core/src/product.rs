//! Lower and upper bounds on the product of variances `V(A) V(B)`.
//!
//! With coefficient vectors `x`, `y` (`|x|^2 = V(A)`, `|y|^2 = V(B)`), the
//! partial Cauchy-Schwarz family
//!
//! ```text
//! I_k = sum_{i<j<=k} 2 x_i x_j y_i y_j + sum_{i<j, j>k} (x_i^2 y_j^2 + x_j^2 y_i^2) + sum_i x_i^2 y_i^2
//! ```
//!
//! interpolates between `I_0 = |x|^2 |y|^2` and `I_n = (x . y)^2`, and
//! `I_k = I_0 - sum_{i<j<=k} (x_i y_j - x_j y_i)^2` is nonincreasing in `k`.
//! Relabeling the components of `x` and `y` independently changes every `I_k`
//! except `I_0`, which is what the permutation search optimizes over.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::BoundConfig;
use crate::error::{Error, Result};
use crate::linalg::{anticommutator, commutator, inner, HermitianMatrix, C64};
use crate::perm::{argsort_asc, argsort_desc, Combinations, Permutation, Permutations};
use crate::quantum::{variance, Basis, CoefficientPair, Observable, QuantumState};

/// Largest `n` accepted by [`SearchStrategy::Exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 6;

/// Components where both coefficients are at most this are dropped by [`u1`].
pub const ZERO_COMPONENT: f64 = 1e-12;

/// `I_k` for `0 <= k <= n`.
pub fn partial_cs(pair: &CoefficientPair, k: usize) -> Result<f64> {
    let n = pair.n();
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    Ok(partial_cs_raw(pair.x(), pair.y(), k))
}

// (sum_{i<k} x_i y_i)^2 plus every remaining term, all nonnegative.
fn partial_cs_raw(x: &[f64], y: &[f64], k: usize) -> f64 {
    let head: f64 = x[..k].iter().zip(&y[..k]).map(|(a, b)| a * b).sum();
    let mut total = head * head;
    let (mut xs, mut ys) = (0.0, 0.0);
    for (j, (&xj, &yj)) in x.iter().zip(y).enumerate() {
        let (x2, y2) = (xj * xj, yj * yj);
        if j >= k {
            total += x2 * ys + y2 * xs + x2 * y2;
        }
        xs += x2;
        ys += y2;
    }
    total
}

/// The full chain `I_0, I_1, ..., I_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub values: Vec<f64>,
}

impl ChainResult {
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest relative increase `I_{k+1} - I_k` along the chain (0 when monotone).
    pub fn worst_increase(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
    }
}

pub fn chain(pair: &CoefficientPair) -> ChainResult {
    ChainResult { values: (0..=pair.n()).map(|k| partial_cs_raw(pair.x(), pair.y(), k)).collect() }
}

/// Independent relabelings of `x` (by `pi1`) and `y` (by `pi2`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PermutationPair {
    pub pi1: Permutation,
    pub pi2: Permutation,
}

impl PermutationPair {
    pub fn identity(n: usize) -> Self {
        Self { pi1: Permutation::identity(n), pi2: Permutation::identity(n) }
    }
}

/// `I_k` of the relabeled vectors `x[pi1(i)]`, `y[pi2(i)]`.
///
/// The value only depends on which `(x, y)` pairs land in the first `k`
/// slots and which land after them, so both groups are put in a canonical
/// order before evaluating. Every member of an equivalence class therefore
/// produces the same bits, and `k <= 1` returns the unpermuted value.
pub fn permuted_partial_cs(pair: &CoefficientPair, k: usize, perms: &PermutationPair) -> Result<f64> {
    let n = pair.n();
    perms.pi1.check_len(n)?;
    perms.pi2.check_len(n)?;
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    if k <= 1 {
        return Ok(partial_cs_raw(pair.x(), pair.y(), k));
    }
    let (x, y) = canonical_relabel(pair, k, perms);
    Ok(partial_cs_raw(&x, &y, k))
}

fn canonical_relabel(pair: &CoefficientPair, k: usize, perms: &PermutationPair) -> (Vec<f64>, Vec<f64>) {
    let n = pair.n();
    let mut slots: Vec<(usize, usize)> = (0..n).map(|i| (perms.pi1.apply(i), perms.pi2.apply(i))).collect();
    slots[..k].sort_unstable();
    slots[k..].sort_unstable();
    slots.iter().map(|&(a, b)| (pair.x()[a], pair.y()[b])).unzip()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SearchStrategy {
    /// Every relative pairing and every choice of the `k` leading pairs; `n <= 6`.
    Exhaustive,
    /// `k = n` only: pair both vectors in descending order.
    SortExact,
    /// Swap-move hill climbing from the identity, the sorted pairing and
    /// `restarts` seeded random starts.
    LocalSearch { restarts: usize, seed: u64 },
}

impl SearchStrategy {
    pub const DEFAULT_LOCAL: SearchStrategy = SearchStrategy::LocalSearch { restarts: 4, seed: 0 };

    fn name(&self) -> &'static str {
        match self {
            Self::Exhaustive => "exhaustive",
            Self::SortExact => "sort_exact",
            Self::LocalSearch { .. } => "local_search",
        }
    }
}

/// Maximum of [`permuted_partial_cs`] over relabelings, with the maximizing pair.
///
/// Ties are broken towards the lexicographically smallest permutation pair.
pub fn max_permuted_partial_cs(
    pair: &CoefficientPair,
    k: usize,
    strategy: SearchStrategy,
) -> Result<(f64, PermutationPair)> {
    let n = pair.n();
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    match strategy {
        SearchStrategy::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::StrategyMismatch {
                    strategy: strategy.name(),
                    reason: format!("n = {n} exceeds {EXHAUSTIVE_LIMIT}"),
                });
            }
            exhaustive(pair, k)
        }
        SearchStrategy::SortExact => {
            if k != n {
                return Err(Error::StrategyMismatch {
                    strategy: strategy.name(),
                    reason: format!("only exact for k = n = {n}, got k = {k}"),
                });
            }
            let perms = PermutationPair { pi1: argsort_desc(pair.x()), pi2: argsort_desc(pair.y()) };
            Ok((permuted_partial_cs(pair, k, &perms)?, perms))
        }
        SearchStrategy::LocalSearch { restarts, seed } => local_search(pair, k, restarts, seed),
    }
}

/// Permutation pair for "x-index `a` is matched with y-index `sigma(a)`, and
/// the x-indices in `lead` occupy the first slots".
fn pairing_perms(sigma: &Permutation, lead: &[usize]) -> PermutationPair {
    let n = sigma.len();
    let mut in_lead = vec![false; n];
    for &a in lead {
        in_lead[a] = true;
    }
    let order: Vec<usize> = lead.iter().copied().chain((0..n).filter(|&a| !in_lead[a])).collect();
    let pi1 = Permutation::new(order).expect("lead is a subset");
    let pi2 = sigma.compose(&pi1);
    PermutationPair { pi1, pi2 }
}

fn consider(best: &mut Option<(f64, PermutationPair)>, value: f64, perms: PermutationPair) {
    let better = match best {
        None => true,
        Some((v, p)) => value > *v || (value == *v && perms < *p),
    };
    if better {
        *best = Some((value, perms));
    }
}

fn exhaustive(pair: &CoefficientPair, k: usize) -> Result<(f64, PermutationPair)> {
    let n = pair.n();
    if k <= 1 {
        return Ok((partial_cs_raw(pair.x(), pair.y(), k), PermutationPair::identity(n)));
    }
    let mut best = None;
    for sigma in Permutations::new(n) {
        for lead in Combinations::new(n, k) {
            let perms = pairing_perms(&sigma, &lead);
            let value = permuted_partial_cs(pair, k, &perms)?;
            consider(&mut best, value, perms);
        }
    }
    Ok(best.expect("at least one permutation"))
}

fn local_search(pair: &CoefficientPair, k: usize, restarts: usize, seed: u64) -> Result<(f64, PermutationPair)> {
    let n = pair.n();
    if k <= 1 {
        return Ok((partial_cs_raw(pair.x(), pair.y(), k), PermutationPair::identity(n)));
    }

    // x-index a is matched with sigma[a]; lead[a] marks the first-k slots.
    let eval = |sigma: &[usize], lead: &[bool]| -> (f64, PermutationPair) {
        let sigma = Permutation::new(sigma.to_vec()).expect("swaps keep a bijection");
        let chosen: Vec<usize> = (0..n).filter(|&a| lead[a]).collect();
        let perms = pairing_perms(&sigma, &chosen);
        let value = permuted_partial_cs(pair, k, &perms).expect("lengths checked");
        (value, perms)
    };

    let climb = |mut sigma: Vec<usize>, mut lead: Vec<bool>| -> (f64, PermutationPair) {
        let (mut value, mut perms) = eval(&sigma, &lead);
        loop {
            let mut step: Option<(f64, PermutationPair, Vec<usize>, Vec<bool>)> = None;
            for a in 0..n {
                for b in (a + 1)..n {
                    let mut s = sigma.clone();
                    s.swap(a, b);
                    let (v, p) = eval(&s, &lead);
                    if v > step.as_ref().map_or(value, |t| t.0) {
                        step = Some((v, p, s.clone(), lead.clone()));
                    }
                    if lead[a] != lead[b] {
                        let mut l = lead.clone();
                        l.swap(a, b);
                        let (v, p) = eval(&sigma, &l);
                        if v > step.as_ref().map_or(value, |t| t.0) {
                            step = Some((v, p, sigma.clone(), l.clone()));
                        }
                        // x-indices trade places while the y-slots stay put.
                        let (v, p) = eval(&s, &l);
                        if v > step.as_ref().map_or(value, |t| t.0) {
                            step = Some((v, p, s, l));
                        }
                    }
                }
            }
            match step {
                Some((v, p, s, l)) => {
                    value = v;
                    perms = p;
                    sigma = s;
                    lead = l;
                }
                None => return (value, perms),
            }
        }
    };

    let first_k = |order: &[usize]| -> Vec<bool> {
        let mut lead = vec![false; n];
        for &a in &order[..k] {
            lead[a] = true;
        }
        lead
    };

    let mut best = None;
    let identity: Vec<usize> = (0..n).collect();
    let (v, p) = eval(&identity, &first_k(&identity));
    consider(&mut best, v, p);

    let (v, p) = climb(identity.clone(), first_k(&identity));
    consider(&mut best, v, p);

    let xs = argsort_desc(pair.x());
    let ys = argsort_desc(pair.y());
    let mut sorted = vec![0; n];
    for i in 0..n {
        sorted[xs.apply(i)] = ys.apply(i);
    }
    let (v, p) = climb(sorted, first_k(xs.as_slice()));
    consider(&mut best, v, p);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let mut sigma = identity.clone();
        sigma.shuffle(&mut rng);
        let mut order = identity.clone();
        order.shuffle(&mut rng);
        let (v, p) = climb(sigma, first_k(&order));
        consider(&mut best, v, p);
    }
    Ok(best.expect("identity start"))
}

/// `L_1 = I_{n-1}`.
pub fn l1(pair: &CoefficientPair) -> Result<f64> {
    let n = pair.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    Ok(partial_cs_raw(pair.x(), pair.y(), n - 1))
}

/// `(sum_i x_i y_i)^2 = I_n`.
pub fn mondal_product_bound(pair: &CoefficientPair) -> f64 {
    let s: f64 = pair.x().iter().zip(pair.y()).map(|(a, b)| a * b).sum();
    s * s
}

/// `|<[A, B]>/2|^2 + |<{A - <A>, B - <B>}>/2|^2`.
pub fn schrodinger_bound(state: &QuantumState, a: &Observable, b: &Observable) -> Result<f64> {
    let comm = state.expect(&commutator(a.matrix(), b.matrix())?)?;
    let abar = a.centered(state)?.matrix;
    let bbar = b.centered(state)?.matrix;
    let anti = state.expect(abar.anticommutator(&bbar)?.as_matrix())?;
    Ok((comm * 0.5).norm_sqr() + (anti * 0.5).norm_sqr())
}

/// `|<(A - <A>)(B - <B>)>|^2`, the weakest member of the operator chain.
pub fn correlation_bound(state: &QuantumState, a: &Observable, b: &Observable) -> Result<f64> {
    let abar = a.centered(state)?.matrix;
    let bbar = b.centered(state)?.matrix;
    Ok(state.expect(&abar.mul(&bbar)?)?.norm_sqr())
}

/// Operator-form pairing terms `t_i = <[A', B'_i]> + <{A', B'_i}>` with
/// `B'_i = |psi_i><psi_i| (B - <B>)`; each has modulus `2 x_i y_i`.
pub fn operator_pairing_terms(state: &QuantumState, a: &Observable, b: &Observable, basis: &Basis) -> Result<Vec<C64>> {
    let pure = QuantumState::Pure(state.pure_vector()?.into_owned());
    let abar = a.centered(&pure)?.matrix.into_matrix();
    let bbar = b.centered(&pure)?.matrix.into_matrix();
    basis
        .vectors()
        .iter()
        .map(|psi_i| {
            let b_i = HermitianMatrix::projector(psi_i).mul(&bbar)?;
            Ok(pure.expect(&commutator(&abar, &b_i)?)? + pure.expect(&anticommutator(&abar, &b_i)?)?)
        })
        .collect()
}

/// `(1/4) (sum_i |t_i|)^2`; equals [`mondal_product_bound`] of the basis pair.
pub fn operator_pairing_bound(state: &QuantumState, a: &Observable, b: &Observable, basis: &Basis) -> Result<f64> {
    let s: f64 = operator_pairing_terms(state, a, b, basis)?.iter().map(|t| t.norm()).sum();
    Ok(0.25 * s * s)
}

/// `L_1` assembled from commutator/anticommutator expectations and overlaps,
/// without going through the coefficient vectors.
pub fn l1_operator_form(state: &QuantumState, a: &Observable, b: &Observable, basis: &Basis) -> Result<f64> {
    let n = basis.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    let terms = operator_pairing_terms(state, a, b, basis)?;
    let head: f64 = terms[..n - 1].iter().map(|t| t.norm()).sum();

    let pure = QuantumState::Pure(state.pure_vector()?.into_owned());
    let QuantumState::Pure(psi) = &pure else { unreachable!() };
    let abar_psi = a.centered(&pure)?.matrix.matvec(psi)?;
    let bbar_psi = b.centered(&pure)?.matrix.matvec(psi)?;
    let overlaps =
        |w| -> Result<Vec<f64>> { basis.vectors().iter().map(|u| inner(w, u).map(|z| z.norm_sqr())).collect() };
    let a2 = overlaps(&abar_psi)?;
    let b2 = overlaps(&bbar_psi)?;
    let (a_last, b_last) = (a2[n - 1], b2[n - 1]);
    Ok(0.25 * head * head + a_last * b2.iter().sum::<f64>() + b_last * a2.iter().sum::<f64>() - a_last * b_last)
}

/// An upper bound that may be unavailable for the given coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "UpperBoundRepr", into = "UpperBoundRepr")]
pub enum UpperBound {
    Finite(f64),
    /// Reported as `+inf`; the bound cannot be certified for these inputs.
    Uncertified {
        reason: String,
    },
}

impl UpperBound {
    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(v) => *v,
            Self::Uncertified { .. } => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Uncertified { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct UpperBoundRepr {
    value: Option<f64>,
    certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

impl From<UpperBound> for UpperBoundRepr {
    fn from(u: UpperBound) -> Self {
        match u {
            UpperBound::Finite(v) => Self { value: Some(v), certified: true, reason: None },
            UpperBound::Uncertified { reason } => Self { value: None, certified: false, reason: Some(reason) },
        }
    }
}

impl From<UpperBoundRepr> for UpperBound {
    fn from(r: UpperBoundRepr) -> Self {
        match (r.certified, r.value) {
            (true, Some(v)) => Self::Finite(v),
            _ => Self::Uncertified { reason: r.reason.unwrap_or_default() },
        }
    }
}

/// Kantorovich-type upper bound
/// `(xy + XY)^2 / (4 xy XY) * (min_pi sum_i x_i y_pi(i))^2`
/// with `x, X` (`y, Y`) the smallest and largest components.
///
/// Components where both coefficients are below [`ZERO_COMPONENT`] are
/// dropped. If exactly one of them vanishes somewhere the factor is
/// unbounded and the result is [`UpperBound::Uncertified`].
pub fn u1(pair: &CoefficientPair) -> Result<UpperBound> {
    let mut xs = Vec::with_capacity(pair.n());
    let mut ys = Vec::with_capacity(pair.n());
    for (i, (&x, &y)) in pair.x().iter().zip(pair.y()).enumerate() {
        match (x <= ZERO_COMPONENT, y <= ZERO_COMPONENT) {
            (true, true) => {}
            (false, false) => {
                xs.push(x);
                ys.push(y);
            }
            _ => {
                return Ok(UpperBound::Uncertified {
                    reason: format!("component {i} has exactly one vanishing coefficient"),
                })
            }
        }
    }
    if xs.is_empty() {
        return Err(Error::EmptySupport);
    }
    let (x_min, x_max) = min_max(&xs);
    let (y_min, y_max) = min_max(&ys);
    let lo = x_min * y_min;
    let hi = x_max * y_max;
    let factor = (lo + hi) * (lo + hi) / (4.0 * lo * hi);
    Ok(UpperBound::Finite(factor * min_pairing(&xs, &ys).powi(2)))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// `min_pi sum_i x_i y_pi(i)`: ascending `x` against descending `y`.
pub fn min_pairing(x: &[f64], y: &[f64]) -> f64 {
    let xa = argsort_asc(x);
    let yd = argsort_desc(y);
    (0..x.len()).map(|i| x[xa.apply(i)] * y[yd.apply(i)]).sum()
}

/// `[lower, upper]` bracketing `V(A) V(B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductInterval {
    pub lower: f64,
    pub lower_label: String,
    pub upper: UpperBound,
    pub product: f64,
}

impl ProductInterval {
    pub fn contains(&self, rel: f64) -> bool {
        use crate::tolerance::le_within;
        le_within(self.lower, self.product, rel) && self.upper.finite().is_none_or(|u| le_within(self.product, u, rel))
    }
}

/// Picks the largest of the labeled candidates (first wins on ties).
pub(crate) fn best_of(candidates: &[(&str, f64)]) -> (f64, String) {
    let mut best = (f64::NEG_INFINITY, String::new());
    for &(label, value) in candidates {
        if value > best.0 {
            best = (value, label.to_string());
        }
    }
    best
}

/// Upper bound for [`product_interval`]; vanishing coefficient vectors give
/// the exact product 0.
pub(crate) fn interval_upper(pair: &CoefficientPair) -> Result<UpperBound> {
    match u1(pair) {
        Err(Error::EmptySupport) => Ok(UpperBound::Finite(0.0)),
        other => other,
    }
}

pub fn product_interval(
    state: &QuantumState,
    a: &Observable,
    b: &Observable,
    config: &BoundConfig,
) -> Result<ProductInterval> {
    let pair = config.coefficients(state, a, b)?;
    let product = variance(state, a)? * variance(state, b)?;
    let mut candidates =
        vec![("schrodinger", schrodinger_bound(state, a, b)?), ("mondal", mondal_product_bound(&pair))];
    if pair.n() >= 2 {
        candidates.push(("l1", l1(&pair)?));
    }
    let (sorted, _) = max_permuted_partial_cs(&pair, pair.n(), SearchStrategy::SortExact)?;
    candidates.push(("max_perm_in", sorted));
    let (lower, lower_label) = best_of(&candidates);
    Ok(ProductInterval { lower, lower_label, upper: interval_upper(&pair)?, product })
}
