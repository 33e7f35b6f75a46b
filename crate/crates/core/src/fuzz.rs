//! Randomized invariant checks over seeded instances.
//!
//! Trial `t` of a run with seed `s` draws everything from
//! [`trial_rng(s, t)`](crate::scenarios::trial_rng), so a single failing trial
//! can be replayed in isolation.

use serde::{Deserialize, Serialize};

use crate::config::BoundConfig;
use crate::entropic::entropy_variance_bound;
use crate::error::Result;
use crate::oracle::oracle_bound_check;
use crate::perm::{argsort_desc, Permutation};
use crate::product::{
    chain, correlation_bound, l1, l1_operator_form, max_permuted_partial_cs, mondal_product_bound,
    operator_pairing_bound, permuted_partial_cs, schrodinger_bound, u1, PermutationPair, SearchStrategy,
};
use crate::quantum::{variance, Basis, CoefficientPair};
use crate::scenarios::{random_hermitian_with, random_nonneg_vec, random_pure_state_with, trial_rng};
use crate::sum::{l2, mondal_sum_bound, parallelogram, permuted_sum_bound, rearrangement_sums, u2};
use crate::tolerance::{hybrid_diff, rel_diff};

pub const INVARIANTS: &[&str] = &[
    "chain_monotone",
    "chain_first_step",
    "permuted_chain_monotone",
    "permuted_dominates",
    "sort_exact_matches",
    "operator_vector_agreement",
    "l1_operator_form",
    "product_ordering",
    "product_sandwich",
    "rearrangement_lemma",
    "parallelogram_exact",
    "permuted_sum_identity",
    "permuted_sum_below_sum",
    "sum_sandwich",
    "entropy_variance",
    "oracle_agreement",
];

const ALPHAS: [f64; 6] = [-2.0, -1.0, 0.0, 0.5, 1.0, 5.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzOptions {
    pub trials: u64,
    pub dim_min: usize,
    pub dim_max: usize,
    pub seed: u64,
    /// Relative slack for ordering checks.
    pub tolerance: f64,
    /// Replay a single trial index instead of `0..trials`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub only_trial: Option<u64>,
    /// Harness self-test: inverts the chain comparison so every trial fails.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub sign_flip: bool,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        Self { trials: 1000, dim_min: 2, dim_max: 6, seed: 0, tolerance: 1e-9, only_trial: None, sign_flip: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub seed: u64,
    pub trial: u64,
    pub dimension: usize,
    pub invariant: String,
    pub magnitude: f64,
    pub detail: String,
    /// Command line that replays this trial alone.
    pub reproducer: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub name: String,
    pub checks: u64,
    pub violations: u64,
    /// Largest observed excess over the allowed slack (0 when never exceeded).
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub options: FuzzOptions,
    pub trials_run: u64,
    pub invariants: Vec<InvariantSummary>,
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

struct Outcome {
    name: &'static str,
    excess: f64,
    detail: String,
}

struct Checks {
    rel: f64,
    out: Vec<Outcome>,
}

impl Checks {
    /// `a <= b` with relative slack; excess is measured relative to `max(|a|, |b|)`.
    fn le(&mut self, name: &'static str, a: f64, b: f64, detail: impl FnOnce() -> String) {
        let scale = a.abs().max(b.abs());
        let excess = if a <= b + self.rel * scale + crate::tolerance::ABS_FLOOR {
            0.0
        } else {
            (a - b) / scale.max(f64::MIN_POSITIVE)
        };
        self.record(name, excess, detail);
    }

    fn close(&mut self, name: &'static str, diff: f64, tol: f64, detail: impl FnOnce() -> String) {
        self.record(name, if diff <= tol { 0.0 } else { diff }, detail);
    }

    fn record(&mut self, name: &'static str, excess: f64, detail: impl FnOnce() -> String) {
        let detail = if excess > 0.0 { detail() } else { String::new() };
        self.out.push(Outcome { name, excess, detail });
    }
}

fn random_perm(rng: &mut impl rand::Rng, n: usize) -> Permutation {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::new(v).expect("shuffle is a bijection")
}

fn run_trial(opts: &FuzzOptions, trial: u64) -> Result<(usize, Vec<Outcome>)> {
    let mut rng = trial_rng(opts.seed, trial);
    let span = (opts.dim_max - opts.dim_min + 1) as u64;
    let n = opts.dim_min + (rand::Rng::random_range(&mut rng, 0..span)) as usize;
    let mut c = Checks { rel: opts.tolerance, out: Vec::new() };

    // vector-level theorems on a raw nonnegative pair
    let pair = CoefficientPair::new(random_nonneg_vec(&mut rng, n, 2.0), random_nonneg_vec(&mut rng, n, 2.0))?;
    let values = chain(&pair).values;
    for k in 2..=n {
        let (prev, next) = if k == 2 { (values[0], values[2]) } else { (values[k - 1], values[k]) };
        if opts.sign_flip {
            c.le("chain_monotone", prev, next, || format!("flipped check at k = {k}"));
        } else {
            c.le("chain_monotone", next, prev, || format!("I_{k} = {next:?} > I_{} = {prev:?}", k - 1));
        }
    }
    c.close("chain_first_step", rel_diff(values[1], values[0]), 1e-12, || {
        format!("I_1 = {:?}, I_0 = {:?}", values[1], values[0])
    });

    let perms = PermutationPair { pi1: random_perm(&mut rng, n), pi2: random_perm(&mut rng, n) };
    let permuted: Vec<f64> = (0..=n).map(|k| permuted_partial_cs(&pair, k, &perms)).collect::<Result<_>>()?;
    for k in 2..=n {
        let prev = if k == 2 { permuted[0] } else { permuted[k - 1] };
        c.le("permuted_chain_monotone", permuted[k], prev, || format!("k = {k}, perms = {perms:?}"));
    }
    for (k, &vk) in values.iter().enumerate() {
        let strategy =
            if n <= 4 { SearchStrategy::Exhaustive } else { SearchStrategy::LocalSearch { restarts: 1, seed: trial } };
        let (best, _) = max_permuted_partial_cs(&pair, k, strategy)?;
        c.le("permuted_dominates", vk, best, || format!("k = {k}: max {best:?} < I_k {vk:?}"));
    }
    if n <= 5 {
        let (sorted, _) = max_permuted_partial_cs(&pair, n, SearchStrategy::SortExact)?;
        let (exh, _) = max_permuted_partial_cs(&pair, n, SearchStrategy::Exhaustive)?;
        c.close("sort_exact_matches", hybrid_diff(sorted, exh), 0.0, || format!("{sorted:?} vs {exh:?}"));
    }

    // rearrangement lemma on the sorted pair
    let xs = argsort_desc(pair.x()).permute(pair.x());
    let ys = argsort_desc(pair.y()).permute(pair.y());
    let r = rearrangement_sums(&xs, &ys, &random_perm(&mut rng, n))?;
    c.le("rearrangement_lemma", r.random, r.direct, || format!("{r:?}"));
    c.le("rearrangement_lemma", r.reverse, r.random, || format!("{r:?}"));

    // sum-form identities on the raw pair
    let total = pair.norm_sqr_x() + pair.norm_sqr_y();
    let (plus, minus) = parallelogram(&pair);
    c.close("parallelogram_exact", rel_diff(plus + minus, total), 1e-12, || {
        format!("{plus:?} + {minus:?} vs {total:?}")
    });
    let id = Permutation::identity(n);
    let t_id = permuted_sum_bound(&pair, &id, &id)?;
    c.close("permuted_sum_identity", rel_diff(t_id, total), 1e-12, || format!("{t_id:?} vs {total:?}"));
    let (p1, p2) = (random_perm(&mut rng, n), random_perm(&mut rng, n));
    let t4 = permuted_sum_bound(&pair, &p1, &p2)?;
    c.le("permuted_sum_below_sum", t4, total, || format!("pi1 = {p1:?}, pi2 = {p2:?}"));

    // state-level checks
    let state = random_pure_state_with(&mut rng, n)?;
    let a = random_hermitian_with(&mut rng, n, 1.0)?;
    let b = random_hermitian_with(&mut rng, n, 1.0)?;
    let basis = Basis::computational(n);
    let config = BoundConfig::default();
    let qp = config.coefficients(&state, &a, &b)?;
    let (va, vb) = (variance(&state, &a)?, variance(&state, &b)?);
    let product = va * vb;

    let mondal = mondal_product_bound(&qp);
    let op = operator_pairing_bound(&state, &a, &b, &basis)?;
    c.close("operator_vector_agreement", rel_diff(op, mondal), 1e-9, || format!("{op:?} vs {mondal:?}"));
    let l1v = l1(&qp)?;
    let l1o = l1_operator_form(&state, &a, &b, &basis)?;
    c.close("l1_operator_form", hybrid_diff(l1o, l1v), 1e-9, || format!("{l1o:?} vs {l1v:?}"));
    let corr = correlation_bound(&state, &a, &b)?;
    c.le("product_ordering", mondal, l1v, || format!("mondal {mondal:?} > l1 {l1v:?}"));
    c.le("product_ordering", corr, mondal, || format!("correlation {corr:?} > mondal {mondal:?}"));
    c.le("product_ordering", l1v, product, || format!("l1 {l1v:?} > product {product:?}"));
    let schr = schrodinger_bound(&state, &a, &b)?;
    c.le("product_sandwich", schr, product, || format!("schrodinger {schr:?} > product {product:?}"));
    if let Ok(u) = u1(&qp) {
        if let Some(u) = u.finite() {
            c.le("product_sandwich", product, u, || format!("product {product:?} > u1 {u:?}"));
        }
    }

    let sum = va + vb;
    let l2v = l2(&qp);
    c.le("sum_sandwich", mondal_sum_bound(&qp), l2v, || "mondal_sum > l2".into());
    c.le("sum_sandwich", l2v, sum, || format!("l2 {l2v:?} > sum {sum:?}"));
    let u2v = u2(&qp);
    c.le("sum_sandwich", sum, u2v, || format!("sum {sum:?} > u2 {u2v:?}"));

    for alpha in ALPHAS {
        let e = entropy_variance_bound(&state, &a, alpha)?;
        let rhs = alpha * va;
        c.record("entropy_variance", (e - rhs - 1e-9).max(0.0), || format!("alpha = {alpha}: {e:?} > {rhs:?}"));
    }

    for cfg in [BoundConfig::default(), BoundConfig::fidelity()] {
        let report = oracle_bound_check(&state, &a, &b, &cfg)?;
        c.close("oracle_agreement", report.max_discrepancy, 1e-9, || format!("{:?}", report.worst()));
    }

    Ok((n, c.out))
}

/// Runs every trial and aggregates per-invariant counts in trial order.
pub fn run_fuzz(opts: &FuzzOptions) -> Result<FuzzReport> {
    if opts.dim_min < 2 || opts.dim_max < opts.dim_min {
        return Err(crate::Error::Schema(format!(
            "dimension range {}:{} must satisfy 2 <= min <= max",
            opts.dim_min, opts.dim_max
        )));
    }
    let trials: Vec<u64> = match opts.only_trial {
        Some(t) => vec![t],
        None => (0..opts.trials).collect(),
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Result<(usize, Vec<Outcome>)>> = {
        use rayon::prelude::*;
        trials.par_iter().map(|&t| run_trial(opts, t)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(usize, Vec<Outcome>)>> = trials.iter().map(|&t| run_trial(opts, t)).collect();

    let mut summaries: Vec<InvariantSummary> = INVARIANTS
        .iter()
        .map(|name| InvariantSummary { name: name.to_string(), checks: 0, violations: 0, worst: 0.0 })
        .collect();
    let mut violations = Vec::new();
    for (&trial, result) in trials.iter().zip(results) {
        let (dimension, outcomes) = result?;
        for o in outcomes {
            let s = summaries.iter_mut().find(|s| s.name == o.name).expect("registered invariant");
            s.checks += 1;
            if o.excess > 0.0 {
                s.violations += 1;
                s.worst = s.worst.max(o.excess);
                violations.push(Violation {
                    seed: opts.seed,
                    trial,
                    dimension,
                    invariant: o.name.to_string(),
                    magnitude: o.excess,
                    detail: o.detail,
                    reproducer: format!(
                        "varbound fuzz --seed {} --trial {trial} --dim-range {}:{} --tolerance {:e}{}",
                        opts.seed,
                        opts.dim_min,
                        opts.dim_max,
                        opts.tolerance,
                        if opts.sign_flip { " --inject-sign-flip" } else { "" }
                    ),
                });
            }
        }
    }
    Ok(FuzzReport { options: opts.clone(), trials_run: trials.len() as u64, invariants: summaries, violations })
}
