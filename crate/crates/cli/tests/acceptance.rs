//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use varbound::config::BoundConfig;
use varbound::entropic::{c_constant, c_constant_with_grid, entropy_variance_bound};
use varbound::fuzz::{run_fuzz, FuzzOptions};
use varbound::linalg::hermitian_eig;
use varbound::oracle::{oracle_bound_check, oracle_c_component, oracle_exhaustive_perm};
use varbound::perm::{argsort_desc, Permutations};
use varbound::product::{chain, max_permuted_partial_cs, partial_cs, u1, SearchStrategy};
use varbound::quantum::{variance, CoefficientPair};
use varbound::scenarios::{
    pauli, random_hermitian_with, random_nonneg_vec, random_pure_state_with, trial_rng, ScenarioKind,
};
use varbound::sum::rearrangement_sums;
use varbound::sweep::{run_sweep, theta_grid, SweepRow};
use varbound::tolerance::{le_within, rel_diff, ORDER_REL};

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_pair(seed: u64, trial: u64, n: usize) -> CoefficientPair {
    let mut rng = trial_rng(seed, trial);
    let x = random_nonneg_vec(&mut rng, n, 2.0);
    let y = random_nonneg_vec(&mut rng, n, 2.0);
    CoefficientPair::new(x, y).expect("generated entries are finite and nonnegative")
}

fn sweep(kind: &ScenarioKind, a: f64, b: f64, steps: usize) -> Result<Vec<SweepRow>, String> {
    run_sweep(kind, &theta_grid(a, b, steps), &BoundConfig::default(), ORDER_REL).map_err(|e| e.to_string())
}

fn chain_theorem() -> Outcome {
    let mut worst_rise: f64 = 0.0;
    let mut worst_first: f64 = 0.0;
    for trial in 0..10_000u64 {
        let n = 2 + (trial % 7) as usize;
        let pair = random_pair(SEED, trial, n);
        let c = chain(&pair).values;
        let first = rel_diff(c[1], c[0]);
        worst_first = worst_first.max(first);
        ensure(first <= 1e-12, || format!("trial {trial}: I_1 = {:?} but I_0 = {:?}", c[1], c[0]))?;
        ensure(le_within(c[2], c[0], 1e-9), || format!("trial {trial}: I_2 = {:?} > I_0 = {:?}", c[2], c[0]))?;
        for k in 2..n {
            worst_rise = worst_rise.max(rel_diff(c[k + 1], c[k]) * f64::from(u8::from(c[k + 1] > c[k])));
            ensure(le_within(c[k + 1], c[k], 1e-9), || {
                format!("trial {trial}: I_{} = {:?} > I_{k} = {:?}", k + 1, c[k + 1], c[k])
            })?;
        }
    }
    Ok(format!("10000 pairs, n in 2..=8; worst relative rise {worst_rise:.1e}, worst |I_1 - I_0| {worst_first:.1e}"))
}

fn permutation_theorems() -> Outcome {
    let mut local_hits = 0;
    for trial in 0..500u64 {
        let n = 2 + (trial % 3) as usize;
        let pair = random_pair(SEED ^ 0xA5A5, trial, n);
        for k in 0..=n {
            let (exhaustive, _) =
                max_permuted_partial_cs(&pair, k, SearchStrategy::Exhaustive).map_err(|e| e.to_string())?;
            let raw = oracle_exhaustive_perm(&pair, k).map_err(|e| e.to_string())?;
            ensure(exhaustive == raw, || format!("trial {trial} k {k}: reduced {exhaustive:?} vs raw {raw:?}"))?;
            let plain = partial_cs(&pair, k).map_err(|e| e.to_string())?;
            ensure(exhaustive >= plain, || format!("trial {trial} k {k}: max {exhaustive:?} < I_k {plain:?}"))?;
            if k == n {
                let (sorted, _) =
                    max_permuted_partial_cs(&pair, k, SearchStrategy::SortExact).map_err(|e| e.to_string())?;
                ensure(rel_diff(sorted, exhaustive) <= 1e-12, || {
                    format!("trial {trial}: SortExact {sorted:?} vs Exhaustive {exhaustive:?}")
                })?;
            }
        }
    }
    for trial in 0..500u64 {
        let pair = random_pair(SEED ^ 0x5A5A, trial, 4);
        let (exhaustive, _) =
            max_permuted_partial_cs(&pair, 2, SearchStrategy::Exhaustive).map_err(|e| e.to_string())?;
        let strategy = SearchStrategy::LocalSearch { restarts: 4, seed: trial };
        let (local, _) = max_permuted_partial_cs(&pair, 2, strategy).map_err(|e| e.to_string())?;
        ensure(le_within(local, exhaustive, 1e-12), || {
            format!("trial {trial}: local {local:?} > exhaustive {exhaustive:?}")
        })?;
        if rel_diff(local, exhaustive) <= 1e-12 {
            local_hits += 1;
        }
    }
    ensure(local_hits >= 475, || format!("LocalSearch matched Exhaustive on only {local_hits}/500 trials at n = 4"))?;
    Ok(format!(
        "500 trials n in 2..=4, every k: reduced == raw oracle; LocalSearch optimal on {local_hits}/500 at n = 4"
    ))
}

fn worked_chain() -> Outcome {
    let pair = CoefficientPair::new(vec![2.0, 1.0, 1.0], vec![1.0, 1.0, 2.0]).map_err(|e| e.to_string())?;
    let c = chain(&pair).values;
    let want = [36.0, 36.0, 35.0, 25.0];
    for (k, (got, want)) in c.iter().zip(want).enumerate() {
        ensure((got - want).abs() <= 1e-12, || format!("I_{k} = {got:?}, expected {want}"))?;
    }
    Ok(format!("chain {c:?}"))
}

fn product_ordering() -> Outcome {
    let rows = sweep(&ScenarioKind::Spin1LxLy, 0.0, FRAC_PI_2, 201)?;
    let (mut worst_gap, mut mean_gap) = (0.0f64, 0.0);
    for r in &rows {
        ensure(le_within(r.mondal_in, r.l1, ORDER_REL), || {
            format!("theta {:?}: mondal_in {:?} > l1 {:?}", r.theta, r.mondal_in, r.l1)
        })?;
        ensure(le_within(r.schrodinger, r.l1, ORDER_REL), || {
            format!("theta {:?}: schrodinger {:?} > l1 {:?}", r.theta, r.schrodinger, r.l1)
        })?;
        let gap = (r.product - r.l1) / r.product.max(1e-12);
        worst_gap = worst_gap.max(gap);
        mean_gap += gap / rows.len() as f64;
    }
    Ok(format!("201 rows; near-optimality gap (product - L1)/product: mean {mean_gap:.4}, max {worst_gap:.4}"))
}

fn sum_ordering() -> Outcome {
    let rows = sweep(&ScenarioKind::Spin1LxLy, 0.0, FRAC_PI_2, 201)?;
    let mut margin = f64::INFINITY;
    for r in &rows {
        ensure(le_within(r.mondal_sum, r.l2, ORDER_REL), || {
            format!("theta {:?}: mondal_sum {:?} > l2 {:?}", r.theta, r.mondal_sum, r.l2)
        })?;
        margin = margin.min(r.l2 - r.mondal_sum);
    }
    Ok(format!("201 rows; smallest l2 - mondal_sum {margin:.3e}"))
}

fn product_containment() -> Outcome {
    let rows = sweep(&ScenarioKind::SpinHalfSxSz, 0.0, 2.0 * PI, 400)?;
    let mut finite = 0;
    for r in &rows {
        let best = r.l1.max(r.mondal_in).max(r.schrodinger).max(r.max_perm_in);
        ensure(le_within(best, r.product, ORDER_REL), || {
            format!("theta {:?}: lower {best:?} > product {:?}", r.theta, r.product)
        })?;
        if let Some(u) = r.u1.finite() {
            finite += 1;
            ensure(le_within(r.product, u, ORDER_REL), || {
                format!("theta {:?}: product {:?} > u1 {u:?}", r.theta, r.product)
            })?;
        }
    }
    let pair = CoefficientPair::new(vec![1.0, 2.0], vec![2.0, 1.0]).map_err(|e| e.to_string())?;
    let u = u1(&pair).map_err(|e| e.to_string())?.value();
    ensure((u - 25.0).abs() <= 1e-12, || format!("U1((1,2),(2,1)) = {u:?}, expected 25"))?;
    Ok(format!("400 rows, {finite} with finite u1; U1 worked example = {u:?}"))
}

fn sum_containment() -> Outcome {
    let mut rows = sweep(&ScenarioKind::Spin1LxLy, 0.0, FRAC_PI_2, 201)?;
    rows.extend(sweep(&ScenarioKind::SpinHalfSxSz, 0.0, 2.0 * PI, 400)?);
    for r in &rows {
        ensure(le_within(r.sum, r.u2, ORDER_REL), || format!("theta {:?}: sum {:?} > u2 {:?}", r.theta, r.sum, r.u2))?;
        ensure(le_within(r.l2, r.sum, ORDER_REL), || format!("theta {:?}: l2 {:?} > sum {:?}", r.theta, r.l2, r.sum))?;
    }
    Ok(format!("{} rows across the spin-1 and spin-1/2 sweeps", rows.len()))
}

fn rearrangement_lemma() -> Outcome {
    let mut checked = 0usize;
    for trial in 0..100u64 {
        let n = 2 + (trial % 4) as usize;
        let mut rng = trial_rng(SEED ^ 0x0F0F, trial);
        let x = random_nonneg_vec(&mut rng, n, 2.0);
        let y = random_nonneg_vec(&mut rng, n, 2.0);
        let (x, y) = (argsort_desc(&x).permute(&x), argsort_desc(&y).permute(&y));
        for pi in Permutations::new(n) {
            let r = rearrangement_sums(&x, &y, &pi).map_err(|e| e.to_string())?;
            ensure(r.direct >= r.random && r.random >= r.reverse, || format!("trial {trial}: {r:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("100 descending pairs, n in 2..=5, {checked} permutations"))
}

fn fuzz_summary(opts: &FuzzOptions, names: &[&str]) -> Outcome {
    let report = run_fuzz(opts).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for name in names {
        let s = report
            .invariants
            .iter()
            .find(|s| s.name == *name)
            .ok_or_else(|| format!("fuzz has no invariant {name}"))?;
        ensure(s.violations == 0, || format!("{name}: {} violations, worst {:.3e}", s.violations, s.worst))?;
        parts.push(format!("{name} {} checks", s.checks));
    }
    Ok(format!("{} fuzz trials: {}", report.trials_run, parts.join(", ")))
}

fn parallelogram_exactness() -> Outcome {
    let opts = FuzzOptions { seed: SEED, tolerance: 1e-12, ..FuzzOptions::default() };
    fuzz_summary(&opts, &["parallelogram_exact", "permuted_sum_identity"])
}

fn entropic_bridge() -> Outcome {
    const ALPHAS: [f64; 6] = [-2.0, -1.0, 0.0, 0.5, 1.0, 5.0];
    for trial in 0..1000u64 {
        let mut rng = trial_rng(SEED ^ 0x3C3C, trial);
        let n = 2 + (trial % 5) as usize;
        let state = random_pure_state_with(&mut rng, n).map_err(|e| e.to_string())?;
        let obs = random_hermitian_with(&mut rng, n, 1.0).map_err(|e| e.to_string())?;
        let v = variance(&state, &obs).map_err(|e| e.to_string())?;
        for alpha in ALPHAS {
            let lhs = entropy_variance_bound(&state, &obs, alpha).map_err(|e| e.to_string())?;
            ensure(le_within(lhs, alpha * v, ORDER_REL), || {
                format!("trial {trial} alpha {alpha}: {lhs:?} > {:?}", alpha * v)
            })?;
        }
    }

    let eigs = [-1.0, 1.0];
    let c = c_constant(&eigs, &eigs).map_err(|e| e.to_string())?;
    let oracle = 2.0 * oracle_c_component(&eigs);
    let doubled = c_constant_with_grid(&eigs, &eigs, 2 * c.grid_points).map_err(|e| e.to_string())?;
    let drift = (doubled.value - c.value).abs();
    ensure(drift <= 1e-8, || format!("grid doubling moved c by {drift:.3e}"))?;
    ensure((c.value - oracle).abs() <= 1e-9, || format!("c = {:?} but grid oracle gives {oracle:?}", c.value))?;
    let stated = -0.036300;
    ensure((c.value - stated).abs() <= 1e-5, || {
        format!(
            "c({{-1,1}},{{-1,1}}) = {:.6} (oracle {oracle:.6}, maximizer t = {:.6}), expected {stated} +/- 1e-5; \
             {stated} is the value at t = 1, not the maximum over [-1, 1]",
            c.value, c.a0_star
        )
    })?;
    Ok(format!("1000 trials x 6 alphas; c = {:.6} (oracle {oracle:.6}); grid doubling drift {drift:.1e}", c.value))
}

fn eigensolver() -> Outcome {
    let (mut recon, mut ortho) = (0.0f64, 0.0f64);
    for trial in 0..1000u64 {
        let n = 2 + (trial % 15) as usize;
        let mut rng = trial_rng(SEED ^ 0xE1E1, trial);
        let h = random_hermitian_with(&mut rng, n, 1.0).map_err(|e| e.to_string())?;
        let d = hermitian_eig(h.matrix()).map_err(|e| e.to_string())?;
        recon = recon.max(d.reconstruction_residual(h.matrix()));
        ortho = ortho.max(d.orthonormality_residual());
        ensure(recon <= 1e-11 && ortho <= 1e-11, || {
            format!("trial {trial} (n = {n}): residuals {recon:.3e}, {ortho:.3e}")
        })?;
    }
    let (sx, _, _) = pauli();
    let e = hermitian_eig(sx.matrix()).map_err(|err| err.to_string())?.eigenvalues;
    ensure((e[0] + 1.0).abs() <= 1e-12 && (e[1] - 1.0).abs() <= 1e-12, || format!("sigma_x eigenvalues {e:?}"))?;
    Ok(format!(
        "1000 matrices, n in 2..=16; worst reconstruction {recon:.1e}, orthonormality {ortho:.1e}; sigma_x {e:?}"
    ))
}

fn oracle_cross_check() -> Outcome {
    let mut worst = (0.0f64, String::new());
    for trial in 0..100u64 {
        let n = 2 + (trial % 5) as usize;
        let mut rng = trial_rng(SEED ^ 0x7E7E, trial);
        let state = random_pure_state_with(&mut rng, n).map_err(|e| e.to_string())?;
        let a = random_hermitian_with(&mut rng, n, 1.0).map_err(|e| e.to_string())?;
        let b = random_hermitian_with(&mut rng, n, 1.0).map_err(|e| e.to_string())?;
        for config in [BoundConfig::default(), BoundConfig::fidelity()] {
            let report = oracle_bound_check(&state, &a, &b, &config).map_err(|e| e.to_string())?;
            if let Some(w) = report.worst() {
                if w.discrepancy > worst.0 {
                    worst = (w.discrepancy, w.name.clone());
                }
                ensure(w.discrepancy <= 1e-9, || {
                    format!("trial {trial}: {} module {:?} oracle {:?}", w.name, w.module, w.oracle)
                })?;
            }
        }
    }
    Ok(format!("100 triples x 2 constructions; worst discrepancy {:.1e} ({})", worst.0, worst.1))
}

fn run_binary(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_varbound")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("varbound {} exited with {}: {}", args.join(" "), out.status, String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["sweep", "--scenario", "spin1", "--theta-range", "0:pi/2:201"],
        &["sweep", "--scenario", "spinhalf", "--theta-range", "0:2pi:400", "--format", "json"],
        &["fuzz", "--seed", "7", "--trials", "200"],
    ];
    let mut bytes = 0;
    for args in runs {
        let first = run_binary(args)?;
        let second = run_binary(args)?;
        ensure(first == second, || format!("varbound {} produced different output on rerun", args.join(" ")))?;
        bytes += first.len();
    }
    Ok(format!("3 commands run twice each, {bytes} identical bytes"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "chain theorem", budget: Some(Duration::from_secs(10)), run: chain_theorem },
        Criterion {
            id: 2,
            name: "permutation theorems",
            budget: Some(Duration::from_secs(60)),
            run: permutation_theorems,
        },
        Criterion { id: 3, name: "worked chain value", budget: None, run: worked_chain },
        Criterion {
            id: 4,
            name: "product ordering on spin-1 sweep",
            budget: Some(Duration::from_secs(5)),
            run: product_ordering,
        },
        Criterion { id: 5, name: "sum ordering on spin-1 sweep", budget: None, run: sum_ordering },
        Criterion { id: 6, name: "product containment on spin-1/2 sweep", budget: None, run: product_containment },
        Criterion { id: 7, name: "sum containment", budget: None, run: sum_containment },
        Criterion { id: 8, name: "rearrangement lemma", budget: None, run: rearrangement_lemma },
        Criterion { id: 9, name: "parallelogram exactness", budget: None, run: parallelogram_exactness },
        Criterion { id: 10, name: "entropic bridge", budget: None, run: entropic_bridge },
        Criterion { id: 11, name: "eigensolver", budget: None, run: eigensolver },
        Criterion { id: 12, name: "oracle cross-check", budget: None, run: oracle_cross_check },
        Criterion { id: 13, name: "determinism", budget: None, run: determinism },
    ];
    let suite = Instant::now();
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!("took {elapsed:.2?}, budget {budget:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {} [{elapsed:.2?}]: {detail}", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {} [{elapsed:.2?}]: {detail}", c.id, c.name);
            }
        }
    }
    let total = suite.elapsed();
    if total > Duration::from_secs(300) {
        failed += 1;
        println!("FAIL suite took {total:.2?}, budget 5 min");
    }
    println!("{} of {} criteria passed in {total:.2?}", criteria.len() - failed.min(criteria.len()), criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
