//! Brute-force reference implementations.
//!
//! Everything here is written from the defining formulas on top of the
//! linear-algebra layer only, so agreement with the optimized modules is a
//! meaningful check rather than a tautology.

use serde::{Deserialize, Serialize};

use crate::config::BoundConfig;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inner, ComplexVector, HermitianMatrix, Matrix, C64};
use crate::perm::{Permutation, Permutations};
use crate::product::{permuted_partial_cs, PermutationPair};
use crate::quantum::{CoefficientPair, Construction, Observable, QuantumState};
use crate::report::{BoundReport, Sections};
use crate::tolerance::hybrid_diff;

/// Largest `n` for the raw `(n!)^2` enumeration.
pub const RAW_PERM_LIMIT: usize = 5;

/// Largest `n` for which pairings are enumerated instead of sorted.
const PAIRING_ENUM_LIMIT: usize = 7;

/// `I_k` as three literal sums over index pairs.
pub fn partial_cs_literal(x: &[f64], y: &[f64], k: usize) -> f64 {
    let n = x.len();
    let mut cross = 0.0;
    let mut spread = 0.0;
    let mut diag = 0.0;
    for j in 0..n {
        for i in 0..j {
            if j < k {
                cross += 2.0 * x[i] * x[j] * y[i] * y[j];
            } else {
                spread += x[i] * x[i] * y[j] * y[j] + x[j] * x[j] * y[i] * y[i];
            }
        }
        diag += x[j] * x[j] * y[j] * y[j];
    }
    cross + spread + diag
}

/// Maximum of the relabeled `I_k` over every `(pi1, pi2)` pair.
pub fn oracle_exhaustive_perm(pair: &CoefficientPair, k: usize) -> Result<f64> {
    let n = pair.n();
    if n > RAW_PERM_LIMIT {
        return Err(Error::TooLarge { n, limit: RAW_PERM_LIMIT });
    }
    let mut best = f64::NEG_INFINITY;
    for pi1 in Permutations::new(n) {
        for pi2 in Permutations::new(n) {
            let perms = PermutationPair { pi1: pi1.clone(), pi2 };
            best = best.max(permuted_partial_cs(pair, k, &perms)?);
        }
    }
    Ok(best)
}

fn pairing_extreme(x: &[f64], y: &[f64], maximize: bool) -> f64 {
    let n = x.len();
    if n <= PAIRING_ENUM_LIMIT {
        let sums = Permutations::new(n).map(|p| (0..n).map(|i| x[i] * y[p.apply(i)]).sum::<f64>());
        return if maximize { sums.fold(f64::NEG_INFINITY, f64::max) } else { sums.fold(f64::INFINITY, f64::min) };
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    if !maximize {
        ys.reverse();
    }
    xs.iter().zip(&ys).map(|(a, b)| a * b).sum()
}

/// `-ln max g(t)` over the spectrum's range: dense scan plus Newton on `g'`.
pub fn oracle_c_component(eigs: &[f64]) -> f64 {
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let g = |t: f64| eigs.iter().map(|e| (-(e - t) * (e - t)).exp()).sum::<f64>();
    if hi == lo {
        return -g(lo).ln();
    }
    let steps = 2_000;
    let ts: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    let gs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let mut best = gs.iter().copied().fold(0.0, f64::max);
    for i in 0..=steps {
        let left = if i > 0 { gs[i - 1] } else { 0.0 };
        let right = if i < steps { gs[i + 1] } else { 0.0 };
        if gs[i] >= left && gs[i] >= right {
            best = best.max(g(newton_peak(eigs, ts[i], lo, hi)));
        }
    }
    for &e in eigs {
        best = best.max(g(newton_peak(eigs, e, lo, hi)));
    }
    -best.ln()
}

fn newton_peak(eigs: &[f64], start: f64, lo: f64, hi: f64) -> f64 {
    let mut t = start;
    for _ in 0..50 {
        let d1: f64 = eigs.iter().map(|e| 2.0 * (e - t) * (-(e - t) * (e - t)).exp()).sum();
        let d2: f64 = eigs.iter().map(|e| (4.0 * (e - t) * (e - t) - 2.0) * (-(e - t) * (e - t)).exp()).sum();
        if d2 >= 0.0 {
            return start;
        }
        let next = (t - d1 / d2).clamp(lo, hi);
        if (next - t).abs() < 1e-15 {
            return next;
        }
        t = next;
    }
    t
}

fn expect(state: &QuantumState, m: &Matrix) -> Result<C64> {
    match state {
        QuantumState::Pure(v) => {
            let mv = m.matvec(v)?;
            inner(v, &mv)
        }
        QuantumState::Density(rho) => {
            let mut t = C64::new(0.0, 0.0);
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    t += rho[(i, j)] * m[(j, i)];
                }
            }
            Ok(t)
        }
    }
}

fn dominant_vector(state: &QuantumState) -> Result<ComplexVector> {
    match state {
        QuantumState::Pure(v) => Ok(v.clone()),
        QuantumState::Density(rho) => {
            let s = hermitian_eig(rho)?;
            let top = s.dim() - 1;
            if s.eigenvalues[top] < 1.0 - 1e-8 {
                return Err(Error::Purity { top_eigenvalue: s.eigenvalues[top] });
            }
            Ok(s.eigenvectors[top].clone())
        }
    }
}

struct Stats {
    mean: f64,
    var: f64,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<ComplexVector>,
}

fn stats(state: &QuantumState, m: &Matrix) -> Result<Stats> {
    let mean = expect(state, m)?.re;
    let var = (expect(state, &m.mul(m)?)?.re - mean * mean).max(0.0);
    let s = hermitian_eig(&HermitianMatrix::new(m.clone())?)?;
    Ok(Stats { mean, var, eigenvalues: s.eigenvalues, eigenvectors: s.eigenvectors })
}

fn probabilities(state: &QuantumState, vectors: &[ComplexVector]) -> Result<Vec<f64>> {
    vectors
        .iter()
        .map(|u| {
            let m = u.outer(u);
            Ok(expect(state, &m)?.re.max(0.0))
        })
        .collect()
}

fn entropy(eigenvalues: &[f64], probs: &[f64]) -> f64 {
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut idx: Vec<usize> = (0..eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
    for i in idx {
        match merged.last_mut() {
            Some((e, p)) if eigenvalues[i] - *e <= 1e-10 => *p += probs[i],
            _ => merged.push((eigenvalues[i], probs[i])),
        }
    }
    merged.iter().filter(|(_, p)| *p > 0.0).map(|(_, p)| -p * p.ln()).sum::<f64>().max(0.0)
}

/// One compared quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub name: String,
    pub module: f64,
    pub oracle: f64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub entries: Vec<OracleEntry>,
    pub max_discrepancy: f64,
}

impl OracleReport {
    pub fn worst(&self) -> Option<&OracleEntry> {
        self.entries.iter().max_by(|a, b| a.discrepancy.total_cmp(&b.discrepancy))
    }
}

/// Recomputes variances and every bound of [`BoundReport`] from first
/// principles and lists the discrepancies `|a - b| / max(1, |a|, |b|)`.
/// Infinite (uncertified) values compare equal to each other.
pub fn oracle_bound_check(
    state: &QuantumState,
    a: &Observable,
    b: &Observable,
    config: &BoundConfig,
) -> Result<OracleReport> {
    let report = BoundReport::compute(state, a, b, config, Sections::BOTH)?;
    let product = report.product.as_ref().expect("requested");
    let sum = report.sum.as_ref().expect("requested");

    let (am, bm) = (a.matrix().as_matrix(), b.matrix().as_matrix());
    let sa = stats(state, am)?;
    let sb = stats(state, bm)?;
    let n = am.dim();

    let (x, y): (Vec<f64>, Vec<f64>) = match config.construction {
        Construction::Fidelity => {
            let pa = probabilities(state, &sa.eigenvectors)?;
            let pb = probabilities(state, &sb.eigenvectors)?;
            let x = (0..n).map(|i| (sa.eigenvalues[i] - sa.mean).abs() * pa[i].sqrt()).collect();
            let y = (0..n).map(|i| (sb.eigenvalues[i] - sb.mean).abs() * pb[i].sqrt()).collect();
            (x, y)
        }
        Construction::Basis | Construction::Supplied => {
            let psi = dominant_vector(state)?;
            let basis = config.basis.resolve(a, b);
            let (ma, mb) =
                (stats(&QuantumState::Pure(psi.clone()), am)?.mean, stats(&QuantumState::Pure(psi.clone()), bm)?.mean);
            let (apsi, bpsi) = (am.matvec(&psi)?, bm.matvec(&psi)?);
            let mut x = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for u in basis.vectors() {
                let up = inner(u, &psi)?;
                x.push((inner(u, &apsi)? - up * ma).norm());
                y.push((inner(u, &bpsi)? - up * mb).norm());
            }
            (x, y)
        }
    };
    let xs: f64 = x.iter().map(|v| v * v).sum();
    let ys: f64 = y.iter().map(|v| v * v).sum();

    let mut entries = Vec::new();
    let mut push = |name: &str, module: f64, oracle: f64| {
        let discrepancy = if module.is_infinite() && oracle.is_infinite() && module == oracle {
            0.0
        } else {
            hybrid_diff(module, oracle)
        };
        entries.push(OracleEntry { name: name.to_string(), module, oracle, discrepancy });
    };

    push("v_a", report.variances.v_a, sa.var);
    push("v_b", report.variances.v_b, sb.var);
    push("norm_x", xs, sa.var);
    push("norm_y", ys, sb.var);
    for (k, &v) in product.chain.iter().enumerate() {
        push(&format!("i_{k}"), v, partial_cs_literal(&x, &y, k));
    }
    if let Some(l1) = product.l1 {
        push("l1", l1, partial_cs_literal(&x, &y, n - 1));
    }
    let dot: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
    push("mondal_in", product.mondal_in, dot * dot);

    let comm = expect(state, &am.mul(bm)?.sub(&bm.mul(am)?)?)?;
    let anti = expect(state, &am.mul(bm)?.add(&bm.mul(am)?)?)?.re;
    push("schrodinger", product.schrodinger, (comm * 0.5).norm_sqr() + (0.5 * anti - sa.mean * sb.mean).powi(2));
    push("max_perm_in", product.max_perm_in.value, pairing_extreme(&x, &y, true).powi(2));

    let support: Vec<(f64, f64)> =
        x.iter().zip(&y).map(|(&p, &q)| (p, q)).filter(|&(p, q)| p > 1e-12 || q > 1e-12).collect();
    let u1 = if support.is_empty() {
        0.0
    } else if support.iter().any(|&(p, q)| p <= 1e-12 || q <= 1e-12) {
        f64::INFINITY
    } else {
        let (sx, sy): (Vec<f64>, Vec<f64>) = support.iter().copied().unzip();
        let lo = sx.iter().copied().fold(f64::INFINITY, f64::min) * sy.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sx.iter().copied().fold(0.0, f64::max) * sy.iter().copied().fold(0.0, f64::max);
        (lo + hi).powi(2) / (4.0 * lo * hi) * pairing_extreme(&sx, &sy, false).powi(2)
    };
    push("u1", product.u1.value(), u1);

    let mut s: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
    let mut d: Vec<f64> = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).collect();
    s.sort_by(|p, q| q.total_cmp(p));
    d.sort_by(|p, q| q.total_cmp(p));
    let pi2: Permutation = config.pi2_for(n);
    let l2 = 0.5 * s.iter().map(|v| v * v).sum::<f64>() + 0.5 * (0..n).map(|i| d[i] * d[pi2.apply(i)]).sum::<f64>();
    push("l2", sum.l2, l2);
    push("mondal_sum", sum.mondal_sum, 0.5 * s.iter().map(|v| v * v).sum::<f64>());
    push("u2", sum.u2, s.iter().map(|v| v * v).sum::<f64>());

    let h = entropy(&sa.eigenvalues, &probabilities(state, &sa.eigenvectors)?)
        + entropy(&sb.eigenvalues, &probabilities(state, &sb.eigenvectors)?);
    let c = oracle_c_component(&sa.eigenvalues) + oracle_c_component(&sb.eigenvalues);
    push("entropic_sum", sum.entropic.value, h + c);

    if let Some(e) = &product.entropic {
        let (xn, yn) = (x[n - 1], y[n - 1]);
        let head: f64 = (0..n - 1).map(|i| x[i] * y[i]).sum();
        let oracle = if xn <= 1e-12 || yn <= 1e-12 {
            partial_cs_literal(&x, &y, n - 1)
        } else {
            let r = yn / xn;
            let scaled: Vec<f64> = sa.eigenvalues.iter().map(|v| r * v).collect();
            let c_r = oracle_c_component(&scaled) + oracle_c_component(&sb.eigenvalues);
            ((r * head).powi(2) + yn * yn * (h + c_r) - yn.powi(4)) / (r * r)
        };
        push("entropic_product", e.value, oracle);
    }

    let max_discrepancy = entries.iter().map(|e| e.discrepancy).fold(0.0, f64::max);
    Ok(OracleReport { entries, max_discrepancy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{max_permuted_partial_cs, partial_cs, SearchStrategy};
    use crate::scenarios::{
        pauli, random_hermitian_with, random_nonneg_vec, random_pure_state_with, spin1_state, spin_operators,
        trial_rng, Spin,
    };

    #[test]
    fn literal_matches_prefix_form() {
        let p = CoefficientPair::new(vec![2.0, 1.0, 1.0], vec![1.0, 1.0, 2.0]).unwrap();
        for k in 0..=3 {
            assert_eq!(partial_cs_literal(p.x(), p.y(), k), partial_cs(&p, k).unwrap());
        }
    }

    #[test]
    fn raw_enumeration_examples() {
        let p = CoefficientPair::new(vec![1.0, 3.0], vec![4.0, 2.0]).unwrap();
        assert_eq!(oracle_exhaustive_perm(&p, 2).unwrap(), 196.0);
        let q = CoefficientPair::new(vec![0.5, 1.0, 2.0], vec![0.5, 1.0, 2.0]).unwrap();
        for k in 0..=3 {
            assert_eq!(oracle_exhaustive_perm(&q, k).unwrap(), partial_cs(&q, 0).unwrap());
        }
        let big = CoefficientPair::new(vec![1.0; 6], vec![1.0; 6]).unwrap();
        assert_eq!(oracle_exhaustive_perm(&big, 2), Err(Error::TooLarge { n: 6, limit: 5 }));
    }

    #[test]
    fn reduced_search_matches_raw_n3() {
        let mut rng = trial_rng(11, 0);
        for _ in 0..30 {
            let p =
                CoefficientPair::new(random_nonneg_vec(&mut rng, 3, 2.0), random_nonneg_vec(&mut rng, 3, 2.0)).unwrap();
            for k in 0..=3 {
                let (v, _) = max_permuted_partial_cs(&p, k, SearchStrategy::Exhaustive).unwrap();
                assert_eq!(v, oracle_exhaustive_perm(&p, k).unwrap());
            }
        }
    }

    #[test]
    fn c_component_oracle() {
        assert!((oracle_c_component(&[-1.0, 1.0]) + 0.019_671_067_987).abs() < 1e-11);
        assert_eq!(oracle_c_component(&[4.0]), 0.0);
    }

    #[test]
    fn worked_scenarios() {
        let (lx, ly, _) = spin_operators(Spin::One);
        let r = oracle_bound_check(&spin1_state(0.0).unwrap(), &lx, &ly, &BoundConfig::fidelity()).unwrap();
        let get = |name: &str| r.entries.iter().find(|e| e.name == name).unwrap().clone();
        let v = get("v_a").oracle * get("v_b").oracle;
        assert!((v - 0.25).abs() < 1e-14);
        assert!((get("schrodinger").oracle - 0.25).abs() < 1e-14);
        assert!(r.max_discrepancy <= 1e-9, "{:?}", r.worst());

        let (sx, sy, _) = pauli();
        let ket0 = QuantumState::pure(ComplexVector::from_real(&[1.0, 0.0]).unwrap()).unwrap();
        let r = oracle_bound_check(&ket0, &sx, &sy, &BoundConfig::default()).unwrap();
        assert!((get_from(&r, "schrodinger") - 1.0).abs() < 1e-14);
        assert!(r.max_discrepancy <= 1e-9, "{:?}", r.worst());
    }

    fn get_from(r: &OracleReport, name: &str) -> f64 {
        r.entries.iter().find(|e| e.name == name).unwrap().oracle
    }

    #[test]
    fn random_triples_agree() {
        for trial in 0..40 {
            let mut rng = trial_rng(5, trial);
            let n = 2 + (trial as usize % 5);
            let state = random_pure_state_with(&mut rng, n).unwrap();
            let a = random_hermitian_with(&mut rng, n, 1.0).unwrap();
            let b = random_hermitian_with(&mut rng, n, 1.0).unwrap();
            for cfg in [BoundConfig::default(), BoundConfig::fidelity()] {
                let r = oracle_bound_check(&state, &a, &b, &cfg).unwrap();
                assert!(r.max_discrepancy <= 1e-9, "trial {trial}: {:?}", r.worst());
            }
        }
    }
}
