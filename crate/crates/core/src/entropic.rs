//! Bridges between Shannon entropies of measurement outcomes and variances.

use serde::{Deserialize, Serialize};

use crate::config::BoundConfig;
use crate::error::{Error, Result};
use crate::quantum::{
    expectation, outcome_distribution, shannon_entropy, variance, CoefficientPair, Observable, QuantumState,
};
use crate::tolerance::le_within;

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const REFINEMENT_TOL: f64 = 1e-10;

/// Coefficients at or below this in the last slot disable the rescaled bound.
pub const LAST_COMPONENT_FLOOR: f64 = 1e-12;

/// `ln sum exp(v_i)`, shifted by the maximum.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `H(A) - ln sum_i exp(-alpha (a_i - <A>)^2)`, which never exceeds `alpha V(A)`.
///
/// The sum runs over every eigenvector, repeated eigenvalues included, while
/// `H(A)` is taken over distinct outcomes.
pub fn entropy_variance_bound(state: &QuantumState, obs: &Observable, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    let mean = expectation(state, obs)?;
    let h = shannon_entropy(&outcome_distribution(state, obs)?);
    let exponents: Vec<f64> = obs.eigenvalues().iter().map(|a| -alpha * (a - mean).powi(2)).collect();
    Ok(h - log_sum_exp(&exponents))
}

/// `-ln max_t g_A(t) - ln max_t g_B(t)` with `g(t) = sum_i exp(-(e_i - t)^2)`
/// and `t` restricted to the range of each spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CConstant {
    pub value: f64,
    pub a0_star: f64,
    pub b0_star: f64,
    pub grid_points: usize,
    pub refinement_tol: f64,
}

/// Maximizer of a single spectrum: `(t*, ln g(t*))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPeak {
    pub t: f64,
    pub ln_g: f64,
}

pub fn ln_gaussian_sum(eigs: &[f64], t: f64) -> f64 {
    let exponents: Vec<f64> = eigs.iter().map(|e| -(e - t).powi(2)).collect();
    log_sum_exp(&exponents)
}

/// Grid search over `[min e, max e]` plus the eigenvalues themselves, then
/// golden-section refinement of every local grid maximum between its
/// neighbours. Ties go to the smallest `t`.
pub fn gaussian_peak(eigs: &[f64], grid_points: usize) -> Result<GaussianPeak> {
    if eigs.is_empty() {
        return Err(Error::Empty("eigenvalue list"));
    }
    if let Some(index) = eigs.iter().position(|e| !e.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f = |t: f64| ln_gaussian_sum(eigs, t);
    if hi == lo {
        return Ok(GaussianPeak { t: lo, ln_g: f(lo) });
    }
    let points = grid_points.max(2);
    let spacing = (hi - lo) / (points - 1) as f64;

    let mut ts: Vec<f64> = (0..points).map(|i| lo + spacing * i as f64).collect();
    ts.extend_from_slice(eigs);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();

    let mut best = GaussianPeak { t: f64::INFINITY, ln_g: f64::NEG_INFINITY };
    let mut consider = |t: f64, v: f64| {
        if v > best.ln_g || (v == best.ln_g && t < best.t) {
            best = GaussianPeak { t, ln_g: v };
        }
    };
    for (i, (&t, &v)) in ts.iter().zip(&vals).enumerate() {
        consider(t, v);
        let left = if i > 0 { vals[i - 1] } else { f64::NEG_INFINITY };
        let right = vals.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if v >= left && v >= right {
            // bracket the local maximum by its neighbours and refine
            let a = if i > 0 { ts[i - 1] } else { t };
            let b = ts.get(i + 1).copied().unwrap_or(t);
            let r = golden_section_max(f, a, b, REFINEMENT_TOL);
            consider(r, f(r));
        }
    }
    Ok(best)
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

pub fn c_constant(eigs_a: &[f64], eigs_b: &[f64]) -> Result<CConstant> {
    c_constant_with_grid(eigs_a, eigs_b, DEFAULT_GRID_POINTS)
}

pub fn c_constant_with_grid(eigs_a: &[f64], eigs_b: &[f64], grid_points: usize) -> Result<CConstant> {
    let pa = gaussian_peak(eigs_a, grid_points)?;
    let pb = gaussian_peak(eigs_b, grid_points)?;
    Ok(CConstant {
        value: -pa.ln_g - pb.ln_g,
        a0_star: pa.t,
        b0_star: pb.t,
        grid_points,
        refinement_tol: REFINEMENT_TOL,
    })
}

/// `H(A) + H(B) + c`, reported next to `V(A) + V(B)` with a flag telling
/// whether the inequality between them actually holds in this state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropicSum {
    pub value: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub c: CConstant,
    pub sum: f64,
    pub premise_holds: bool,
}

pub fn entropic_sum_bound(state: &QuantumState, a: &Observable, b: &Observable) -> Result<EntropicSum> {
    let entropy_a = shannon_entropy(&outcome_distribution(state, a)?);
    let entropy_b = shannon_entropy(&outcome_distribution(state, b)?);
    let c = c_constant(a.eigenvalues(), b.eigenvalues())?;
    let value = entropy_a + entropy_b + c.value;
    let sum = variance(state, a)? + variance(state, b)?;
    Ok(EntropicSum {
        value,
        entropy_a,
        entropy_b,
        c,
        sum,
        premise_holds: le_within(value, sum, crate::tolerance::ORDER_REL),
    })
}

/// Product bound obtained by replacing the weighted sum
/// `y_n^2 (r^2 V(A) + V(B))` inside `I_{n-1}` with an entropic lower bound,
/// where `r = y_n / x_n` equalizes the last coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropicProduct {
    pub value: f64,
    /// Same expression with the leading square carrying a factor 1/4.
    pub quarter_value: f64,
    /// `None` when the last coefficients vanish and `I_{n-1}` is used as is.
    pub ratio: Option<f64>,
    /// Lower bound used for `V(rA) + V(B)`.
    pub sum_lower: Option<f64>,
    pub premise_holds: bool,
}

impl EntropicProduct {
    pub fn fell_back(&self) -> bool {
        self.ratio.is_none()
    }
}

/// Generic form: `sum_lower(r)` must return a lower bound on `r^2 V(A) + V(B)`,
/// and `weighted_sum(r)` its exact value (used only for the premise flag).
pub fn product_from_sum_lower(
    pair: &CoefficientPair,
    sum_lower: impl Fn(f64) -> Result<f64>,
    weighted_sum: impl Fn(f64) -> f64,
) -> Result<EntropicProduct> {
    let n = pair.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    let (xn, yn) = (pair.x()[n - 1], pair.y()[n - 1]);
    let head: f64 = pair.x()[..n - 1].iter().zip(&pair.y()[..n - 1]).map(|(a, b)| a * b).sum();
    if xn <= LAST_COMPONENT_FLOOR || yn <= LAST_COMPONENT_FLOOR {
        let xs: f64 = pair.norm_sqr_x();
        let ys: f64 = pair.norm_sqr_y();
        let value = head * head + xn * xn * ys + yn * yn * xs - xn * xn * yn * yn;
        let quarter_value = 0.25 * head * head + xn * xn * ys + yn * yn * xs - xn * xn * yn * yn;
        return Ok(EntropicProduct { value, quarter_value, ratio: None, sum_lower: None, premise_holds: true });
    }
    let r = yn / xn;
    let lower = sum_lower(r)?;
    let scaled_head = r * head;
    let tail = yn * yn * lower - yn.powi(4);
    let r2 = r * r;
    Ok(EntropicProduct {
        value: (scaled_head * scaled_head + tail) / r2,
        quarter_value: (0.25 * scaled_head * scaled_head + tail) / r2,
        ratio: Some(r),
        sum_lower: Some(lower),
        premise_holds: le_within(lower, weighted_sum(r), crate::tolerance::ORDER_REL),
    })
}

/// Entropic product bound with `H(A) + H(B) + c(rA, B)` as the sum lower
/// bound; `c` is recomputed for the rescaled spectrum of `A`.
pub fn entropic_product_bound(
    state: &QuantumState,
    a: &Observable,
    b: &Observable,
    config: &BoundConfig,
) -> Result<EntropicProduct> {
    let pair = config.coefficients(state, a, b)?;
    let entropy = shannon_entropy(&outcome_distribution(state, a)?) + shannon_entropy(&outcome_distribution(state, b)?);
    let (va, vb) = (variance(state, a)?, variance(state, b)?);
    product_from_sum_lower(
        &pair,
        |r| {
            let scaled: Vec<f64> = a.eigenvalues().iter().map(|e| r * e).collect();
            Ok(entropy + c_constant(&scaled, b.eigenvalues())?.value)
        },
        |r| r * r * va + vb,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexVector;
    use crate::product::partial_cs;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn sx() -> Observable {
        Observable::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }
    fn sz() -> Observable {
        Observable::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }
    fn ket0() -> QuantumState {
        QuantumState::pure(ComplexVector::from_real(&[1.0, 0.0]).unwrap()).unwrap()
    }

    // Values below were produced by an independent dense scan of g(t) on
    // [-1, 1] with 2e6 points and a bracketed root of g'(t) = 0.
    const PAIR_PM1_PER_LIST: f64 = -0.019_671_067_987;
    const PAIR_PM1_T: f64 = 0.957_504_024;

    #[test]
    fn log_sum_exp_is_stable() {
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + LN_2)).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, 0.0, 0.0]) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn entropy_variance_examples() {
        // eigenstate, alpha = 0: -ln n
        let v = entropy_variance_bound(&ket0(), &sz(), 0.0).unwrap();
        assert!((v + LN_2).abs() < 1e-14);
        // |0> in the sigma_x frame is uniform over +-1 with mean 0
        let v = entropy_variance_bound(&ket0(), &sx(), 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(entropy_variance_bound(&ket0(), &sx(), f64::NAN).is_err());
    }

    #[test]
    fn c_constant_examples() {
        let single = c_constant(&[0.3], &[-2.0]).unwrap();
        assert_eq!(single.value, 0.0);
        let one = c_constant(&[-1.0, 1.0], &[5.0]).unwrap();
        assert!((one.value - PAIR_PM1_PER_LIST).abs() < 1e-9, "{}", one.value);
        assert!((one.a0_star.abs() - PAIR_PM1_T).abs() < 1e-6);
        let two = c_constant(&[-1.0, 1.0], &[-1.0, 1.0]).unwrap();
        assert!((two.value - 2.0 * PAIR_PM1_PER_LIST).abs() < 1e-9);
        assert!(two.a0_star >= -1.0 && two.a0_star <= 1.0);
        assert_eq!(c_constant(&[], &[1.0]), Err(Error::Empty("eigenvalue list")));
    }

    #[test]
    fn c_constant_symmetries() {
        let eigs = [-0.7, 0.1, 0.4, 2.3, 2.9];
        let base = c_constant(&eigs, &[0.0, 1.0]).unwrap().value;
        let shuffled = c_constant(&[2.3, -0.7, 2.9, 0.4, 0.1], &[1.0, 0.0]).unwrap().value;
        let reflected: Vec<f64> = eigs.iter().map(|e| -e).collect();
        let mirror = c_constant(&reflected, &[0.0, -1.0]).unwrap().value;
        assert!((base - shuffled).abs() < 1e-10);
        assert!((base - mirror).abs() < 1e-10);
        let dense = c_constant_with_grid(&eigs, &[0.0, 1.0], 2 * DEFAULT_GRID_POINTS).unwrap().value;
        assert!((base - dense).abs() < 1e-8);
    }

    #[test]
    fn entropic_sum_examples() {
        let commuting = entropic_sum_bound(&ket0(), &sz(), &sz()).unwrap();
        assert_eq!(commuting.value, commuting.c.value);
        let s = entropic_sum_bound(&ket0(), &sx(), &sz()).unwrap();
        assert!((s.value - (LN_2 + 2.0 * PAIR_PM1_PER_LIST)).abs() < 1e-9);
        assert!((s.sum - 1.0).abs() < 1e-14);
        assert!(s.premise_holds);
    }

    #[test]
    fn vanishing_last_components_fall_back() {
        let p = CoefficientPair::new(vec![1.0, 2.0, 0.0], vec![3.0, 1.0, 0.0]).unwrap();
        let e = product_from_sum_lower(&p, |_| unreachable!(), |_| unreachable!()).unwrap();
        assert!(e.fell_back());
        assert_eq!(e.value, 25.0);
        assert_eq!(e.value, partial_cs(&p, 2).unwrap());
    }

    #[test]
    fn exact_sum_reproduces_i_n_minus_1() {
        let p = CoefficientPair::new(vec![0.4, 1.1, 0.8], vec![0.9, 0.2, 0.5]).unwrap();
        let (va, vb) = (p.norm_sqr_x(), p.norm_sqr_y());
        let e = product_from_sum_lower(&p, |r| Ok(r * r * va + vb), |r| r * r * va + vb).unwrap();
        let i = partial_cs(&p, 2).unwrap();
        assert!((e.value - i).abs() < 1e-13 * i, "{} vs {i}", e.value);
        assert!(e.quarter_value < e.value);
        assert!(e.premise_holds);
    }

    proptest! {
        #[test]
        fn entropic_product_scales_quadratically(
            s in 0.2f64..5.0,
            re in prop::collection::vec(-1.0f64..1.0, 3),
            im in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let v = ComplexVector::from_parts(&re, &im).unwrap();
            prop_assume!(v.norm() > 0.1);
            let state = QuantumState::pure_normalized(v).unwrap();
            let a = Observable::from_real_rows(&[&[0.5, 1.0, 0.0], &[1.0, -0.3, 0.2], &[0.0, 0.2, 1.4]]).unwrap();
            let b = Observable::from_real_rows(&[&[0.0, 0.3, 0.7], &[0.3, 1.0, 0.0], &[0.7, 0.0, -1.0]]).unwrap();
            let cfg = BoundConfig::default();
            let base = entropic_product_bound(&state, &a, &b, &cfg).unwrap();
            let scaled = entropic_product_bound(&state, &a.scaled(s).unwrap(), &b, &cfg).unwrap();
            let expect = s * s * base.value;
            prop_assert!((scaled.value - expect).abs() <= 1e-9 * expect.abs().max(1e-3), "{} vs {}", scaled.value, expect);
        }

        #[test]
        fn entropy_variance_inequality(
            alpha in prop::sample::select(vec![-2.0, -1.0, 0.5, 1.0, 5.0]),
            re in prop::collection::vec(-1.0f64..1.0, 3),
            im in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let v = ComplexVector::from_parts(&re, &im).unwrap();
            prop_assume!(v.norm() > 0.1);
            let state = QuantumState::pure_normalized(v).unwrap();
            let a = Observable::from_real_rows(&[&[0.5, 1.0, 0.0], &[1.0, -0.3, 0.2], &[0.0, 0.2, 1.4]]).unwrap();
            let bound = entropy_variance_bound(&state, &a, alpha).unwrap();
            prop_assert!(bound <= alpha * variance(&state, &a).unwrap() + 1e-9);
        }
    }
}
