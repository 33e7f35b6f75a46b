//! States, observables and the state-dependent quantities built from them:
//! expectations, variances, coefficient vectors and outcome distributions.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, hybrid, inner, ComplexVector, HermitianMatrix, Matrix, SpectralDecomposition, C64, ONE, ZERO,
};

/// Normalization / trace tolerance for states.
pub const NORM_TOL: f64 = 1e-10;
/// Largest allowed imaginary part of an expectation, relative to `max(1, ||A||_F)`.
pub const IMAG_TOL: f64 = 1e-10;
/// A density matrix counts as pure when its top eigenvalue is at least `1 - PURITY_TOL`.
pub const PURITY_TOL: f64 = 1e-8;
/// Eigenvalues closer than this are merged into one outcome.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Orthonormality tolerance for user-supplied frames.
pub const BASIS_TOL: f64 = 1e-10;

/// A Hermitian matrix together with its spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: HermitianMatrix,
    spectrum: SpectralDecomposition,
}

impl Observable {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let spectrum = hermitian_eig(&matrix)?;
        Ok(Self { matrix, spectrum })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[ComplexVector] {
        &self.spectrum.eigenvectors
    }

    /// `r * A`, re-diagonalized.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        Self::new(self.matrix.scaled(r))
    }

    /// `A - <A> I` in `state`.
    pub fn centered(&self, state: &QuantumState) -> Result<CenteredObservable> {
        let mean = expectation(state, self)?;
        Ok(CenteredObservable {
            mean,
            matrix: self.matrix.shifted(mean),
            eigenvalues: self.eigenvalues().iter().map(|a| a - mean).collect(),
            eigenvectors: self.eigenvectors().to_vec(),
        })
    }
}

/// An observable shifted by its expectation value in a given state.
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredObservable {
    pub mean: f64,
    pub matrix: HermitianMatrix,
    /// Shifted eigenvalues `a_i - <A>`, aligned with `eigenvectors`.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ComplexVector>,
}

/// A pure state vector or a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(ComplexVector),
    Density(HermitianMatrix),
}

impl QuantumState {
    pub fn pure(v: ComplexVector) -> Result<Self> {
        let deviation = (v.norm() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self::Pure(v))
    }

    /// Normalizes `v` first; rejects the zero vector.
    pub fn pure_normalized(v: ComplexVector) -> Result<Self> {
        match v.normalized() {
            Some(u) => Ok(Self::Pure(u)),
            None => Err(Error::NotNormalized { deviation: 1.0 }),
        }
    }

    pub fn density(rho: HermitianMatrix) -> Result<Self> {
        let deviation = (rho.real_trace() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        let spectrum = hermitian_eig(&rho)?;
        let min_eigenvalue = spectrum.eigenvalues[0];
        if min_eigenvalue < -NORM_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self::Density(rho))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.dim(),
            Self::Density(rho) => rho.dim(),
        }
    }

    /// Pure vectors, and density matrices within the purity tolerance.
    pub fn is_pure(&self) -> bool {
        match self {
            Self::Pure(_) => true,
            Self::Density(_) => extract_pure(self).is_ok(),
        }
    }

    pub fn density_matrix(&self) -> HermitianMatrix {
        match self {
            Self::Pure(v) => HermitianMatrix::projector(v),
            Self::Density(rho) => rho.clone(),
        }
    }

    /// The state vector, extracted from a rank-one density matrix if needed.
    pub fn pure_vector(&self) -> Result<Cow<'_, ComplexVector>> {
        match self {
            Self::Pure(v) => Ok(Cow::Borrowed(v)),
            Self::Density(_) => match extract_pure(self)? {
                Self::Pure(v) => Ok(Cow::Owned(v)),
                Self::Density(_) => unreachable!("extract_pure returns a vector"),
            },
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n });
        }
        Ok(())
    }

    /// `<Psi|M|Psi>` or `Tr(rho M)` for an arbitrary square matrix.
    pub fn expect(&self, m: &Matrix) -> Result<C64> {
        self.check_dim(m.dim())?;
        match self {
            Self::Pure(v) => m.sandwich(v, v),
            Self::Density(rho) => Ok(rho.mul(m)?.trace()),
        }
    }

    /// `<u|rho|u>`, the probability of finding the state in `|u>`.
    pub fn overlap_probability(&self, u: &ComplexVector) -> Result<f64> {
        self.check_dim(u.dim())?;
        let p = match self {
            Self::Pure(v) => inner(u, v)?.norm_sqr(),
            Self::Density(rho) => rho.sandwich(u, u)?.re,
        };
        Ok(p.max(0.0))
    }
}

/// Dominant eigenvector of a (numerically) rank-one density matrix.
pub fn extract_pure(state: &QuantumState) -> Result<QuantumState> {
    match state {
        QuantumState::Pure(_) => Ok(state.clone()),
        QuantumState::Density(rho) => {
            let spectrum = hermitian_eig(rho)?;
            let top = spectrum.dim() - 1;
            let top_eigenvalue = spectrum.eigenvalues[top];
            if top_eigenvalue < 1.0 - PURITY_TOL {
                return Err(Error::Purity { top_eigenvalue });
            }
            Ok(QuantumState::Pure(spectrum.eigenvectors[top].clone()))
        }
    }
}

pub fn expectation(state: &QuantumState, obs: &Observable) -> Result<f64> {
    let z = state.expect(obs.matrix())?;
    let residual = z.im.abs();
    if residual > hybrid(IMAG_TOL, obs.matrix().frobenius_norm()) {
        return Err(Error::ImaginaryResidual { residual });
    }
    Ok(z.re)
}

/// `<(A - <A>)^2>`, clamped at zero against rounding.
pub fn variance(state: &QuantumState, obs: &Observable) -> Result<f64> {
    let centered = obs.centered(state)?;
    let v = match state {
        QuantumState::Pure(psi) => centered.matrix.matvec(psi)?.norm_sqr(),
        QuantumState::Density(_) => state.expect(&centered.matrix.mul(&centered.matrix)?)?.re,
    };
    Ok(v.max(0.0))
}

/// Which frame the coefficient vectors were expanded in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Computational,
    EigenA,
    EigenB,
    Explicit,
}

/// An orthonormal frame `{|psi_i>}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    kind: BasisKind,
    vectors: Vec<ComplexVector>,
}

impl Basis {
    pub fn computational(n: usize) -> Self {
        Self { kind: BasisKind::Computational, vectors: (0..n).map(|i| ComplexVector::basis(n, i)).collect() }
    }

    /// Eigenbasis of `obs`, tagged as `kind` (normally `EigenA` or `EigenB`).
    pub fn eigen(obs: &Observable, kind: BasisKind) -> Self {
        Self { kind, vectors: obs.eigenvectors().to_vec() }
    }

    /// Columns of an explicit unitary; orthonormality is checked.
    pub fn explicit(vectors: Vec<ComplexVector>) -> Result<Self> {
        let n = vectors.len();
        if n == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        let mut deviation: f64 = 0.0;
        for (i, u) in vectors.iter().enumerate() {
            if u.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: u.dim() });
            }
            for (j, v) in vectors.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                deviation = deviation.max((inner(u, v)? - target).norm());
            }
        }
        if deviation > BASIS_TOL {
            return Err(Error::NonOrthonormal { deviation });
        }
        Ok(Self { kind: BasisKind::Explicit, vectors })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// How a [`CoefficientPair`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `x_i = |<psi_i|(A - <A>)|Psi>|` in a chosen frame.
    Basis,
    /// `x_i = |a_i - <A>| sqrt(<a_i|rho|a_i>)`.
    Fidelity,
    /// Raw vectors handed in directly.
    Supplied,
}

/// Nonnegative coefficient vectors with `|x|^2 = V(A)` and `|y|^2 = V(B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientPair {
    x: Vec<f64>,
    y: Vec<f64>,
    construction: Construction,
    basis: Option<BasisKind>,
}

impl CoefficientPair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::build(x, y, Construction::Supplied, None)
    }

    fn build(x: Vec<f64>, y: Vec<f64>, construction: Construction, basis: Option<BasisKind>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        if let Some(index) = x.iter().chain(&y).position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidCoefficient { index: index % x.len() });
        }
        Ok(Self { x, y, construction, basis })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn basis(&self) -> Option<BasisKind> {
        self.basis
    }

    /// `|x|^2`, which equals `V(A)` for state-derived pairs.
    pub fn norm_sqr_x(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    pub fn norm_sqr_y(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum()
    }

    /// Same vectors with both sides relabeled: `x[px(i)]`, `y[py(i)]`.
    pub(crate) fn relabeled(&self, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y, construction: self.construction, basis: self.basis }
    }

    /// Scales `x` by `r >= 0` (the pair of `rA` and `B`).
    pub fn scale_x(&self, r: f64) -> Self {
        self.relabeled(self.x.iter().map(|v| v * r).collect(), self.y.clone())
    }
}

/// Coefficients from expanding `(A - <A>)|Psi>` and `(B - <B>)|Psi>` in `basis`.
pub fn coefficients_basis(
    state: &QuantumState,
    a: &Observable,
    b: &Observable,
    basis: &Basis,
) -> Result<CoefficientPair> {
    let n = state.dim();
    for d in [a.dim(), b.dim(), basis.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    let pure = QuantumState::Pure(state.pure_vector()?.into_owned());
    let QuantumState::Pure(psi) = &pure else { unreachable!() };
    let abar_psi = a.centered(&pure)?.matrix.matvec(psi)?;
    let bbar_psi = b.centered(&pure)?.matrix.matvec(psi)?;
    let project = |w: &ComplexVector| -> Result<Vec<f64>> {
        basis.vectors().iter().map(|u| inner(u, w).map(|z| z.norm())).collect()
    };
    CoefficientPair::build(project(&abar_psi)?, project(&bbar_psi)?, Construction::Basis, Some(basis.kind()))
}

/// Fidelity-weighted coefficients `|a_i - <A>| sqrt(F_i)`; valid for mixed states.
pub fn coefficients_fidelity(state: &QuantumState, a: &Observable, b: &Observable) -> Result<CoefficientPair> {
    let weights = |obs: &Observable| -> Result<Vec<f64>> {
        let centered = obs.centered(state)?;
        centered
            .eigenvalues
            .iter()
            .zip(&centered.eigenvectors)
            .map(|(shift, v)| Ok(shift.abs() * state.overlap_probability(v)?.sqrt()))
            .collect()
    };
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    CoefficientPair::build(weights(a)?, weights(b)?, Construction::Fidelity, None)
}

/// Measurement statistics of `obs` in the state, one entry per eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    /// Probabilities summed over eigenvalues equal within [`DEGENERACY_TOL`].
    pub fn merged(&self) -> OutcomeDistribution {
        let mut order: Vec<usize> = (0..self.outcomes.len()).collect();
        order.sort_by(|&i, &j| self.outcomes[i].total_cmp(&self.outcomes[j]));
        let mut outcomes: Vec<f64> = Vec::new();
        let mut probabilities: Vec<f64> = Vec::new();
        for i in order {
            let value = self.outcomes[i];
            match outcomes.last() {
                Some(&last) if value - last <= DEGENERACY_TOL => {
                    *probabilities.last_mut().unwrap() += self.probabilities[i];
                }
                _ => {
                    outcomes.push(value);
                    probabilities.push(self.probabilities[i]);
                }
            }
        }
        OutcomeDistribution { outcomes, probabilities }
    }
}

pub fn outcome_distribution(state: &QuantumState, obs: &Observable) -> Result<OutcomeDistribution> {
    let probabilities = obs.eigenvectors().iter().map(|v| state.overlap_probability(v)).collect::<Result<Vec<_>>>()?;
    Ok(OutcomeDistribution { outcomes: obs.eigenvalues().to_vec(), probabilities })
}

/// Shannon entropy in nats over distinct outcomes, `0 ln 0 = 0`.
pub fn shannon_entropy(dist: &OutcomeDistribution) -> f64 {
    let h: f64 = dist.merged().probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    h.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn sx() -> Observable {
        Observable::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }
    fn sz() -> Observable {
        Observable::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }
    fn sy() -> Observable {
        let m = Matrix::from_rows(vec![vec![ZERO, C64::new(0.0, -1.0)], vec![C64::new(0.0, 1.0), ZERO]]).unwrap();
        Observable::new(HermitianMatrix::new(m).unwrap()).unwrap()
    }
    fn lx() -> Observable {
        let h = FRAC_1_SQRT_2;
        Observable::from_real_rows(&[&[0.0, h, 0.0], &[h, 0.0, h], &[0.0, h, 0.0]]).unwrap()
    }
    fn ket0() -> QuantumState {
        QuantumState::Pure(ComplexVector::basis(2, 0))
    }
    fn mixed() -> QuantumState {
        QuantumState::density(HermitianMatrix::identity(2).scaled(0.5)).unwrap()
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(expectation(&ket0(), &sz()).unwrap(), 1.0);
        assert_eq!(expectation(&ket0(), &sx()).unwrap(), 0.0);
        // (1/sqrt2, -1/sqrt2, 0): <L_x> = -2 * (1/2) * (1/sqrt2) by direct expansion
        let s = FRAC_1_SQRT_2;
        let psi = QuantumState::pure(ComplexVector::from_real(&[s, -s, 0.0]).unwrap()).unwrap();
        let direct = {
            let lxpsi = [-0.5, 0.5, -0.5];
            s * lxpsi[0] + (-s) * lxpsi[1]
        };
        assert!((expectation(&psi, &lx()).unwrap() - direct).abs() < 1e-15);
        assert!((direct + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance(&ket0(), &sz()).unwrap(), 0.0);
        assert_eq!(variance(&ket0(), &sx()).unwrap(), 1.0);
        let one = QuantumState::Pure(ComplexVector::basis(3, 0));
        assert!((variance(&one, &lx()).unwrap() - 0.5).abs() < 1e-15);
        assert!((variance(&mixed(), &sz()).unwrap() - 1.0).abs() < 1e-15);
        let wrong = QuantumState::Pure(ComplexVector::basis(3, 0));
        assert!(matches!(variance(&wrong, &sx()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn variance_scales_quadratically() {
        let psi =
            QuantumState::pure_normalized(ComplexVector::new(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.7)]).unwrap())
                .unwrap();
        let v = variance(&psi, &sx()).unwrap();
        let v3 = variance(&psi, &sx().scaled(-3.0).unwrap()).unwrap();
        assert!((v3 - 9.0 * v).abs() <= 1e-10 * v3);
    }

    #[test]
    fn basis_coefficients_for_pauli_pair() {
        let pair = coefficients_basis(&ket0(), &sx(), &sy(), &Basis::computational(2)).unwrap();
        assert_eq!(pair.x(), &[0.0, 1.0]);
        assert_eq!(pair.y(), &[0.0, 1.0]);
        assert_eq!(pair.construction(), Construction::Basis);
        let ident = Observable::new(HermitianMatrix::identity(2)).unwrap();
        let trivial = coefficients_basis(&ket0(), &ident, &sx(), &Basis::computational(2)).unwrap();
        assert_eq!(trivial.x(), &[0.0, 0.0]);
    }

    #[test]
    fn eigenbasis_expansion_matches_fidelity_weights() {
        let psi = QuantumState::pure_normalized(
            ComplexVector::new(vec![C64::new(0.6, 0.2), C64::new(-0.1, 0.5), C64::new(0.3, -0.4)]).unwrap(),
        )
        .unwrap();
        let a = lx();
        let b = Observable::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, -1.0]]).unwrap();
        let eig = coefficients_basis(&psi, &a, &b, &Basis::eigen(&a, BasisKind::EigenA)).unwrap();
        let fid = coefficients_fidelity(&psi, &a, &b).unwrap();
        for (u, v) in eig.x().iter().zip(fid.x()) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_coefficients_on_mixed_and_eigenstates() {
        let pair = coefficients_fidelity(&mixed(), &sz(), &sx()).unwrap();
        for v in pair.x() {
            assert!((v - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let eig = coefficients_fidelity(&ket0(), &sz(), &sx()).unwrap();
        assert_eq!(eig.x(), &[0.0, 0.0]);
    }

    #[test]
    fn basis_coefficients_refuse_mixed_states() {
        let err = coefficients_basis(&mixed(), &sx(), &sz(), &Basis::computational(2)).unwrap_err();
        assert!(matches!(err, Error::Purity { .. }));
    }

    #[test]
    fn extract_pure_examples() {
        let rho0 = QuantumState::density(HermitianMatrix::projector(&ComplexVector::basis(2, 0))).unwrap();
        assert_eq!(extract_pure(&rho0).unwrap(), ket0());
        let plus = HermitianMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let QuantumState::Pure(v) = extract_pure(&QuantumState::density(plus).unwrap()).unwrap() else { panic!() };
        assert!((v[0].norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v[0] - v[1]).norm() < 1e-12);
        assert!(matches!(extract_pure(&mixed()), Err(Error::Purity { .. })));
    }

    #[test]
    fn density_validation() {
        let bad_trace = HermitianMatrix::identity(2);
        assert!(matches!(QuantumState::density(bad_trace), Err(Error::NotNormalized { .. })));
        let negative = HermitianMatrix::diagonal(&[1.5, -0.5]);
        assert!(matches!(QuantumState::density(negative), Err(Error::NotPositive { .. })));
        let unnormalized = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(QuantumState::pure(unnormalized), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn entropy_examples() {
        let d = outcome_distribution(&ket0(), &sz()).unwrap();
        assert_eq!(shannon_entropy(&d), 0.0);
        let d = outcome_distribution(&ket0(), &sx()).unwrap();
        assert!((d.probabilities[0] - 0.5).abs() < 1e-15);
        assert!((shannon_entropy(&d) - LN_2).abs() < 1e-15);
        let uniform = OutcomeDistribution { outcomes: vec![0.0, 1.0, 2.0, 3.0], probabilities: vec![0.25; 4] };
        assert!((shannon_entropy(&uniform) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_outcomes_merge() {
        let d = OutcomeDistribution { outcomes: vec![1.0, 1.0 + 1e-12, 2.0], probabilities: vec![0.25, 0.25, 0.5] };
        assert!((shannon_entropy(&d) - LN_2).abs() < 1e-15);
        let m = d.merged();
        assert_eq!(m.outcomes.len(), 2);
    }
}
