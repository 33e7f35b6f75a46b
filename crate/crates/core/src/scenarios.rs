//! Spin operators, the two one-parameter state families used for sweeps, and
//! seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, HermitianMatrix, Matrix, C64};
use crate::quantum::{Observable, QuantumState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Half,
    One,
}

/// `(sigma_x, sigma_y, sigma_z)`.
pub fn pauli() -> (Observable, Observable, Observable) {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let sx = Matrix::from_rows(vec![vec![z, one], vec![one, z]]).expect("2x2");
    let sy = Matrix::from_rows(vec![vec![z, -i], vec![i, z]]).expect("2x2");
    let sz = Matrix::from_rows(vec![vec![one, z], vec![z, -one]]).expect("2x2");
    (obs(sx), obs(sy), obs(sz))
}

fn obs(m: Matrix) -> Observable {
    Observable::new(HermitianMatrix::new(m).expect("hermitian by construction")).expect("small matrix diagonalizes")
}

/// Angular momentum components satisfying `[L_x, L_y] = i L_z` (units of hbar).
///
/// Spin-1/2 returns `sigma / 2`; spin-1 uses the basis order `m = +1, 0, -1`.
pub fn spin_operators(spin: Spin) -> (Observable, Observable, Observable) {
    match spin {
        Spin::Half => {
            let (x, y, z) = pauli();
            (x.scaled(0.5).unwrap(), y.scaled(0.5).unwrap(), z.scaled(0.5).unwrap())
        }
        Spin::One => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let r = |v: f64| C64::new(v, 0.0);
            let im = |v: f64| C64::new(0.0, v);
            let lx = Matrix::from_rows(vec![
                vec![r(0.0), r(s), r(0.0)],
                vec![r(s), r(0.0), r(s)],
                vec![r(0.0), r(s), r(0.0)],
            ]);
            let ly = Matrix::from_rows(vec![
                vec![r(0.0), im(-s), r(0.0)],
                vec![im(s), r(0.0), im(-s)],
                vec![r(0.0), im(s), r(0.0)],
            ]);
            let lz = Matrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, -1.0]]);
            (obs(lx.expect("3x3")), obs(ly.expect("3x3")), obs(lz.expect("3x3")))
        }
    }
}

/// `cos(theta)|m=1> - sin(theta)|m=0>`.
pub fn spin1_state(theta: f64) -> Result<QuantumState> {
    if !theta.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    QuantumState::pure(ComplexVector::from_real(&[theta.cos(), -theta.sin(), 0.0])?)
}

/// Bloch vector `(cos(t/2), (sqrt 3 / 2) sin(t/2), sin(t/2) / 2)`.
pub fn spin_half_bloch(theta: f64) -> [f64; 3] {
    let (s, c) = (0.5 * theta).sin_cos();
    [c, 0.75f64.sqrt() * s, 0.5 * s]
}

/// `(I + r . sigma) / 2` with the unit Bloch vector of [`spin_half_bloch`].
pub fn spin_half_rho(theta: f64) -> Result<QuantumState> {
    if !theta.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    let [x, y, z] = spin_half_bloch(theta);
    let rho = Matrix::from_rows(vec![
        vec![C64::new(0.5 * (1.0 + z), 0.0), C64::new(0.5 * x, -0.5 * y)],
        vec![C64::new(0.5 * x, 0.5 * y), C64::new(0.5 * (1.0 - z), 0.0)],
    ])?;
    QuantumState::density(HermitianMatrix::new(rho)?)
}

/// A one-parameter family of states with a fixed observable pair.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ScenarioKind {
    /// Spin-1 state `cos t |1> - sin t |0>` with `A = L_x`, `B = L_y`.
    Spin1LxLy,
    /// Spin-1/2 density family with `A = sigma_x`, `B = sigma_z`.
    SpinHalfSxSz,
    /// `normalize(cos t |u> + sin t |v>)` with caller-supplied observables.
    Custom { a: Observable, b: Observable, start: ComplexVector, end: ComplexVector },
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spin1LxLy => "spin1",
            Self::SpinHalfSxSz => "spinhalf",
            Self::Custom { .. } => "custom",
        }
    }

    pub fn observables(&self) -> (Observable, Observable) {
        match self {
            Self::Spin1LxLy => {
                let (lx, ly, _) = spin_operators(Spin::One);
                (lx, ly)
            }
            Self::SpinHalfSxSz => {
                let (sx, _, sz) = pauli();
                (sx, sz)
            }
            Self::Custom { a, b, .. } => (a.clone(), b.clone()),
        }
    }

    pub fn state(&self, theta: f64) -> Result<QuantumState> {
        match self {
            Self::Spin1LxLy => spin1_state(theta),
            Self::SpinHalfSxSz => spin_half_rho(theta),
            Self::Custom { start, end, .. } => {
                if !theta.is_finite() {
                    return Err(Error::NonFinite { index: 0 });
                }
                let (s, c) = theta.sin_cos();
                let mixed: Vec<C64> = start.iter().zip(end.iter()).map(|(u, v)| u * c + v * s).collect();
                QuantumState::pure_normalized(ComplexVector::new(mixed)?)
            }
        }
    }
}

/// Generator for trial `trial` of a run seeded with `seed`; each trial owns
/// its own ChaCha stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state from normalized complex Gaussians.
pub fn random_pure_state_with(rng: &mut impl Rng, n: usize) -> Result<QuantumState> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { min: 1, found: 0 });
    }
    loop {
        let v = ComplexVector::new((0..n).map(|_| gaussian_complex(rng)).collect())?;
        if v.norm() > 1e-8 {
            return QuantumState::pure_normalized(v);
        }
    }
}

/// `scale * (G + G^dagger) / 2` with complex Gaussian `G`.
pub fn random_hermitian_with(rng: &mut impl Rng, n: usize, scale: f64) -> Result<Observable> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { min: 1, found: 0 });
    }
    let g = Matrix::from_fn(n, |_, _| gaussian_complex(rng));
    let h = g.add(&g.adjoint())?.scaled(C64::new(0.5 * scale, 0.0));
    Observable::new(HermitianMatrix::new(h)?)
}

pub fn random_pure_state(n: usize, seed: u64) -> Result<QuantumState> {
    random_pure_state_with(&mut trial_rng(seed, 0), n)
}

pub fn random_hermitian(n: usize, seed: u64, scale: f64) -> Result<Observable> {
    random_hermitian_with(&mut trial_rng(seed, 0), n, scale)
}

/// Nonnegative vectors with entries in `[0, scale)`; about one entry in
/// eight is set to exactly zero to exercise degenerate supports.
pub fn random_nonneg_vec(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| if rng.random_ratio(1, 8) { 0.0 } else { scale * rng.random::<f64>() }).collect()
}
