//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything here is sized for the handful-of-levels systems the bound
//! computations work on: square row-major matrices, plain `Vec` storage and a
//! cyclic complex Jacobi eigensolver. Tolerances are hybrid, `tol * max(1, scale)`
//! with `scale` the Frobenius norm of the input.

use std::fmt;
use std::ops::{Deref, Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance applied by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Cyclic sweeps attempted before the eigensolver gives up.
pub const DEFAULT_MAX_SWEEPS: usize = 100;

pub(crate) fn hybrid(tol: f64, scale: f64) -> f64 {
    tol * scale.max(1.0)
}

fn check_finite(entries: &[C64]) -> Result<()> {
    match entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// A column vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        check_finite(&entries)?;
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch { expected: re.len(), found: im.len() });
        }
        Self::new(re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect())
    }

    /// Standard basis vector `e_index` of length `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &ComplexVector) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, |i, j| self.0[i] * other.0[j].conj())
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

/// `<u|v>`, conjugate-linear in `u`.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Result<C64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.dim {
            list.entry(&self.row(i));
        }
        list.finish()
    }
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        check_finite(&data)?;
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect())
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let dim = columns.len();
        if dim == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        if let Some(bad) = columns.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self::from_fn(dim, |i, j| columns[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other });
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other.dim)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other.dim)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        self.check_dim(v.dim())?;
        Ok(ComplexVector((0..self.dim).map(|i| self.row(i).iter().zip(v.iter()).map(|(a, b)| a * b).sum()).collect()))
    }

    /// `<u|M|v>`.
    pub fn sandwich(&self, u: &ComplexVector, v: &ComplexVector) -> Result<C64> {
        inner(u, &self.matvec(v)?)
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

pub fn matvec(m: &Matrix, v: &ComplexVector) -> Result<ComplexVector> {
    m.matvec(v)
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `{A, B} = AB + BA`.
pub fn anticommutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.mul(b)?.add(&b.mul(a)?)
}

/// A square matrix verified Hermitian at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    /// Accepts `m` if it is Hermitian within `1e-12 * max(1, ||m||_F)` and
    /// stores the exactly Hermitian part `(m + m^dagger) / 2`.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.dim == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        check_finite(&m.data)?;
        let deviation = m.hermitian_deviation();
        if deviation > hybrid(HERMITIAN_TOL, m.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(&m))
    }

    fn symmetrize(m: &Matrix) -> Self {
        let n = m.dim;
        Self(Matrix::from_fn(n, |i, j| {
            if i == j {
                C64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        }))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(Matrix::from_real_rows(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self(Matrix::from_fn(n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO }))
    }

    /// `|v><v|`.
    pub fn projector(v: &ComplexVector) -> Self {
        Self::symmetrize(&v.outer(v))
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// `H - shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.dim {
            m[(i, i)] -= shift;
        }
        Self(m)
    }

    pub fn scaled(&self, r: f64) -> Self {
        Self(self.0.scaled(C64::new(r, 0.0)))
    }

    pub fn anticommutator(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(Self::symmetrize(&anticommutator(&self.0, &other.0)?))
    }

    /// Real trace; the imaginary part of a Hermitian trace is zero.
    pub fn real_trace(&self) -> f64 {
        (0..self.0.dim).map(|i| self.0[(i, i)].re).sum()
    }
}

impl Deref for HermitianMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// `H = V diag(eigenvalues) V^dagger` with ascending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ComplexVector>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, |i, j| {
            self.eigenvalues.iter().zip(&self.eigenvectors).map(|(&l, v)| v[i] * v[j].conj() * l).sum()
        })
    }

    /// `||V diag V^dagger - H||_F`.
    pub fn reconstruction_residual(&self, h: &HermitianMatrix) -> f64 {
        self.reconstruct().sub(h).map(|d| d.frobenius_norm()).unwrap_or(f64::INFINITY)
    }

    /// `max |V^dagger V - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g: C64 =
                    self.eigenvectors[i].iter().zip(self.eigenvectors[j].iter()).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

pub fn hermitian_eig(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    hermitian_eig_with(h, DEFAULT_MAX_SWEEPS)
}

/// Cyclic Jacobi diagonalization with complex rotations.
///
/// Each rotation first removes the phase of `h_pq` and then applies the real
/// symmetric Jacobi rotation, so the pivot is annihilated exactly. Sweeps run
/// in fixed row-major pivot order, which makes the output a pure function of
/// the input.
pub fn hermitian_eig_with(h: &HermitianMatrix, max_sweeps: usize) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let scale = h.frobenius_norm();
    let mut a = h.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let target = f64::EPSILON * scale;

    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&a) <= target;
    let mut sweep = 0;
    while !converged && sweep < max_sweeps {
        sweep += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let mag = b.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Negligible against the whole matrix: drop instead of rotating.
                if mag <= 1e-3 * target {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                let phase = b / mag; // e^{i phi}
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();

                // A <- A G with G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on (p, q).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ph_conj * s;
                    a[(k, q)] = akp * s + akq * ph_conj * c;
                }
                // A <- G^dagger A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(app - t * mag, 0.0);
                a[(q, q)] = C64::new(aqq + t * mag, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_conj * s;
                    v[(k, q)] = vkp * s + vkq * ph_conj * c;
                }
            }
        }
        converged = !rotated || off_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::NotConverged { sweeps: max_sweeps, residual: off_norm(&a) });
    }

    let mut pairs: Vec<(f64, ComplexVector)> = (0..n).map(|j| (a[(j, j)].re, phase_normalized(v.column(j)))).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    order_degenerate_clusters(&mut pairs, hybrid(1e-10, scale));

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Rotates `v` so its first non-negligible component is real and positive.
fn phase_normalized(v: ComplexVector) -> ComplexVector {
    match first_significant(&v) {
        Some(i) => {
            let z = v[i];
            v.scaled(z.conj() / z.norm())
        }
        None => v,
    }
}

fn first_significant(v: &ComplexVector) -> Option<usize> {
    let cutoff = 1e-12 * v.norm().max(f64::MIN_POSITIVE);
    v.iter().position(|z| z.norm() > cutoff)
}

/// Within runs of eigenvalues equal to `tol`, order eigenvectors by the index
/// of their first significant component (stable, so ties keep solver order).
fn order_degenerate_clusters(pairs: &mut [(f64, ComplexVector)], tol: f64) {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tol {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by_key(|(_, v)| first_significant(v).unwrap_or(usize::MAX));
        }
        start = end;
    }
}
