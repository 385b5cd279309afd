//! Dense complex matrix kernels: Hermitian eigendecomposition (cyclic
//! Jacobi), Kronecker products and positive-semidefinite square roots.
//!
//! Everything here works on small matrices (the physics never goes beyond
//! 8x8 for the many-body part, and a few hundred rows for the rotor basis),
//! so a plain row-major `Vec` is all the storage we need.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum entry deviation from Hermiticity accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Most negative eigenvalue still treated as numerical zero by [`psd_sqrt`].
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_REL_TOL: f64 = 1e-17;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// The projector `|psi><psi|` (no normalization is applied).
    pub fn outer(psi: &[C64]) -> Self {
        let n = psi.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |a_ij - conj(a_ji)|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self + &adj;
        out.data.iter_mut().for_each(|z| *z *= 0.5);
        out
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn check_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn check_hermitian(&self) -> Result<()> {
        self.check_square()?;
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Spectral decomposition `A = V diag(lambda) V^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V f(diag(lambda)) V^dagger`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = self.dim();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &w) in fl.iter().enumerate() {
                    if w != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Deterministic: identical input always produces bitwise identical output.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    a.check_hermitian()?;
    let n = a.rows();
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = m.frobenius_norm();
    let tol = JACOBI_REL_TOL * scale;
    let tol_sq = tol * tol;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)].norm_sqr())
            .sum();
        if off <= tol_sq {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q, tol);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only (ascending).
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eig(a).map(|e| e.eigenvalues)
}

// One Jacobi rotation annihilating m[p][q]. The 2x2 block
// [[a, g e], [g conj(e), b]] with |e| = 1 is P R P^dagger for P = diag(1, conj(e))
// and real R, so the real rotation conjugated by P does the job.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, tol: f64) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g <= tol || g == 0.0 {
        return;
    }
    let n = m.rows();
    let phase = apq / g;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let se = phase * s; // J[p][q]
    let sec = phase.conj() * s; // -J[q][p]

    // columns: A <- A J
    for i in 0..n {
        let aip = m[(i, p)];
        let aiq = m[(i, q)];
        m[(i, p)] = aip * c - aiq * sec;
        m[(i, q)] = aip * se + aiq * c;
    }
    // rows: A <- J^dagger A
    for j in 0..n {
        let apj = m[(p, j)];
        let aqj = m[(q, j)];
        m[(p, j)] = apj * c - aqj * se;
        m[(q, j)] = apj * sec + aqj * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * sec;
        v[(i, q)] = vip * se + viq * c;
    }
}

/// Kronecker product: `out[(i*rB + k, j*cB + l)] = A[i,j] * B[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .expect("kron_all needs at least one factor")
        .clone();
    iter.fold(first, |acc, f| kron(&acc, f))
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    check_psd(&eig)?;
    Ok(eig.apply_function(|l| l.max(0.0).sqrt()))
}

pub(crate) fn check_psd(eig: &HermitianEigen) -> Result<()> {
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(())
}
