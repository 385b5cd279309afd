//! Intrinsic-decoherence dynamics.
//!
//! With `H = sum_m e_m |m><m|`, the Milburn equation
//! `d rho/dt = -i[H, rho] - (gamma/2)[H, [H, rho]]` is solved exactly in the
//! energy eigenbasis:
//!
//! ```text
//! rho_mn(t) = exp(-(gamma t / 2)(e_m - e_n)^2 - i (e_m - e_n) t) rho_mn(0)
//! ```
//!
//! Populations never change; coherences between levels with gap `d` decay at
//! rate `gamma d^2 / 2` while rotating at frequency `d`. Time is in units of
//! hbar/B.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::manybody::SystemHamiltonian;
use crate::numerics::{check_psd, hermitian_eig, ComplexMatrix, HermitianEigen};

pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
pub const DENSITY_TRACE_TOL: f64 = 1e-12;
pub const DENSITY_PSD_TOL: f64 = 1e-10;

/// Gaps at or below this (units of B) count as degenerate in [`MilburnPropagator::dephased_limit`].
pub const DEFAULT_GAP_TOL: f64 = 1e-9;

/// A Hermitian, unit-trace, positive-semidefinite state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (deviation {deviation:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TRACE_TOL || trace.im.abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        let eig = hermitian_eig(&matrix)?;
        let min = eig.eigenvalues[0];
        if min < -DENSITY_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|`; `psi` must be normalized to 1e-12.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || (norm - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "state vector norm^2 is {norm}, expected 1"
            )));
        }
        Ok(Self {
            matrix: ComplexMatrix::outer(psi),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `tr(rho^2)`
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Diagonal in the product basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Re-checks every invariant; mostly for tests of derived states.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone()).map(|_| ())
    }
}

/// Spectral data of a Hamiltonian together with a decoherence factor.
#[derive(Clone, Debug)]
pub struct MilburnPropagator {
    spectral: HermitianEigen,
    gamma: f64,
}

impl MilburnPropagator {
    pub fn new(h: &SystemHamiltonian, gamma: f64) -> Result<Self> {
        Self::from_spectral(h.spectral().clone(), gamma)
    }

    /// Diagonalizes an arbitrary Hermitian Hamiltonian.
    pub fn from_hamiltonian(h: &ComplexMatrix, gamma: f64) -> Result<Self> {
        Self::from_spectral(hermitian_eig(h)?, gamma)
    }

    pub fn from_spectral(spectral: HermitianEigen, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "decoherence factor must be finite and non-negative, got {gamma}"
            )));
        }
        Ok(Self { spectral, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    pub fn spectral(&self) -> &HermitianEigen {
        &self.spectral
    }

    /// Smallest level spacing above `gap_tol`, if any.
    pub fn min_nonzero_gap(&self, gap_tol: f64) -> Option<f64> {
        let e = &self.spectral.eigenvalues;
        let mut best: Option<f64> = None;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let d = (e[i] - e[j]).abs();
                if d > gap_tol && best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Prepares `rho0` for repeated evaluation at many times.
    pub fn trajectory(&self, rho0: &DensityMatrix) -> Result<Trajectory<'_>> {
        if rho0.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho0.dim(),
            });
        }
        let v = &self.spectral.eigenvectors;
        let in_eigenbasis = &(&v.adjoint() * rho0.matrix()) * v;
        Ok(Trajectory {
            propagator: self,
            in_eigenbasis,
        })
    }

    pub fn evolve(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        self.trajectory(rho0)?.at(t)
    }

    /// The `t -> infinity` state: every coherence between levels more than
    /// `DEFAULT_GAP_TOL` apart is removed.
    pub fn dephased_limit(&self, rho0: &DensityMatrix) -> Result<DensityMatrix> {
        self.dephased_limit_with_tol(rho0, DEFAULT_GAP_TOL)
    }

    pub fn dephased_limit_with_tol(
        &self,
        rho0: &DensityMatrix,
        gap_tol: f64,
    ) -> Result<DensityMatrix> {
        if self.gamma == 0.0 {
            return Err(Error::InvalidArgument(
                "dephased limit needs gamma > 0; without decoherence no coherence decays".into(),
            ));
        }
        let traj = self.trajectory(rho0)?;
        let e = &self.spectral.eigenvalues;
        let n = self.dim();
        let mut r = traj.in_eigenbasis;
        for m in 0..n {
            for k in 0..n {
                if (e[m] - e[k]).abs() > gap_tol {
                    r[(m, k)] = C64::new(0.0, 0.0);
                }
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            self.to_product_basis(&r),
        ))
    }

    fn to_product_basis(&self, r: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.spectral.eigenvectors;
        (&(v * r) * &v.adjoint()).hermitian_part()
    }
}

/// An initial state expressed in the energy eigenbasis of a propagator.
pub struct Trajectory<'a> {
    propagator: &'a MilburnPropagator,
    in_eigenbasis: ComplexMatrix,
}

impl Trajectory<'_> {
    pub fn at(&self, t: f64) -> Result<DensityMatrix> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "evolution time must be finite and non-negative, got {t}"
            )));
        }
        let prop = self.propagator;
        let e = &prop.spectral.eigenvalues;
        let n = e.len();
        let mut r = self.in_eigenbasis.clone();
        for m in 0..n {
            for k in 0..n {
                if m == k {
                    continue;
                }
                let d = e[m] - e[k];
                let decay = (-0.5 * prop.gamma * t * d * d).exp();
                let phase = C64::from_polar(decay, -d * t);
                r[(m, k)] *= phase;
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            prop.to_product_basis(&r),
        ))
    }
}

/// `-i[H, rho] - (gamma/2)[H, [H, rho]]`.
pub fn master_equation_rhs(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    gamma: f64,
) -> Result<ComplexMatrix> {
    if h.rows() != rho.dim() || !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: h.rows(),
        });
    }
    let c1 = h.commutator(rho.matrix());
    let c2 = h.commutator(&c1);
    Ok(&c1.scale(C64::new(0.0, -1.0)) - &c2.scale_real(0.5 * gamma))
}

/// Smallest eigenvalue check used by tests and the scan layer.
pub fn min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let eig = hermitian_eig(rho.matrix())?;
    check_psd(&eig)?;
    Ok(eig.eigenvalues[0])
}
