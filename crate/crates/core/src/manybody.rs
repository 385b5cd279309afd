//! Two- and three-molecule Hamiltonians in the qubit product basis.
//!
//! Site 0 is the leftmost Kronecker factor, so basis index `0b001` is `|001>`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, kron_all, ComplexMatrix, HermitianEigen};
use crate::pendular::PendularQubit;

pub const DEFAULT_ALPHA: f64 = FRAC_PI_2;

/// A linear, equidistant chain of identical molecules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainGeometry {
    n: usize,
    omega: f64,
    alpha: f64,
}

impl ChainGeometry {
    pub fn new(n: usize, omega: f64, alpha: f64) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::InvalidArgument(format!(
                "chain must hold 2 or 3 molecules, got {n}"
            )));
        }
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coupling omega must be finite and non-negative, got {omega}"
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in [0, pi], got {alpha}"
            )));
        }
        Ok(Self { n, omega, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `(site_i, site_j, omega_ij)`. With `Omega ~ r^-3`, the end-to-end pair
    /// of a three-chain sits twice as far apart and couples with `omega / 8`.
    pub fn couplings(&self) -> Vec<(usize, usize, f64)> {
        match self.n {
            2 => vec![(0, 1, self.omega)],
            _ => vec![
                (0, 1, self.omega),
                (1, 2, self.omega),
                (0, 2, self.omega / 8.0),
            ],
        }
    }
}

/// `1 - 3 cos^2(alpha)`.
pub fn angular_factor(alpha: f64) -> f64 {
    let c = alpha.cos();
    1.0 - 3.0 * c * c
}

fn embed(n: usize, placed: &[(usize, &ComplexMatrix)]) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let factors: Vec<&ComplexMatrix> = (0..n)
        .map(|site| {
            placed
                .iter()
                .find(|(s, _)| *s == site)
                .map(|(_, m)| *m)
                .unwrap_or(&id)
        })
        .collect();
    kron_all(factors)
}

/// `diag(E0, E1)` on `site`, identity elsewhere.
pub fn site_energy_term(q: &PendularQubit, site: usize, n: usize) -> Result<ComplexMatrix> {
    if site >= n {
        return Err(Error::InvalidArgument(format!(
            "site {site} out of range for {n} molecules"
        )));
    }
    let local = ComplexMatrix::from_diagonal(&[q.e0, q.e1]);
    Ok(embed(n, &[(site, &local)]))
}

/// Angle-averaged dipole-dipole coupling between two sites.
pub fn pair_interaction_term(
    q: &PendularQubit,
    omega_ij: f64,
    alpha: f64,
    sites: (usize, usize),
    n: usize,
) -> Result<ComplexMatrix> {
    let (a, b) = sites;
    if a >= n || b >= n {
        return Err(Error::InvalidArgument(format!(
            "sites ({a}, {b}) out of range for {n} molecules"
        )));
    }
    if a == b {
        return Err(Error::InvalidArgument(format!(
            "pair interaction needs distinct sites, got ({a}, {b})"
        )));
    }
    let block = q.orientation_block();
    let local =
        ComplexMatrix::from_real(2, 2, &[block[0][0], block[0][1], block[1][0], block[1][1]])?;
    let strength = omega_ij * angular_factor(alpha);
    Ok(embed(n, &[(a, &local), (b, &local)]).scale_real(strength))
}

/// System Hamiltonian (units of B) with its cached spectral decomposition.
#[derive(Clone, Debug)]
pub struct SystemHamiltonian {
    n: usize,
    matrix: ComplexMatrix,
    spectral: HermitianEigen,
}

impl SystemHamiltonian {
    /// Wraps an arbitrary Hermitian matrix of dimension `2^n`.
    pub fn from_matrix(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: matrix.rows(),
            });
        }
        let spectral = hermitian_eig(&matrix)?;
        Ok(Self {
            n,
            matrix,
            spectral,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> &HermitianEigen {
        &self.spectral
    }
}

/// Sum of all site energies and pair couplings for the chain.
pub fn build_hamiltonian(q: &PendularQubit, geom: &ChainGeometry) -> Result<SystemHamiltonian> {
    let n = geom.n();
    let mut h = ComplexMatrix::zeros(geom.dim(), geom.dim());
    for site in 0..n {
        h = &h + &site_energy_term(q, site, n)?;
    }
    for (a, b, omega_ij) in geom.couplings() {
        h = &h + &pair_interaction_term(q, omega_ij, geom.alpha(), (a, b), n)?;
    }
    SystemHamiltonian::from_matrix(n, h)
}
