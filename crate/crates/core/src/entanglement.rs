//! Partial transposes and negativity.
//!
//! Negativity is `sum_i |lambda_i| - 1` over the spectrum of the partial
//! transpose (so a Bell pair scores 1, not 1/2). The three-qubit measure is
//! the geometric mean over the splits A|BC, B|AC, C|AB.

use crate::error::{Error, Result};
use crate::milburn::DensityMatrix;
use crate::numerics::{hermitian_eigenvalues, ComplexMatrix};

/// Values this far below zero are rounding noise and get clamped.
pub const NEGATIVITY_CLAMP: f64 = 1e-10;

/// A split of `n` qubits into `part_a` and its complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    n: usize,
    part_a: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, part_a: &[usize]) -> Result<Self> {
        let mut sites = part_a.to_vec();
        sites.sort_unstable();
        sites.dedup();
        if sites.len() != part_a.len() {
            return Err(Error::InvalidArgument(format!(
                "repeated site in {part_a:?}"
            )));
        }
        if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
            return Err(Error::InvalidArgument(format!(
                "site {bad} out of range for {n} qubits"
            )));
        }
        if sites.is_empty() || sites.len() == n {
            return Err(Error::InvalidArgument(format!(
                "part {part_a:?} must be a nonempty proper subset of {n} qubits"
            )));
        }
        Ok(Self { n, part_a: sites })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    // bit mask over basis indices; site 0 is the most significant bit
    fn mask(&self) -> usize {
        self.part_a
            .iter()
            .fold(0, |m, &s| m | (1 << (self.n - 1 - s)))
    }
}

/// Transposes the qubit indices belonging to `split.part_a()`.
pub fn partial_transpose(rho: &ComplexMatrix, split: &Bipartition) -> Result<ComplexMatrix> {
    let dim = 1usize << split.n();
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.rows(),
        });
    }
    let mask = split.mask();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let r2 = (r & !mask) | (c & mask);
            let c2 = (c & !mask) | (r & mask);
            out[(r2, c2)] = rho[(r, c)];
        }
    }
    Ok(out)
}

pub fn negativity(rho: &DensityMatrix, split: &Bipartition) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), split)?;
    let spectrum = hermitian_eigenvalues(&pt)?;
    let value = spectrum.iter().map(|l| l.abs()).sum::<f64>() - 1.0;
    Ok(clamp_negativity(value))
}

fn clamp_negativity(value: f64) -> f64 {
    if (-NEGATIVITY_CLAMP..0.0).contains(&value) {
        0.0
    } else {
        value
    }
}

/// Negativities for the splits A|BC, B|AC and C|AB, in that order.
pub fn one_vs_rest_negativities(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: rho.dim(),
        });
    }
    let mut out = [0.0; 3];
    for (site, slot) in out.iter_mut().enumerate() {
        *slot = negativity(rho, &Bipartition::new(3, &[site])?)?;
    }
    Ok(out)
}

/// Cube root of `N_{A|BC} N_{B|AC} N_{C|AB}`.
pub fn tripartite_negativity(rho: &DensityMatrix) -> Result<f64> {
    let parts = one_vs_rest_negativities(rho)?;
    if parts.iter().any(|&v| v <= 0.0) {
        return Ok(0.0);
    }
    Ok(parts.iter().product::<f64>().cbrt())
}
