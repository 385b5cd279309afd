//! Two-qubit teleportation through a noisy Bell-diagonal channel.
//!
//! The resource state `rho` is measured in the Bell basis
//! `E0 = psi-, E1 = phi-, E2 = phi+, E3 = psi+`, giving `p_i = tr(E_i rho)`.
//! An input `rho_in` then comes out as
//!
//! ```text
//! rho_out = sum_ij p_i p_j (s_i (x) s_j) rho_in (s_i (x) s_j)^dagger
//! ```
//!
//! with `s_0..s_3 = I, X, Y, Z`, and the figure of merit is the Uhlmann
//! fidelity between `rho_in` and `rho_out`.

use std::sync::LazyLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::milburn::DensityMatrix;
use crate::numerics::{hermitian_eig, hermitian_eigenvalues, kron, ComplexMatrix};

/// Best fidelity reachable with classical communication alone.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Eigenvalues of `rho_a` at or below this are treated as outside its support.
const SUPPORT_TOL: f64 = 1e-14;
const FIDELITY_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PsiMinus,
    PhiMinus,
    PhiPlus,
    PsiPlus,
}

impl BellState {
    /// Measurement order used for the probabilities `p_0..p_3`.
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PhiMinus,
        BellState::PhiPlus,
        BellState::PsiPlus,
    ];

    pub fn ket(self) -> [C64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let (p, m) = (C64::new(h, 0.0), C64::new(-h, 0.0));
        match self {
            BellState::PsiMinus => [z, p, m, z],
            BellState::PhiMinus => [p, z, z, m],
            BellState::PhiPlus => [p, z, z, p],
            BellState::PsiPlus => [z, p, p, z],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.ket())
    }

    pub fn density(self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.projector())
    }
}

/// The four Bell projectors in measurement order.
#[derive(Clone, Debug)]
pub struct BellProjectors {
    projectors: [ComplexMatrix; 4],
}

impl BellProjectors {
    pub fn new() -> Self {
        Self {
            projectors: BellState::ALL.map(BellState::projector),
        }
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.projectors[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.projectors.iter()
    }
}

impl Default for BellProjectors {
    fn default() -> Self {
        Self::new()
    }
}

static PROJECTORS: LazyLock<BellProjectors> = LazyLock::new(BellProjectors::new);

// I, X, Y, Z
static PAULIS: LazyLock<[ComplexMatrix; 4]> = LazyLock::new(|| {
    let re = |v: [f64; 4]| ComplexMatrix::from_real(2, 2, &v).unwrap();
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    [
        re([1.0, 0.0, 0.0, 1.0]),
        re([0.0, 1.0, 1.0, 0.0]),
        ComplexMatrix::new(2, 2, vec![z, -i, i, z]).unwrap(),
        re([1.0, 0.0, 0.0, -1.0]),
    ]
});

// all sixteen s_i (x) s_j, index 4 i + j
static PAULI_PAIRS: LazyLock<Vec<ComplexMatrix>> = LazyLock::new(|| {
    let mut out = Vec::with_capacity(16);
    for a in PAULIS.iter() {
        for b in PAULIS.iter() {
            out.push(kron(a, b));
        }
    }
    out
});

pub fn pauli(i: usize) -> &'static ComplexMatrix {
    &PAULIS[i]
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// `p_i = tr(E_i rho)` in the order psi-, phi-, phi+, psi+.
pub fn bell_probabilities(rho_channel: &DensityMatrix) -> Result<[f64; 4]> {
    require_two_qubits(rho_channel)?;
    let mut p = [0.0; 4];
    for (slot, e) in p.iter_mut().zip(PROJECTORS.iter()) {
        // tr(E rho) = sum_kl E_kl rho_lk
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..4 {
            for l in 0..4 {
                acc += e[(k, l)] * rho_channel.matrix()[(l, k)];
            }
        }
        *slot = acc.re.max(0.0);
    }
    Ok(p)
}

/// Joint table `p_ij = p_i p_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelDistribution {
    marginal: [f64; 4],
}

impl ChannelDistribution {
    pub fn from_channel(rho_channel: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            marginal: bell_probabilities(rho_channel)?,
        })
    }

    pub fn marginal(&self) -> [f64; 4] {
        self.marginal
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.marginal[i] * self.marginal[j]
    }

    pub fn table(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.p(i, j)))
    }
}

pub fn channel_output(
    rho_in: &DensityMatrix,
    rho_channel: &DensityMatrix,
) -> Result<DensityMatrix> {
    require_two_qubits(rho_in)?;
    let dist = ChannelDistribution::from_channel(rho_channel)?;
    Ok(apply_channel(rho_in, &dist))
}

pub fn apply_channel(rho_in: &DensityMatrix, dist: &ChannelDistribution) -> DensityMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let w = dist.p(i, j);
            if w == 0.0 {
                continue;
            }
            let u = &PAULI_PAIRS[4 * i + j];
            let term = &(u * rho_in.matrix()) * &u.adjoint();
            out = &out + &term.scale_real(w);
        }
    }
    DensityMatrix::from_matrix_unchecked(out.hermitian_part())
}

/// `(tr sqrt(sqrt(a) b sqrt(a)))^2`, clamped to `[0, 1]`.
///
/// Evaluated on the support of `a`: with `a = V L V^dagger` restricted to
/// nonzero `L`, the nonzero spectrum of `sqrt(a) b sqrt(a)` equals that of
/// `L^(1/2) V^dagger b V L^(1/2)`. For pure `a` this is exactly `<psi|b|psi>`.
pub fn uhlmann_fidelity(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<f64> {
    if rho_a.dim() != rho_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_a.dim(),
            found: rho_b.dim(),
        });
    }
    let eig = hermitian_eig(rho_a.matrix())?;
    let support: Vec<usize> = (0..eig.dim())
        .filter(|&k| eig.eigenvalues[k] > SUPPORT_TOL)
        .collect();
    let r = support.len();
    if r == 0 {
        return Err(Error::InvalidState("state has empty support".into()));
    }
    let vecs: Vec<Vec<C64>> = support.iter().map(|&k| eig.eigenvector(k)).collect();
    let roots: Vec<f64> = support.iter().map(|&k| eig.eigenvalues[k].sqrt()).collect();
    let images: Vec<Vec<C64>> = vecs.iter().map(|v| rho_b.matrix().apply(v)).collect();

    let mut m = ComplexMatrix::zeros(r, r);
    for p in 0..r {
        for q in 0..r {
            let overlap: C64 = vecs[p]
                .iter()
                .zip(&images[q])
                .map(|(x, y)| x.conj() * y)
                .sum();
            m[(p, q)] = overlap * (roots[p] * roots[q]);
        }
    }
    let root_sum: f64 = if r == 1 {
        m[(0, 0)].re.max(0.0).sqrt()
    } else {
        hermitian_eigenvalues(&m.hermitian_part())?
            .iter()
            .map(|mu| mu.max(0.0).sqrt())
            .sum()
    };
    let f = root_sum * root_sum;
    if f > 1.0 + FIDELITY_SLACK {
        return Err(Error::InvalidState(format!("fidelity {f} exceeds 1")));
    }
    Ok(f.clamp(0.0, 1.0))
}

pub fn teleport_fidelity(rho_channel: &DensityMatrix, rho_in: &DensityMatrix) -> Result<f64> {
    let out = channel_output(rho_in, rho_channel)?;
    uhlmann_fidelity(rho_in, &out)
}
