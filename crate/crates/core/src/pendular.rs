//! Single-molecule pendular states.
//!
//! The rotor Hamiltonian `J^2 - w cos(theta)` (units of B, `w = mu*eps/B`) is
//! diagonalized in the truncated basis `Y_{J,0}`, `J = 0..=jmax`. Only M = 0
//! states enter because `cos(theta)` conserves M. The two lowest eigenstates
//! are the qubit `|0>`, `|1>`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

pub const DEFAULT_JMAX: usize = 40;

/// Tolerance used when a scan escalates the truncation automatically.
pub const CONVERGENCE_TOL: f64 = 1e-10;

const CONVERGE_START: usize = 10;
const CONVERGE_STEP: usize = 5;
const CONVERGE_PROBE: usize = 10;
const CONVERGE_LIMIT: usize = 200;

/// Converged qubit data at a given reduced field.
#[derive(Clone, Debug, PartialEq)]
pub struct PendularQubit {
    pub w: f64,
    pub jmax: usize,
    pub e0: f64,
    pub e1: f64,
    /// `<0|cos|0>`
    pub c0: f64,
    /// `<1|cos|1>`
    pub c1: f64,
    /// `<0|cos|1>`
    pub ct: f64,
    /// Coefficients of `|0>` over `Y_{J,0}`; the `Y_00` entry is positive.
    pub coeffs0: Vec<f64>,
    /// Coefficients of `|1>` over `Y_{J,0}`; the `Y_10` entry is positive.
    pub coeffs1: Vec<f64>,
}

impl PendularQubit {
    pub fn splitting(&self) -> f64 {
        self.e1 - self.e0
    }

    /// The dipole block `[[C0, Ct], [Ct, C1]]` entering the pair interaction.
    pub fn orientation_block(&self) -> [[f64; 2]; 2] {
        [[self.c0, self.ct], [self.ct, self.c1]]
    }
}

/// `<Y_{J,0}| cos(theta) |Y_{J+1,0}>`. All other pairs except the transpose vanish.
pub fn cos_theta_element(j: usize) -> f64 {
    let j = j as f64;
    (j + 1.0) / ((2.0 * j + 1.0) * (2.0 * j + 3.0)).sqrt()
}

fn check_field(w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "reduced field must be finite and non-negative, got {w}"
        )));
    }
    Ok(())
}

/// Tridiagonal Stark Hamiltonian in units of B.
pub fn build_stark_hamiltonian(w: f64, jmax: usize) -> Result<ComplexMatrix> {
    check_field(w)?;
    if jmax < 2 {
        return Err(Error::InvalidArgument(format!(
            "jmax must be at least 2 to resolve two qubit levels, got {jmax}"
        )));
    }
    let n = jmax + 1;
    let mut data = vec![0.0; n * n];
    for j in 0..n {
        data[j * n + j] = (j * (j + 1)) as f64;
        if j + 1 < n {
            let off = -w * cos_theta_element(j);
            data[j * n + j + 1] = off;
            data[(j + 1) * n + j] = off;
        }
    }
    ComplexMatrix::from_real(n, n, &data)
}

// <a| cos |b> with the tridiagonal operator, real coefficient vectors.
fn cos_expectation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    (0..n)
        .map(|j| {
            let mut cb = 0.0;
            if j > 0 {
                cb += cos_theta_element(j - 1) * b[j - 1];
            }
            if j + 1 < n {
                cb += cos_theta_element(j) * b[j + 1];
            }
            a[j] * cb
        })
        .sum()
}

fn fix_sign(v: &mut [f64], preferred: usize) {
    let pivot = if v[preferred] != 0.0 {
        preferred
    } else {
        match v.iter().position(|&x| x != 0.0) {
            Some(k) => k,
            None => return,
        }
    };
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Diagonalizes the Stark Hamiltonian and extracts the qubit data.
pub fn solve_qubit(w: f64, jmax: usize) -> Result<PendularQubit> {
    let h = build_stark_hamiltonian(w, jmax)?;
    let n = h.rows();
    let real = DMatrix::from_fn(n, n, |i, j| h[(i, j)].re);
    let eig = SymmetricEigen::new(real);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (k0, k1) = (order[0], order[1]);
    let mut coeffs0: Vec<f64> = eig.eigenvectors.column(k0).iter().copied().collect();
    let mut coeffs1: Vec<f64> = eig.eigenvectors.column(k1).iter().copied().collect();
    fix_sign(&mut coeffs0, 0);
    fix_sign(&mut coeffs1, 1);
    Ok(PendularQubit {
        w,
        jmax,
        e0: eig.eigenvalues[k0],
        e1: eig.eigenvalues[k1],
        c0: cos_expectation(&coeffs0, &coeffs0),
        c1: cos_expectation(&coeffs1, &coeffs1),
        ct: cos_expectation(&coeffs0, &coeffs1),
        coeffs0,
        coeffs1,
    })
}

/// Low-field approximation of the qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbativeQubit {
    pub e0: f64,
    pub e1: f64,
    /// Over `(Y_00, Y_10)`, normalized.
    pub coeffs0: [f64; 2],
    /// Over `(Y_00, Y_10)`, normalized.
    pub coeffs1: [f64; 2],
}

/// First-order states `|0> ~ Y00 + w/sqrt(3) Y10`, `|1> ~ Y10 - w/sqrt(3) Y00`
/// with second-order energies `-w^2/6` and `2 + w^2/10`.
pub fn perturbative_qubit(w: f64) -> PerturbativeQubit {
    let k = w / 3f64.sqrt();
    let norm = (1.0 + k * k).sqrt();
    PerturbativeQubit {
        e0: -w * w / 6.0,
        e1: 2.0 + w * w / 10.0,
        coeffs0: [1.0 / norm, k / norm],
        coeffs1: [-k / norm, 1.0 / norm],
    }
}

fn max_change(a: &PendularQubit, b: &PendularQubit) -> f64 {
    [
        a.e0 - b.e0,
        a.e1 - b.e1,
        a.c0 - b.c0,
        a.c1 - b.c1,
        a.ct - b.ct,
    ]
    .iter()
    .map(|d| d.abs())
    .fold(0.0, f64::max)
}

/// Smallest truncation (10, 15, 20, ...) whose qubit data moves by less than
/// `tol` when `jmax` grows by 10.
pub fn converge_jmax(w: f64, tol: f64) -> Result<usize> {
    check_field(w)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut jmax = CONVERGE_START;
    while jmax <= CONVERGE_LIMIT {
        let base = solve_qubit(w, jmax)?;
        let probe = solve_qubit(w, jmax + CONVERGE_PROBE)?;
        if max_change(&base, &probe) < tol {
            return Ok(jmax);
        }
        jmax += CONVERGE_STEP;
    }
    Err(Error::NoConvergence {
        w,
        limit: CONVERGE_LIMIT,
    })
}

/// Above this field the default truncation is checked before use.
pub const ESCALATION_W: f64 = 10.0;

/// `base`, raised to [`converge_jmax`] when `w > ESCALATION_W`.
pub fn escalated_jmax(w: f64, base: usize) -> Result<usize> {
    if w > ESCALATION_W {
        Ok(base.max(converge_jmax(w, CONVERGENCE_TOL)?))
    } else {
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Y_{J,0}(theta) = sqrt((2J+1)/4pi) P_J(cos theta); the phi integral gives 2pi.
    fn legendre(j: usize, x: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, x);
        if j == 0 {
            return p0;
        }
        for k in 1..j {
            let k = k as f64;
            let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    fn quadrature_element(j1: usize, j2: usize) -> f64 {
        // composite Simpson on x = cos(theta) in [-1, 1]
        let n = 4000;
        let h = 2.0 / n as f64;
        let f = |x: f64| {
            let y1 = ((2 * j1 + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt() * legendre(j1, x);
            let y2 = ((2 * j2 + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt() * legendre(j2, x);
            y1 * x * y2
        };
        let mut s = f(-1.0) + f(1.0);
        for i in 1..n {
            let x = -1.0 + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        2.0 * std::f64::consts::PI * s * h / 3.0
    }

    #[test]
    fn cos_element_matches_quadrature() {
        // frozen oracle values: 1/sqrt(3), 2/sqrt(15)
        assert!((quadrature_element(0, 1) - 0.5773502691896258).abs() < 1e-12);
        assert!((quadrature_element(1, 2) - 0.5163977794943222).abs() < 1e-12);
        assert!((cos_theta_element(0) - 0.5773502691896258).abs() < 1e-15);
        assert!((cos_theta_element(1) - 0.5163977794943222).abs() < 1e-15);
        for j in 0..6 {
            assert!((cos_theta_element(j) - quadrature_element(j, j + 1)).abs() < 1e-10);
            // non-neighbours vanish
            assert!(quadrature_element(j, j + 2).abs() < 1e-10);
            assert!(quadrature_element(j, j).abs() < 1e-10);
        }
    }

    #[test]
    fn cos_element_tends_to_half_from_above() {
        let vals: Vec<f64> = (1..=100).map(cos_theta_element).collect();
        assert!(vals.windows(2).all(|p| p[1] < p[0]));
        assert!(vals.iter().all(|&v| v > 0.5));
        assert!(vals[99] - 0.5 < 1e-4);
    }

    #[test]
    fn field_free_hamiltonian() {
        let h = build_stark_hamiltonian(0.0, 3).unwrap();
        assert_eq!(h, ComplexMatrix::from_diagonal(&[0.0, 2.0, 6.0, 12.0]));
    }

    #[test]
    fn unit_field_off_diagonals() {
        let h = build_stark_hamiltonian(1.0, 2).unwrap();
        assert_eq!(h[(0, 1)].re, -1.0 / 3f64.sqrt());
        assert_eq!(h[(1, 2)].re, -2.0 / 15f64.sqrt());
        assert_eq!(h[(0, 2)].re, 0.0);
        for w in [0.3, 2.0, 17.0] {
            let h = build_stark_hamiltonian(w, 12).unwrap();
            assert_eq!(h, h.transpose());
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_stark_hamiltonian(1.0, 1).is_err());
        assert!(build_stark_hamiltonian(-0.1, 10).is_err());
        assert!(build_stark_hamiltonian(f64::NAN, 10).is_err());
        assert!(converge_jmax(1.0, 0.0).is_err());
    }

    #[test]
    fn field_free_qubit() {
        let q = solve_qubit(0.0, DEFAULT_JMAX).unwrap();
        assert!(q.e0.abs() < 1e-12);
        assert!((q.e1 - 2.0).abs() < 1e-12);
        assert!(q.c0.abs() < 1e-12);
        assert!(q.c1.abs() < 1e-12);
        assert!((q.ct - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_jacobi_route() {
        use crate::numerics::hermitian_eig;
        for w in [0.7, 6.0] {
            let q = solve_qubit(w, 20).unwrap();
            let eig = hermitian_eig(&build_stark_hamiltonian(w, 20).unwrap()).unwrap();
            assert!((eig.eigenvalues[0] - q.e0).abs() < 1e-11);
            assert!((eig.eigenvalues[1] - q.e1).abs() < 1e-11);
            let v0 = eig.eigenvector(0);
            let overlap: f64 = v0.iter().zip(&q.coeffs0).map(|(a, b)| a.re * b).sum();
            assert!((overlap.abs() - 1.0).abs() < 1e-12);
        }
    }

    // second-order Rayleigh-Schroedinger from the quadrature matrix elements
    fn second_order_energy(level: usize, w: f64) -> f64 {
        let e = |j: usize| (j * (j + 1)) as f64;
        let mut sum = 0.0;
        for m in 0..8usize {
            if m == level || (m as i64 - level as i64).abs() != 1 {
                continue;
            }
            let v = -w * quadrature_element(level.min(m), level.max(m));
            sum += v * v / (e(level) - e(m));
        }
        e(level) + sum
    }

    #[test]
    fn weak_field_matches_perturbation_oracle() {
        let w = 0.1;
        let q = solve_qubit(w, DEFAULT_JMAX).unwrap();
        let e0 = second_order_energy(0, w);
        let e1 = second_order_energy(1, w);
        assert!((e0 - (-w * w / 6.0)).abs() < 1e-12);
        assert!((e1 - (2.0 + w * w / 10.0)).abs() < 1e-12);
        assert!((q.e0 - e0).abs() < 1e-4);
        assert!((q.e1 - e1).abs() < 1e-4);
    }

    #[test]
    fn strong_field_converged_at_default_jmax() {
        let a = solve_qubit(6.0, 40).unwrap();
        let b = solve_qubit(6.0, 60).unwrap();
        assert!(max_change(&a, &b) < 1e-10, "{a:?} vs {b:?}");
    }

    #[test]
    fn qubit_vectors_orthonormal_and_signed() {
        for w in [0.0, 0.4, 1.6, 6.0, 12.0] {
            let q = solve_qubit(w, DEFAULT_JMAX).unwrap();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            assert!((dot(&q.coeffs0, &q.coeffs0) - 1.0).abs() < 1e-12);
            assert!((dot(&q.coeffs1, &q.coeffs1) - 1.0).abs() < 1e-12);
            assert!(dot(&q.coeffs0, &q.coeffs1).abs() < 1e-12);
            assert!(q.coeffs0[0] > 0.0 && q.coeffs1[1] > 0.0);
            assert!(q.e0 < q.e1);
        }
    }

    #[test]
    fn orientation_trends_on_grid() {
        let grid: Vec<PendularQubit> = (0..=20)
            .map(|k| solve_qubit(0.5 * k as f64, DEFAULT_JMAX).unwrap())
            .collect();
        assert!((grid[0].splitting() - 2.0).abs() < 1e-12);
        for pair in grid.windows(2) {
            assert!(
                pair[1].c0 > pair[0].c0,
                "C0 not increasing at w={}",
                pair[1].w
            );
            assert!(pair[1].splitting() > pair[0].splitting());
        }
        for q in &grid {
            assert!(q.ct > 0.0);
            assert!(q.c0 >= 0.0 && q.c0 < 1.0);
            // C1 is negative below w ~ 5: the upper level is pushed against the field
            assert!(q.c1 > -1.0 && q.c1 < 1.0);
        }
    }

    #[test]
    fn orientation_is_minus_energy_slope() {
        // Hellmann-Feynman: dE/dw = -<cos>
        for w in [0.3, 1.5, 4.0, 8.0] {
            let h = 1e-5;
            let lo = solve_qubit(w - h, DEFAULT_JMAX).unwrap();
            let hi = solve_qubit(w + h, DEFAULT_JMAX).unwrap();
            let q = solve_qubit(w, DEFAULT_JMAX).unwrap();
            assert!(((hi.e0 - lo.e0) / (2.0 * h) + q.c0).abs() < 1e-7);
            assert!(((hi.e1 - lo.e1) / (2.0 * h) + q.c1).abs() < 1e-7);
        }
        // C1 changes sign between w = 4 and w = 6
        assert!(solve_qubit(4.0, DEFAULT_JMAX).unwrap().c1 < 0.0);
        assert!(solve_qubit(6.0, DEFAULT_JMAX).unwrap().c1 > 0.0);
    }

    #[test]
    fn ground_energy_variational_in_jmax() {
        for w in [1.0, 6.0, 20.0] {
            let energies: Vec<f64> = (2..=30).map(|j| solve_qubit(w, j).unwrap().e0).collect();
            for p in energies.windows(2) {
                assert!(p[1] <= p[0] + 1e-13);
            }
        }
    }

    #[test]
    fn perturbative_agreement_for_weak_fields() {
        for k in 0..=6 {
            let w = 0.05 * k as f64;
            let q = solve_qubit(w, DEFAULT_JMAX).unwrap();
            assert!((q.e0 + w * w / 6.0).abs() <= 5e-4);
            assert!((q.e1 - 2.0 - w * w / 10.0).abs() <= 5e-4);
        }
    }

    #[test]
    fn perturbative_qubit_examples() {
        let p = perturbative_qubit(0.0);
        assert_eq!(p.e0, 0.0);
        assert_eq!(p.e1, 2.0);
        assert_eq!(p.coeffs0, [1.0, 0.0]);
        assert_eq!(p.coeffs1, [-0.0, 1.0]);

        let w = 0.2;
        let p = perturbative_qubit(w);
        let exact = solve_qubit(w, DEFAULT_JMAX).unwrap();
        assert!((p.e0 - exact.e0).abs() <= 1e-3);
        assert!((p.e1 - exact.e1).abs() <= 1e-3);
        // The w/sqrt(3) admixture is twice the Rayleigh-Schroedinger value
        // w/(2 sqrt(3)), which caps the overlap at 0.99835 for w = 0.2.
        let overlap0 = (p.coeffs0[0] * exact.coeffs0[0] + p.coeffs0[1] * exact.coeffs0[1]).abs();
        let overlap1 = (p.coeffs1[0] * exact.coeffs1[0] + p.coeffs1[1] * exact.coeffs1[1]).abs();
        assert!((overlap0 - 0.998350873).abs() < 1e-6, "{overlap0}");
        assert!((overlap1 - 0.998020442).abs() < 1e-6, "{overlap1}");

        let k = w / (2.0 * 3f64.sqrt());
        let rs = [1.0 / (1.0 + k * k).sqrt(), k / (1.0 + k * k).sqrt()];
        let overlap_rs = (rs[0] * exact.coeffs0[0] + rs[1] * exact.coeffs0[1]).abs();
        assert!(overlap_rs > 0.999);
    }

    #[test]
    fn convergence_search() {
        assert_eq!(converge_jmax(0.0, 1e-10).unwrap(), 10);
        let at6 = converge_jmax(6.0, 1e-10).unwrap();
        assert!(at6 <= 40);
        // At 1e-10 both w = 6 and w = 20 already settle at the first candidate;
        // the growing need shows up at a tighter tolerance or a stronger field.
        assert_eq!(converge_jmax(20.0, 1e-10).unwrap(), at6);
        assert!(converge_jmax(20.0, 1e-12).unwrap() > converge_jmax(6.0, 1e-12).unwrap());
        assert!(converge_jmax(50.0, 1e-10).unwrap() > at6);
        assert!(converge_jmax(100.0, 1e-10).unwrap() > converge_jmax(50.0, 1e-10).unwrap());
    }

    #[test]
    fn convergence_failure_is_reported() {
        let err = converge_jmax(1e6, 1e-12).unwrap_err();
        assert!(err.is_convergence_failure());
    }
}
