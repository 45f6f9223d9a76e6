//! Dense density-matrix backend for small qubit counts.
//!
//! Exact states up to 12 qubits. Used for wrong-basis statistics, arbitrary
//! attack spot checks, and the numerical Uhlmann-corollary verification.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;

use crate::bits::BitString;
use crate::error::EbcError;

type C = Complex<f64>;

const MAX_QUBITS: usize = 12;
const PSD_TOL: f64 = 1e-10;
const HERMITICITY_TOL: f64 = 1e-9;

/// A validated density matrix on up to 12 qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    qubits: usize,
    matrix: DMatrix<C>,
}

impl DenseState {
    /// Validate Hermiticity, unit trace, and positive semidefiniteness
    /// (eigenvalues >= -1e-10).
    pub fn from_density(matrix: DMatrix<C>) -> Result<Self, EbcError> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(EbcError::InvalidState(format!(
                "matrix is {}x{}, not square power-of-two",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let qubits = dim.trailing_zeros() as usize;
        if qubits > MAX_QUBITS {
            return Err(EbcError::InvalidState(format!(
                "{qubits} qubits exceeds dense-backend limit {MAX_QUBITS}"
            )));
        }
        let herm_err = (&matrix - matrix.adjoint()).norm();
        if herm_err > HERMITICITY_TOL {
            return Err(EbcError::InvalidState(format!(
                "not Hermitian: deviation {herm_err}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(EbcError::InvalidState(format!("trace {trace} != 1")));
        }
        let eigenvalues = hermitian_eigenvalues(&matrix);
        if eigenvalues.iter().any(|&v| v < -PSD_TOL) {
            return Err(EbcError::InvalidState(format!(
                "negative eigenvalue {}",
                eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
            )));
        }
        Ok(Self { qubits, matrix })
    }

    pub fn from_pure(vector: &DVector<C>) -> Result<Self, EbcError> {
        let norm = vector.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(EbcError::InvalidState(format!("vector norm {norm} != 1")));
        }
        Self::from_density(vector * vector.adjoint())
    }

    /// The pure BB84 product state H^theta |u> as a state vector.
    pub fn bb84_vector(u: &BitString, theta: &BitString) -> Result<DVector<C>, EbcError> {
        if u.len() != theta.len() {
            return Err(EbcError::LengthMismatch {
                left: u.len(),
                right: theta.len(),
            });
        }
        if u.len() > MAX_QUBITS {
            return Err(EbcError::InvalidState(format!(
                "{} qubits exceeds dense-backend limit {MAX_QUBITS}",
                u.len()
            )));
        }
        let mut state = DVector::from_element(1, C::new(1.0, 0.0));
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for (bit, basis) in u.iter().zip(theta.iter()) {
            let single: [C; 2] = match (basis, bit) {
                (0, 0) => [C::new(1.0, 0.0), C::new(0.0, 0.0)],
                (0, 1) => [C::new(0.0, 0.0), C::new(1.0, 0.0)],
                (1, 0) => [C::new(inv_sqrt2, 0.0), C::new(inv_sqrt2, 0.0)],
                _ => [C::new(inv_sqrt2, 0.0), C::new(-inv_sqrt2, 0.0)],
            };
            let mut next = DVector::from_element(state.len() * 2, C::new(0.0, 0.0));
            for (i, amp) in state.iter().enumerate() {
                next[2 * i] = amp * single[0];
                next[2 * i + 1] = amp * single[1];
            }
            state = next;
        }
        Ok(state)
    }

    pub fn bb84(u: &BitString, theta: &BitString) -> Result<Self, EbcError> {
        Self::from_pure(&Self::bb84_vector(u, theta)?)
    }

    /// Random full-rank density matrix: normalized G G^dagger with Gaussian G.
    pub fn random<R: Rng>(qubits: usize, rng: &mut R) -> Self {
        let dim = 1 << qubits;
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            C::new(gaussian(rng), gaussian(rng))
        });
        let mut rho = &g * g.adjoint();
        let trace = rho.trace().re;
        rho /= C::new(trace, 0.0);
        // Symmetrize away the floating-point Hermiticity residue.
        let herm = (&rho + rho.adjoint()) * C::new(0.5, 0.0);
        Self::from_density(herm).expect("random Gram state is valid")
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }

    /// Probability of outcome `1` when measuring qubit `index` in the
    /// computational basis.
    pub fn prob_one(&self, index: usize) -> f64 {
        let dim = self.matrix.nrows();
        let mask = 1usize << (self.qubits - 1 - index);
        (0..dim)
            .filter(|i| i & mask != 0)
            .map(|i| self.matrix[(i, i)].re)
            .sum()
    }

    /// Real/imag text dump for debugging.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in 0..self.matrix.nrows() {
            for c in 0..self.matrix.ncols() {
                let v = self.matrix[(r, c)];
                out.push_str(&format!("{:+.6}{:+.6}i ", v.re, v.im));
            }
            out.push('\n');
        }
        out
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn hermitian_eigenvalues(matrix: &DMatrix<C>) -> Vec<f64> {
    SymmetricEigen::new(matrix.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Hermitian matrix square root via eigendecomposition, clamping small
/// negative eigenvalues to zero.
fn matrix_sqrt(matrix: &DMatrix<C>) -> DMatrix<C> {
    let eig = SymmetricEigen::new(matrix.clone());
    let sqrt_vals: Vec<C> = eig
        .eigenvalues
        .iter()
        .map(|&v| C::new(v.max(0.0).sqrt(), 0.0))
        .collect();
    let diag = DMatrix::from_diagonal(&DVector::from_vec(sqrt_vals));
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}

/// (1/2) || rho - sigma ||_1: half the sum of absolute eigenvalues of the
/// difference.
pub fn trace_distance(rho: &DenseState, sigma: &DenseState) -> Result<f64, EbcError> {
    if rho.qubits != sigma.qubits {
        return Err(EbcError::LengthMismatch {
            left: rho.qubits,
            right: sigma.qubits,
        });
    }
    let diff = &rho.matrix - &sigma.matrix;
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)).
pub fn fidelity(rho: &DenseState, sigma: &DenseState) -> Result<f64, EbcError> {
    if rho.qubits != sigma.qubits {
        return Err(EbcError::LengthMismatch {
            left: rho.qubits,
            right: sigma.qubits,
        });
    }
    let sqrt_rho = matrix_sqrt(&rho.matrix);
    let inner = &sqrt_rho * &sigma.matrix * &sqrt_rho;
    let herm = (&inner + inner.adjoint()) * C::new(0.5, 0.0);
    Ok(hermitian_eigenvalues(&herm)
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .sum())
}

/// Purifications of `rho` and `rho2` on the doubled space whose overlap
/// achieves the fidelity: |<psi|psi'>| = F(rho, rho2).
///
/// Construction: |psi> = (sqrt(rho) x I)|Omega>, |psi'> = (sqrt(rho2) U x I)
/// |Omega>, with U from the SVD of sqrt(rho) sqrt(rho2) so the overlap
/// equals the trace norm of that product.
pub fn uhlmann_purifications(
    rho: &DenseState,
    rho2: &DenseState,
) -> Result<(DVector<C>, DVector<C>), EbcError> {
    if rho.qubits != rho2.qubits {
        return Err(EbcError::LengthMismatch {
            left: rho.qubits,
            right: rho2.qubits,
        });
    }
    let dim = rho.matrix.nrows();
    let sqrt_a = matrix_sqrt(&rho.matrix);
    let sqrt_b = matrix_sqrt(&rho2.matrix);
    let product = &sqrt_a * &sqrt_b;
    let svd = product.clone().svd(true, true);
    let w = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    // U = V W^dagger maximizes Re tr(sqrt_a sqrt_b U) at tr|sqrt_a sqrt_b|.
    let u = v_t.adjoint() * w.adjoint();
    let purify = |m: &DMatrix<C>| {
        let mut vec = DVector::from_element(dim * dim, C::new(0.0, 0.0));
        for i in 0..dim {
            for j in 0..dim {
                vec[i * dim + j] = m[(i, j)];
            }
        }
        vec
    };
    Ok((purify(&sqrt_a), purify(&(&sqrt_b * u))))
}

/// Trace distance between two pure states given as vectors:
/// sqrt(1 - |<a|b>|^2).
pub fn pure_trace_distance(a: &DVector<C>, b: &DVector<C>) -> f64 {
    let overlap = a.dotc(b).norm();
    (1.0 - (overlap * overlap).min(1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use approx::assert_relative_eq;

    fn ket0() -> DenseState {
        DenseState::bb84(&BitString::parse("0").unwrap(), &BitString::parse("0").unwrap())
            .unwrap()
    }

    fn ket1() -> DenseState {
        DenseState::bb84(&BitString::parse("1").unwrap(), &BitString::parse("0").unwrap())
            .unwrap()
    }

    fn ket_plus() -> DenseState {
        DenseState::bb84(&BitString::parse("0").unwrap(), &BitString::parse("1").unwrap())
            .unwrap()
    }

    #[test]
    fn bb84_minus_state_amplitudes() {
        // u=1, theta=1 -> |->.
        let v = DenseState::bb84_vector(
            &BitString::parse("1").unwrap(),
            &BitString::parse("1").unwrap(),
        )
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(v[0].re, s, max_relative = 1e-12);
        assert_relative_eq!(v[1].re, -s, max_relative = 1e-12);
    }

    #[test]
    fn trace_distance_cases() {
        assert_relative_eq!(trace_distance(&ket0(), &ket0()).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(trace_distance(&ket0(), &ket1()).unwrap(), 1.0, epsilon = 1e-9);
        // |0><0| vs |+><+|: eigenvalues +-1/sqrt(2).
        assert_relative_eq!(
            trace_distance(&ket0(), &ket_plus()).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-9
        );
    }

    #[test]
    fn fidelity_of_pure_states() {
        assert_relative_eq!(fidelity(&ket0(), &ket0()).unwrap(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(
            fidelity(&ket0(), &ket_plus()).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-8
        );
    }

    #[test]
    fn uhlmann_overlap_equals_fidelity() {
        let mut rng = master_rng(21, 0);
        for qubits in [1usize, 2] {
            for _ in 0..25 {
                let a = DenseState::random(qubits, &mut rng);
                let b = DenseState::random(qubits, &mut rng);
                let f = fidelity(&a, &b).unwrap();
                let (pa, pb) = uhlmann_purifications(&a, &b).unwrap();
                assert_relative_eq!(pa.norm(), 1.0, epsilon = 1e-9);
                assert_relative_eq!(pb.norm(), 1.0, epsilon = 1e-9);
                assert_relative_eq!(pa.dotc(&pb).norm(), f, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn uhlmann_corollary_bound() {
        // (1/2)||psi - psi'||_1 <= sqrt(2 eps) for eps the state distance.
        let mut rng = master_rng(22, 0);
        for _ in 0..100 {
            let a = DenseState::random(1, &mut rng);
            let b = DenseState::random(1, &mut rng);
            let eps = trace_distance(&a, &b).unwrap();
            let (pa, pb) = uhlmann_purifications(&a, &b).unwrap();
            let purified = pure_trace_distance(&pa, &pb);
            assert!(purified <= (2.0 * eps).sqrt() + 1e-9, "{purified} vs {eps}");
        }
    }

    #[test]
    fn identical_states_purify_identically() {
        let mut rng = master_rng(23, 0);
        let a = DenseState::random(2, &mut rng);
        let (pa, pb) = uhlmann_purifications(&a, &a).unwrap();
        assert_relative_eq!(pa.dotc(&pb).norm(), 1.0, epsilon = 1e-9);
        assert!(pure_trace_distance(&pa, &pb) < 1e-6);
    }

    #[test]
    fn fuchs_van_de_graaf_sandwich() {
        let mut rng = master_rng(24, 0);
        for _ in 0..50 {
            let a = DenseState::random(1, &mut rng);
            let b = DenseState::random(1, &mut rng);
            let t = trace_distance(&a, &b).unwrap();
            let f = fidelity(&a, &b).unwrap();
            assert!(1.0 - f <= t + 1e-9);
            assert!(t <= (1.0 - f * f).sqrt() + 1e-9);
        }
    }

    #[test]
    fn invalid_states_rejected() {
        let not_trace_one = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C::new(0.9, 0.0),
            C::new(0.3, 0.0),
        ]));
        assert!(DenseState::from_density(not_trace_one).is_err());
        let not_hermitian = DMatrix::from_row_slice(
            2,
            2,
            &[
                C::new(0.5, 0.0),
                C::new(0.3, 0.0),
                C::new(-0.3, 0.0),
                C::new(0.5, 0.0),
            ],
        );
        assert!(DenseState::from_density(not_hermitian).is_err());
    }

    #[test]
    fn symbolic_dense_agreement_wrong_basis() {
        // Dense Born probability vs symbolic sampling for a wrong-basis
        // measurement: both give 1/2.
        let state = ket_plus();
        assert_relative_eq!(state.prob_one(0), 0.5, epsilon = 1e-12);
    }
}
