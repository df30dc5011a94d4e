//! Dense linear algebra and entropy primitives for small multiparty spaces.

pub mod entropy;
pub mod linalg;
pub mod random;
mod state;

pub use entropy::{entropy_bits, shannon_entropy, von_neumann_entropy};
pub use linalg::{CMatrix, CVector, C64, STATE_TOL};
pub use state::{DensityMatrix, ProbabilityDistribution, StateVector};

use crate::error::Result;

/// Kronecker product of two states of the same kind.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        StateVector::tensor(self, other)
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        DensityMatrix::tensor(self, other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// States that can be reduced to a subset of their parties.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl PartialTrace for StateVector {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        StateVector::partial_trace(self, keep)
    }
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        DensityMatrix::partial_trace(self, keep)
    }
}

pub fn partial_trace<T: PartialTrace>(state: &T, keep: &[usize]) -> Result<DensityMatrix> {
    state.partial_trace(keep)
}

/// Spectrum of a density matrix, descending.
pub fn eigenvalues(state: &DensityMatrix) -> Vec<f64> {
    state.eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ket(bits: &str) -> StateVector {
        let dims = vec![2; bits.len()];
        StateVector::basis(dims, usize::from_str_radix(bits, 2).unwrap()).unwrap()
    }

    #[test]
    fn tensor_basis_product() {
        let v = tensor(&ket("0"), &ket("1"));
        assert_eq!(v, ket("01"));
    }

    #[test]
    fn tensor_of_maximally_mixed() {
        let half = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let quarter = tensor(&half, &half);
        assert_eq!(quarter.dims(), &[2, 2]);
        assert!((quarter.matrix() - DensityMatrix::maximally_mixed(vec![2, 2]).unwrap().matrix()).norm() < 1e-15);
    }

    #[test]
    fn tensor_builds_case_two_state() {
        let bell = StateVector::from_real(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let psi = tensor(&ket("0"), &bell);
        let expected = StateVector::from_real(vec![2, 2, 2], &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((psi.amplitudes() - expected.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn ghz_reduction() {
        let ghz = StateVector::from_real(vec![2, 2, 2], &[1.0, 0., 0., 0., 0., 0., 0., 1.0]).unwrap();
        let rho = partial_trace(&ghz, &[0, 1]).unwrap();
        let expected = DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((rho.matrix() - expected.matrix()).norm() < 1e-15);
        let from_matrix = partial_trace(&ghz.to_density(), &[0, 1]).unwrap();
        assert!((rho.matrix() - from_matrix.matrix()).norm() < 1e-15);
    }

    #[test]
    fn product_and_bell_reductions() {
        let a = DensityMatrix::from_diagonal(vec![2], &[0.3, 0.7]).unwrap();
        let b = DensityMatrix::maximally_mixed(vec![3]).unwrap();
        let back = partial_trace(&tensor(&a, &b), &[0]).unwrap();
        assert!((back.matrix() - a.matrix()).norm() < 1e-15);
        let bell = StateVector::from_real(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let half = partial_trace(&bell, &[0]).unwrap();
        assert_abs_diff_eq!(half.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(half.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_keep_set() {
        let v = ket("00");
        assert!(partial_trace(&v, &[2]).is_err());
        assert!(partial_trace(&v, &[]).is_err());
    }

    #[test]
    fn spectra() {
        assert_eq!(
            eigenvalues(&DensityMatrix::maximally_mixed(vec![2]).unwrap()),
            vec![0.5, 0.5]
        );
        assert_eq!(eigenvalues(&ket("0").to_density()), vec![1.0, 0.0]);
        let ev = eigenvalues(&DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap());
        for (got, want) in ev.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_states() {
        let bad = CVector::from_element(2, C64::new(1.0, 0.0));
        assert!(StateVector::new(vec![2], bad).is_err());
        assert!(DensityMatrix::from_diagonal(vec![2], &[0.6, 0.6]).is_err());
        assert!(DensityMatrix::from_diagonal(vec![2], &[1.1, -0.1]).is_err());
        assert!(StateVector::basis(vec![1, 2], 0).is_err());
    }
}
