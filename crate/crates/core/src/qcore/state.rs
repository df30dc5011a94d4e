use nalgebra::DMatrix;

use super::linalg::{
    self, hermitian_eigenvalues, max_hermitian_deviation, symmetrize, total_dim, validate_dims, CMatrix, CVector, C64,
    MAX_MATRIX_DIM, STATE_TOL,
};
use crate::error::{Error, Result};

/// Normalized pure state on a tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        validate_dims(&dims)?;
        check_len(&dims, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(format!("norm is {norm}")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales nonzero amplitudes to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized("zero or non-finite vector".into()));
        }
        Self::new(dims, amplitudes.unscale(norm))
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        validate_dims(&dims)?;
        let d = total_dim(&dims);
        if index >= d {
            return Err(Error::InvalidParameter(format!("basis index {index} >= {d}")));
        }
        let mut amps = CVector::zeros(d);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { dims, amplitudes: amps })
    }

    /// Single-party state from real amplitudes, normalized.
    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0)));
        Self::normalized(dims, v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector {
            dims,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Reduced state on `keep`, computed from amplitude fibers without the
    /// full outer product.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (kept, _) = linalg::split_parties(self.dims.len(), keep)?;
        let m = linalg::partial_trace_vector(&self.dims, &self.amplitudes, &kept)?;
        let dims = kept.iter().map(|&p| self.dims[p]).collect();
        DensityMatrix::from_parts_unchecked(dims, m)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: m,
        }
    }

    /// Reorders parties: new party `k` is old party `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<StateVector> {
        check_perm(self.dims.len(), perm)?;
        Ok(StateVector {
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
            amplitudes: linalg::permute_vec(&self.dims, perm, &self.amplitudes),
        })
    }

    pub fn apply_local(&self, party: usize, unitary: &CMatrix) -> Result<StateVector> {
        check_local_op(&self.dims, party, unitary)?;
        let v = linalg::apply_local_vec(&self.dims, party, unitary, &self.amplitudes);
        StateVector::normalized(self.dims.clone(), v)
    }
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity; Hermitian noise
    /// below tolerance is symmetrized away.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        validate_dims(&dims)?;
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        check_len(&dims, matrix.nrows())?;
        if matrix.nrows() > MAX_MATRIX_DIM {
            return Err(Error::TooLarge(format!(
                "density matrix of dimension {} exceeds {MAX_MATRIX_DIM}",
                matrix.nrows()
            )));
        }
        let dev = max_hermitian_deviation(&matrix);
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let matrix = symmetrize(&matrix);
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::NotNormalized(format!("trace is {tr}")));
        }
        hermitian_eigenvalues(&matrix)?;
        Ok(Self { dims, matrix })
    }

    /// Skips the eigenvalue check; used for matrices that are positive and
    /// normalized by construction (reductions, mixtures).
    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        check_len(&dims, matrix.nrows())?;
        Ok(Self {
            dims,
            matrix: symmetrize(&matrix),
        })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        validate_dims(&dims)?;
        let d = total_dim(&dims);
        Ok(Self {
            dims,
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        })
    }

    pub fn from_diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            diag.len(),
            diag.iter().map(|&x| C64::new(x, 0.0)),
        ));
        Self::new(dims, m)
    }

    /// Convex combination `sum_k w_k rho_k`; all terms must share dims.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in terms {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch("mixture terms differ in dims".into()));
            }
            acc += rho.matrix.scale(*w);
        }
        Self::from_parts_unchecked(first.dims.clone(), acc)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (kept, _) = linalg::split_parties(self.dims.len(), keep)?;
        let m = linalg::partial_trace_matrix(&self.dims, &self.matrix, &kept)?;
        let dims = kept.iter().map(|&p| self.dims[p]).collect();
        Self::from_parts_unchecked(dims, m)
    }

    /// Spectrum in descending order, clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("validated density matrix")
    }

    pub fn permute(&self, perm: &[usize]) -> Result<DensityMatrix> {
        check_perm(self.dims.len(), perm)?;
        Ok(DensityMatrix {
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
            matrix: linalg::permute_mat(&self.dims, perm, &self.matrix),
        })
    }

    /// `U rho U^dag` for a unitary acting on one party.
    pub fn apply_local(&self, party: usize, unitary: &CMatrix) -> Result<DensityMatrix> {
        check_local_op(&self.dims, party, unitary)?;
        let m = linalg::conjugate_local(&self.dims, party, unitary, &self.matrix);
        Self::from_parts_unchecked(self.dims.clone(), m)
    }

    /// `U rho U^dag` for a unitary on the whole space.
    pub fn conjugate(&self, unitary: &CMatrix) -> Result<DensityMatrix> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary size".into()));
        }
        Self::from_parts_unchecked(self.dims.clone(), unitary * &self.matrix * unitary.adjoint())
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("trace distance operands".into()));
        }
        Ok(linalg::trace_distance(&self.matrix, &other.matrix))
    }

    /// Expectation `<v| rho |v>` for an arbitrary (not necessarily normalized) vector.
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }
}

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution {
    weights: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(weights, STATE_TOL)
    }

    pub fn with_tolerance(weights: Vec<f64>, tol: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        for (k, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < -tol || w > 1.0 + tol {
                return Err(Error::InvalidDistribution(format!("weight {k} = {w} outside [0, 1]")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "probabilities must sum to 1 (sum is {sum})"
            )));
        }
        Ok(Self {
            weights: weights.into_iter().map(|w| w.max(0.0)).collect(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn check_len(dims: &[usize], len: usize) -> Result<()> {
    let d = total_dim(dims);
    if d != len {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} imply size {d}, got {len}"
        )));
    }
    if d > MAX_MATRIX_DIM * MAX_MATRIX_DIM {
        return Err(Error::TooLarge(format!("total dimension {d}")));
    }
    Ok(())
}

fn check_perm(n: usize, perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidParty(format!(
            "permutation of length {} for {n} parties",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidParty(format!("bad permutation {perm:?}")));
        }
        seen[p] = true;
    }
    Ok(())
}

fn check_local_op(dims: &[usize], party: usize, op: &DMatrix<C64>) -> Result<()> {
    let d = *dims
        .get(party)
        .ok_or_else(|| Error::InvalidParty(format!("party {party} of {}", dims.len())))?;
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, party {party} has dimension {d}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}
