//! Index bookkeeping and dense kernels on tensor-product spaces.
//!
//! Basis ordering is row-major over parties: party 0 is the most significant
//! digit, so `|01>` on dims `[2, 2]` is index 1.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance used by every state invariant.
pub const STATE_TOL: f64 = 1e-9;
/// Eigenvalues in `[-EIG_FLOOR, 0)` are treated as eigensolver noise.
pub const EIG_FLOOR: f64 = 1e-12;
/// Largest total dimension for which full density matrices are materialized.
pub const MAX_MATRIX_DIM: usize = 4096;

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

pub fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidDimensions("no parties".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidDimensions(format!(
            "every party dimension must be >= 2, got {d}"
        )));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidDimensions("total dimension overflows".into()))?;
    Ok(())
}

/// Stride of each party in the flattened index.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// For every multi-index over `parties` (row-major in the given order), the
/// offset it contributes to the full flattened index.
pub fn offsets(dims: &[usize], parties: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &p in parties {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &base in &out {
            for digit in 0..dims[p] {
                next.push(base + digit * st[p]);
            }
        }
        out = next;
    }
    out
}

/// Sorted, deduplicated keep set and its complement.
pub fn split_parties(n_parties: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::InvalidParty("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&p| p >= n_parties) {
        return Err(Error::InvalidParty(format!(
            "party index {bad} out of range for {n_parties} parties"
        )));
    }
    let traced = (0..n_parties).filter(|p| !kept.contains(p)).collect();
    Ok((kept, traced))
}

pub fn partial_trace_matrix(dims: &[usize], rho: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    let (kept, traced) = split_parties(dims.len(), keep)?;
    let ko = offsets(dims, &kept);
    let to = offsets(dims, &traced);
    let mut out = CMatrix::zeros(ko.len(), ko.len());
    for (r, &kr) in ko.iter().enumerate() {
        for (c, &kc) in ko.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &to {
                acc += rho[(kr + t, kc + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Amplitudes arranged as a `D_keep x D_traced` matrix; its Gram product
/// `M M^dag` is the reduced state.
pub fn fiber_matrix(dims: &[usize], amps: &CVector, keep: &[usize]) -> Result<CMatrix> {
    let (kept, traced) = split_parties(dims.len(), keep)?;
    let ko = offsets(dims, &kept);
    let to = offsets(dims, &traced);
    Ok(CMatrix::from_fn(ko.len(), to.len(), |r, c| amps[ko[r] + to[c]]))
}

pub fn partial_trace_vector(dims: &[usize], amps: &CVector, keep: &[usize]) -> Result<CMatrix> {
    let m = fiber_matrix(dims, amps, keep)?;
    Ok(&m * m.adjoint())
}

pub fn max_hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Real spectrum of a Hermitian matrix in descending order, with noise in
/// `[-1e-9, 0)` clamped to zero.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let dev = max_hermitian_deviation(m);
    if dev > STATE_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let mut ev: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    clamp_spectrum(&mut ev)?;
    Ok(ev)
}

fn clamp_spectrum(ev: &mut [f64]) -> Result<()> {
    ev.sort_by(|a, b| b.total_cmp(a));
    for v in ev.iter_mut() {
        if *v < -STATE_TOL {
            return Err(Error::NotPositive(*v));
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(())
}

/// Eigenpairs of a Hermitian matrix, descending, eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Nonzero spectrum of `sum_k v_k v_k^dag` for the columns `v_k` of `m`,
/// using whichever of `M M^dag` or `M^dag M` is smaller.
pub fn gram_spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    let g = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    hermitian_eigenvalues(&g)
}

pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = symmetrize(&(a - b));
    0.5 * diff.symmetric_eigenvalues().iter().map(|v| v.abs()).sum::<f64>()
}

/// Left-multiplies the `party` factor of a vector by `op`.
pub fn apply_local_vec(dims: &[usize], party: usize, op: &CMatrix, v: &CVector) -> CVector {
    let d = dims[party];
    let inner = strides(dims)[party];
    let outer = v.len() / (d * inner);
    let mut out = CVector::zeros(v.len());
    let mut buf = vec![C64::new(0.0, 0.0); d];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for (a, slot) in buf.iter_mut().enumerate() {
                *slot = v[base + a * inner];
            }
            for r in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for (a, x) in buf.iter().enumerate() {
                    acc += op[(r, a)] * x;
                }
                out[base + r * inner] = acc;
            }
        }
    }
    out
}

/// `(I ⊗ op ⊗ I) m`, acting on the row index.
pub fn apply_local_left(dims: &[usize], party: usize, op: &CMatrix, m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        let col = apply_local_vec(dims, party, op, &m.column(c).into_owned());
        out.set_column(c, &col);
    }
    out
}

/// `K rho K^dag` with `K` acting on one party.
pub fn conjugate_local(dims: &[usize], party: usize, op: &CMatrix, rho: &CMatrix) -> CMatrix {
    let x = apply_local_left(dims, party, op, rho);
    apply_local_left(dims, party, op, &x.adjoint()).adjoint()
}

/// Full operator `I ⊗ op ⊗ I` on the whole space.
pub fn embed_local(dims: &[usize], party: usize, op: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(total_dim(dims), total_dim(dims));
    apply_local_left(dims, party, op, &id)
}

/// Index map for reordering parties: new party `k` is old party `perm[k]`.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_offsets = offsets(dims, perm);
    debug_assert_eq!(old_offsets.len(), total_dim(&new_dims));
    old_offsets
}

pub fn permute_vec(dims: &[usize], perm: &[usize], v: &CVector) -> CVector {
    let map = permutation_map(dims, perm);
    CVector::from_fn(v.len(), |i, _| v[map[i]])
}

pub fn permute_mat(dims: &[usize], perm: &[usize], m: &CMatrix) -> CMatrix {
    let map = permutation_map(dims, perm);
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(map[r], map[c])])
}

/// Largest entrywise deviation of `sum_k K_k^dag K_k` from the identity.
pub fn completeness_deviation(ops: &[CMatrix]) -> f64 {
    let Some(first) = ops.first() else {
        return f64::INFINITY;
    };
    let d = first.ncols();
    let mut acc = CMatrix::zeros(d, d);
    for k in ops {
        acc += k.adjoint() * k;
    }
    acc -= CMatrix::identity(d, d);
    acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
