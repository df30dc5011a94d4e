use super::state::{DensityMatrix, ProbabilityDistribution};

/// Eigenvalues below this contribute nothing (`0 log 0 = 0`).
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// `-sum x log2 x` over the entries, skipping negligible ones.
pub fn entropy_bits(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|&&x| x > ENTROPY_CUTOFF)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn von_neumann_entropy(state: &DensityMatrix) -> f64 {
    entropy_bits(&state.eigenvalues())
}

pub fn shannon_entropy(dist: &ProbabilityDistribution) -> f64 {
    entropy_bits(dist.weights())
}
