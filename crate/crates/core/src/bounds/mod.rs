//! Universal bounds on accessible and locally accessible information.

mod local;
pub mod subentropy;

pub use local::{
    haar_product_sample, lambda_locc, local_subentropy_mc, sample_stream, DEFAULT_SAMPLES, MC_CHUNK, MIN_SAMPLES,
};
pub use subentropy::{subentropy_of_spectrum, subentropy_split_richardson};

use serde::Serialize;

use crate::ensembles::MultipartyEnsemble;
use crate::error::{Error, Result};
use crate::qcore::{entropy_bits, DensityMatrix};

/// A named bound value in bits. Monte-Carlo bounds carry their sample count,
/// seed and standard error; deterministic ones report a zero error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub standard_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl BoundReport {
    pub fn exact(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            standard_error: 0.0,
            samples: None,
            seed: None,
        }
    }
}

fn all_parties(ens: &MultipartyEnsemble) -> Vec<usize> {
    (0..ens.party_count()).collect()
}

/// `S(rho_bar)` in bits.
pub fn average_entropy(ens: &MultipartyEnsemble) -> Result<f64> {
    Ok(entropy_bits(&ens.average_spectrum(&all_parties(ens))?))
}

/// Holevo quantity `S(rho_bar) - sum_i p_i S(rho_i)`.
pub fn holevo_chi(ens: &MultipartyEnsemble) -> Result<BoundReport> {
    let all = all_parties(ens);
    let chi = entropy_bits(&ens.average_spectrum(&all)?) - ens.average_reduced_entropy(&all)?;
    Ok(BoundReport::exact("holevo_chi", chi.max(0.0)))
}

/// Subentropy of a density matrix, in bits.
pub fn subentropy(state: &DensityMatrix) -> f64 {
    subentropy_of_spectrum(&state.eigenvalues())
}

/// Subentropy lower bound `Q(rho_bar) - sum_i p_i Q(rho_i)`.
pub fn jrw_lower(ens: &MultipartyEnsemble) -> Result<BoundReport> {
    let all = all_parties(ens);
    let mut value = subentropy_of_spectrum(&ens.average_spectrum(&all)?);
    for e in ens.elements() {
        if !e.state.is_pure() {
            value -= e.probability * subentropy_of_spectrum(&e.state.reduced_spectrum(&all)?);
        }
    }
    Ok(BoundReport::exact("jrw_lower", value.max(0.0)))
}

/// Upper bound on LOCC-accessible information across the cut
/// `left : rest`: `S(rho_bar^L) + S(rho_bar^R) - max_side sum_i p_i S(rho_i^side)`.
pub fn chi_locc_across(ens: &MultipartyEnsemble, left: &[usize]) -> Result<BoundReport> {
    let n = ens.party_count();
    let mut left: Vec<usize> = left.to_vec();
    left.sort_unstable();
    left.dedup();
    if left.is_empty() || left.len() >= n || left.iter().any(|&p| p >= n) {
        return Err(Error::InvalidParty(format!("invalid cut {left:?} for {n} parties")));
    }
    let right: Vec<usize> = (0..n).filter(|p| !left.contains(p)).collect();
    let s_left = entropy_bits(&ens.average_spectrum(&left)?);
    let s_right = entropy_bits(&ens.average_spectrum(&right)?);
    let avg_left = ens.average_reduced_entropy(&left)?;
    let avg_right = ens.average_reduced_entropy(&right)?;
    let value = s_left + s_right - avg_left.max(avg_right);
    Ok(BoundReport::exact("chi_locc", value.max(0.0)))
}

/// `chi_locc_across` for a bipartite ensemble.
pub fn chi_locc(ens: &MultipartyEnsemble) -> Result<BoundReport> {
    if !ens.is_bipartite() {
        return Err(Error::NotBipartite(ens.party_count()));
    }
    chi_locc_across(ens, &[0])
}

/// `log2 Gamma`.
pub fn cardinality_bound(ens: &MultipartyEnsemble) -> BoundReport {
    BoundReport::exact("cardinality", (ens.cardinality() as f64).log2())
}
