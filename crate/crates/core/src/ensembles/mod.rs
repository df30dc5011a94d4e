//! Ensemble data model, the case-study registry, pair reductions and file I/O.

mod cases;
pub(crate) mod io;

pub use cases::{build_case, nonorth_default_theta, EnsembleCaseId, MAX_CAT_PARTIES};
pub use io::{parse_ensemble, serialize_ensemble};

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix, MAX_MATRIX_DIM};
use crate::qcore::{DensityMatrix, ProbabilityDistribution, StateVector, STATE_TOL};

/// A pure or mixed element state.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(v) => v.dims(),
            State::Mixed(m) => m.dims(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            State::Pure(v) => v.dim(),
            State::Mixed(m) => m.dim(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, State::Pure(_))
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            State::Pure(v) => {
                if v.dim() > MAX_MATRIX_DIM {
                    return Err(Error::TooLarge(format!("density matrix of dimension {}", v.dim())));
                }
                Ok(v.to_density())
            }
            State::Mixed(m) => Ok(m.clone()),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            State::Pure(v) => v.partial_trace(keep),
            State::Mixed(m) => m.partial_trace(keep),
        }
    }

    /// Spectrum of the reduction onto `keep` (trailing zeros may be omitted
    /// for pure inputs with a small traced side).
    pub fn reduced_spectrum(&self, keep: &[usize]) -> Result<Vec<f64>> {
        match self {
            State::Pure(v) => {
                if keep.len() == v.dims().len() {
                    return Ok(vec![1.0]);
                }
                let m = linalg::fiber_matrix(v.dims(), v.amplitudes(), keep)?;
                linalg::gram_spectrum(&m)
            }
            State::Mixed(m) => {
                if keep.len() == m.dims().len() {
                    return Ok(m.eigenvalues());
                }
                Ok(m.partial_trace(keep)?.eigenvalues())
            }
        }
    }

    pub fn permute(&self, perm: &[usize]) -> Result<State> {
        Ok(match self {
            State::Pure(v) => State::Pure(v.permute(perm)?),
            State::Mixed(m) => State::Mixed(m.permute(perm)?),
        })
    }

    pub fn apply_local(&self, party: usize, unitary: &CMatrix) -> Result<State> {
        Ok(match self {
            State::Pure(v) => State::Pure(v.apply_local(party, unitary)?),
            State::Mixed(m) => State::Mixed(m.apply_local(party, unitary)?),
        })
    }
}

impl From<StateVector> for State {
    fn from(v: StateVector) -> Self {
        State::Pure(v)
    }
}

impl From<DensityMatrix> for State {
    fn from(m: DensityMatrix) -> Self {
        State::Mixed(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub probability: f64,
    pub state: State,
    pub label: String,
}

impl Element {
    pub fn new(probability: f64, state: impl Into<State>, label: impl Into<String>) -> Self {
        Self {
            probability,
            state: state.into(),
            label: label.into(),
        }
    }
}

/// Probability-weighted list of states on parties `A, B1, ..., BN`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipartyEnsemble {
    parties: Vec<String>,
    dims: Vec<usize>,
    elements: Vec<Element>,
    origin: Option<EnsembleCaseId>,
}

/// Default labels `A, B1, ..., BN` for `n_parties` parties.
pub fn default_party_labels(n_parties: usize) -> Vec<String> {
    (0..n_parties)
        .map(|k| if k == 0 { "A".to_string() } else { format!("B{k}") })
        .collect()
}

impl MultipartyEnsemble {
    pub fn new(parties: Vec<String>, dims: Vec<usize>, elements: Vec<Element>) -> Result<Self> {
        linalg::validate_dims(&dims)?;
        if dims.len() < 2 {
            return Err(Error::InvalidParty(
                "an ensemble needs A and at least one partner".into(),
            ));
        }
        if parties.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} party labels for {} dims",
                parties.len(),
                dims.len()
            )));
        }
        for (k, p) in parties.iter().enumerate() {
            if p.is_empty() || parties[..k].contains(p) {
                return Err(Error::InvalidParty(format!("party label {p:?} is empty or repeated")));
            }
        }
        if elements.is_empty() {
            return Err(Error::InvalidParameter("ensemble has no elements".into()));
        }
        ProbabilityDistribution::new(elements.iter().map(|e| e.probability).collect())?;
        for (k, e) in elements.iter().enumerate() {
            if e.state.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch(format!(
                    "element {k} has dims {:?}, ensemble has {dims:?}",
                    e.state.dims()
                )));
            }
        }
        Ok(Self {
            parties,
            dims,
            elements,
            origin: None,
        })
    }

    /// Uniform-probability ensemble with default party labels.
    pub fn uniform(dims: Vec<usize>, states: Vec<(State, String)>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        let elements = states.into_iter().map(|(s, l)| Element::new(p, s, l)).collect();
        Self::new(default_party_labels(dims.len()), dims, elements)
    }

    pub(crate) fn with_origin(mut self, origin: EnsembleCaseId) -> Self {
        self.origin = Some(origin);
        self
    }

    /// Registry case this ensemble was built from, if any.
    pub fn origin(&self) -> Option<&EnsembleCaseId> {
        self.origin.as_ref()
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        linalg::total_dim(&self.dims)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Number of elements (Γ).
    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }

    pub fn party_count(&self) -> usize {
        self.parties.len()
    }

    /// Number of partners `B1..BN` (N).
    pub fn partner_count(&self) -> usize {
        self.parties.len() - 1
    }

    pub fn is_bipartite(&self) -> bool {
        self.parties.len() == 2
    }

    pub fn priors(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.probability).collect()
    }

    pub fn all_pure(&self) -> bool {
        self.elements.iter().all(|e| e.state.is_pure())
    }

    pub fn party_index(&self, label: &str) -> Result<usize> {
        self.parties
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::InvalidParty(format!("unknown party {label:?}")))
    }

    /// Ensemble of reductions onto `keep` (kept in ascending party order).
    pub fn reduce(&self, keep: &[usize]) -> Result<MultipartyEnsemble> {
        let (kept, _) = linalg::split_parties(self.dims.len(), keep)?;
        if kept.len() < 2 {
            return Err(Error::InvalidParty("a reduction must keep at least two parties".into()));
        }
        if kept.len() == self.dims.len() {
            let mut copy = self.clone();
            copy.origin = None;
            return Ok(copy);
        }
        let elements = self
            .elements
            .iter()
            .map(|e| {
                Ok(Element {
                    probability: e.probability,
                    state: State::Mixed(e.state.partial_trace(&kept)?),
                    label: e.label.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MultipartyEnsemble {
            parties: kept.iter().map(|&p| self.parties[p].clone()).collect(),
            dims: kept.iter().map(|&p| self.dims[p]).collect(),
            elements,
            origin: None,
        })
    }

    /// Bipartite ensemble seen by `A` and one partner.
    pub fn reduce_to_pair(&self, partner: &str) -> Result<MultipartyEnsemble> {
        let idx = self.party_index(partner)?;
        if idx == 0 {
            return Err(Error::InvalidParty(format!(
                "partner must be one of B1..B{}, got {partner:?}",
                self.partner_count()
            )));
        }
        self.reduce(&[0, idx])
    }

    /// Replaces the state of every element; used for reductions that are
    /// known to stay pure.
    pub fn map_states<F>(&self, mut f: F) -> Result<MultipartyEnsemble>
    where
        F: FnMut(&State) -> Result<State>,
    {
        let elements = self
            .elements
            .iter()
            .map(|e| {
                Ok(Element {
                    probability: e.probability,
                    state: f(&e.state)?,
                    label: e.label.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MultipartyEnsemble::new(self.parties.clone(), self.dims.clone(), elements)
    }

    pub fn apply_local(&self, party: usize, unitary: &CMatrix) -> Result<MultipartyEnsemble> {
        self.map_states(|s| s.apply_local(party, unitary))
    }

    /// Reorders parties; labels move with their subsystems.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<MultipartyEnsemble> {
        let elements = self
            .elements
            .iter()
            .map(|e| {
                Ok(Element {
                    probability: e.probability,
                    state: e.state.permute(perm)?,
                    label: e.label.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MultipartyEnsemble::new(
            perm.iter().map(|&p| self.parties[p].clone()).collect(),
            perm.iter().map(|&p| self.dims[p]).collect(),
            elements,
        )
    }

    /// Average state `sum_i p_i rho_i` as a matrix.
    pub fn average_state(&self) -> Result<DensityMatrix> {
        if self.total_dim() > MAX_MATRIX_DIM {
            return Err(Error::TooLarge(format!(
                "average state of dimension {}",
                self.total_dim()
            )));
        }
        let states = self
            .elements
            .iter()
            .map(|e| e.state.to_density())
            .collect::<Result<Vec<_>>>()?;
        let terms: Vec<(f64, &DensityMatrix)> = self
            .elements
            .iter()
            .zip(&states)
            .map(|(e, s)| (e.probability, s))
            .collect();
        DensityMatrix::mixture(&terms)
    }

    /// Spectrum of the average state reduced onto `keep`. For all-pure
    /// ensembles this goes through the Gram matrix of weighted amplitude
    /// fibers, so neither side needs to be materialized.
    pub fn average_spectrum(&self, keep: &[usize]) -> Result<Vec<f64>> {
        let (kept, traced) = linalg::split_parties(self.dims.len(), keep)?;
        if self.all_pure() {
            let d_keep: usize = kept.iter().map(|&p| self.dims[p]).product();
            let d_trace: usize = traced.iter().map(|&p| self.dims[p]).product();
            let cols = d_trace * self.elements.len();
            if d_keep.min(cols) > MAX_MATRIX_DIM {
                return Err(Error::TooLarge(format!("Gram matrix of size {}", d_keep.min(cols))));
            }
            let mut stacked = CMatrix::zeros(d_keep, cols);
            for (k, e) in self.elements.iter().enumerate() {
                let State::Pure(v) = &e.state else { unreachable!() };
                let fibers = linalg::fiber_matrix(&self.dims, v.amplitudes(), &kept)?;
                stacked
                    .columns_mut(k * d_trace, d_trace)
                    .copy_from(&fibers.scale(e.probability.sqrt()));
            }
            return linalg::gram_spectrum(&stacked);
        }
        let avg = self.average_state()?;
        if kept.len() == self.dims.len() {
            Ok(avg.eigenvalues())
        } else {
            Ok(avg.partial_trace(&kept)?.eigenvalues())
        }
    }

    /// `sum_i p_i S(tr_rest rho_i)`.
    pub fn average_reduced_entropy(&self, keep: &[usize]) -> Result<f64> {
        let (kept, _) = linalg::split_parties(self.dims.len(), keep)?;
        self.elements.iter().try_fold(0.0, |acc, e| {
            let spec = e.state.reduced_spectrum(&kept)?;
            Ok(acc + e.probability * crate::qcore::entropy_bits(&spec))
        })
    }

    /// True when every element reduces to the same state on `keep`
    /// (pairwise trace distance below 1e-9).
    pub fn reductions_identical(&self, keep: &[usize]) -> Result<bool> {
        let reduced = self
            .elements
            .iter()
            .map(|e| {
                if keep.len() == self.dims.len() {
                    e.state.to_density()
                } else {
                    e.state.partial_trace(keep)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let first = &reduced[0];
        for other in &reduced[1..] {
            if first.trace_distance(other)? >= STATE_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Whether exchanging parties `p1` and `p2` maps the ensemble onto itself as
/// a multiset of (probability, state) pairs.
pub fn is_swap_invariant(ens: &MultipartyEnsemble, p1: &str, p2: &str) -> Result<bool> {
    let a = ens.party_index(p1)?;
    let b = ens.party_index(p2)?;
    if ens.dims[a] != ens.dims[b] {
        return Err(Error::DimensionMismatch(format!(
            "parties {p1} and {p2} have dimensions {} and {}",
            ens.dims[a], ens.dims[b]
        )));
    }
    let mut perm: Vec<usize> = (0..ens.dims.len()).collect();
    perm.swap(a, b);
    let original = ens
        .elements
        .iter()
        .map(|e| e.state.to_density())
        .collect::<Result<Vec<_>>>()?;
    let swapped = ens
        .elements
        .iter()
        .map(|e| e.state.permute(&perm)?.to_density())
        .collect::<Result<Vec<_>>>()?;
    let mut used = vec![false; original.len()];
    for (k, s) in swapped.iter().enumerate() {
        let p = ens.elements[k].probability;
        let mut matched = false;
        for (j, o) in original.iter().enumerate() {
            if used[j] || (ens.elements[j].probability - p).abs() > STATE_TOL {
                continue;
            }
            if s.trace_distance(o)? < STATE_TOL {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}
