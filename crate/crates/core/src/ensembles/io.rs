//! JSON ensemble files.
//!
//! ```json
//! {"dims": [2, 2], "parties": ["A", "B1"],
//!  "elements": [{"p": 0.5, "label": "00", "vector": [[1, 0], [0, 0], [0, 0], [0, 0]]},
//!               {"p": 0.5, "label": "mixed", "matrix": [[[0.25, 0], ...], ...]}]}
//! ```

use serde::{Deserialize, Serialize};

use super::{default_party_labels, Element, MultipartyEnsemble, State};
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix, CVector};
use crate::qcore::{DensityMatrix, StateVector, C64};

/// Input tolerance for hand-written files (normalization, probability sum).
pub const FILE_TOL: f64 = 1e-6;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parties: Option<Vec<String>>,
    elements: Vec<ElementFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementFile {
    p: f64,
    #[serde(default)]
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

pub(crate) fn complex_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub(crate) fn matrix_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub(crate) fn matrix_from_pairs(rows: &[Vec<[f64; 2]>], context: &str) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(Error::parse(context, "empty matrix"));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::parse(
                format!("{context}[{r}]"),
                format!("row has {} entries, expected {m}", row.len()),
            ));
        }
    }
    Ok(CMatrix::from_fn(n, m, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
}

pub fn serialize_ensemble(ens: &MultipartyEnsemble) -> Result<String> {
    let file = EnsembleFile {
        dims: ens.dims().to_vec(),
        parties: Some(ens.parties().to_vec()),
        elements: ens
            .elements()
            .iter()
            .map(|e| match &e.state {
                State::Pure(v) => ElementFile {
                    p: e.probability,
                    label: e.label.clone(),
                    vector: Some(complex_pairs(v.amplitudes())),
                    matrix: None,
                },
                State::Mixed(m) => ElementFile {
                    p: e.probability,
                    label: e.label.clone(),
                    vector: None,
                    matrix: Some(matrix_pairs(m.matrix())),
                },
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parses an ensemble file. Syntax errors carry line and column; semantic
/// errors carry the offending field path.
pub fn parse_ensemble(text: &str) -> Result<MultipartyEnsemble> {
    let file: EnsembleFile = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    linalg::validate_dims(&file.dims).map_err(|e| Error::parse("dims", e.to_string()))?;
    let d = linalg::total_dim(&file.dims);
    let parties = file.parties.unwrap_or_else(|| default_party_labels(file.dims.len()));
    if file.elements.is_empty() {
        return Err(Error::parse("elements", "ensemble has no elements"));
    }
    let sum: f64 = file.elements.iter().map(|e| e.p).sum();
    if (sum - 1.0).abs() > FILE_TOL {
        return Err(Error::parse(
            "elements[*].p",
            format!("probabilities must sum to 1 (sum is {sum})"),
        ));
    }
    let mut elements = Vec::with_capacity(file.elements.len());
    for (k, e) in file.elements.into_iter().enumerate() {
        let ctx = format!("elements[{k}]");
        if !(e.p.is_finite() && e.p >= 0.0) {
            return Err(Error::parse(format!("{ctx}.p"), format!("invalid probability {}", e.p)));
        }
        let state = match (e.vector, e.matrix) {
            (Some(v), None) => {
                if v.len() != d {
                    return Err(Error::parse(
                        format!("{ctx}.vector"),
                        format!(
                            "dimension mismatch: {} amplitudes for dims {:?} (size {d})",
                            v.len(),
                            file.dims
                        ),
                    ));
                }
                let amps = CVector::from_iterator(d, v.iter().map(|z| C64::new(z[0], z[1])));
                let norm = amps.norm();
                if (norm - 1.0).abs() > FILE_TOL {
                    return Err(Error::parse(
                        format!("{ctx}.vector"),
                        format!("amplitudes are not normalized (norm {norm})"),
                    ));
                }
                State::Pure(
                    StateVector::normalized(file.dims.clone(), amps)
                        .map_err(|err| Error::parse(format!("{ctx}.vector"), err.to_string()))?,
                )
            }
            (None, Some(rows)) => {
                let m = matrix_from_pairs(&rows, &format!("{ctx}.matrix"))?;
                if m.nrows() != d || m.ncols() != d {
                    return Err(Error::parse(
                        format!("{ctx}.matrix"),
                        format!(
                            "dimension mismatch: {}x{} matrix for dims {:?} (size {d})",
                            m.nrows(),
                            m.ncols(),
                            file.dims
                        ),
                    ));
                }
                let tr = m.trace().re;
                if (tr - 1.0).abs() > FILE_TOL {
                    return Err(Error::parse(
                        format!("{ctx}.matrix"),
                        format!("trace is {tr}, expected 1"),
                    ));
                }
                State::Mixed(
                    DensityMatrix::new(file.dims.clone(), m.unscale(tr))
                        .map_err(|err| Error::parse(format!("{ctx}.matrix"), err.to_string()))?,
                )
            }
            _ => {
                return Err(Error::parse(
                    ctx,
                    "each element needs exactly one of \"vector\" or \"matrix\"",
                ))
            }
        };
        elements.push(Element {
            probability: e.p / sum,
            state,
            label: e.label,
        });
    }
    MultipartyEnsemble::new(parties, file.dims, elements).map_err(|e| Error::parse("ensemble", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_case, EnsembleCaseId};
    use proptest::prelude::*;

    fn max_gap(a: &MultipartyEnsemble, b: &MultipartyEnsemble) -> f64 {
        assert_eq!(a.dims(), b.dims());
        assert_eq!(a.parties(), b.parties());
        let mut gap: f64 = 0.0;
        for (x, y) in a.elements().iter().zip(b.elements()) {
            assert_eq!(x.label, y.label);
            gap = gap.max((x.probability - y.probability).abs());
            let (mx, my) = (x.state.to_density().unwrap(), y.state.to_density().unwrap());
            gap = gap.max((mx.matrix() - my.matrix()).camax());
        }
        gap
    }

    #[test]
    fn round_trip_e3_and_reduction() {
        let e3 = build_case(&EnsembleCaseId::IIE3).unwrap();
        let back = parse_ensemble(&serialize_ensemble(&e3).unwrap()).unwrap();
        assert!(max_gap(&e3, &back) < 1e-12);
        let pair = build_case(&EnsembleCaseId::VShifts)
            .unwrap()
            .reduce_to_pair("B1")
            .unwrap();
        let back = parse_ensemble(&serialize_ensemble(&pair).unwrap()).unwrap();
        assert!(max_gap(&pair, &back) < 1e-12);
    }

    #[test]
    fn probability_sum_error() {
        let text = r#"{"dims":[2,2],"elements":[
            {"p":0.5,"vector":[[1,0],[0,0],[0,0],[0,0]]},
            {"p":0.4,"vector":[[0,0],[0,0],[0,0],[1,0]]}]}"#;
        let err = parse_ensemble(text).unwrap_err().to_string();
        assert!(err.contains("probabilities must sum to 1"), "{err}");
    }

    #[test]
    fn dimension_error() {
        let text = r#"{"dims":[2,2,2],"elements":[{"p":1.0,"vector":[[1,0],[0,0],[0,0],[0,0]]}]}"#;
        let err = parse_ensemble(text).unwrap_err().to_string();
        assert!(
            err.contains("elements[0].vector") && err.contains("dimension mismatch"),
            "{err}"
        );
    }

    #[test]
    fn unnormalized_rejected_and_syntax_located() {
        let text = r#"{"dims":[2,2],"elements":[{"p":1.0,"vector":[[1,0],[1,0],[0,0],[0,0]]}]}"#;
        assert!(parse_ensemble(text).unwrap_err().to_string().contains("not normalized"));
        let err = parse_ensemble("{\"dims\": [2,2],\n \"elements\": [}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        let both = r#"{"dims":[2,2],"elements":[{"p":1.0}]}"#;
        assert!(parse_ensemble(both).is_err());
    }

    proptest! {
        #[test]
        fn random_ensembles_round_trip(seed in any::<u64>(), n in 1usize..5, mixed in any::<bool>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let dims = vec![2, 3];
            let elements: Vec<Element> = (0..n).map(|k| {
                let state = if mixed && k % 2 == 1 {
                    State::Mixed(DensityMatrix::new(dims.clone(), crate::qcore::random::random_density_matrix(6, 2, &mut rng)).unwrap())
                } else {
                    State::Pure(StateVector::new(dims.clone(), crate::qcore::random::haar_vector(6, &mut rng)).unwrap())
                };
                Element::new(1.0 / n as f64, state, format!("e{k}"))
            }).collect();
            let ens = MultipartyEnsemble::new(default_party_labels(2), dims, elements).unwrap();
            let back = parse_ensemble(&serialize_ensemble(&ens).unwrap()).unwrap();
            prop_assert!(max_gap(&ens, &back) < 1e-12);
        }
    }
}
