//! JSON protocol files: a node is
//! `{"party": 0, "operators": [matrix, ...], "children": [node | {"leaf": true}, ...]}`
//! with matrices as rows of `[re, im]` pairs.

use serde_json::{json, Value};

use super::{LoccProtocol, MeasurementNode, Node};
use crate::ensembles::io::{matrix_from_pairs, matrix_pairs};
use crate::error::{Error, Result};
use crate::qcore::linalg::CMatrix;

fn node_to_json(node: &MeasurementNode) -> Value {
    json!({
        "party": node.party,
        "operators": node.operators.iter().map(matrix_pairs).collect::<Vec<_>>(),
        "children": node.children.iter().map(|c| match c {
            Node::Leaf => json!({"leaf": true}),
            Node::Measure(m) => node_to_json(m),
        }).collect::<Vec<_>>(),
    })
}

/// The protocol file content as a JSON value.
pub fn protocol_to_json(prot: &LoccProtocol) -> Value {
    node_to_json(&prot.root)
}

pub fn serialize_protocol(prot: &LoccProtocol) -> Result<String> {
    Ok(serde_json::to_string_pretty(&protocol_to_json(prot))?)
}

fn parse_matrix(value: &Value, path: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(value.clone())
        .map_err(|e| Error::parse(path, format!("expected rows of [re, im] pairs: {e}")))?;
    matrix_from_pairs(&rows, path)
}

fn parse_node(value: &Value, path: &str) -> Result<MeasurementNode> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::parse(path, "expected a node object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "party" | "operators" | "children") {
            return Err(Error::parse(path, format!("unknown field {key:?}")));
        }
    }
    let party =
        obj.get("party")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse(format!("{path}.party"), "expected a nonnegative integer"))? as usize;
    let ops = obj
        .get("operators")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(format!("{path}.operators"), "expected an array of matrices"))?;
    let operators = ops
        .iter()
        .enumerate()
        .map(|(k, m)| parse_matrix(m, &format!("{path}.operators[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let kids = obj
        .get("children")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(format!("{path}.children"), "expected an array"))?;
    let children = kids
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let child_path = format!("{path}.children[{k}]");
            if c.get("leaf").is_some() {
                match c.get("leaf") {
                    Some(Value::Bool(true)) if c.as_object().is_some_and(|o| o.len() == 1) => Ok(Node::Leaf),
                    _ => Err(Error::parse(child_path, "a leaf must be exactly {\"leaf\": true}")),
                }
            } else {
                parse_node(c, &child_path).map(Node::Measure)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let node = MeasurementNode {
        party,
        operators,
        children,
    };
    node.check_local(path)?;
    Ok(node)
}

/// Parses and validates a protocol file. Party indices are checked against
/// an ensemble only when simulating.
pub fn parse_protocol(text: &str) -> Result<LoccProtocol> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    LoccProtocol::new(parse_node(&value, "root")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{computational_basis, shifts_protocol};

    #[test]
    fn round_trips() {
        for p in [shifts_protocol(), computational_basis(&[3, 2]).unwrap()] {
            let back = parse_protocol(&serialize_protocol(&p).unwrap()).unwrap();
            assert_eq!(back.outcomes(), p.outcomes());
            assert_eq!(serialize_protocol(&back).unwrap(), serialize_protocol(&p).unwrap());
        }
    }

    #[test]
    fn incomplete_operators_rejected() {
        let text = r#"{"party": 0, "operators": [[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]], "children": [{"leaf": true}]}"#;
        let err = parse_protocol(text).unwrap_err();
        assert!(matches!(err, Error::IncompleteMeasurement { .. }), "{err}");
    }

    #[test]
    fn errors_carry_location() {
        let err = parse_protocol("{\"party\": 0,\n \"operators\": [")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        let text = r#"{"party": 1, "operators": [[[[1,0],[0,0]],[[0,0],[1,0]]]], "children": [{"party": 0}]}"#;
        let err = parse_protocol(text).unwrap_err().to_string();
        assert!(err.contains("root.children[0].operators"), "{err}");
        let text = r#"{"party": 1, "operators": [[[[1,0],[0,0]],[[0,0],[1,0]]]], "children": [{"leaf": false}]}"#;
        assert!(parse_protocol(text).is_err());
    }

    #[test]
    fn far_party_parses_but_fails_against_pair() {
        let text = r#"{"party": 7, "operators": [[[[1,0],[0,0]],[[0,0],[1,0]]]], "children": [{"leaf": true}]}"#;
        let prot = parse_protocol(text).unwrap();
        let pair = crate::ensembles::build_case(&crate::ensembles::EnsembleCaseId::VShifts)
            .unwrap()
            .reduce_to_pair("B1")
            .unwrap();
        assert!(matches!(
            crate::protocols::simulate(&pair, &prot),
            Err(Error::InvalidParty(_))
        ));
    }
}
