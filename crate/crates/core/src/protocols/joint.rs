use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::entropy_bits;

/// Leaf label collecting the mass of pruned branches.
pub const PRUNED_LABEL: &str = "∅";

const JOINT_TOL: f64 = 1e-9;

/// `p(i, m)` over ensemble index `i` (rows) and outcome label `m` (columns).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointDistribution {
    elements: Vec<String>,
    outcomes: Vec<String>,
    p: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(elements: Vec<String>, outcomes: Vec<String>, p: Vec<Vec<f64>>) -> Result<Self> {
        if p.len() != elements.len() || p.is_empty() {
            return Err(Error::InvalidJoint(format!(
                "{} rows for {} elements",
                p.len(),
                elements.len()
            )));
        }
        let mut total = 0.0;
        for (i, row) in p.iter().enumerate() {
            if row.len() != outcomes.len() {
                return Err(Error::InvalidJoint(format!(
                    "row {i} has {} entries for {} outcomes",
                    row.len(),
                    outcomes.len()
                )));
            }
            for &x in row {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidJoint(format!("row {i} has entry {x}")));
                }
                total += x;
            }
        }
        if (total - 1.0).abs() > JOINT_TOL {
            return Err(Error::InvalidJoint(format!("entries sum to {total}")));
        }
        Ok(Self { elements, outcomes, p })
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn p(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// Row sums `p_i`.
    pub fn priors(&self) -> Vec<f64> {
        self.p.iter().map(|r| r.iter().sum()).collect()
    }

    /// Column sums `q_m`.
    pub fn outcome_marginal(&self) -> Vec<f64> {
        (0..self.outcomes.len())
            .map(|m| self.p.iter().map(|r| r[m]).sum())
            .collect()
    }

    /// Sums outcome columns by class. Classes appear in order of their first
    /// member; every outcome must be mapped.
    pub fn coarse_grain(&self, classes: &HashMap<String, String>) -> Result<JointDistribution> {
        let mut merged: Vec<String> = Vec::new();
        let mut target = Vec::with_capacity(self.outcomes.len());
        for o in &self.outcomes {
            let class = classes
                .get(o)
                .ok_or_else(|| Error::InvalidJoint(format!("merge map has no class for outcome {o:?}")))?;
            let idx = match merged.iter().position(|c| c == class) {
                Some(i) => i,
                None => {
                    merged.push(class.clone());
                    merged.len() - 1
                }
            };
            target.push(idx);
        }
        let p = self
            .p
            .iter()
            .map(|row| {
                let mut out = vec![0.0; merged.len()];
                for (x, &t) in row.iter().zip(&target) {
                    out[t] += x;
                }
                out
            })
            .collect();
        JointDistribution::new(self.elements.clone(), merged, p)
    }
}

/// `H(p_i) - sum_m q_m H(p_{i|m})`.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    mutual_information_table(&joint.p)
}

/// [`mutual_information`] on a raw `p[i][m]` table.
pub(crate) fn mutual_information_table(p: &[Vec<f64>]) -> f64 {
    let priors: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let columns = p.first().map_or(0, Vec::len);
    let mut posterior = vec![0.0; p.len()];
    let mut conditional = 0.0;
    for m in 0..columns {
        let q: f64 = p.iter().map(|r| r[m]).sum();
        if q <= 0.0 {
            continue;
        }
        for (slot, r) in posterior.iter_mut().zip(p) {
            *slot = r[m] / q;
        }
        conditional += q * entropy_bits(&posterior);
    }
    (entropy_bits(&priors) - conditional).max(0.0)
}

/// `H(i) + H(m) - H(i, m)`.
pub fn mutual_information_symmetric(joint: &JointDistribution) -> f64 {
    let flat: Vec<f64> = joint.p.iter().flatten().copied().collect();
    entropy_bits(&joint.priors()) + entropy_bits(&joint.outcome_marginal()) - entropy_bits(&flat)
}
