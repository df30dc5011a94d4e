//! Adaptive LOCC measurement trees, their exact simulation and the mutual
//! information of the induced classical channel.
//!
//! A node names the acting party and holds one Kraus operator per outcome;
//! child `m` runs after outcome `m`. Leaf labels are the outcome indices on
//! the path joined by `.`, e.g. `"1.0"`.

mod io;
mod joint;

pub use io::{parse_protocol, protocol_to_json, serialize_protocol};
pub(crate) use joint::mutual_information_table;
pub use joint::{mutual_information, mutual_information_symmetric, JointDistribution, PRUNED_LABEL};

use std::f64::consts::FRAC_1_SQRT_2;

use crate::ensembles::{MultipartyEnsemble, State};
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix, CVector, C64};

/// Completeness tolerance for `sum_m K_m^dag K_m = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Branches less likely than this are not followed further.
pub const PRUNE_BELOW: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Measure(MeasurementNode),
    Leaf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementNode {
    party: usize,
    operators: Vec<CMatrix>,
    children: Vec<Node>,
}

impl MeasurementNode {
    /// Checks shapes and completeness of this node only.
    pub fn new(party: usize, operators: Vec<CMatrix>, children: Vec<Node>) -> Result<Self> {
        let node = Self {
            party,
            operators,
            children,
        };
        node.check_local("root")?;
        Ok(node)
    }

    fn check_local(&self, path: &str) -> Result<()> {
        if self.operators.is_empty() {
            return Err(Error::InvalidProtocol(format!("{path}: node has no operators")));
        }
        if self.operators.len() != self.children.len() {
            return Err(Error::InvalidProtocol(format!(
                "{path}: {} operators but {} children",
                self.operators.len(),
                self.children.len()
            )));
        }
        let d = self.operators[0].ncols();
        if d < 2 {
            return Err(Error::InvalidProtocol(format!(
                "{path}: operators act on dimension {d}"
            )));
        }
        for (m, k) in self.operators.iter().enumerate() {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::InvalidProtocol(format!(
                    "{path}.operators[{m}]: expected {d}x{d}, got {}x{}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let deviation = linalg::completeness_deviation(&self.operators);
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteMeasurement {
                path: path.to_string(),
                deviation,
            });
        }
        Ok(())
    }

    pub fn party(&self) -> usize {
        self.party
    }

    /// Local dimension the operators act on.
    pub fn dim(&self) -> usize {
        self.operators[0].ncols()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn children(&self) -> &[Node] {
        &self.children
    }
}

/// Projectors onto the columns of `basis`.
pub fn projectors(basis: &CMatrix) -> Vec<CMatrix> {
    (0..basis.ncols())
        .map(|k| {
            let c = basis.column(k);
            c * c.adjoint()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoccProtocol {
    root: MeasurementNode,
}

impl LoccProtocol {
    /// Validates every node (shape, completeness, consistent per-party
    /// dimension across the tree).
    pub fn new(root: MeasurementNode) -> Result<Self> {
        let prot = Self { root };
        let mut dims: Vec<Option<usize>> = Vec::new();
        validate_tree(&prot.root, "root", &mut dims)?;
        Ok(prot)
    }

    pub fn root(&self) -> &MeasurementNode {
        &self.root
    }

    /// Leaf labels in depth-first order.
    pub fn outcomes(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_leaves(&self.root, "", &mut out);
        out
    }

    /// Highest party index used, plus one.
    pub fn party_span(&self) -> usize {
        fn walk(n: &MeasurementNode) -> usize {
            n.children
                .iter()
                .filter_map(|c| match c {
                    Node::Measure(m) => Some(walk(m)),
                    Node::Leaf => None,
                })
                .fold(n.party + 1, usize::max)
        }
        walk(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn walk(n: &MeasurementNode) -> usize {
            1 + n
                .children
                .iter()
                .map(|c| match c {
                    Node::Measure(m) => walk(m),
                    Node::Leaf => 0,
                })
                .max()
                .unwrap_or(0)
        }
        walk(&self.root)
    }

    /// The protocol `P'` with `K -> U_party^dag K U_party` at every node, so
    /// that running `P'` on an ensemble gives the same joint distribution as
    /// running `P` on the ensemble transformed by `⊗_k U_k`.
    pub fn conjugated(&self, unitaries: &[CMatrix]) -> Result<LoccProtocol> {
        fn walk(n: &MeasurementNode, us: &[CMatrix]) -> Result<MeasurementNode> {
            let u = us
                .get(n.party)
                .ok_or_else(|| Error::InvalidParty(format!("no unitary supplied for party {}", n.party)))?;
            Ok(MeasurementNode {
                party: n.party,
                operators: n.operators.iter().map(|k| u.adjoint() * k * u).collect(),
                children: n
                    .children
                    .iter()
                    .map(|c| {
                        Ok(match c {
                            Node::Measure(m) => Node::Measure(walk(m, us)?),
                            Node::Leaf => Node::Leaf,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            })
        }
        LoccProtocol::new(walk(&self.root, unitaries)?)
    }
}

fn validate_tree(node: &MeasurementNode, path: &str, dims: &mut Vec<Option<usize>>) -> Result<()> {
    node.check_local(path)?;
    if dims.len() <= node.party {
        dims.resize(node.party + 1, None);
    }
    match dims[node.party] {
        Some(d) if d != node.dim() => {
            return Err(Error::InvalidProtocol(format!(
                "{path}: party {} measured with dimension {} here but {d} elsewhere",
                node.party,
                node.dim()
            )))
        }
        _ => dims[node.party] = Some(node.dim()),
    }
    for (m, child) in node.children.iter().enumerate() {
        if let Node::Measure(c) = child {
            validate_tree(c, &format!("{path}.children[{m}]"), dims)?;
        }
    }
    Ok(())
}

fn collect_leaves(node: &MeasurementNode, prefix: &str, out: &mut Vec<String>) {
    for (m, child) in node.children.iter().enumerate() {
        let label = if prefix.is_empty() {
            m.to_string()
        } else {
            format!("{prefix}.{m}")
        };
        match child {
            Node::Leaf => out.push(label),
            Node::Measure(c) => collect_leaves(c, &label, out),
        }
    }
}

/// Single-outcome identity measurement on party 0.
pub fn trivial_protocol(dim: usize) -> Result<LoccProtocol> {
    LoccProtocol::new(MeasurementNode::new(
        0,
        vec![CMatrix::identity(dim, dim)],
        vec![Node::Leaf],
    )?)
}

/// Projective measurement in `basis` (columns) on `party`, each outcome
/// followed by the matching entry of `children`.
pub fn projective(party: usize, basis: &CMatrix, children: Vec<Node>) -> Result<MeasurementNode> {
    MeasurementNode::new(party, projectors(basis), children)
}

/// Every party in turn measures its computational basis.
pub fn computational_basis(dims: &[usize]) -> Result<LoccProtocol> {
    fn build(dims: &[usize], party: usize) -> Result<MeasurementNode> {
        let d = dims[party];
        let children = (0..d)
            .map(|_| {
                if party + 1 < dims.len() {
                    build(dims, party + 1).map(Node::Measure)
                } else {
                    Ok(Node::Leaf)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        projective(party, &CMatrix::identity(d, d), children)
    }
    linalg::validate_dims(dims)?;
    LoccProtocol::new(build(dims, 0)?)
}

/// The qubit `X` basis `{|+>, |->}` as columns.
pub fn x_basis() -> CMatrix {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

/// One-bit strategy: `sender` measures `Z` and announces the result; on `0`
/// the receiver measures `Z`, on `1` it measures `X`.
pub fn shifts_protocol_between(sender: usize, receiver: usize) -> Result<LoccProtocol> {
    if sender == receiver {
        return Err(Error::InvalidParty("sender and receiver must differ".into()));
    }
    let z = CMatrix::identity(2, 2);
    let after_zero = projective(receiver, &z, vec![Node::Leaf, Node::Leaf])?;
    let after_one = projective(receiver, &x_basis(), vec![Node::Leaf, Node::Leaf])?;
    LoccProtocol::new(projective(
        sender,
        &z,
        vec![Node::Measure(after_zero), Node::Measure(after_one)],
    )?)
}

/// [`shifts_protocol_between`] with `A` (party 0) sending to party 1.
pub fn shifts_protocol() -> LoccProtocol {
    shifts_protocol_between(0, 1).expect("fixed protocol is valid")
}

/// One-way strategy: `sender` measures the columns of `sender_basis`; after
/// outcome `m` the receiver measures the columns of `receiver_bases[m]`.
pub fn one_way(
    sender: usize,
    receiver: usize,
    sender_basis: &CMatrix,
    receiver_bases: &[CMatrix],
) -> Result<LoccProtocol> {
    if receiver_bases.len() != sender_basis.ncols() {
        return Err(Error::InvalidProtocol(format!(
            "{} receiver bases for {} sender outcomes",
            receiver_bases.len(),
            sender_basis.ncols()
        )));
    }
    let children = receiver_bases
        .iter()
        .map(|b| projective(receiver, b, vec![Node::Leaf; b.ncols()]).map(Node::Measure))
        .collect::<Result<Vec<_>>>()?;
    LoccProtocol::new(projective(sender, sender_basis, children)?)
}

fn check_against(ens: &MultipartyEnsemble, prot: &LoccProtocol) -> Result<()> {
    fn walk(n: &MeasurementNode, dims: &[usize], path: &str) -> Result<()> {
        if n.party >= dims.len() {
            return Err(Error::InvalidParty(format!(
                "{path}: party index {} but the ensemble has {} parties",
                n.party,
                dims.len()
            )));
        }
        if n.dim() != dims[n.party] {
            return Err(Error::DimensionMismatch(format!(
                "{path}: operators act on dimension {} but party {} has dimension {}",
                n.dim(),
                n.party,
                dims[n.party]
            )));
        }
        for (m, c) in n.children.iter().enumerate() {
            if let Node::Measure(c) = c {
                walk(c, dims, &format!("{path}.children[{m}]"))?;
            }
        }
        Ok(())
    }
    walk(&prot.root, ens.dims(), "root")
}

/// Unnormalized post-measurement state along a path.
enum Branch {
    Pure(CVector),
    Mixed(CMatrix),
}

impl Branch {
    fn weight(&self) -> f64 {
        match self {
            Branch::Pure(v) => v.norm_squared(),
            Branch::Mixed(m) => m.trace().re.max(0.0),
        }
    }

    fn apply(&self, dims: &[usize], party: usize, k: &CMatrix) -> Branch {
        match self {
            Branch::Pure(v) => Branch::Pure(linalg::apply_local_vec(dims, party, k, v)),
            Branch::Mixed(m) => Branch::Mixed(linalg::conjugate_local(dims, party, k, m)),
        }
    }
}

fn descend(
    node: &MeasurementNode,
    dims: &[usize],
    state: &Branch,
    prefix: &str,
    out: &mut Vec<(String, f64)>,
    pruned: &mut f64,
) {
    for (m, (k, child)) in node.operators.iter().zip(&node.children).enumerate() {
        let label = if prefix.is_empty() {
            m.to_string()
        } else {
            format!("{prefix}.{m}")
        };
        let next = state.apply(dims, node.party, k);
        let w = next.weight();
        match child {
            Node::Leaf => out.push((label, w)),
            Node::Measure(c) => {
                if w < PRUNE_BELOW {
                    *pruned += w;
                } else {
                    descend(c, dims, &next, &label, out, pruned);
                }
            }
        }
    }
}

/// Exact joint distribution `p(i, m) = p_i Pr(leaf m | state_i)`.
pub fn simulate(ens: &MultipartyEnsemble, prot: &LoccProtocol) -> Result<JointDistribution> {
    check_against(ens, prot)?;
    let mut outcomes = prot.outcomes();
    let mut rows = Vec::with_capacity(ens.cardinality());
    let mut pruned_any = false;
    for e in ens.elements() {
        let start = match &e.state {
            State::Pure(v) => Branch::Pure(v.amplitudes().clone()),
            State::Mixed(m) => Branch::Mixed(m.matrix().clone()),
        };
        let mut leaves = Vec::with_capacity(outcomes.len());
        let mut pruned = 0.0;
        descend(&prot.root, ens.dims(), &start, "", &mut leaves, &mut pruned);
        let mut row = vec![0.0; outcomes.len() + 1];
        for (label, w) in leaves {
            let idx = outcomes.iter().position(|o| *o == label).expect("leaf from this tree");
            row[idx] = e.probability * w;
        }
        if pruned > 0.0 {
            pruned_any = true;
        }
        row[outcomes.len()] = e.probability * pruned;
        // Tiny drift from the completeness tolerance is renormalized away so
        // that row sums equal the priors.
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            let scale = e.probability / total;
            row.iter_mut().for_each(|x| *x *= scale);
        }
        rows.push(row);
    }
    if pruned_any {
        outcomes.push(PRUNED_LABEL.to_string());
    } else {
        rows.iter_mut().for_each(|r| {
            r.pop();
        });
    }
    JointDistribution::new(ens.elements().iter().map(|e| e.label.clone()).collect(), outcomes, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_case, default_party_labels, Element, EnsembleCaseId};
    use crate::qcore::random::{haar_unitary, haar_vector, random_density_matrix};
    use crate::qcore::{DensityMatrix, StateVector};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shifts_pair() -> MultipartyEnsemble {
        build_case(&EnsembleCaseId::VShifts)
            .unwrap()
            .reduce_to_pair("B1")
            .unwrap()
    }

    /// `13/4 - (3 log2 3 + 5 log2 5) / 8`.
    fn shifts_value() -> f64 {
        13.0 / 4.0 - (3.0 * 3f64.log2() + 5.0 * 5f64.log2()) / 8.0
    }

    #[test]
    fn shifts_protocol_structure() {
        let p = shifts_protocol();
        assert_eq!(p.root().children().len(), 2);
        for c in p.root().children() {
            let Node::Measure(n) = c else {
                panic!("expected a measurement")
            };
            assert_eq!(n.children().len(), 2);
            assert!(n.children().iter().all(|c| *c == Node::Leaf));
            assert!(linalg::completeness_deviation(n.operators()) < 1e-12);
        }
        assert!(linalg::completeness_deviation(p.root().operators()) < 1e-12);
        assert_eq!(p.outcomes(), ["0.0", "0.1", "1.0", "1.1"]);
        assert_eq!(p.depth(), 2);
    }

    #[test]
    fn shifts_protocol_value() {
        let joint = simulate(&shifts_pair(), &shifts_protocol()).unwrap();
        let q = joint.outcome_marginal();
        assert_abs_diff_eq!(q[0] + q[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_information(&joint), shifts_value(), epsilon = 1e-12);
        assert_abs_diff_eq!(shifts_value(), 1.20443, epsilon = 5e-6);
    }

    #[test]
    fn computational_basis_on_e1_pair_is_correlated() {
        let pair = build_case(&EnsembleCaseId::IIE1).unwrap().reduce_to_pair("B1").unwrap();
        let joint = simulate(&pair, &computational_basis(&[2, 2]).unwrap()).unwrap();
        // Element 0 gives 00/11, element 1 gives 01/10.
        for (m, label) in joint.outcomes().iter().enumerate() {
            let parity = label.split('.').map(|s| s.parse::<usize>().unwrap()).sum::<usize>() % 2;
            assert_abs_diff_eq!(joint.p()[1 - parity][m], 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(mutual_information(&joint), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trivial_protocol_returns_priors() {
        let ens = build_case(&EnsembleCaseId::IVET).unwrap();
        let joint = simulate(&ens, &trivial_protocol(3).unwrap()).unwrap();
        assert_eq!(joint.outcomes(), ["0"]);
        for (row, e) in joint.p().iter().zip(ens.elements()) {
            assert_abs_diff_eq!(row[0], e.probability, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(mutual_information(&joint), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mismatches_are_reported() {
        let pair = shifts_pair();
        let far = shifts_protocol_between(0, 7).unwrap();
        assert!(matches!(simulate(&pair, &far), Err(Error::InvalidParty(_))));
        let qutrit = computational_basis(&[3, 3]).unwrap();
        assert!(matches!(simulate(&pair, &qutrit), Err(Error::DimensionMismatch(_))));
        let half = CMatrix::identity(2, 2).scale(0.5f64.sqrt());
        let err = MeasurementNode::new(0, vec![half], vec![Node::Leaf]).unwrap_err();
        assert!(matches!(err, Error::IncompleteMeasurement { .. }));
    }

    #[test]
    fn pruned_mass_goes_to_empty_label() {
        // |00> under Z on A then Z on B: the A=1 branch is never entered.
        let s = StateVector::basis(vec![2, 2], 0).unwrap();
        let ens = MultipartyEnsemble::uniform(vec![2, 2], vec![(s.into(), "00".into())]).unwrap();
        let joint = simulate(&ens, &computational_basis(&[2, 2]).unwrap()).unwrap();
        assert_eq!(joint.outcomes().len(), 4);
        assert_abs_diff_eq!(joint.p()[0][0], 1.0);
        // A 1e-18 branch is cut off and its mass shows up under the empty label.
        let eps = 1e-9;
        let t = StateVector::normalized(
            vec![2, 2],
            CVector::from_vec(vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(eps, 0.0),
                C64::new(0.0, 0.0),
            ]),
        )
        .unwrap();
        let ens = MultipartyEnsemble::uniform(vec![2, 2], vec![(t.into(), "t".into())]).unwrap();
        let joint = simulate(&ens, &computational_basis(&[2, 2]).unwrap()).unwrap();
        assert_eq!(joint.outcomes().last().unwrap(), PRUNED_LABEL);
        assert_abs_diff_eq!(joint.p()[0][4], eps * eps, epsilon = 1e-30);
        assert_eq!(joint.p()[0][2], 0.0);
    }

    fn random_ensemble(rng: &mut ChaCha8Rng, dims: &[usize]) -> MultipartyEnsemble {
        let d: usize = dims.iter().product();
        let n = rng.random_range(1..5);
        let elements = (0..n)
            .map(|k| {
                let state: State = if rng.random_bool(0.5) {
                    StateVector::new(dims.to_vec(), haar_vector(d, rng)).unwrap().into()
                } else {
                    let rank = rng.random_range(1..=d);
                    DensityMatrix::new(dims.to_vec(), random_density_matrix(d, rank, rng))
                        .unwrap()
                        .into()
                };
                Element::new(1.0 / n as f64, state, format!("e{k}"))
            })
            .collect();
        MultipartyEnsemble::new(default_party_labels(dims.len()), dims.to_vec(), elements).unwrap()
    }

    /// Random POVM with `n` outcomes: `K_m = A_m S^{-1/2}`, `S = sum A^dag A`.
    fn random_kraus(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<CMatrix> {
        if rng.random_bool(0.5) {
            let u = haar_unitary(d, rng);
            return projectors(&u);
        }
        let raw: Vec<CMatrix> = (0..n)
            .map(|_| haar_unitary(d, rng).scale(rng.random_range(0.1..1.0)))
            .collect();
        let s = raw.iter().fold(CMatrix::zeros(d, d), |acc, a| acc + a.adjoint() * a);
        let (vals, vecs) = linalg::hermitian_eigen(&s);
        let inv_sqrt = &vecs
            * CMatrix::from_diagonal(&CVector::from_iterator(
                d,
                vals.iter().map(|v| C64::new(1.0 / v.sqrt(), 0.0)),
            ))
            * vecs.adjoint();
        raw.iter().map(|a| a * &inv_sqrt).collect()
    }

    fn random_node(rng: &mut ChaCha8Rng, dims: &[usize], depth: usize) -> MeasurementNode {
        let party = rng.random_range(0..dims.len());
        let n = rng.random_range(2..=3);
        let ops = random_kraus(rng, dims[party], n);
        let children = (0..ops.len())
            .map(|_| {
                if depth > 1 && rng.random_bool(0.6) {
                    Node::Measure(random_node(rng, dims, depth - 1))
                } else {
                    Node::Leaf
                }
            })
            .collect();
        MeasurementNode::new(party, ops, children).unwrap()
    }

    fn random_protocol(rng: &mut ChaCha8Rng, dims: &[usize]) -> LoccProtocol {
        LoccProtocol::new(random_node(rng, dims, 3)).unwrap()
    }

    fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
        prop_oneof![
            Just(vec![2, 2]),
            Just(vec![2, 3]),
            Just(vec![4, 4]),
            Just(vec![2, 2, 2]),
            Just(vec![2, 2, 4])
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn simulated_joints_are_valid(seed in any::<u64>(), dims in dims_strategy()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ens = random_ensemble(&mut rng, &dims);
            let prot = random_protocol(&mut rng, &dims);
            let joint = simulate(&ens, &prot).unwrap();
            let total: f64 = joint.p().iter().flatten().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            for (row, e) in joint.p().iter().zip(ens.elements()) {
                prop_assert!(row.iter().all(|&x| x >= 0.0));
                prop_assert!((row.iter().sum::<f64>() - e.probability).abs() < 1e-9);
            }
            let i = mutual_information(&joint);
            let h = crate::qcore::entropy_bits(&ens.priors());
            prop_assert!(i >= -1e-9);
            prop_assert!(i <= h.min((joint.outcomes().len() as f64).log2()) + 1e-9);
            prop_assert!((i - mutual_information_symmetric(&joint)).abs() < 1e-9);
        }

        #[test]
        fn data_processing(seed in any::<u64>(), dims in dims_strategy(), classes in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ens = random_ensemble(&mut rng, &dims);
            let joint = simulate(&ens, &random_protocol(&mut rng, &dims)).unwrap();
            let map: Vec<(String, String)> = joint
                .outcomes()
                .iter()
                .map(|o| (o.clone(), format!("c{}", rng.random_range(0..classes))))
                .collect();
            let merged = joint.coarse_grain(&map.into_iter().collect()).unwrap();
            prop_assert!(mutual_information(&merged) <= mutual_information(&joint) + 1e-9);
        }

        #[test]
        fn local_unitary_covariance(seed in any::<u64>(), dims in dims_strategy()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ens = random_ensemble(&mut rng, &dims);
            let prot = random_protocol(&mut rng, &dims);
            let us: Vec<CMatrix> = dims.iter().map(|&d| haar_unitary(d, &mut rng)).collect();
            let mut rotated = ens.clone();
            for (k, u) in us.iter().enumerate() {
                rotated = rotated.apply_local(k, u).unwrap();
            }
            let direct = simulate(&rotated, &prot).unwrap();
            let pulled = simulate(&ens, &prot.conjugated(&us).unwrap()).unwrap();
            prop_assert_eq!(direct.outcomes(), pulled.outcomes());
            for (a, b) in direct.p().iter().flatten().zip(pulled.p().iter().flatten()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
