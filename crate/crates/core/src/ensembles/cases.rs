use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use super::{default_party_labels, Element, MultipartyEnsemble, State};
use crate::error::{Error, Result};
use crate::qcore::{CVector, StateVector, C64};

/// Largest cat ensemble the registry builds (N partners, N + 1 qubits).
pub const MAX_CAT_PARTIES: usize = 20;

/// Case-study ensembles.
#[derive(Clone, Debug, PartialEq)]
pub enum EnsembleCaseId {
    /// Two GHZ states differing in relative sign.
    IPair,
    /// All eight three-qubit GHZ basis states.
    IFullBasis,
    IIE1,
    IIE2,
    IIE3,
    /// Cat state and its partner-flipped copy on `A, B1..BN`.
    IIICat(usize),
    /// Three qutrit states with disjoint pair supports.
    IVET,
    /// The eight three-qubit product basis states.
    IVEP,
    /// `|000>` and `|nnn>` with `|n> = sin(theta)|0> + cos(theta)|1>`.
    IVNonorth(f64),
    /// The SHIFTS unextendible product basis.
    VShifts,
}

/// Angle with `<0|n> = 0.1`.
pub fn nonorth_default_theta() -> f64 {
    0.1f64.asin()
}

impl EnsembleCaseId {
    /// Parses a registry id; `n` is only accepted for `III-cat`, `theta` only
    /// for `IV-nonorth`.
    pub fn parse(id: &str, n: Option<usize>, theta: Option<f64>) -> Result<Self> {
        let case = match id {
            "I-pair" => Self::IPair,
            "I-full-basis" => Self::IFullBasis,
            "II-E1" => Self::IIE1,
            "II-E2" => Self::IIE2,
            "II-E3" => Self::IIE3,
            "III-cat" => Self::IIICat(n.unwrap_or(2)),
            "IV-ET" => Self::IVET,
            "IV-EP" => Self::IVEP,
            "IV-nonorth" => Self::IVNonorth(theta.unwrap_or_else(nonorth_default_theta)),
            "V-shifts" => Self::VShifts,
            other => {
                // Accept the parameterized display forms too.
                if let Some(inner) = other.strip_prefix("III-cat(").and_then(|s| s.strip_suffix(')')) {
                    if n.is_some() {
                        return Err(Error::InvalidParameter("N given twice".into()));
                    }
                    let parsed = inner
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad N in {other:?}")))?;
                    return Self::parse("III-cat", Some(parsed), theta);
                }
                if let Some(inner) = other.strip_prefix("IV-nonorth(").and_then(|s| s.strip_suffix(')')) {
                    if theta.is_some() {
                        return Err(Error::InvalidParameter("theta given twice".into()));
                    }
                    let parsed = inner
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad theta in {other:?}")))?;
                    return Self::parse("IV-nonorth", n, Some(parsed));
                }
                return Err(Error::InvalidParameter(format!("unknown case id {other:?}")));
            }
        };
        if n.is_some() && !matches!(case, Self::IIICat(_)) {
            return Err(Error::InvalidParameter("N is only valid for III-cat".into()));
        }
        if theta.is_some() && !matches!(case, Self::IVNonorth(_)) {
            return Err(Error::InvalidParameter("theta is only valid for IV-nonorth".into()));
        }
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::IIICat(n) if !(2..=MAX_CAT_PARTIES).contains(&n) => Err(Error::InvalidParameter(format!(
                "III-cat needs 2 <= N <= {MAX_CAT_PARTIES}, got {n}"
            ))),
            Self::IVNonorth(t) if !(t > 0.0 && t < std::f64::consts::FRAC_PI_2) => Err(Error::InvalidParameter(
                format!("IV-nonorth needs theta in (0, pi/2), got {t}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn all_default() -> Vec<EnsembleCaseId> {
        vec![
            Self::IPair,
            Self::IFullBasis,
            Self::IIE1,
            Self::IIE2,
            Self::IIE3,
            Self::IIICat(2),
            Self::IVET,
            Self::IVEP,
            Self::IVNonorth(nonorth_default_theta()),
            Self::VShifts,
        ]
    }
}

impl fmt::Display for EnsembleCaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IPair => write!(f, "I-pair"),
            Self::IFullBasis => write!(f, "I-full-basis"),
            Self::IIE1 => write!(f, "II-E1"),
            Self::IIE2 => write!(f, "II-E2"),
            Self::IIE3 => write!(f, "II-E3"),
            Self::IIICat(n) => write!(f, "III-cat({n})"),
            Self::IVET => write!(f, "IV-ET"),
            Self::IVEP => write!(f, "IV-EP"),
            Self::IVNonorth(t) => write!(f, "IV-nonorth({t})"),
            Self::VShifts => write!(f, "V-shifts"),
        }
    }
}

impl FromStr for EnsembleCaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, None, None)
    }
}

/// Superposition `sum_k c_k |digits_k>` on `dims`, normalized.
fn superpose(dims: &[usize], terms: &[(f64, &[usize])]) -> Result<StateVector> {
    let d: usize = dims.iter().product();
    let mut amps = CVector::zeros(d);
    for (coef, digits) in terms {
        let idx = digits.iter().zip(dims).fold(0, |acc, (&x, &dim)| acc * dim + x);
        amps[idx] += C64::new(*coef, 0.0);
    }
    StateVector::normalized(dims.to_vec(), amps)
}

fn qubit(a0: f64, a1: f64) -> Result<StateVector> {
    StateVector::from_real(vec![2], &[a0, a1])
}

fn product(factors: &[StateVector]) -> StateVector {
    let mut it = factors.iter();
    let first = it.next().expect("nonempty product").clone();
    it.fold(first, |acc, f| acc.tensor(f))
}

fn uniform(dims: Vec<usize>, states: Vec<(StateVector, &str)>) -> Result<MultipartyEnsemble> {
    let p = 1.0 / states.len() as f64;
    let elements = states
        .into_iter()
        .map(|(s, l)| Element::new(p, State::Pure(s), l))
        .collect();
    MultipartyEnsemble::new(default_party_labels(dims.len()), dims, elements)
}

/// Builds a registry ensemble from its defining formulas.
pub fn build_case(id: &EnsembleCaseId) -> Result<MultipartyEnsemble> {
    id.validate()?;
    let q3 = vec![2, 2, 2];
    let ens = match *id {
        EnsembleCaseId::IPair => uniform(
            q3.clone(),
            vec![
                (superpose(&q3, &[(1.0, &[0, 0, 0]), (1.0, &[1, 1, 1])])?, "psi0+"),
                (superpose(&q3, &[(1.0, &[0, 0, 0]), (-1.0, &[1, 1, 1])])?, "psi0-"),
            ],
        )?,
        EnsembleCaseId::IFullBasis => {
            let mut states = Vec::with_capacity(8);
            let mut labels = Vec::with_capacity(8);
            for j in 0..2 {
                for k in 0..2 {
                    for (sign, tag) in [(1.0, '+'), (-1.0, '-')] {
                        states.push(superpose(&q3, &[(1.0, &[0, j, k]), (sign, &[1, 1 - j, 1 - k])])?);
                        labels.push(format!("ghz{j}{k}{tag}"));
                    }
                }
            }
            let p = 1.0 / 8.0;
            let elements = states
                .into_iter()
                .zip(labels)
                .map(|(s, l)| Element::new(p, s, l))
                .collect();
            MultipartyEnsemble::new(default_party_labels(3), q3.clone(), elements)?
        }
        EnsembleCaseId::IIE1 => uniform(
            q3.clone(),
            vec![
                (superpose(&q3, &[(1.0, &[0, 0, 0]), (1.0, &[1, 1, 1])])?, "psi0+"),
                // Named psi3+ with the pair reduction written rho_{1+}.
                (superpose(&q3, &[(1.0, &[0, 1, 1]), (-1.0, &[1, 0, 0])])?, "psi3+"),
            ],
        )?,
        EnsembleCaseId::IIE2 => uniform(
            q3.clone(),
            vec![
                (superpose(&q3, &[(1.0, &[0, 0, 0]), (1.0, &[0, 1, 1])])?, "psi+"),
                (superpose(&q3, &[(1.0, &[1, 0, 0]), (-1.0, &[1, 1, 1])])?, "psi-"),
            ],
        )?,
        EnsembleCaseId::IIE3 => uniform(
            q3.clone(),
            vec![
                (superpose(&q3, &[(1.0, &[0, 0, 0])])?, "000"),
                (superpose(&q3, &[(1.0, &[1, 1, 1])])?, "111"),
            ],
        )?,
        EnsembleCaseId::IIICat(n) => {
            let dims = vec![2; n + 1];
            let zeros = vec![0; n + 1];
            let ones = vec![1; n + 1];
            let mut flipped_a = vec![1; n + 1];
            flipped_a[0] = 0;
            let mut flipped_b = vec![0; n + 1];
            flipped_b[0] = 1;
            let psi = superpose(&dims, &[(1.0, &zeros), (1.0, &ones)])?;
            let phi = superpose(&dims, &[(1.0, &flipped_a), (1.0, &flipped_b)])?;
            uniform(dims, vec![(psi, "psi_cat"), (phi, "phi_cat")])?
        }
        EnsembleCaseId::IVET => {
            let q = vec![3, 3, 3];
            uniform(
                q.clone(),
                vec![
                    (superpose(&q, &[(1.0, &[0, 0, 0]), (1.0, &[1, 1, 1])])?, "t0"),
                    (superpose(&q, &[(1.0, &[0, 1, 1]), (1.0, &[1, 2, 2])])?, "t1"),
                    (superpose(&q, &[(1.0, &[1, 0, 0]), (1.0, &[2, 0, 0])])?, "t2"),
                ],
            )?
        }
        EnsembleCaseId::IVEP => {
            let mut states = Vec::with_capacity(8);
            for idx in 0..8 {
                let digits = [idx >> 2 & 1, idx >> 1 & 1, idx & 1];
                states.push((
                    superpose(&q3, &[(1.0, &digits)])?,
                    format!("{}{}{}", digits[0], digits[1], digits[2]),
                ));
            }
            let p = 1.0 / 8.0;
            let elements = states.into_iter().map(|(s, l)| Element::new(p, s, l)).collect();
            MultipartyEnsemble::new(default_party_labels(3), q3.clone(), elements)?
        }
        EnsembleCaseId::IVNonorth(theta) => {
            let zero = qubit(1.0, 0.0)?;
            let n = qubit(theta.sin(), theta.cos())?;
            uniform(
                q3.clone(),
                vec![
                    (product(&[zero.clone(), zero.clone(), zero]), "000"),
                    (product(&[n.clone(), n.clone(), n]), "nnn"),
                ],
            )?
        }
        EnsembleCaseId::VShifts => {
            let zero = qubit(1.0, 0.0)?;
            let one = qubit(0.0, 1.0)?;
            let plus = qubit(FRAC_1_SQRT_2, FRAC_1_SQRT_2)?;
            let minus = qubit(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)?;
            uniform(
                q3.clone(),
                vec![
                    (product(&[zero.clone(), one.clone(), plus.clone()]), "01+"),
                    (product(&[one, plus.clone(), zero.clone()]), "1+0"),
                    (product(&[plus, zero, qubit(0.0, 1.0)?]), "+01"),
                    (product(&[minus.clone(), minus.clone(), minus]), "---"),
                ],
            )?
        }
    };
    Ok(ens.with_origin(id.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::is_swap_invariant;
    use crate::qcore::DensityMatrix;

    fn close(a: &DensityMatrix, b: &DensityMatrix) -> bool {
        a.trace_distance(b).unwrap() < 1e-12
    }

    fn diag(d: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(vec![2, 2], d).unwrap()
    }

    #[test]
    fn e1_states() {
        let ens = build_case(&EnsembleCaseId::IIE1).unwrap();
        assert_eq!(ens.cardinality(), 2);
        let State::Pure(second) = &ens.elements()[1].state else {
            panic!()
        };
        let a = second.amplitudes();
        assert!((a[0b011].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[0b100].re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(ens.elements().iter().all(|e| e.probability == 0.5));
    }

    #[test]
    fn shifts_states_are_orthogonal() {
        let ens = build_case(&EnsembleCaseId::VShifts).unwrap();
        assert_eq!(ens.cardinality(), 4);
        let vecs: Vec<_> = ens
            .elements()
            .iter()
            .map(|e| match &e.state {
                State::Pure(v) => v.clone(),
                _ => panic!(),
            })
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                let ip = vecs[i].inner(&vecs[j]).norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12, "<{i}|{j}> = {ip}");
            }
        }
        // |+01> has amplitude 1/sqrt2 on |001> and |101>.
        assert!((vecs[2].amplitudes()[0b001].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((vecs[2].amplitudes()[0b101].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn product_basis_is_complete() {
        let ens = build_case(&EnsembleCaseId::IVEP).unwrap();
        let gram = nalgebra::DMatrix::from_fn(8, 8, |i, j| {
            let (State::Pure(a), State::Pure(b)) = (&ens.elements()[i].state, &ens.elements()[j].state) else {
                panic!()
            };
            a.inner(b)
        });
        assert_eq!(gram.rank(1e-9), 8);
    }

    #[test]
    fn cat_two_matches_e1_up_to_phase() {
        let cat = build_case(&EnsembleCaseId::IIICat(2)).unwrap();
        let e1 = build_case(&EnsembleCaseId::IIE1).unwrap();
        // Flipping B1 and B2 of the cat state gives the second cat element.
        let sx = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let State::Pure(psi) = &cat.elements()[0].state else {
            panic!()
        };
        let flipped = psi.apply_local(1, &sx).unwrap().apply_local(2, &sx).unwrap();
        let State::Pure(phi) = &cat.elements()[1].state else {
            panic!()
        };
        assert!((flipped.inner(phi).norm() - 1.0).abs() < 1e-12);
        let State::Pure(e1b) = &e1.elements()[1].state else {
            panic!()
        };
        // Same element up to the relative sign between |011> and |100>.
        assert!(phi.inner(e1b).norm() < 1e-12);
        for k in 0..2 {
            let a = cat.elements()[k].state.partial_trace(&[0, 1]).unwrap();
            let b = e1.elements()[k].state.partial_trace(&[0, 1]).unwrap();
            assert!(close(&a, &b));
        }
    }

    #[test]
    fn pair_reductions() {
        let cat = build_case(&EnsembleCaseId::IIICat(6)).unwrap();
        let pair = cat.reduce_to_pair("B1").unwrap();
        assert_eq!(pair.dims(), &[2, 2]);
        assert!(close(
            &pair.elements()[0].state.to_density().unwrap(),
            &diag(&[0.5, 0.0, 0.0, 0.5])
        ));
        assert!(close(
            &pair.elements()[1].state.to_density().unwrap(),
            &diag(&[0.0, 0.5, 0.5, 0.0])
        ));

        let shifts = build_case(&EnsembleCaseId::VShifts).unwrap();
        let pair = shifts.reduce_to_pair("B1").unwrap();
        let r2 = FRAC_1_SQRT_2;
        let expected = [
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, r2, r2],
            [r2, 0.0, r2, 0.0],
            [0.5, -0.5, -0.5, 0.5],
        ];
        for (e, amps) in pair.elements().iter().zip(expected) {
            let want = StateVector::from_real(vec![2, 2], &amps).unwrap().to_density();
            assert!(close(&e.state.to_density().unwrap(), &want));
        }

        let ghz = build_case(&EnsembleCaseId::IPair).unwrap();
        let pair = ghz.reduce_to_pair("B1").unwrap();
        for e in pair.elements() {
            assert!(close(&e.state.to_density().unwrap(), &diag(&[0.5, 0.0, 0.0, 0.5])));
        }
        assert!(pair.reductions_identical(&[0, 1]).unwrap());
        assert!(ghz.reduce_to_pair("A").is_err());
        assert!(ghz.reduce_to_pair("B7").is_err());
    }

    #[test]
    fn swap_invariance() {
        let e1 = build_case(&EnsembleCaseId::IIE1).unwrap();
        assert!(is_swap_invariant(&e1, "B1", "B2").unwrap());
        let cat = build_case(&EnsembleCaseId::IIICat(5)).unwrap();
        assert!(is_swap_invariant(&cat, "B2", "B4").unwrap());
        let et = build_case(&EnsembleCaseId::IVET).unwrap();
        // Every E_T state is symmetric in B1 <-> B2; exchanging A and B1 maps
        // |011> + |122> to |101> + |212>, which is absent.
        assert!(is_swap_invariant(&et, "B1", "B2").unwrap());
        assert!(!is_swap_invariant(&et, "A", "B1").unwrap());
    }

    #[test]
    fn parameter_validation() {
        assert!(build_case(&EnsembleCaseId::IIICat(1)).is_err());
        assert!(build_case(&EnsembleCaseId::IIICat(21)).is_err());
        assert!(build_case(&EnsembleCaseId::IVNonorth(0.0)).is_err());
        assert!(build_case(&EnsembleCaseId::IVNonorth(2.0)).is_err());
        assert!(EnsembleCaseId::parse("II-E1", Some(3), None).is_err());
        assert!(EnsembleCaseId::parse("V-shifts", None, Some(0.3)).is_err());
        assert!(EnsembleCaseId::parse("VI", None, None).is_err());
        assert_eq!(
            EnsembleCaseId::parse("III-cat", Some(7), None).unwrap(),
            EnsembleCaseId::IIICat(7)
        );
        assert_eq!(
            "III-cat(4)".parse::<EnsembleCaseId>().unwrap(),
            EnsembleCaseId::IIICat(4)
        );
    }

    #[test]
    fn every_case_is_valid() {
        for id in EnsembleCaseId::all_default() {
            let ens = build_case(&id).unwrap();
            for e in ens.elements() {
                if let State::Pure(v) = &e.state {
                    assert!((v.amplitudes().norm() - 1.0).abs() < 1e-12, "{id}");
                }
            }
        }
    }

    #[test]
    fn nonorth_overlap() {
        let ens = build_case(&EnsembleCaseId::IVNonorth(nonorth_default_theta())).unwrap();
        let (State::Pure(a), State::Pure(b)) = (&ens.elements()[0].state, &ens.elements()[1].state) else {
            panic!()
        };
        assert!((a.inner(b).norm() - 1e-3).abs() < 1e-15);
    }
}
