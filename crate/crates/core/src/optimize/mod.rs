//! Multi-start simplex search over measurement strategies. Every result is
//! a lower bound certified by re-simulating the strategy it reports.
//!
//! Restart `k` starts from a point drawn from stream `k` of the seed;
//! restart 0 starts at all-zero angles, i.e. computational-basis
//! measurements. Restarts run in parallel and are reduced in index order,
//! keeping the first maximum, so adding restarts never lowers the result.

mod nelder_mead;
pub mod unitary;

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::sample_stream;
use crate::ensembles::{MultipartyEnsemble, State};
use crate::error::{Error, Result};
use crate::protocols::{self, mutual_information, mutual_information_table, JointDistribution, LoccProtocol};
use crate::qcore::linalg::{self, CMatrix, CVector};
use unitary::{givens_unitary, parameter_count, wrap_angle};

pub const DEFAULT_RESTARTS: usize = 64;
/// Largest joint dimension for the global template.
pub const MAX_GLOBAL_DIM: usize = 64;
/// Largest local dimension for the one-way template.
pub const MAX_LOCAL_DIM: usize = 4;
/// Replayed and claimed values must agree this closely.
pub const CERTIFY_TOL: f64 = 1e-9;
const INITIAL_STEP: f64 = 0.3;
const SUPPORT_TOL: f64 = 1e-10;

/// Which side of a bipartite ensemble measures first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "A->B")]
    AToB,
    #[serde(rename = "B->A")]
    BToA,
}

impl Direction {
    /// `(sender, receiver)` party indices.
    pub fn parties(self) -> (usize, usize) {
        match self {
            Direction::AToB => (0, 1),
            Direction::BToA => (1, 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Template {
    /// One rank-1 projective measurement on the support of the average state.
    GlobalProjective,
    /// Sender measures a basis, receiver measures a basis chosen by the
    /// sender's outcome.
    OneWay(Direction),
}

/// Angles in `[-pi, pi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyParameters {
    values: Vec<f64>,
}

impl StrategyParameters {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("strategy angles must be finite".into()));
        }
        Ok(Self {
            values: values.into_iter().map(wrap_angle).collect(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub value: f64,
    pub parameters: StrategyParameters,
    pub template: Template,
    pub restarts: usize,
    pub seed: u64,
    pub converged: bool,
    /// The measurement tree, for one-way results.
    #[serde(skip)]
    pub protocol: Option<LoccProtocol>,
}

trait Objective: Sync {
    fn len(&self) -> usize;
    fn value(&self, params: &[f64]) -> f64;
}

struct Best {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

fn search<O: Objective>(obj: &O, restarts: usize, seed: u64) -> Best {
    let n = obj.len();
    let runs: Vec<Best> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let x0: Vec<f64> = if k == 0 {
                vec![0.0; n]
            } else {
                let mut rng = sample_stream(seed, k as u64);
                (0..n).map(|_| rng.random_range(-PI..PI)).collect()
            };
            let m = nelder_mead::minimize(|x| -obj.value(x), &x0, INITIAL_STEP);
            let x: Vec<f64> = m.x.iter().copied().map(wrap_angle).collect();
            // Wrapping can move the point by rounding; re-evaluate if so.
            let value = if x == m.x { -m.value } else { obj.value(&x) };
            Best {
                value,
                x,
                converged: m.converged,
            }
        })
        .collect();
    let mut iter = runs.into_iter();
    let mut best = iter.next().expect("at least one restart");
    for run in iter {
        if run.value > best.value {
            best = run;
        }
    }
    best
}

fn check_restarts(restarts: usize) -> Result<()> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    Ok(())
}

/// Orthonormal basis (columns) of the support of the average state:
/// Gram-Schmidt on the projections of the computational basis vectors, so a
/// support spanned by basis vectors keeps exactly those vectors.
pub fn support_basis(ens: &MultipartyEnsemble) -> Result<CMatrix> {
    let d = ens.total_dim();
    if d > MAX_GLOBAL_DIM {
        return Err(Error::TooLarge(format!(
            "global measurement search needs joint dimension <= {MAX_GLOBAL_DIM}, got {d}"
        )));
    }
    let (vals, vecs) = linalg::hermitian_eigen(ens.average_state()?.matrix());
    let rank = vals.iter().filter(|&&v| v > SUPPORT_TOL).count();
    if rank == d {
        return Ok(CMatrix::identity(d, d));
    }
    let kept = vecs.columns(0, rank).into_owned();
    let projector = &kept * kept.adjoint();
    let mut basis: Vec<CVector> = Vec::with_capacity(rank);
    for j in 0..d {
        if basis.len() == rank {
            break;
        }
        let mut v: CVector = projector.column(j).into_owned();
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v.unscale(norm));
        }
    }
    Ok(CMatrix::from_columns(&basis))
}

enum Compressed {
    Pure(CVector),
    Mixed(CMatrix),
}

struct GlobalObjective {
    r: usize,
    priors: Vec<f64>,
    states: Vec<Compressed>,
}

impl GlobalObjective {
    fn new(ens: &MultipartyEnsemble, w: &CMatrix) -> Result<Self> {
        let wt = w.adjoint();
        let states = ens
            .elements()
            .iter()
            .map(|e| match &e.state {
                State::Pure(v) => Compressed::Pure(&wt * v.amplitudes()),
                State::Mixed(m) => Compressed::Mixed(&wt * m.matrix() * w),
            })
            .collect();
        Ok(Self {
            r: w.ncols(),
            priors: ens.priors(),
            states,
        })
    }
}

impl Objective for GlobalObjective {
    fn len(&self) -> usize {
        parameter_count(self.r)
    }

    fn value(&self, params: &[f64]) -> f64 {
        let u = givens_unitary(self.r, params);
        let ut = u.adjoint();
        let table: Vec<Vec<f64>> = self
            .states
            .iter()
            .zip(&self.priors)
            .map(|(s, p)| match s {
                Compressed::Pure(v) => (&ut * v).iter().map(|z| p * z.norm_sqr()).collect(),
                Compressed::Mixed(m) => {
                    let rotated = &ut * m * &u;
                    (0..self.r).map(|k| p * rotated[(k, k)].re.max(0.0)).collect()
                }
            })
            .collect();
        mutual_information_table(&table)
    }
}

/// Lower bound on the accessible information from a single rank-1
/// projective measurement on the support of the average state.
pub fn optimize_global_projective(ens: &MultipartyEnsemble, restarts: usize, seed: u64) -> Result<OptimizationResult> {
    check_restarts(restarts)?;
    let w = support_basis(ens)?;
    let obj = GlobalObjective::new(ens, &w)?;
    let best = search(&obj, restarts, seed);
    Ok(OptimizationResult {
        value: best.value,
        parameters: StrategyParameters::new(best.x)?,
        template: Template::GlobalProjective,
        restarts,
        seed,
        converged: best.converged,
        protocol: None,
    })
}

enum Split {
    /// Amplitudes as a `ds x dr` matrix, sender rows.
    Pure(CMatrix),
    /// Full density matrix in party order.
    Mixed(CMatrix),
}

struct OneWayObjective {
    ds: usize,
    dr: usize,
    sender: usize,
    priors: Vec<f64>,
    states: Vec<Split>,
}

impl OneWayObjective {
    fn new(ens: &MultipartyEnsemble, direction: Direction) -> Self {
        let (sender, receiver) = direction.parties();
        let dims = ens.dims();
        let states = ens
            .elements()
            .iter()
            .map(|e| match &e.state {
                State::Pure(v) => {
                    let a = v.amplitudes();
                    let m = CMatrix::from_fn(dims[0], dims[1], |i, j| a[i * dims[1] + j]);
                    Split::Pure(if sender == 0 { m } else { m.transpose() })
                }
                State::Mixed(m) => Split::Mixed(m.matrix().clone()),
            })
            .collect();
        Self {
            ds: dims[sender],
            dr: dims[receiver],
            sender,
            priors: ens.priors(),
            states,
        }
    }

    fn bases(&self, params: &[f64]) -> (CMatrix, Vec<CMatrix>) {
        let ns = parameter_count(self.ds);
        let nr = parameter_count(self.dr);
        let us = givens_unitary(self.ds, &params[..ns]);
        let ur = (0..self.ds)
            .map(|m| givens_unitary(self.dr, &params[ns + m * nr..ns + (m + 1) * nr]))
            .collect();
        (us, ur)
    }
}

impl Objective for OneWayObjective {
    fn len(&self) -> usize {
        parameter_count(self.ds) + self.ds * parameter_count(self.dr)
    }

    fn value(&self, params: &[f64]) -> f64 {
        let (us, ur) = self.bases(params);
        let mut table = vec![Vec::with_capacity(self.ds * self.dr); self.states.len()];
        for (m, urm) in ur.iter().enumerate() {
            let a = us.column(m);
            for ((row, s), p) in table.iter_mut().zip(&self.states).zip(&self.priors) {
                match s {
                    Split::Pure(amp) => {
                        // <a (x) b|psi> = a^H M conj(b)
                        let y = a.adjoint() * amp * urm.conjugate();
                        row.extend(y.iter().map(|z| p * z.norm_sqr()));
                    }
                    Split::Mixed(rho) => {
                        for n in 0..self.dr {
                            let b = urm.column(n);
                            let v = if self.sender == 0 {
                                a.kronecker(&b)
                            } else {
                                b.kronecker(&a)
                            };
                            let f = (v.adjoint() * rho * &v)[(0, 0)].re.max(0.0);
                            row.push(p * f);
                        }
                    }
                }
            }
        }
        mutual_information_table(&table)
    }
}

fn one_way_protocol(ens: &MultipartyEnsemble, direction: Direction, params: &[f64]) -> Result<LoccProtocol> {
    let obj = OneWayObjective::new(ens, direction);
    if params.len() != obj.len() {
        return Err(Error::InvalidParameter(format!(
            "one-way template on dims {:?} takes {} angles, got {}",
            ens.dims(),
            obj.len(),
            params.len()
        )));
    }
    let (us, ur) = obj.bases(params);
    let (sender, receiver) = direction.parties();
    protocols::one_way(sender, receiver, &us, &ur)
}

fn check_one_way(ens: &MultipartyEnsemble) -> Result<()> {
    if !ens.is_bipartite() {
        return Err(Error::NotBipartite(ens.party_count()));
    }
    if let Some(&d) = ens.dims().iter().find(|&&d| d > MAX_LOCAL_DIM) {
        return Err(Error::TooLarge(format!(
            "one-way search needs local dimensions <= {MAX_LOCAL_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// Lower bound on the LOCC-accessible information of a bipartite ensemble
/// from one-way strategies. With `direction = None` both directions are
/// searched and the better one is kept (`A->B` on ties).
pub fn optimize_one_way_locc(
    ens: &MultipartyEnsemble,
    restarts: usize,
    seed: u64,
    direction: Option<Direction>,
) -> Result<OptimizationResult> {
    check_one_way(ens)?;
    check_restarts(restarts)?;
    let directions = match direction {
        Some(d) => vec![d],
        None => vec![Direction::AToB, Direction::BToA],
    };
    let mut best: Option<(Direction, Best)> = None;
    for d in directions {
        let run = search(&OneWayObjective::new(ens, d), restarts, seed);
        if best.as_ref().is_none_or(|(_, b)| run.value > b.value) {
            best = Some((d, run));
        }
    }
    let (d, run) = best.expect("at least one direction");
    let protocol = one_way_protocol(ens, d, &run.x)?;
    Ok(OptimizationResult {
        value: run.value,
        parameters: StrategyParameters::new(run.x)?,
        template: Template::OneWay(d),
        restarts,
        seed,
        converged: run.converged,
        protocol: Some(protocol),
    })
}

/// The exact joint distribution of the strategy a result describes,
/// rebuilt from its template and parameters.
pub fn replay(result: &OptimizationResult, ens: &MultipartyEnsemble) -> Result<JointDistribution> {
    let params = result.parameters.values();
    match result.template {
        Template::OneWay(d) => {
            check_one_way(ens)?;
            protocols::simulate(ens, &one_way_protocol(ens, d, params)?)
        }
        Template::GlobalProjective => {
            let w = support_basis(ens)?;
            let r = w.ncols();
            if params.len() != parameter_count(r) {
                return Err(Error::InvalidParameter(format!(
                    "global template with support dimension {r} takes {} angles, got {}",
                    parameter_count(r),
                    params.len()
                )));
            }
            let basis = &w * givens_unitary(r, params);
            let rows = ens
                .elements()
                .iter()
                .map(|e| {
                    let rho = e.state.to_density()?;
                    Ok((0..r)
                        .map(|k| e.probability * rho.expectation(&basis.column(k).into_owned()))
                        .collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            JointDistribution::new(
                ens.elements().iter().map(|e| e.label.clone()).collect(),
                (0..r).map(|k| k.to_string()).collect(),
                rows,
            )
        }
    }
}

/// Re-simulates the reported strategy and returns its mutual information;
/// fails if it differs from the claimed value by more than [`CERTIFY_TOL`].
pub fn certify(result: &OptimizationResult, ens: &MultipartyEnsemble) -> Result<f64> {
    let replayed = mutual_information(&replay(result, ens)?);
    if (replayed - result.value).abs() > CERTIFY_TOL {
        return Err(Error::CertificateMismatch {
            claimed: result.value,
            replayed,
        });
    }
    Ok(replayed)
}
