//! Monte-Carlo estimation of the local subentropy over Haar product states.
//!
//! Samples are drawn in fixed chunks of [`MC_CHUNK`]; chunk `k` uses the
//! ChaCha stream `k` of the seed, and chunk statistics are merged in chunk
//! order. The estimate therefore depends only on `(seed, samples)`, not on
//! how many worker threads ran the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::BoundReport;
use crate::ensembles::{MultipartyEnsemble, State};
use crate::error::{Error, Result};
use crate::qcore::random::haar_vector;
use crate::qcore::{CMatrix, CVector, DensityMatrix, StateVector};

pub const DEFAULT_SAMPLES: usize = 200_000;
pub const MIN_SAMPLES: usize = 1_000;
pub const MC_CHUNK: usize = 4096;

/// Deterministic random stream `stream` derived from `seed`.
pub fn sample_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `|alpha> ⊗ |beta>` with both factors Haar-distributed.
pub fn haar_product_sample(dims: [usize; 2], rng: &mut ChaCha8Rng) -> Result<StateVector> {
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDimensions(format!("{dims:?}")));
    }
    let a = haar_vector(dims[0], rng);
    let b = haar_vector(dims[1], rng);
    StateVector::new(dims.to_vec(), a.kronecker(&b))
}

#[derive(Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }

    fn standard_error(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

/// Mean and standard error of `g(alpha, beta)` over Haar product samples.
fn estimate<G>(dims: [usize; 2], samples: usize, seed: u64, g: G) -> Moments
where
    G: Fn(&CVector, &CVector) -> f64 + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_stream(seed, k as u64);
            let n = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut m = Moments::default();
            for _ in 0..n {
                let a = haar_vector(dims[0], &mut rng);
                let b = haar_vector(dims[1], &mut rng);
                m.push(g(&a, &b));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

/// `<alpha beta| state |alpha beta>` for one element.
enum Overlap {
    /// Amplitudes reshaped to `d1 x d2`.
    Pure(CMatrix),
    Mixed(CMatrix),
}

impl Overlap {
    fn new(state: &State) -> Self {
        match state {
            State::Pure(v) => {
                let (d1, d2) = (v.dims()[0], v.dims()[1]);
                let amps = v.amplitudes();
                Overlap::Pure(CMatrix::from_fn(d1, d2, |a, b| amps[a * d2 + b]))
            }
            State::Mixed(m) => Overlap::Mixed(m.matrix().clone()),
        }
    }

    fn eval(&self, a: &CVector, b: &CVector) -> f64 {
        match self {
            Overlap::Pure(m) => {
                let z = (a.adjoint() * m * b)[(0, 0)];
                z.norm_sqr()
            }
            Overlap::Mixed(rho) => {
                let v = a.kronecker(b);
                (v.adjoint() * rho * &v)[(0, 0)].re.max(0.0)
            }
        }
    }
}

fn f_log_f(f: f64) -> f64 {
    if f > 0.0 {
        f * f.log2()
    } else {
        0.0
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_SAMPLES} Monte-Carlo samples are required, got {samples}"
        )));
    }
    Ok(())
}

fn bipartite_dims(dims: &[usize]) -> Result<[usize; 2]> {
    match dims {
        [d1, d2] => Ok([*d1, *d2]),
        _ => Err(Error::NotBipartite(dims.len())),
    }
}

/// Local subentropy `Q_L = -d1 d2 E[f log2 f]`, `f = <alpha beta|state|alpha beta>`.
pub fn local_subentropy_mc(state: &DensityMatrix, samples: usize, seed: u64) -> Result<BoundReport> {
    let dims = bipartite_dims(state.dims())?;
    check_samples(samples)?;
    let scale = -((dims[0] * dims[1]) as f64);
    let overlap = Overlap::new(&State::Mixed(state.clone()));
    let m = estimate(dims, samples, seed, |a, b| scale * f_log_f(overlap.eval(a, b)));
    Ok(BoundReport {
        name: "local_subentropy".into(),
        value: m.mean,
        standard_error: m.standard_error(),
        samples: Some(samples),
        seed: Some(seed),
    })
}

/// `Q_L(rho_bar) - sum_i p_i Q_L(rho_i)`, with every term evaluated on the
/// same product samples.
pub fn lambda_locc(ens: &MultipartyEnsemble, samples: usize, seed: u64) -> Result<BoundReport> {
    let dims = bipartite_dims(ens.dims())?;
    check_samples(samples)?;
    let scale = -((dims[0] * dims[1]) as f64);
    let terms: Vec<(f64, Overlap)> = ens
        .elements()
        .iter()
        .map(|e| (e.probability, Overlap::new(&e.state)))
        .collect();
    let m = estimate(dims, samples, seed, |a, b| {
        let mut avg = 0.0;
        let mut separate = 0.0;
        for (p, o) in &terms {
            let f = o.eval(a, b);
            avg += p * f;
            separate += p * f_log_f(f);
        }
        scale * (f_log_f(avg) - separate)
    });
    Ok(BoundReport {
        name: "lambda_locc".into(),
        value: m.mean,
        standard_error: m.standard_error(),
        samples: Some(samples),
        seed: Some(seed),
    })
}
