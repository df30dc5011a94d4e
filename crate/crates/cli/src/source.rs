//! Ensemble loading and the seed policy.

use qmono::ensembles::{build_case, parse_ensemble, EnsembleCaseId, MultipartyEnsemble};
use qmono::optimize::DEFAULT_RESTARTS;

use crate::{Failure, Search, Source};

/// Seed used when neither `--restarts` nor `--samples` is given and no seed
/// is supplied, so default runs stay reproducible.
pub const DEFAULT_SEED: u64 = 0;

pub struct Loaded {
    pub ensemble: MultipartyEnsemble,
    /// Case id or file path, plus the pair if one was selected.
    pub name: String,
}

pub fn case_id(case: &str, n: Option<usize>, theta: Option<f64>) -> Result<EnsembleCaseId, Failure> {
    Ok(EnsembleCaseId::parse(case, n, theta)?)
}

pub fn load(source: &Source) -> Result<Loaded, Failure> {
    let (ensemble, mut name) = match (&source.case, &source.ensemble) {
        (Some(case), None) => {
            let id = case_id(case, source.n, source.theta)?;
            (build_case(&id)?, id.to_string())
        }
        (None, Some(path)) => {
            if source.n.is_some() || source.theta.is_some() {
                return Err(Failure::usage("--n and --theta only apply to --case"));
            }
            let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let ens = parse_ensemble(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            (ens, path.display().to_string())
        }
        _ => return Err(Failure::usage("give exactly one of --case or --ensemble")),
    };
    let ensemble = match &source.pair {
        None => ensemble,
        Some(sel) => {
            let (left, right) = sel
                .split_once(':')
                .ok_or_else(|| Failure::usage(format!("pair {sel:?} must look like A:B1")))?;
            if left != ensemble.parties()[0] {
                return Err(Failure::usage(format!(
                    "pair {sel:?} must start with the first party {:?}",
                    ensemble.parties()[0]
                )));
            }
            name = format!("{name} [{sel}]");
            ensemble.reduce_to_pair(right)?
        }
    };
    Ok(Loaded { ensemble, name })
}

/// Resolved restart count, sample count and seed. An explicit sample or
/// restart count needs a seed from `--seed` or `QMONO_SEED`.
#[derive(Clone, Copy, Debug)]
pub struct Plan {
    pub restarts: usize,
    /// Only set when `--samples` was given.
    pub samples: Option<usize>,
    pub seed: u64,
    /// True when a seed was supplied.
    pub seeded: bool,
}

pub fn plan(search: &Search) -> Result<Plan, Failure> {
    if search.seed.is_none() && (search.samples.is_some() || search.restarts.is_some()) {
        return Err(Failure::usage(
            "--samples and --restarts need a seed (--seed or QMONO_SEED)",
        ));
    }
    Ok(Plan {
        restarts: search.restarts.unwrap_or(DEFAULT_RESTARTS),
        samples: search.samples,
        seed: search.seed.unwrap_or(DEFAULT_SEED),
        seeded: search.seed.is_some(),
    })
}
