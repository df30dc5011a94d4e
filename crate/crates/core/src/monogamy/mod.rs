//! Monogamy audits: certified lower bounds on each `A:Bi` pair against a
//! universal upper bound on `A:B1...BN`.

use serde::Serialize;
use serde_json::Value;

use crate::bounds::{cardinality_bound, chi_locc, chi_locc_across, holevo_chi, lambda_locc};
use crate::ensembles::{EnsembleCaseId, MultipartyEnsemble};
use crate::error::{Error, Result};
use crate::optimize::{self, Direction, StrategyParameters, DEFAULT_RESTARTS, MAX_LOCAL_DIM};
use crate::protocols::{self, mutual_information, parse_protocol, protocol_to_json, LoccProtocol};

/// Margin (bits) a violation must clear beyond the sampling uncertainty.
pub const VERDICT_TOL: f64 = 1e-6;
/// Tolerance for the `N log2 Gamma` ceiling.
pub const MAXIMAL_TOL: f64 = 1e-6;
/// Replayed pair protocols must reproduce their value this closely.
pub const REPLAY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditConfig {
    /// Run the one-way optimizer on each pair.
    pub use_optimizer: bool,
    pub restarts: usize,
    /// Monte-Carlo samples for the local-subentropy bound; 0 skips it.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            use_optimizer: true,
            restarts: DEFAULT_RESTARTS,
            samples: 0,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerMethod {
    /// Every element reduces to the same pair state, so the pair holds no
    /// information about the index.
    IdenticalReductions,
    /// No method was enabled; zero is always a lower bound.
    Trivial,
    ExplicitProtocol,
    Optimizer,
    LambdaLocc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperMethod {
    Cardinality,
    Holevo,
    ChiLocc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairEntry {
    pub partner: String,
    pub lower: f64,
    /// Nonzero only for Monte-Carlo bounds.
    pub standard_error: f64,
    pub method: LowerMethod,
    /// Measurement tree achieving `lower`, in protocol-file form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<StrategyParameters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `log2 Gamma` of the pair.
    pub cardinality: f64,
    pub holevo: f64,
    pub chi_locc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperBounds {
    pub cardinality: f64,
    pub holevo: f64,
    pub chi_locc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonogamyCertificate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub parties: Vec<String>,
    pub pairs: Vec<PairEntry>,
    pub sum_lower: f64,
    pub sum_standard_error: f64,
    pub global_upper: f64,
    pub upper_method: UpperMethod,
    pub upper_candidates: UpperBounds,
    pub margin: f64,
    pub verdict: Verdict,
    pub maximal: bool,
    pub config: AuditConfig,
}

macro_rules! display_as {
    ($ty:ty { $($variant:ident => $text:literal),* $(,)? }) => {
        impl std::fmt::Display for $ty {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(match self {
                    $(Self::$variant => $text),*
                })
            }
        }
    };
}

display_as!(LowerMethod {
    IdenticalReductions => "identical_reductions",
    Trivial => "trivial",
    ExplicitProtocol => "explicit_protocol",
    Optimizer => "optimizer",
    LambdaLocc => "lambda_locc",
});
display_as!(UpperMethod { Cardinality => "cardinality", Holevo => "holevo", ChiLocc => "chi_locc" });
display_as!(Verdict { Satisfied => "satisfied", Violated => "violated", Inconclusive => "inconclusive" });

/// Hand-built protocols for the registered cases, on the pair `(A, partner)`.
fn registered_protocol(case: &EnsembleCaseId, partner: usize, dims: &[usize]) -> Result<Option<LoccProtocol>> {
    Ok(match case {
        // B1 plays the role of the second party of the cyclic set; B2 that of
        // the third, which measures first when paired with A.
        EnsembleCaseId::VShifts => Some(match partner {
            1 => protocols::shifts_protocol_between(0, 1)?,
            _ => protocols::shifts_protocol_between(1, 0)?,
        }),
        EnsembleCaseId::IIE1 | EnsembleCaseId::IIICat(_) | EnsembleCaseId::IVET | EnsembleCaseId::IVEP => {
            Some(protocols::computational_basis(dims)?)
        }
        _ => None,
    })
}

fn exact_entry(partner: &str, method: LowerMethod, lower: f64, bounds: (f64, f64, f64)) -> PairEntry {
    PairEntry {
        partner: partner.to_string(),
        lower,
        standard_error: 0.0,
        method,
        protocol: None,
        direction: None,
        parameters: None,
        samples: None,
        seed: None,
        cardinality: bounds.0,
        holevo: bounds.1,
        chi_locc: bounds.2,
    }
}

fn keep_better(best: &mut Option<PairEntry>, entry: PairEntry) {
    if best.as_ref().is_none_or(|b| entry.lower > b.lower) {
        *best = Some(entry);
    }
}

fn pair_entry(ens: &MultipartyEnsemble, partner: usize, config: &AuditConfig) -> Result<PairEntry> {
    let label = &ens.parties()[partner];
    let pair = ens.reduce_to_pair(label)?;
    let bounds = (
        cardinality_bound(&pair).value,
        holevo_chi(&pair)?.value,
        chi_locc(&pair)?.value,
    );
    if ens.reductions_identical(&[0, partner])? {
        return Ok(exact_entry(label, LowerMethod::IdenticalReductions, 0.0, bounds));
    }
    let mut best: Option<PairEntry> = None;
    if let Some(case) = ens.origin() {
        if let Some(prot) = registered_protocol(case, partner, pair.dims())? {
            let value = mutual_information(&protocols::simulate(&pair, &prot)?);
            let mut entry = exact_entry(label, LowerMethod::ExplicitProtocol, value, bounds);
            entry.protocol = Some(protocol_to_json(&prot));
            keep_better(&mut best, entry);
        }
    }
    // Nothing beats a protocol that already meets the pair's upper bounds.
    let saturated = best.as_ref().is_some_and(|b| b.lower >= bounds.0.min(bounds.1) - 1e-12);
    if config.use_optimizer && !saturated {
        let r = optimize::optimize_one_way_locc(&pair, config.restarts, config.seed, None)?;
        let replayed = optimize::certify(&r, &pair)?;
        let mut entry = exact_entry(label, LowerMethod::Optimizer, replayed, bounds);
        entry.protocol = r.protocol.as_ref().map(protocol_to_json);
        entry.direction = match r.template {
            optimize::Template::OneWay(d) => Some(d),
            optimize::Template::GlobalProjective => None,
        };
        entry.parameters = Some(r.parameters);
        entry.seed = Some(config.seed);
        keep_better(&mut best, entry);
    }
    let mut chosen = best.unwrap_or_else(|| exact_entry(label, LowerMethod::Trivial, 0.0, bounds));
    if config.samples > 0 {
        let lam = lambda_locc(&pair, config.samples, config.seed)?;
        let se = lam.standard_error;
        // Sampled bounds only win when they clear the certified ones by
        // their own uncertainty.
        let wins = match chosen.method {
            LowerMethod::Trivial => lam.value > 0.0,
            _ => lam.value - 3.0 * se > chosen.lower,
        };
        if wins {
            chosen = PairEntry {
                standard_error: se,
                samples: lam.samples,
                seed: lam.seed,
                ..exact_entry(label, LowerMethod::LambdaLocc, lam.value, bounds)
            };
        }
    }
    Ok(chosen)
}

fn check_config(ens: &MultipartyEnsemble, config: &AuditConfig) -> Result<()> {
    if config.use_optimizer {
        let dims = ens.dims();
        for k in 1..dims.len() {
            let d = dims[0].max(dims[k]);
            if d > MAX_LOCAL_DIM {
                return Err(Error::TooLarge(format!(
                    "optimizer requested on pair A:{} with local dimension {d} > {MAX_LOCAL_DIM}",
                    ens.parties()[k]
                )));
            }
        }
        if config.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
    }
    if config.samples > 0 && config.samples < crate::bounds::MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "samples must be 0 or at least {}",
            crate::bounds::MIN_SAMPLES
        )));
    }
    Ok(())
}

/// Per-pair lower bounds and pair-level upper bounds for every partner.
pub fn pair_table(ens: &MultipartyEnsemble, config: &AuditConfig) -> Result<Vec<PairEntry>> {
    check_config(ens, config)?;
    (1..ens.party_count()).map(|k| pair_entry(ens, k, config)).collect()
}

/// Builds the certificate for `sum_i I(A:Bi) <= I(A:B1...BN)`.
pub fn audit(ens: &MultipartyEnsemble, config: &AuditConfig) -> Result<MonogamyCertificate> {
    let n = ens.party_count() - 1;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "a monogamy audit needs at least two partners, got {n}"
        )));
    }
    let pairs = pair_table(ens, config)?;
    let sum_lower: f64 = pairs.iter().map(|p| p.lower).sum();
    let sum_standard_error = pairs.iter().map(|p| p.standard_error.powi(2)).sum::<f64>().sqrt();
    let upper_candidates = UpperBounds {
        cardinality: cardinality_bound(ens).value,
        holevo: holevo_chi(ens)?.value,
        chi_locc: chi_locc_across(ens, &[0])?.value,
    };
    let (upper_method, global_upper) = [
        (UpperMethod::Cardinality, upper_candidates.cardinality),
        (UpperMethod::Holevo, upper_candidates.holevo),
        (UpperMethod::ChiLocc, upper_candidates.chi_locc),
    ]
    .into_iter()
    .fold((UpperMethod::Cardinality, f64::INFINITY), |acc, c| {
        if c.1 < acc.1 {
            c
        } else {
            acc
        }
    });
    let margin = sum_lower - global_upper;
    let band = 3.0 * sum_standard_error + VERDICT_TOL;
    let verdict = if margin > band {
        Verdict::Violated
    } else if sum_standard_error > 0.0 && margin.abs() <= band {
        Verdict::Inconclusive
    } else {
        Verdict::Satisfied
    };
    let maximal = (sum_lower - n as f64 * cardinality_bound(ens).value).abs() <= MAXIMAL_TOL;
    Ok(MonogamyCertificate {
        case: ens.origin().map(|c| c.to_string()),
        parties: ens.parties().to_vec(),
        pairs,
        sum_lower,
        sum_standard_error,
        global_upper,
        upper_method,
        upper_candidates,
        margin,
        verdict,
        maximal,
        config: config.clone(),
    })
}

/// Whether the pairwise sum reaches its ceiling `N log2 Gamma`.
pub fn maximal_violation_check(cert: &MonogamyCertificate, ens: &MultipartyEnsemble) -> bool {
    let n = (ens.party_count() - 1) as f64;
    (cert.sum_lower - n * cardinality_bound(ens).value).abs() <= MAXIMAL_TOL
}

/// Re-derives every deterministic pair bound in a certificate: cited
/// protocols are re-simulated on the pair reduction, identical-reduction
/// claims rechecked. Sampled entries are skipped.
pub fn replay(cert: &MonogamyCertificate, ens: &MultipartyEnsemble) -> Result<()> {
    for entry in &cert.pairs {
        let partner = ens.party_index(&entry.partner)?;
        let replayed = match entry.method {
            LowerMethod::LambdaLocc => continue,
            LowerMethod::Trivial => 0.0,
            LowerMethod::IdenticalReductions => {
                if !ens.reductions_identical(&[0, partner])? {
                    return Err(Error::InvalidParameter(format!(
                        "pair A:{} does not have identical reductions",
                        entry.partner
                    )));
                }
                0.0
            }
            LowerMethod::ExplicitProtocol | LowerMethod::Optimizer => {
                let json = entry
                    .protocol
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter(format!("pair A:{} cites no protocol", entry.partner)))?;
                let prot = parse_protocol(&json.to_string())?;
                mutual_information(&protocols::simulate(&ens.reduce_to_pair(&entry.partner)?, &prot)?)
            }
        };
        if (replayed - entry.lower).abs() > REPLAY_TOL {
            return Err(Error::CertificateMismatch {
                claimed: entry.lower,
                replayed,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_case, is_swap_invariant, nonorth_default_theta};
    use approx::assert_abs_diff_eq;

    fn run(id: EnsembleCaseId) -> (MultipartyEnsemble, MonogamyCertificate) {
        let ens = build_case(&id).unwrap();
        let config = AuditConfig {
            restarts: 16,
            seed: 3,
            ..AuditConfig::default()
        };
        let cert = audit(&ens, &config).unwrap();
        replay(&cert, &ens).unwrap();
        (ens, cert)
    }

    fn shifts_value() -> f64 {
        13.0 / 4.0 - (3.0 * 3f64.log2() + 5.0 * 5f64.log2()) / 8.0
    }

    #[test]
    fn case_one() {
        let (_, pair) = run(EnsembleCaseId::IPair);
        assert!(pair
            .pairs
            .iter()
            .all(|p| p.lower == 0.0 && p.method == LowerMethod::IdenticalReductions));
        assert_eq!(pair.verdict, Verdict::Satisfied);
        let (_, full) = run(EnsembleCaseId::IFullBasis);
        assert_abs_diff_eq!(full.sum_lower, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(full.global_upper, 2.0, epsilon = 1e-6);
        assert_eq!(full.upper_method, UpperMethod::ChiLocc);
        assert_eq!(full.verdict, Verdict::Satisfied);
        assert!(!full.maximal);
    }

    #[test]
    fn case_two_is_maximal() {
        for id in [EnsembleCaseId::IIE1, EnsembleCaseId::IIE2, EnsembleCaseId::IIE3] {
            let (ens, cert) = run(id.clone());
            for p in &cert.pairs {
                assert_abs_diff_eq!(p.lower, 1.0, epsilon = 1e-6);
            }
            assert_abs_diff_eq!(cert.sum_lower, 2.0, epsilon = 1e-6);
            assert_abs_diff_eq!(cert.global_upper, 1.0, epsilon = 1e-9);
            assert_eq!(cert.verdict, Verdict::Violated, "{id}");
            assert!(cert.maximal && maximal_violation_check(&cert, &ens));
        }
    }

    #[test]
    fn case_three_rows_agree() {
        let (ens, cert) = run(EnsembleCaseId::IIICat(4));
        assert_abs_diff_eq!(cert.sum_lower, 4.0, epsilon = 1e-6);
        assert!(cert.maximal && maximal_violation_check(&cert, &ens));
        for p in &cert.pairs {
            assert_eq!(p.lower, cert.pairs[0].lower);
            assert_eq!(p.chi_locc, cert.pairs[0].chi_locc);
        }
    }

    #[test]
    fn case_four() {
        let (_, et) = run(EnsembleCaseId::IVET);
        assert_abs_diff_eq!(et.sum_lower, 2.0 * 3f64.log2(), epsilon = 1e-6);
        assert!(et.maximal);
        assert_eq!(et.verdict, Verdict::Violated);
        let (ens, ep) = run(EnsembleCaseId::IVEP);
        assert_abs_diff_eq!(ep.sum_lower, 4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(ep.global_upper, 3.0, epsilon = 1e-9);
        assert_eq!(ep.verdict, Verdict::Violated);
        assert!(!ep.maximal && !maximal_violation_check(&ep, &ens));
        let (_, non) = run(EnsembleCaseId::IVNonorth(nonorth_default_theta()));
        assert!(non.sum_lower >= 1.9 && non.global_upper <= 1.0 + 1e-12);
        assert_eq!(non.verdict, Verdict::Violated);
    }

    #[test]
    fn case_five() {
        let (_, cert) = run(EnsembleCaseId::VShifts);
        for p in &cert.pairs {
            assert!(p.lower >= shifts_value() - 1e-9, "{}: {}", p.partner, p.lower);
            assert_abs_diff_eq!(p.chi_locc, 2.0, epsilon = 1e-9);
        }
        assert!(cert.sum_lower >= 2.0 * shifts_value() - 1e-5);
        assert_abs_diff_eq!(cert.global_upper, 2.0, epsilon = 1e-9);
        assert!(cert.margin > 0.4);
        assert_eq!(cert.verdict, Verdict::Violated);
    }

    #[test]
    fn invariants_over_registry() {
        for id in EnsembleCaseId::all_default() {
            let (ens, cert) = run(id.clone());
            for p in &cert.pairs {
                assert!(p.lower <= p.cardinality + 1e-9, "{id}");
                assert!(p.lower <= p.holevo + 1e-9, "{id}");
            }
            for i in 1..ens.party_count() {
                for j in i + 1..ens.party_count() {
                    let (bi, bj) = (&ens.parties()[i], &ens.parties()[j]);
                    if is_swap_invariant(&ens, bi, bj).unwrap() {
                        assert_abs_diff_eq!(cert.pairs[i - 1].lower, cert.pairs[j - 1].lower, epsilon = 1e-6);
                    }
                }
            }
            let expected = match id {
                EnsembleCaseId::IPair | EnsembleCaseId::IFullBasis => Verdict::Satisfied,
                _ => Verdict::Violated,
            };
            assert_eq!(cert.verdict, expected, "{id}");
        }
    }

    #[test]
    fn sampled_bound_enters_uncertainty() {
        let ens = build_case(&EnsembleCaseId::IIE1).unwrap();
        let config = AuditConfig {
            use_optimizer: false,
            samples: 20_000,
            seed: 1,
            restarts: 1,
        };
        let cert = audit(&ens, &config).unwrap();
        // The registered protocol already reaches one bit per pair.
        assert!(cert.pairs.iter().all(|p| p.method == LowerMethod::ExplicitProtocol));
        let nonorth = build_case(&EnsembleCaseId::IVNonorth(nonorth_default_theta())).unwrap();
        let cert = audit(&nonorth, &config).unwrap();
        assert!(cert
            .pairs
            .iter()
            .all(|p| p.method == LowerMethod::LambdaLocc && p.standard_error > 0.0));
        assert!(cert.sum_standard_error > 0.0);
        replay(&cert, &nonorth).unwrap();
    }

    #[test]
    fn tampered_certificate_fails_replay() {
        let (ens, mut cert) = run(EnsembleCaseId::VShifts);
        cert.pairs[0].lower += 1e-3;
        assert!(matches!(replay(&cert, &ens), Err(Error::CertificateMismatch { .. })));
    }

    #[test]
    fn rejects_bad_configs() {
        let pair = build_case(&EnsembleCaseId::VShifts)
            .unwrap()
            .reduce_to_pair("B1")
            .unwrap();
        assert!(audit(&pair, &AuditConfig::default()).is_err());
        let ens = build_case(&EnsembleCaseId::VShifts).unwrap();
        let config = AuditConfig {
            samples: 10,
            ..AuditConfig::default()
        };
        assert!(audit(&ens, &config).is_err());
    }

    #[test]
    fn certificate_json_embeds_replay_data() {
        let (_, cert) = run(EnsembleCaseId::VShifts);
        let v = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["verdict"], "violated");
        assert_eq!(v["upper_method"], "cardinality");
        assert!(v["pairs"][0]["protocol"]["operators"].is_array());
        assert_eq!(v["config"]["seed"], 3);
        assert_eq!(v["pairs"][0]["method"], cert.pairs[0].method.to_string());
        assert_eq!(v["upper_method"], cert.upper_method.to_string());
    }
}
