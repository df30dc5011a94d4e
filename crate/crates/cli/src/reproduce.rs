//! Recomputes the published case values and compares them with the claims.

use serde::Serialize;
use serde_json::{json, Value};

use qmono::bounds::{chi_locc, lambda_locc};
use qmono::ensembles::{build_case, nonorth_default_theta, EnsembleCaseId};
use qmono::monogamy::{audit, AuditConfig, MonogamyCertificate, Verdict};
use qmono::protocols::{mutual_information, shifts_protocol, simulate};

use crate::render::{json, num, Table};
use crate::source::{case_id, plan, Plan};
use crate::{Failure, Format, Output, Search};

const SHIFTS_PAIR_CLAIM: f64 = 1.20443;
const SHIFTS_SUM_CLAIM: f64 = 2.40887;
const SHIFTS_CLAIM_TOL: f64 = 1e-5;
const LAMBDA_CLAIM: f64 = 0.27865;
const VALUE_TOL: f64 = 1e-6;
const EXACT_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct Check {
    case: String,
    quantity: String,
    computed: Value,
    expected: String,
    pass: bool,
}

enum Expect {
    Near(f64, f64),
    AtLeast(f64),
    AtMost(f64),
    Above(f64),
}

fn numeric(case: &EnsembleCaseId, quantity: impl Into<String>, x: f64, expect: Expect) -> Check {
    let (pass, expected) = match expect {
        Expect::Near(v, tol) => ((x - v).abs() <= tol, format!("{} ± {tol:.1e}", num(v))),
        Expect::AtLeast(v) => (x >= v, format!(">= {}", num(v))),
        Expect::AtMost(v) => (x <= v, format!("<= {}", num(v))),
        Expect::Above(v) => (x > v, format!("> {}", num(v))),
    };
    Check {
        case: case.to_string(),
        quantity: quantity.into(),
        computed: json!(x),
        expected,
        pass,
    }
}

fn flag(case: &EnsembleCaseId, quantity: &str, got: impl ToString, want: impl ToString) -> Check {
    let (got, want) = (got.to_string(), want.to_string());
    Check {
        case: case.to_string(),
        quantity: quantity.into(),
        pass: got == want,
        computed: json!(got),
        expected: want,
    }
}

fn pair_checks(id: &EnsembleCaseId, cert: &MonogamyCertificate, value: f64, out: &mut Vec<Check>) {
    for p in &cert.pairs {
        out.push(numeric(
            id,
            format!("pair A:{}", p.partner),
            p.lower,
            Expect::Near(value, VALUE_TOL),
        ));
    }
}

fn verdict(id: &EnsembleCaseId, cert: &MonogamyCertificate, want: Verdict, out: &mut Vec<Check>) {
    out.push(flag(id, "verdict", cert.verdict, want));
}

fn maximal(id: &EnsembleCaseId, cert: &MonogamyCertificate, want: bool, out: &mut Vec<Check>) {
    out.push(flag(id, "maximal", cert.maximal, want));
}

fn checks_for(id: &EnsembleCaseId, plan: &Plan) -> Result<Vec<Check>, Failure> {
    let ens = build_case(id)?;
    let config = AuditConfig {
        use_optimizer: true,
        restarts: plan.restarts,
        samples: 0,
        seed: plan.seed,
    };
    let cert = audit(&ens, &config)?;
    let mut out = Vec::new();
    let sum = |x: f64, e: Expect| numeric(id, "sum_lower", x, e);
    let upper = |x: f64, e: Expect| numeric(id, "global_upper", x, e);
    match id {
        EnsembleCaseId::IPair => {
            pair_checks(id, &cert, 0.0, &mut out);
            verdict(id, &cert, Verdict::Satisfied, &mut out);
        }
        EnsembleCaseId::IFullBasis => {
            out.push(sum(cert.sum_lower, Expect::Near(2.0, VALUE_TOL)));
            out.push(upper(cert.global_upper, Expect::Near(2.0, VALUE_TOL)));
            verdict(id, &cert, Verdict::Satisfied, &mut out);
        }
        EnsembleCaseId::IIE1 | EnsembleCaseId::IIE2 | EnsembleCaseId::IIE3 => {
            pair_checks(id, &cert, 1.0, &mut out);
            out.push(sum(cert.sum_lower, Expect::Near(2.0, VALUE_TOL)));
            verdict(id, &cert, Verdict::Violated, &mut out);
            maximal(id, &cert, true, &mut out);
        }
        EnsembleCaseId::IIICat(n) => {
            pair_checks(id, &cert, 1.0, &mut out);
            out.push(sum(cert.sum_lower, Expect::Near(*n as f64, VALUE_TOL)));
            verdict(id, &cert, Verdict::Violated, &mut out);
            maximal(id, &cert, true, &mut out);
        }
        EnsembleCaseId::IVET => {
            out.push(sum(cert.sum_lower, Expect::Near(2.0 * 3f64.log2(), VALUE_TOL)));
            verdict(id, &cert, Verdict::Violated, &mut out);
            maximal(id, &cert, true, &mut out);
        }
        EnsembleCaseId::IVEP => {
            out.push(sum(cert.sum_lower, Expect::Near(4.0, VALUE_TOL)));
            out.push(upper(cert.global_upper, Expect::Near(3.0, VALUE_TOL)));
            verdict(id, &cert, Verdict::Violated, &mut out);
            maximal(id, &cert, false, &mut out);
        }
        EnsembleCaseId::IVNonorth(_) => {
            out.push(sum(cert.sum_lower, Expect::AtLeast(1.9)));
            out.push(upper(cert.global_upper, Expect::AtMost(1.0 + EXACT_TOL)));
            verdict(id, &cert, Verdict::Violated, &mut out);
        }
        EnsembleCaseId::VShifts => {
            let pair = ens.reduce_to_pair("B1")?;
            let value = mutual_information(&simulate(&pair, &shifts_protocol())?);
            out.push(numeric(
                id,
                "shifts protocol A:B1",
                value,
                Expect::Near(SHIFTS_PAIR_CLAIM, SHIFTS_CLAIM_TOL),
            ));
            out.push(numeric(
                id,
                "chi_locc A:B1",
                chi_locc(&pair)?.value,
                Expect::Near(2.0, EXACT_TOL),
            ));
            out.push(sum(
                cert.sum_lower,
                Expect::AtLeast(SHIFTS_SUM_CLAIM - SHIFTS_CLAIM_TOL),
            ));
            out.push(upper(cert.global_upper, Expect::Near(2.0, EXACT_TOL)));
            verdict(id, &cert, Verdict::Violated, &mut out);
            out.push(numeric(
                id,
                "violation percent",
                100.0 * cert.margin / cert.global_upper,
                Expect::Above(20.0),
            ));
            if let Some(samples) = plan.samples {
                let lam = lambda_locc(&pair, samples, plan.seed)?;
                let tol = 3.0 * lam.standard_error;
                out.push(numeric(
                    id,
                    "lambda_locc A:B1",
                    lam.value,
                    Expect::Near(LAMBDA_CLAIM, tol),
                ));
            }
        }
    }
    Ok(out)
}

fn targets(case: &str, n: Option<usize>, theta: Option<f64>) -> Result<Vec<EnsembleCaseId>, Failure> {
    let only = |allowed_n: bool, allowed_theta: bool| -> Result<(), Failure> {
        if n.is_some() && !allowed_n {
            return Err(Failure::usage("--n is only valid for case III"));
        }
        if theta.is_some() && !allowed_theta {
            return Err(Failure::usage("--theta is only valid for case IV"));
        }
        Ok(())
    };
    Ok(match case {
        "I" => {
            only(false, false)?;
            vec![EnsembleCaseId::IPair, EnsembleCaseId::IFullBasis]
        }
        "II" => {
            only(false, false)?;
            vec![EnsembleCaseId::IIE1, EnsembleCaseId::IIE2, EnsembleCaseId::IIE3]
        }
        "III" => {
            only(true, false)?;
            let ns = n.map_or(vec![2, 5, 10, 20], |n| vec![n]);
            ns.into_iter()
                .map(|n| case_id("III-cat", Some(n), None))
                .collect::<Result<_, _>>()?
        }
        "IV" => {
            only(false, true)?;
            vec![
                EnsembleCaseId::IVET,
                EnsembleCaseId::IVEP,
                case_id("IV-nonorth", None, Some(theta.unwrap_or_else(nonorth_default_theta)))?,
            ]
        }
        "V" => {
            only(false, false)?;
            vec![EnsembleCaseId::VShifts]
        }
        id => vec![case_id(id, n, theta)?],
    })
}

pub fn run(
    case: &str,
    n: Option<usize>,
    theta: Option<f64>,
    search: &Search,
    format: Format,
) -> Result<Output, Failure> {
    let ids = targets(case, n, theta)?;
    let plan = plan(search)?;
    let mut checks = Vec::new();
    for id in &ids {
        checks.extend(checks_for(id, &plan)?);
    }
    let passed = checks.iter().all(|c| c.pass);
    let text = if format == Format::Json {
        json(&json!({
            "target": case,
            "restarts": plan.restarts,
            "samples": plan.samples,
            "seed": plan.seed,
            "checks": checks,
            "passed": passed,
        }))?
    } else {
        let mut t = Table::new(["case", "quantity", "computed", "expected", "result"]);
        for c in &checks {
            let computed = match &c.computed {
                Value::Number(x) => num(x.as_f64().unwrap_or(f64::NAN)),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            t.row([
                c.case.clone(),
                c.quantity.clone(),
                computed,
                c.expected.clone(),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
            ]);
        }
        let failed = checks.iter().filter(|c| !c.pass).count();
        let mut text = t.render();
        text.push_str(&if failed == 0 {
            format!("\nall {} checks passed\n", checks.len())
        } else {
            format!("\n{failed} of {} checks failed\n", checks.len())
        });
        text
    };
    Ok(Output { text, passed })
}
