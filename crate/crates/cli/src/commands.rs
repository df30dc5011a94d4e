use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use qmono::bounds::{cardinality_bound, chi_locc, holevo_chi, jrw_lower, lambda_locc, BoundReport, DEFAULT_SAMPLES};
use qmono::ensembles::serialize_ensemble;
use qmono::monogamy::{audit, AuditConfig, MonogamyCertificate};
use qmono::optimize::{
    certify, optimize_global_projective, optimize_one_way_locc, Direction, OptimizationResult, Template,
};
use qmono::protocols::{
    computational_basis, mutual_information, parse_protocol, protocol_to_json, serialize_protocol, shifts_protocol,
    simulate,
};

use crate::render::{json, num, Table};
use crate::source::{load, plan};
use crate::{BuiltinProtocol, DirectionArg, Failure, Format, Output, Search, Source, TemplateArg};

fn done(text: String) -> Result<Output, Failure> {
    Ok(Output { text, passed: true })
}

#[derive(Serialize)]
struct BoundsOutput<'a> {
    ensemble: &'a str,
    parties: &'a [String],
    dims: &'a [usize],
    cardinality: usize,
    bounds: Vec<BoundReport>,
    notes: Vec<String>,
}

pub fn bounds(source: &Source, search: &Search, format: Format) -> Result<Output, Failure> {
    let loaded = load(source)?;
    let plan = plan(search)?;
    let ens = &loaded.ensemble;
    let mut reports = vec![holevo_chi(ens)?, jrw_lower(ens)?, cardinality_bound(ens)];
    let mut notes = Vec::new();
    if ens.is_bipartite() {
        reports.push(chi_locc(ens)?);
        if plan.seeded {
            reports.push(lambda_locc(ens, plan.samples.unwrap_or(DEFAULT_SAMPLES), plan.seed)?);
        } else {
            notes.push("lambda_locc skipped: sampling needs --seed or QMONO_SEED".to_string());
        }
    }
    let out = BoundsOutput {
        ensemble: &loaded.name,
        parties: ens.parties(),
        dims: ens.dims(),
        cardinality: ens.cardinality(),
        bounds: reports,
        notes,
    };
    if format == Format::Json {
        return done(json(&out)?);
    }
    let mut t = Table::new(["bound", "value", "std_error", "samples", "seed"]);
    for r in &out.bounds {
        t.row([
            r.name.clone(),
            num(r.value),
            num(r.standard_error),
            r.samples.map_or("-".into(), |s| s.to_string()),
            r.seed.map_or("-".into(), |s| s.to_string()),
        ]);
    }
    let mut text = format!(
        "ensemble {}  dims {:?}  cardinality {}\n\n",
        out.ensemble, out.dims, out.cardinality
    );
    text.push_str(&t.render());
    for n in &out.notes {
        text.push_str(&format!("note: {n}\n"));
    }
    done(text)
}

pub fn protocol_run(path: &Path, source: &Source, format: Format) -> Result<Output, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let prot = parse_protocol(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let loaded = load(source)?;
    let joint = simulate(&loaded.ensemble, &prot)?;
    let info = mutual_information(&joint);
    if format == Format::Json {
        return done(json(&json!({
            "ensemble": loaded.name,
            "protocol": path.display().to_string(),
            "mutual_information": info,
            "joint": joint,
        }))?);
    }
    let mut t = Table::new(std::iter::once("element".to_string()).chain(joint.outcomes().iter().cloned()));
    for (label, row) in joint.elements().iter().zip(joint.p()) {
        t.row(std::iter::once(label.clone()).chain(row.iter().map(|&x| num(x))));
    }
    done(format!(
        "ensemble {}\nprotocol {}\nmutual_information {}\n\n{}",
        loaded.name,
        path.display(),
        num(info),
        t.render()
    ))
}

pub fn protocol_export(name: BuiltinProtocol, dims: &[usize]) -> Result<Output, Failure> {
    let prot = match name {
        BuiltinProtocol::Shifts => shifts_protocol(),
        BuiltinProtocol::Computational => {
            if dims.is_empty() {
                return Err(Failure::usage("computational needs --dims, e.g. --dims 2,2"));
            }
            computational_basis(dims)?
        }
    };
    let mut text = serialize_protocol(&prot)?;
    text.push('\n');
    done(text)
}

fn template_name(t: Template) -> &'static str {
    match t {
        Template::GlobalProjective => "global-projective",
        Template::OneWay(Direction::AToB) => "one-way A->B",
        Template::OneWay(Direction::BToA) => "one-way B->A",
    }
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    ensemble: &'a str,
    result: &'a OptimizationResult,
    certified: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    protocol: Option<Value>,
}

pub fn optimize(
    source: &Source,
    template: Option<TemplateArg>,
    direction: DirectionArg,
    search: &Search,
    format: Format,
) -> Result<Output, Failure> {
    let loaded = load(source)?;
    let plan = plan(search)?;
    let ens = &loaded.ensemble;
    let template = template.unwrap_or(if ens.is_bipartite() {
        TemplateArg::OneWay
    } else {
        TemplateArg::Global
    });
    let result = match template {
        TemplateArg::Global => optimize_global_projective(ens, plan.restarts, plan.seed)?,
        TemplateArg::OneWay => {
            let dir = match direction {
                DirectionArg::AToB => Some(Direction::AToB),
                DirectionArg::BToA => Some(Direction::BToA),
                DirectionArg::Both => None,
            };
            optimize_one_way_locc(ens, plan.restarts, plan.seed, dir)?
        }
    };
    let certified = certify(&result, ens)?;
    let out = OptimizeOutput {
        ensemble: &loaded.name,
        result: &result,
        certified,
        protocol: result.protocol.as_ref().map(protocol_to_json),
    };
    if format == Format::Json {
        return done(json(&out)?);
    }
    let params: Vec<String> = result.parameters.values().iter().map(|&x| num(x)).collect();
    let mut t = Table::new(["field", "value"]);
    t.row(["template", template_name(result.template)]);
    t.row(["value".to_string(), num(result.value)]);
    t.row(["certified".to_string(), num(certified)]);
    t.row(["restarts".to_string(), result.restarts.to_string()]);
    t.row(["seed".to_string(), result.seed.to_string()]);
    t.row(["converged".to_string(), result.converged.to_string()]);
    t.row(["parameters".to_string(), format!("[{}]", params.join(", "))]);
    done(format!("ensemble {}\n\n{}", loaded.name, t.render()))
}

pub fn certificate_table(cert: &MonogamyCertificate) -> String {
    let mut t = Table::new(["pair", "lower", "std_error", "method", "chi_locc", "log2_gamma"]);
    for p in &cert.pairs {
        t.row([
            format!("{}:{}", cert.parties[0], p.partner),
            num(p.lower),
            num(p.standard_error),
            p.method.to_string(),
            num(p.chi_locc),
            num(p.cardinality),
        ]);
    }
    let mut s = t.render();
    let mut summary = Table::default();
    summary.row(["sum_lower".to_string(), num(cert.sum_lower)]);
    summary.row(["sum_std_error".to_string(), num(cert.sum_standard_error)]);
    summary.row([
        "global_upper".to_string(),
        format!("{} ({})", num(cert.global_upper), cert.upper_method),
    ]);
    summary.row(["margin".to_string(), num(cert.margin)]);
    summary.row(["verdict".to_string(), cert.verdict.to_string()]);
    summary.row(["maximal".to_string(), cert.maximal.to_string()]);
    s.push('\n');
    s.push_str(&summary.render());
    s
}

pub fn monogamy(source: &Source, use_optimizer: bool, search: &Search, format: Format) -> Result<Output, Failure> {
    let loaded = load(source)?;
    let plan = plan(search)?;
    let config = AuditConfig {
        use_optimizer,
        restarts: plan.restarts,
        samples: plan.samples.unwrap_or(0),
        seed: plan.seed,
    };
    let cert = audit(&loaded.ensemble, &config)?;
    if format == Format::Json {
        return done(json(&cert)?);
    }
    done(format!("ensemble {}\n\n{}", loaded.name, certificate_table(&cert)))
}

pub fn ensemble_validate(source: &Source, format: Format) -> Result<Output, Failure> {
    let loaded = load(source)?;
    let ens = &loaded.ensemble;
    let out = json!({
        "ensemble": loaded.name,
        "valid": true,
        "parties": ens.parties(),
        "dims": ens.dims(),
        "cardinality": ens.cardinality(),
        "all_pure": ens.all_pure(),
    });
    if format == Format::Json {
        return done(json(&out)?);
    }
    let mut t = Table::new(["field", "value"]);
    t.row(["ensemble".to_string(), loaded.name.clone()]);
    t.row(["valid".to_string(), "true".to_string()]);
    t.row(["parties".to_string(), ens.parties().join(",")]);
    t.row(["dims".to_string(), format!("{:?}", ens.dims())]);
    t.row(["cardinality".to_string(), ens.cardinality().to_string()]);
    t.row(["all_pure".to_string(), ens.all_pure().to_string()]);
    done(t.render())
}

pub fn ensemble_export(source: &Source) -> Result<Output, Failure> {
    let loaded = load(source)?;
    let mut text = serialize_ensemble(&loaded.ensemble)?;
    text.push('\n');
    done(text)
}
