use std::fs;
use std::path::Path;

use mexlab::certificate::Certificate;
use mexlab::extensions::{
    extend_ssf, extend_zero, hull_membership, sample_witnesses, spot_check_extension,
    ExtensionError, HullPoint, QueryEntry,
};
use mexlab::fixtures::{
    build_det_fixture, build_rand_fixture, build_revenue_fixture, fixture_sanity, FixtureId,
};
use mexlab::format::{parse_instance, parse_setting, serialize_instance, FormatError};
use mexlab::incentives::{
    check_cyclic_monotonicity_all, check_weak_monotonicity, payment_lock_bounds,
    synthesize_ir_payments, synthesize_payments, verify_dsic, verify_ir, LockError, SynthesisError,
};
use mexlab::inextensibility::{
    augment, check_randomized_extension, default_witness, enumerate_deterministic_extensions,
    AugmentedInstance, EnumerationError, ExtensionVerdict, WitnessFixture,
};
use mexlab::model::{AgentTypeSpace, MechanismInstance, PaymentRule, TypeVector};
use mexlab::ratlp::{parse_lp, solve, verify_outcome, write_lp, LpOutcome};
use mexlab::revenue::{optimal_revenue, revenue_gap, RevenueGap};
use mexlab::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::output::{approx, dist_json, Failure, Outcome};
use crate::{
    Command, FixtureKind, InextArgs, InextMode, LpAction, Method, PaymentsAction, Property,
    RevenueAction,
};

type Run = Result<Outcome, Failure>;

pub fn run(command: Command) -> Run {
    match command {
        Command::Validate { file } => validate(&file),
        Command::Check { property, file } => check(property, &file),
        Command::Payments {
            action: PaymentsAction::Synth { file, ir, emit },
        } => synth(&file, ir, emit.as_deref()),
        Command::Paylock {
            file,
            agent,
            pair,
            opp,
        } => paylock(&file, agent, pair, &opp.0),
        Command::Extend {
            method,
            file,
            query,
        } => extend(method, &file, &query),
        Command::Spotcheck {
            method,
            file,
            witnesses,
            seed,
        } => spotcheck(method, &file, witnesses, seed),
        Command::Inext(args) => inext(&args),
        Command::Revenue {
            action: RevenueAction::Opt { file, dist },
        } => revenue_opt(&file, &dist),
        Command::Revenue {
            action: RevenueAction::Gap { k, eps, csv },
        } => gap(&k.0, &eps, csv.as_deref()),
        Command::Fixtures { id, emit, k, eps } => fixtures(id, emit.as_deref(), k, eps),
        Command::Lp {
            action: LpAction::Solve { file },
        } => lp_solve(&file),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn format_failure(path: &Path, e: FormatError) -> Failure {
    let doc = match &e {
        FormatError::Invalid(vs) => Some(Certificate::new(
            "invalid_instance",
            None,
            json!({ "violations": vs.iter().map(ToString::to_string).collect::<Vec<_>>() }),
        )),
        _ => None,
    };
    Failure {
        message: format!("{}: {e}", path.display()),
        doc,
    }
}

fn load(path: &Path) -> Result<MechanismInstance, Failure> {
    parse_instance(&read(path)?).map_err(|e| format_failure(path, e))
}

fn payments_or_zero(inst: &MechanismInstance) -> PaymentRule {
    inst.payments.clone().unwrap_or_else(|| {
        eprintln!("note: instance has no payments, using zero payments");
        PaymentRule::zeros(inst.profiles().len(), inst.agents())
    })
}

fn validate(file: &Path) -> Run {
    let inst = load(file)?;
    let sizes: Vec<usize> = inst.typespaces.iter().map(AgentTypeSpace::len).collect();
    let doc = Certificate::new(
        "valid_instance",
        None,
        json!({ "agents": inst.agents(), "m": inst.m, "types": sizes, "feasible": inst.feasible.len() }),
    );
    Ok(Outcome::holds(
        doc,
        format!(
            "{}: valid, {} agents, m = {}",
            file.display(),
            inst.agents(),
            inst.m
        ),
    ))
}

fn check(property: Property, file: &Path) -> Run {
    let inst = load(file)?;
    let held = |name: &str| {
        Outcome::holds(
            Certificate::new(name, None, json!({ "holds": true })),
            format!("{name}: holds"),
        )
    };
    Ok(match property {
        Property::Wm => match check_weak_monotonicity(&inst) {
            Ok(()) => held("weak_monotonicity"),
            Err(v) => Outcome::fails(
                Certificate::wm(&v),
                format!(
                    "weak monotonicity fails for agent {}: value {}",
                    v.agent,
                    approx(&v.value)
                ),
            ),
        },
        Property::Cm => match check_cyclic_monotonicity_all(&inst) {
            Ok(()) => held("cyclic_monotonicity"),
            Err(c) => Outcome::fails(
                Certificate::negative_cycle(&c),
                format!(
                    "negative cycle for agent {}: length {}",
                    c.agent,
                    approx(&c.length)
                ),
            ),
        },
        Property::Dsic => match verify_dsic(&inst, &payments_or_zero(&inst)) {
            Ok(()) => held("dsic"),
            Err(v) => Outcome::fails(
                Certificate::dsic(&v),
                format!(
                    "agent {} gains {} by misreporting",
                    v.agent,
                    approx(&v.gain)
                ),
            ),
        },
        Property::Ir => match verify_ir(&inst, &payments_or_zero(&inst)) {
            Ok(()) => held("ir"),
            Err(v) => Outcome::fails(
                Certificate::ir(&v),
                format!("agent {} has utility {}", v.agent, approx(&v.utility)),
            ),
        },
    })
}

fn synth(file: &Path, ir: bool, emit: Option<&Path>) -> Run {
    let inst = load(file)?;
    let result = if ir {
        synthesize_ir_payments(&inst)
    } else {
        synthesize_payments(&inst).map_err(SynthesisError::NegativeCycle)
    };
    match result {
        Ok(payments) => {
            if let Some(path) = emit {
                write(
                    path,
                    &serialize_instance(&inst.clone().with_payments(payments.clone())),
                )?;
            }
            let doc = Certificate::new(
                "payments",
                None,
                json!({ "ir": ir, "payments": payments.entries }),
            );
            Ok(Outcome::holds(doc, "payments synthesized"))
        }
        Err(SynthesisError::NegativeCycle(c)) => {
            let summary = format!(
                "no implementing payments: negative cycle for agent {}",
                c.agent
            );
            Ok(Outcome::fails(Certificate::negative_cycle(&c), summary))
        }
        Err(e @ SynthesisError::NotIndividuallyRational { agent, .. }) => Ok(Outcome::fails(
            Certificate::new("not_individually_rational", Some(agent), &e),
            e.to_string(),
        )),
    }
}

fn paylock(file: &Path, agent: usize, (a, b): (usize, usize), opp: &[usize]) -> Run {
    let inst = load(file)?;
    match payment_lock_bounds(&inst, agent, a, b, opp) {
        Ok(bounds) => {
            let doc = Certificate::new(
                "payment_lock",
                Some(agent),
                json!({ "pair": [a, b], "opponents": opp, "min": bounds.min, "max": bounds.max }),
            );
            let summary = format!(
                "p({a}) - p({b}) ranges over [{}, {}]",
                approx(&bounds.min),
                approx(&bounds.max)
            );
            Ok(if bounds.is_locked() {
                Outcome::holds(doc, summary)
            } else {
                Outcome::fails(doc, summary)
            })
        }
        Err(LockError::NotImplementable(c)) => Ok(Outcome::fails(
            Certificate::negative_cycle(&c),
            "column is not implementable",
        )),
        Err(e) => Err(e.into()),
    }
}

/// A query or witness entry as written in a file: raw vectors are converted
/// to hull coefficients.
#[derive(Deserialize)]
#[serde(untagged)]
enum FileEntry {
    Original(usize),
    Hull { hull: Vec<Rational> },
    Vector { vector: Vec<Rational> },
}

fn to_hull(entry: FileEntry, space: &AgentTypeSpace, agent: usize) -> Result<QueryEntry, Failure> {
    Ok(match entry {
        FileEntry::Original(t) => QueryEntry::Original(t),
        FileEntry::Hull { hull } => QueryEntry::Hull { hull },
        FileEntry::Vector { vector } => match hull_membership(&TypeVector(vector), space, agent) {
            Ok(h) => QueryEntry::Hull {
                hull: h.coefficients,
            },
            Err(nih) => {
                return Err(Failure {
                    message: format!("agent {agent}: vector is not in the hull of its types"),
                    doc: Some(Certificate::new("not_in_hull", Some(agent), &nih)),
                })
            }
        },
    })
}

fn extension_failure(e: ExtensionError) -> Run {
    let summary = e.to_string();
    let doc = match &e {
        ExtensionError::NotDsic(v) => Certificate::dsic(v),
        ExtensionError::NotIr(v) => Certificate::ir(v),
        ExtensionError::NoSwap(n) => Certificate::new("no_swap", Some(n.agent), n),
        ExtensionError::NotZeroSubstitutable(z) => {
            Certificate::new("not_zero_substitutable", None, z)
        }
        _ => return Err(Failure::usage(summary)),
    };
    Ok(Outcome::fails(doc, summary))
}

fn extend(method: Method, file: &Path, query: &Path) -> Run {
    let inst = load(file)?;
    let payments = payments_or_zero(&inst);
    let entries: Vec<FileEntry> = serde_json::from_str(&read(query)?)?;
    if entries.len() != inst.agents() {
        return Err(Failure::usage(format!(
            "query has {} entries for {} agents",
            entries.len(),
            inst.agents()
        )));
    }
    let q = entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| to_hull(e, &inst.typespaces[i], i))
        .collect::<Result<Vec<_>, _>>()?;
    let result = match method {
        Method::Zero => extend_zero(&inst, &payments, &q),
        Method::Ssf => extend_ssf(&inst, &payments, &q),
    };
    match result {
        Ok(out) => {
            let doc = Certificate::new(
                "extension",
                None,
                json!({ "query": q, "dist": dist_json(&out.dist), "payments": out.payments }),
            );
            Ok(Outcome::holds(doc, "query answered"))
        }
        Err(e) => extension_failure(e),
    }
}

fn spotcheck(method: Method, file: &Path, random: usize, seed: u64) -> Run {
    let inst = load(file)?;
    let payments = payments_or_zero(&inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let witnesses: Vec<Vec<HullPoint>> = (0..inst.agents())
        .map(|i| sample_witnesses(&inst.typespaces[i], i, random, &mut rng))
        .collect();
    let core_method = match method {
        Method::Zero => mexlab::extensions::Method::Zero,
        Method::Ssf => mexlab::extensions::Method::Ssf,
    };
    match spot_check_extension(&inst, &payments, core_method, &witnesses) {
        Ok(verdict) => {
            let counts: Vec<usize> = witnesses.iter().map(Vec::len).collect();
            let ok = verdict.is_ok();
            let doc = Certificate::new(
                "spot_check",
                None,
                json!({ "seed": seed, "witnesses": counts, "result": verdict }),
            );
            Ok(if ok {
                Outcome::holds(
                    doc,
                    format!("extension passes on {counts:?} witnesses per agent"),
                )
            } else {
                Outcome::fails(doc, "extension fails on the sampled witnesses")
            })
        }
        Err(e) => extension_failure(e),
    }
}

fn load_witnesses(path: &Path, inst: &MechanismInstance) -> Result<Vec<Vec<HullPoint>>, Failure> {
    let lists: Vec<Vec<FileEntry>> = serde_json::from_str(&read(path)?)?;
    let mut out = Vec::with_capacity(lists.len());
    for (agent, list) in lists.into_iter().enumerate() {
        let space = inst
            .typespaces
            .get(agent)
            .ok_or_else(|| Failure::usage(format!("witness lists for {} agents", agent + 1)))?;
        let mut points = Vec::new();
        for e in list {
            match to_hull(e, space, agent)? {
                QueryEntry::Hull { hull } => points.push(HullPoint::new(agent, hull)),
                QueryEntry::Original(_) => {
                    return Err(Failure::usage(
                        "witness entries must be {\"hull\": ...} or {\"vector\": ...}",
                    ))
                }
            }
        }
        out.push(points);
    }
    Ok(out)
}

fn paper_witness(
    inst: &MechanismInstance,
    symmetric: bool,
) -> Result<Vec<Vec<HullPoint>>, Failure> {
    let fixture = match (inst.agents(), inst.m, inst.typespaces[0].len()) {
        (2, 3, 4) => WitnessFixture::Det,
        (2, 7, 8) => WitnessFixture::Rand,
        _ => {
            return Err(Failure::usage(
                "--paper-witness needs the det or rand fixture",
            ))
        }
    };
    Ok(default_witness(fixture, symmetric))
}

fn inext(args: &InextArgs) -> Run {
    let inst = load(&args.file)?;
    let witnesses = match &args.witness {
        Some(path) => load_witnesses(path, &inst)?,
        None => paper_witness(&inst, args.symmetric)?,
    };
    let aug = augment(&inst, &witnesses)?;
    match args.mode {
        InextMode::Det => inext_det(&aug, args),
        InextMode::RandLp => inext_rand(&aug, args),
    }
}

fn inext_det(aug: &AugmentedInstance, args: &InextArgs) -> Run {
    let e = match enumerate_deterministic_extensions(aug, args.cap) {
        Ok(e) => e,
        Err(EnumerationError::CapExceeded { required, cap }) => {
            return Err(Failure::usage(format!(
                "{required} deterministic assignments exceed the cap of {cap}; raise --cap or use `inext rand-lp`"
            )))
        }
    };
    let unknown: Vec<String> = e.unknown.iter().map(|i| aug.profile_label(*i)).collect();
    if let Some(path) = &args.evidence {
        let rejections: Vec<_> = e
            .verdicts
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|c| json!({ "assignment": i, "certificate": c })))
            .collect();
        let doc =
            json!({ "unknown": unknown, "certificates": e.certificates, "rejections": rejections });
        write(path, &serde_json::to_string(&doc)?)?;
    }
    let summary = format!(
        "{} assignments over {} unknown profiles: {} pass, {} distinct rejection certificates",
        e.count,
        unknown.len(),
        e.passing.len(),
        e.certificates.len()
    );
    let doc = Certificate::new(
        "deterministic_extensions",
        None,
        json!({
            "unknown": unknown,
            "feasible": e.feasible,
            "assignments": e.count,
            "passing": e.passing,
            "distinct_certificates": e.certificates.len(),
            "first_rejection": e.rejections().next().map(|(a, c)| json!({ "assignment": a, "certificate": c })),
        }),
    );
    Ok(if e.passing.is_empty() {
        Outcome::fails(doc, summary)
    } else {
        Outcome::holds(doc, summary)
    })
}

fn inext_rand(aug: &AugmentedInstance, args: &InextArgs) -> Run {
    let (ext, verdict) = check_randomized_extension(aug)?;
    if let Some(path) = &args.evidence {
        write(path, &write_lp(&ext.lp))?;
    }
    let rows = ext.lp.constraints.len();
    Ok(match verdict {
        ExtensionVerdict::NotExtendable { farkas } => {
            let support = farkas.iter().filter(|y| !y.is_zero()).count();
            let doc = Certificate::farkas(&ext.lp, &farkas);
            Outcome::fails(
                doc,
                format!("not extendable: Farkas certificate on {support} of {rows} rows"),
            )
        }
        v @ ExtensionVerdict::Extendable { .. } => {
            let ExtensionVerdict::Extendable {
                distributions,
                payments,
            } = &v
            else {
                unreachable!()
            };
            let dists: Vec<_> = distributions.iter().map(dist_json).collect();
            let doc = Certificate::new(
                "randomized_extension",
                None,
                json!({ "distributions": dists, "payments": payments.entries }),
            );
            Outcome::holds(doc, format!("extendable: LP with {rows} rows is feasible"))
        }
    })
}

fn revenue_opt(file: &Path, dist: &Path) -> Run {
    let setting = parse_setting(&read(file)?).map_err(|e| format_failure(file, e))?;
    if setting.typespaces.len() != 1 {
        return Err(Failure::usage("revenue needs a single-agent instance"));
    }
    let d: Vec<Rational> = serde_json::from_str(&read(dist)?)?;
    let r = optimal_revenue(&setting.typespaces[0], &setting.feasible, &d)?;
    let doc = Certificate::new(
        "optimal_revenue",
        Some(0),
        json!({
            "value": r.value,
            "allocations": r.allocations.iter().map(dist_json).collect::<Vec<_>>(),
            "payments": r.payments,
        }),
    );
    Ok(Outcome::holds(
        doc,
        format!("optimal revenue {}", approx(&r.value)),
    ))
}

fn gap(ks: &[usize], eps: &Rational, csv_path: Option<&Path>) -> Run {
    if ks.is_empty() {
        return Err(Failure::usage("--k needs at least one value"));
    }
    let rows: Vec<RevenueGap> = ks
        .par_iter()
        .map(|k| revenue_gap(*k, eps))
        .collect::<Result<_, _>>()?;
    let mut table = String::from("decimals are display only\n");
    table.push_str(&format!(
        "{:>6}  {:>10}  {:>10}  {:>28}  {:>28}\n",
        "k", "eps", "opt_supp", "opt_aug", "ratio"
    ));
    for r in &rows {
        table.push_str(&format!(
            "{:>6}  {:>10}  {:>10}  {:>28}  {:>28}\n",
            r.k,
            r.eps.to_string(),
            approx(&r.opt_supp),
            approx(&r.opt_aug),
            approx(&r.ratio)
        ));
    }
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        w.write_record([
            "k",
            "eps",
            "opt_supp",
            "opt_aug",
            "ratio",
            "ratio_display_only",
        ])?;
        for r in &rows {
            w.write_record([
                r.k.to_string(),
                r.eps.to_string(),
                r.opt_supp.to_string(),
                r.opt_aug.to_string(),
                r.ratio.to_string(),
                format!("{:.6}", r.ratio.to_f64()),
            ])?;
        }
        w.flush()?;
    }
    let cells: Vec<_> = rows.iter().map(|r| json!({ "k": r.k, "eps": r.eps, "opt_supp": r.opt_supp, "opt_aug": r.opt_aug, "ratio": r.ratio, "bound": r.bound() })).collect();
    Ok(Outcome::holds(
        Certificate::new("revenue_gap", Some(0), json!({ "rows": cells })),
        table.trim_end(),
    ))
}

fn fixtures(kind: FixtureKind, emit: Option<&Path>, k: usize, eps: Rational) -> Run {
    let (id, inst, dist) = match kind {
        FixtureKind::Det => (FixtureId::Det, build_det_fixture(), None),
        FixtureKind::Rand => (FixtureId::Rand, build_rand_fixture(), None),
        FixtureKind::Revenue => {
            let (inst, dist) = build_revenue_fixture(k, &eps)?;
            (FixtureId::Revenue { k, eps }, inst, Some(dist))
        }
    };
    if let Some(path) = emit {
        write(path, &serialize_instance(&inst))?;
    }
    let report = fixture_sanity(&id)?;
    let summary = format!(
        "fixture {}: dsic {}, swap system {}",
        serde_json::to_value(&id)?["id"].as_str().unwrap_or("?"),
        if report.dsic.is_ok() {
            "holds"
        } else {
            "fails"
        },
        if report.swap_system.is_ok() {
            "found"
        } else {
            "absent"
        }
    );
    Ok(Outcome::holds(
        Certificate::new("fixture", None, json!({ "report": report, "dist": dist })),
        summary,
    ))
}

fn lp_solve(file: &Path) -> Run {
    let lp = parse_lp(&read(file)?)?;
    let out = solve(&lp)?;
    verify_outcome(&lp, &out)
        .map_err(|m| Failure::usage(format!("solver result failed verification: {m}")))?;
    Ok(match &out {
        LpOutcome::Infeasible { farkas } => {
            Outcome::fails(Certificate::farkas(&lp, farkas), "infeasible")
        }
        LpOutcome::Optimal { value, .. } => Outcome::holds(
            Certificate::new("lp_optimal", None, &out),
            format!("optimal value {}", approx(value)),
        ),
        LpOutcome::Unbounded { .. } => {
            Outcome::holds(Certificate::new("lp_unbounded", None, &out), "unbounded")
        }
    })
}
