//! JSON instance documents.
//!
//! ```json
//! {
//!   "m": 1, "agents": 1,
//!   "typespaces": [[["1"], ["2"]]],
//!   "feasible": [["0"], ["1"]],
//!   "allocation": [{"profile": [0], "dist": [{"f": 0, "p": "1"}]},
//!                  {"profile": [1], "dist": [{"f": 1, "p": "1/2"}, {"f": 0, "p": "1/2"}]}],
//!   "payments": [{"profile": [0], "pay": ["0"]}, {"profile": [1], "pay": ["1/2"]}]
//! }
//! ```
//!
//! Rationals are integer strings or `"p/q"` strings; bare JSON integers are
//! also accepted, floats are not. An optional `labels` key carries per-agent
//! type names.

use serde::{Deserialize, Serialize};

use crate::model::{
    validate_instance, AgentTypeSpace, AllocationDistribution, AllocationRule, FeasibleSet,
    JointAllocation, MechanismInstance, PaymentRule, TypeVector, Violation,
};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Structure(String),
    #[error("invalid instance: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    m: usize,
    agents: usize,
    typespaces: Vec<Vec<Vec<Rational>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<String>>>,
    feasible: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    allocation: Option<Vec<AllocEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payments: Option<Vec<PayEntry>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllocEntry {
    profile: Vec<usize>,
    dist: Vec<WeightEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightEntry {
    f: usize,
    p: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayEntry {
    profile: Vec<usize>,
    pay: Vec<Rational>,
}

/// Type spaces and feasible set of a document, without an allocation rule.
#[derive(Debug, Clone)]
pub struct Setting {
    pub m: usize,
    pub typespaces: Vec<AgentTypeSpace>,
    pub feasible: FeasibleSet,
}

fn setting_of(doc: &InstanceDoc) -> Result<Setting, FormatError> {
    if doc.typespaces.len() != doc.agents {
        return Err(FormatError::Structure(format!(
            "\"agents\" is {} but \"typespaces\" has {} entries",
            doc.agents,
            doc.typespaces.len()
        )));
    }
    let mut typespaces = Vec::with_capacity(doc.agents);
    for (i, ts) in doc.typespaces.iter().enumerate() {
        let types = ts.iter().map(|v| TypeVector(v.clone())).collect();
        let space = match doc.labels.as_ref().map(|l| l.get(i)) {
            None => AgentTypeSpace::new(types),
            Some(Some(l)) => AgentTypeSpace::labeled(types, l.clone()),
            Some(None) => {
                return Err(FormatError::Structure(format!(
                    "\"labels\" has no entry for agent {i}"
                )))
            }
        };
        typespaces.push(space);
    }
    let feasible = FeasibleSet::from_list(
        doc.m,
        doc.agents,
        doc.feasible
            .iter()
            .map(|a| JointAllocation(a.clone()))
            .collect(),
    );
    Ok(Setting {
        m: doc.m,
        typespaces,
        feasible,
    })
}

/// Parses the type spaces and feasible set only; `allocation` and `payments`
/// are ignored if present. Structural invariants on types and allocations
/// are still enforced.
pub fn parse_setting(text: &str) -> Result<Setting, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let setting = setting_of(&doc)?;
    let probe = MechanismInstance {
        m: setting.m,
        typespaces: setting.typespaces.clone(),
        feasible: setting.feasible.clone(),
        allocation: AllocationRule {
            entries: Vec::new(),
        },
        payments: None,
    };
    if let Err(v) = validate_instance(&probe) {
        let v: Vec<Violation> = v
            .into_iter()
            .filter(|x| !matches!(x, Violation::ProfileCount { .. }))
            .collect();
        if !v.is_empty() {
            return Err(FormatError::Invalid(v));
        }
    }
    Ok(setting)
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<MechanismInstance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let setting = setting_of(&doc)?;
    let profiles = crate::model::ProfileSpace::new(
        setting.typespaces.iter().map(AgentTypeSpace::len).collect(),
    );

    let locate = |profile: &[usize], what: &str| -> Result<usize, FormatError> {
        profiles.try_index(profile).ok_or_else(|| {
            FormatError::Structure(format!("{what} entry has invalid profile {profile:?}"))
        })
    };

    let alloc_doc = doc
        .allocation
        .as_ref()
        .ok_or_else(|| FormatError::Structure("missing \"allocation\"".into()))?;
    let mut entries: Vec<Option<AllocationDistribution>> = vec![None; profiles.len()];
    for e in alloc_doc {
        let idx = locate(&e.profile, "allocation")?;
        if entries[idx].is_some() {
            return Err(FormatError::Structure(format!(
                "profile {:?} listed twice in allocation",
                e.profile
            )));
        }
        entries[idx] = Some(AllocationDistribution::raw(
            e.dist.iter().map(|w| (w.f, w.p.clone())).collect(),
        ));
    }
    let mut rule = Vec::with_capacity(profiles.len());
    for (idx, e) in entries.into_iter().enumerate() {
        match e {
            Some(d) => rule.push(d),
            None => {
                return Err(FormatError::Structure(format!(
                    "allocation missing for profile {:?}",
                    profiles.profile(idx)
                )))
            }
        }
    }

    let payments = match &doc.payments {
        None => None,
        Some(pay_doc) => {
            let mut pays: Vec<Option<Vec<Rational>>> = vec![None; profiles.len()];
            for e in pay_doc {
                let idx = locate(&e.profile, "payments")?;
                if pays[idx].is_some() {
                    return Err(FormatError::Structure(format!(
                        "profile {:?} listed twice in payments",
                        e.profile
                    )));
                }
                pays[idx] = Some(e.pay.clone());
            }
            let mut out = Vec::with_capacity(profiles.len());
            for (idx, p) in pays.into_iter().enumerate() {
                match p {
                    Some(p) => out.push(p),
                    None => {
                        return Err(FormatError::Structure(format!(
                            "payments missing for profile {:?}",
                            profiles.profile(idx)
                        )))
                    }
                }
            }
            Some(PaymentRule { entries: out })
        }
    };

    let inst = MechanismInstance {
        m: setting.m,
        typespaces: setting.typespaces,
        feasible: setting.feasible,
        allocation: AllocationRule { entries: rule },
        payments,
    };
    validate_instance(&inst).map_err(FormatError::Invalid)?;
    Ok(inst)
}

/// Serializes an instance; profiles are written in lexicographic order.
pub fn serialize_instance(inst: &MechanismInstance) -> String {
    let profiles = inst.profiles();
    let labels = if inst.typespaces.iter().any(|s| s.labels.is_some()) {
        Some(
            inst.typespaces
                .iter()
                .map(|s| (0..s.len()).map(|t| s.label(t)).collect())
                .collect(),
        )
    } else {
        None
    };
    let doc = InstanceDoc {
        m: inst.m,
        agents: inst.agents(),
        typespaces: inst
            .typespaces
            .iter()
            .map(|s| s.types.iter().map(|t| t.0.clone()).collect())
            .collect(),
        labels,
        feasible: inst
            .feasible
            .allocations()
            .iter()
            .map(|a| a.0.clone())
            .collect(),
        allocation: Some(
            profiles
                .iter()
                .enumerate()
                .map(|(i, p)| AllocEntry {
                    profile: p,
                    dist: inst.allocation.entries[i]
                        .entries()
                        .iter()
                        .map(|(f, w)| WeightEntry {
                            f: *f,
                            p: w.clone(),
                        })
                        .collect(),
                })
                .collect(),
        ),
        payments: inst.payments.as_ref().map(|pr| {
            profiles
                .iter()
                .enumerate()
                .map(|(i, p)| PayEntry {
                    profile: p,
                    pay: pr.entries[i].clone(),
                })
                .collect()
        }),
    };
    serde_json::to_string_pretty(&doc).expect("instance serialization")
}
