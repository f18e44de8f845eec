//! The shared JSON envelope for verdicts: `{"kind": ..., "agent": ..., "data": ...}`.
//!
//! Every rational inside `data` is a `"p/q"` (or integer) string.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::incentives::{DsicViolation, IrViolation, NegativeCycleCert, WmViolation};
use crate::model::{MechanismInstance, PaymentRule};
use crate::rational::Rational;
use crate::ratlp::{verify_outcome, LinearProgram, LpOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub agent: Option<usize>,
    pub data: Value,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("certificate data serializes")
}

impl Certificate {
    pub fn new(kind: &str, agent: Option<usize>, data: impl Serialize) -> Self {
        Certificate {
            kind: kind.to_string(),
            agent,
            data: to_value(&data),
        }
    }

    pub fn wm(v: &WmViolation) -> Self {
        Self::new("wm_violation", Some(v.agent), v)
    }

    pub fn negative_cycle(c: &NegativeCycleCert) -> Self {
        Self::new("negative_cycle", Some(c.agent), c)
    }

    pub fn dsic(v: &DsicViolation) -> Self {
        Self::new("dsic_violation", Some(v.agent), v)
    }

    pub fn ir(v: &IrViolation) -> Self {
        Self::new("ir_violation", Some(v.agent), v)
    }

    /// Farkas multipliers with the names of the rows they weight.
    pub fn farkas(lp: &LinearProgram, farkas: &[Rational]) -> Self {
        let rows: Vec<Value> = lp
            .constraints
            .iter()
            .zip(farkas)
            .filter(|(_, y)| !y.is_zero())
            .map(|(c, y)| serde_json::json!({ "row": c.name, "y": y }))
            .collect();
        Self::new(
            "farkas",
            None,
            serde_json::json!({ "farkas": farkas, "support": rows }),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Re-checks an instance-level certificate; `payments` is needed for
    /// DSIC and IR violations. Unknown kinds are rejected.
    pub fn check(&self, inst: &MechanismInstance, payments: Option<&PaymentRule>) -> bool {
        let data = self.data.clone();
        match (self.kind.as_str(), payments) {
            ("wm_violation", _) => {
                serde_json::from_value::<WmViolation>(data).is_ok_and(|v| v.verify(inst))
            }
            ("negative_cycle", _) => {
                serde_json::from_value::<NegativeCycleCert>(data).is_ok_and(|c| c.verify(inst))
            }
            ("dsic_violation", Some(p)) => {
                serde_json::from_value::<DsicViolation>(data).is_ok_and(|v| v.verify(inst, p))
            }
            ("ir_violation", Some(p)) => {
                serde_json::from_value::<IrViolation>(data).is_ok_and(|v| v.verify(inst, p))
            }
            _ => false,
        }
    }

    /// Re-checks a Farkas certificate against the program it refers to.
    pub fn check_farkas(&self, lp: &LinearProgram) -> bool {
        if self.kind != "farkas" {
            return false;
        }
        let Some(values) = self.data.get("farkas") else {
            return false;
        };
        match serde_json::from_value::<Vec<Rational>>(values.clone()) {
            Ok(farkas) => verify_outcome(lp, &LpOutcome::Infeasible { farkas }).is_ok(),
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::build_det_fixture;
    use crate::incentives::check_weak_monotonicity;
    use crate::model::MechanismInstance;

    fn broken() -> MechanismInstance {
        let mut det = build_det_fixture();
        // agent 1 at (A, A) receives D's bundle against A
        let d = det.profiles().index(&[3, 0]);
        let a = det.profiles().index(&[0, 0]);
        let target = det.dist(d).clone();
        det.allocation.entries[a] = target;
        det
    }

    #[test]
    fn round_trips_and_rechecks() {
        let inst = broken();
        let v = check_weak_monotonicity(&inst).unwrap_err();
        let cert = Certificate::wm(&v);
        let back: Certificate = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert!(back.check(&inst, None));
        assert!(!back.check(&build_det_fixture(), None));
        assert!(back.data["value"].is_string());
    }
}
