//! Certificates that a mechanism has no DSIC extension to a finite set of
//! hull witnesses.
//!
//! An [`AugmentedInstance`] appends witness types to the type spaces. Profiles
//! made only of original types keep the base allocation; every other profile
//! is unknown. Deterministic extensions are enumerated exhaustively and each
//! rejected assignment gets a negative-cycle certificate. Randomized
//! extensions are decided by one feasibility LP whose Farkas multipliers
//! certify impossibility.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::extensions::{HullPoint, HullPointError};
use crate::incentives::{cycle_in_values, verify_dsic, NegativeCycleCert};
use crate::model::{
    AgentTypeSpace, AllocationDistribution, AllocationRule, MechanismInstance, PaymentRule,
    ProfileSpace,
};
use crate::rational::{dot, Rational};
use crate::ratlp::{self, LinearProgram, LpError, LpOutcome, Relation, Sense, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AugmentError {
    #[error("witness lists for {found} agents, instance has {expected}")]
    Arity { expected: usize, found: usize },
    #[error("witness coefficients do not match the agent: {0}")]
    Agent(usize),
    #[error(transparent)]
    HullPoint(#[from] HullPointError),
    #[error("agent {agent}: witness {index} duplicates an existing type")]
    Duplicate { agent: usize, index: usize },
}

#[derive(Debug, Clone)]
pub struct AugmentedInstance {
    pub base: MechanismInstance,
    pub witnesses: Vec<Vec<HullPoint>>,
    /// Original types followed by the witness vectors, labelled `w0, w1, ...`.
    pub typespaces: Vec<AgentTypeSpace>,
    pub profiles: ProfileSpace,
    /// Base distribution on all-original profiles.
    pub fixed: Vec<Option<AllocationDistribution>>,
    /// Augmented indices of the profiles that contain a witness.
    pub unknown: Vec<usize>,
}

pub fn augment(
    inst: &MechanismInstance,
    witnesses: &[Vec<HullPoint>],
) -> Result<AugmentedInstance, AugmentError> {
    let n = inst.agents();
    if witnesses.len() > n {
        return Err(AugmentError::Arity {
            expected: n,
            found: witnesses.len(),
        });
    }
    let mut lists: Vec<Vec<HullPoint>> = witnesses.to_vec();
    lists.resize(n, Vec::new());
    let mut typespaces = inst.typespaces.clone();
    for (agent, list) in lists.iter().enumerate() {
        let base = &inst.typespaces[agent];
        let labels: Vec<String> = (0..base.len()).map(|t| base.label(t)).collect();
        let space = &mut typespaces[agent];
        space.labels = Some(labels);
        for (index, h) in list.iter().enumerate() {
            if h.agent != agent {
                return Err(AugmentError::Agent(agent));
            }
            h.validate(base)?;
            let v = h.vector(base);
            if space.position(&v).is_some() {
                return Err(AugmentError::Duplicate { agent, index });
            }
            space.types.push(v);
            space
                .labels
                .as_mut()
                .expect("set above")
                .push(format!("w{index}"));
        }
    }
    let profiles = ProfileSpace::new(typespaces.iter().map(AgentTypeSpace::len).collect());
    let base_space = inst.profiles();
    let mut fixed = Vec::with_capacity(profiles.len());
    let mut unknown = Vec::new();
    for (idx, profile) in profiles.iter().enumerate() {
        match base_space.try_index(&profile) {
            Some(b) => fixed.push(Some(inst.dist(b).clone())),
            None => {
                fixed.push(None);
                unknown.push(idx);
            }
        }
    }
    Ok(AugmentedInstance {
        base: inst.clone(),
        witnesses: lists,
        typespaces,
        profiles,
        fixed,
        unknown,
    })
}

impl AugmentedInstance {
    pub fn agents(&self) -> usize {
        self.typespaces.len()
    }

    /// The augmented instance with `fill[k]` on unknown profile `k`.
    pub fn instance(&self, fill: &[AllocationDistribution]) -> MechanismInstance {
        let mut next = fill.iter();
        let entries = self
            .fixed
            .iter()
            .map(|d| {
                d.clone()
                    .unwrap_or_else(|| next.next().expect("one entry per unknown profile").clone())
            })
            .collect();
        MechanismInstance {
            m: self.base.m,
            typespaces: self.typespaces.clone(),
            feasible: self.base.feasible.clone(),
            allocation: AllocationRule { entries },
            payments: None,
        }
    }

    pub fn deterministic_instance(&self, assignment: &[usize]) -> MechanismInstance {
        let fill: Vec<AllocationDistribution> = assignment
            .iter()
            .map(|f| AllocationDistribution::point(*f))
            .collect();
        self.instance(&fill)
    }

    pub fn profile_label(&self, idx: usize) -> String {
        let p = self.profiles.profile(idx);
        let parts: Vec<String> = p
            .iter()
            .enumerate()
            .map(|(i, t)| self.typespaces[i].label(*t))
            .collect();
        format!("({})", parts.join(","))
    }

    /// Every (agent, opponent profile) pair in canonical order.
    fn columns(&self) -> Vec<(usize, Vec<usize>)> {
        (0..self.agents())
            .flat_map(|i| {
                self.profiles
                    .opponents(i)
                    .iter()
                    .map(move |o| (i, o))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    fn unknown_position(&self, idx: usize) -> Option<usize> {
        self.unknown.binary_search(&idx).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    #[error("{required} deterministic assignments exceed the cap of {cap}")]
    CapExceeded { required: u64, cap: u64 },
}

pub const DEFAULT_CAP: u64 = 1 << 20;

/// Result of the exhaustive search. Assignment `i` gives unknown profile `k`
/// the member `digit k of i` in base `|F|`, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetEnumeration {
    pub unknown: Vec<usize>,
    pub feasible: usize,
    pub count: u64,
    pub passing: Vec<Vec<usize>>,
    /// Distinct rejection certificates.
    pub certificates: Vec<NegativeCycleCert>,
    /// Per assignment, the certificate that rejects it.
    pub verdicts: Vec<Option<u32>>,
}

impl DetEnumeration {
    pub fn assignment(&self, mut i: u64) -> Vec<usize> {
        let base = self.feasible as u64;
        let mut out = vec![0; self.unknown.len()];
        for slot in out.iter_mut().rev() {
            *slot = (i % base) as usize;
            i /= base;
        }
        out
    }

    pub fn rejections(&self) -> impl Iterator<Item = (Vec<usize>, &NegativeCycleCert)> + '_ {
        self.verdicts.iter().enumerate().filter_map(|(i, v)| {
            v.map(|c| (self.assignment(i as u64), &self.certificates[c as usize]))
        })
    }
}

/// One column's verdicts for every choice of members on its unknown profiles.
struct ColumnTable {
    /// Positions in `unknown` read by this column, most significant first.
    positions: Vec<usize>,
    verdicts: Vec<Option<NegativeCycleCert>>,
}

fn column_values_with(
    aug: &AugmentedInstance,
    agent: usize,
    opp: &[usize],
    pick: impl Fn(usize) -> Option<usize>,
) -> Vec<Vec<Rational>> {
    let types = &aug.typespaces[agent].types;
    let fs = &aug.base.feasible;
    (0..types.len())
        .map(|a| {
            let idx = aug.profiles.join(agent, a, opp);
            let block = match (&aug.fixed[idx], pick(idx)) {
                (Some(d), _) => d.expected_block(fs, agent),
                (None, Some(f)) => fs.block(f, agent).to_vec(),
                (None, None) => unreachable!("unknown profile without a member"),
            };
            types.iter().map(|t| dot(&t.0, &block)).collect()
        })
        .collect()
}

pub fn enumerate_deterministic_extensions(
    aug: &AugmentedInstance,
    cap: u64,
) -> Result<DetEnumeration, EnumerationError> {
    let nf = aug.base.feasible.len();
    let u = aug.unknown.len();
    let count = (nf as u64).checked_pow(u as u32).unwrap_or(u64::MAX);
    if count > cap {
        return Err(EnumerationError::CapExceeded {
            required: count,
            cap,
        });
    }

    let tables: Vec<ColumnTable> = aug
        .columns()
        .into_par_iter()
        .map(|(agent, opp)| {
            let positions: Vec<usize> = (0..aug.typespaces[agent].len())
                .filter_map(|a| aug.unknown_position(aug.profiles.join(agent, a, &opp)))
                .collect();
            let size = nf.pow(positions.len() as u32);
            let verdicts = (0..size)
                .into_par_iter()
                .map(|code| {
                    let mut digits = vec![0; positions.len()];
                    let mut c = code;
                    for d in digits.iter_mut().rev() {
                        *d = c % nf;
                        c /= nf;
                    }
                    let values = column_values_with(aug, agent, &opp, |idx| {
                        let k = aug.unknown_position(idx)?;
                        positions.iter().position(|p| *p == k).map(|s| digits[s])
                    });
                    cycle_in_values(agent, &opp, &values)
                })
                .collect();
            ColumnTable {
                positions,
                verdicts,
            }
        })
        .collect();

    // Number the certificates in column order.
    let mut certificates = Vec::new();
    let ids: Vec<Vec<Option<u32>>> = tables
        .iter()
        .map(|t| {
            t.verdicts
                .iter()
                .map(|v| {
                    v.as_ref().map(|c| {
                        certificates.push(c.clone());
                        (certificates.len() - 1) as u32
                    })
                })
                .collect()
        })
        .collect();

    let verdicts: Vec<Option<u32>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut digits = vec![0; u];
            let mut c = i as usize;
            for d in digits.iter_mut().rev() {
                *d = c % nf;
                c /= nf;
            }
            tables.iter().zip(&ids).find_map(|(t, ids)| {
                let code = t.positions.iter().fold(0, |acc, p| acc * nf + digits[*p]);
                ids[code]
            })
        })
        .collect();
    let mut result = DetEnumeration {
        unknown: aug.unknown.clone(),
        feasible: nf,
        count,
        passing: Vec::new(),
        certificates,
        verdicts,
    };
    result.passing = (0..count)
        .filter(|i| result.verdicts[*i as usize].is_none())
        .map(|i| result.assignment(i))
        .collect();
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowMeta {
    /// Weights on the unknown profile sum to one.
    Simplex { profile: Vec<usize> },
    /// Reporting `report` must not beat `true_type` for `agent`.
    Dsic {
        agent: usize,
        opponents: Vec<usize>,
        true_type: usize,
        report: usize,
    },
}

#[derive(Debug, Clone)]
pub struct ExtensionLp {
    pub lp: LinearProgram,
    pub rows: Vec<RowMeta>,
    /// `weights[k][f]` for unknown profile `k`.
    pub weights: Vec<Vec<VarId>>,
    /// `payments[profile][agent]`.
    pub payments: Vec<Vec<VarId>>,
}

/// Feasibility LP over lotteries on the unknown profiles and free payments
/// on every profile.
pub fn randomized_extension_lp(aug: &AugmentedInstance) -> ExtensionLp {
    let fs = &aug.base.feasible;
    let n = aug.agents();
    let mut lp = LinearProgram::new(Sense::Max);
    let label = |idx: usize| aug.profile_label(idx);
    let weights: Vec<Vec<VarId>> = aug
        .unknown
        .iter()
        .map(|idx| {
            (0..fs.len())
                .map(|f| lp.nonneg(format!("q[{},f{f}]", label(*idx))))
                .collect()
        })
        .collect();
    let payments: Vec<Vec<VarId>> = (0..aug.profiles.len())
        .map(|idx| {
            (0..n)
                .map(|i| lp.free(format!("p[{i},{}]", label(idx))))
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for (k, idx) in aug.unknown.iter().enumerate() {
        lp.add_constraint(
            format!("simplex[{}]", label(*idx)),
            weights[k].iter().map(|v| (*v, Rational::one())),
            Relation::Eq,
            Rational::one(),
        );
        rows.push(RowMeta::Simplex {
            profile: aug.profiles.profile(*idx),
        });
    }
    // Value of `t` at profile `idx` for `agent`: a constant plus weight terms.
    let value = |agent: usize, t: &[Rational], idx: usize| -> (Rational, Vec<(VarId, Rational)>) {
        match &aug.fixed[idx] {
            Some(d) => (d.value(fs, agent, t), Vec::new()),
            None => {
                let k = aug.unknown_position(idx).expect("unknown profile");
                let terms = (0..fs.len())
                    .map(|f| (weights[k][f], dot(t, fs.block(f, agent))))
                    .collect();
                (Rational::zero(), terms)
            }
        }
    };
    for (agent, opp) in aug.columns() {
        let space = &aug.typespaces[agent];
        let opp_label: Vec<String> = opp
            .iter()
            .enumerate()
            .map(|(j, o)| aug.typespaces[if j < agent { j } else { j + 1 }].label(*o))
            .collect();
        for t in 0..space.len() {
            let tv = &space.types[t].0;
            let honest = aug.profiles.join(agent, t, &opp);
            let (c_honest, own) = value(agent, tv, honest);
            for s in (0..space.len()).filter(|s| *s != t) {
                let lie = aug.profiles.join(agent, s, &opp);
                let (c_lie, other) = value(agent, tv, lie);
                let terms = own
                    .iter()
                    .cloned()
                    .chain(other.into_iter().map(|(v, c)| (v, -c)))
                    .chain([
                        (payments[honest][agent], -Rational::one()),
                        (payments[lie][agent], Rational::one()),
                    ]);
                lp.add_constraint(
                    format!(
                        "dsic[{agent},({}),{},{}]",
                        opp_label.join(","),
                        space.label(t),
                        space.label(s)
                    ),
                    terms,
                    Relation::Ge,
                    c_lie - &c_honest,
                );
                rows.push(RowMeta::Dsic {
                    agent,
                    opponents: opp.clone(),
                    true_type: t,
                    report: s,
                });
            }
        }
    }
    ExtensionLp {
        lp,
        rows,
        weights,
        payments,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ExtensionVerdict {
    Extendable {
        /// One lottery per unknown profile.
        distributions: Vec<AllocationDistribution>,
        payments: PaymentRule,
    },
    NotExtendable {
        farkas: Vec<Rational>,
    },
}

impl ExtensionVerdict {
    pub fn is_extendable(&self) -> bool {
        matches!(self, ExtensionVerdict::Extendable { .. })
    }
}

/// Shifts each (agent, column) of payments so that its minimum is zero.
fn shift_payments(aug: &AugmentedInstance, raw: &[Vec<Rational>]) -> PaymentRule {
    let mut entries = raw.to_vec();
    for (agent, opp) in aug.columns() {
        let idxs: Vec<usize> = (0..aug.typespaces[agent].len())
            .map(|t| aug.profiles.join(agent, t, &opp))
            .collect();
        let min = Rational::min_of(idxs.iter().map(|i| &raw[*i][agent])).expect("nonempty column");
        for i in idxs {
            entries[i][agent] = &raw[i][agent] - &min;
        }
    }
    PaymentRule { entries }
}

pub fn check_randomized_extension(
    aug: &AugmentedInstance,
) -> Result<(ExtensionLp, ExtensionVerdict), LpError> {
    let ext = randomized_extension_lp(aug);
    let simplex_rows = |i: usize| matches!(ext.rows[i], RowMeta::Simplex { .. });
    let verdict = match ratlp::solve_lazy(&ext.lp, simplex_rows)? {
        LpOutcome::Infeasible { farkas } => ExtensionVerdict::NotExtendable { farkas },
        LpOutcome::Optimal { assignment, .. } => {
            let distributions = ext
                .weights
                .iter()
                .map(|ws| {
                    AllocationDistribution::from_weights(
                        ws.iter()
                            .enumerate()
                            .map(|(f, v)| (f, assignment[v.0].clone()))
                            .filter(|(_, w)| !w.is_zero()),
                    )
                })
                .collect();
            let raw: Vec<Vec<Rational>> = ext
                .payments
                .iter()
                .map(|ps| ps.iter().map(|v| assignment[v.0].clone()).collect())
                .collect();
            ExtensionVerdict::Extendable {
                distributions,
                payments: shift_payments(aug, &raw),
            }
        }
        LpOutcome::Unbounded { .. } => unreachable!("feasibility LP has a zero objective"),
    };
    Ok((ext, verdict))
}

/// Re-checks an `Extendable` verdict with the exhaustive DSIC scan.
pub fn verify_extendable(aug: &AugmentedInstance, verdict: &ExtensionVerdict) -> bool {
    match verdict {
        ExtensionVerdict::Extendable {
            distributions,
            payments,
        } => {
            let inst = aug.instance(distributions);
            crate::model::validate_instance(&inst).is_ok() && verify_dsic(&inst, payments).is_ok()
        }
        ExtensionVerdict::NotExtendable { .. } => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessFixture {
    Det,
    Rand,
}

/// The barycenter of A, B and D (or their primed versions) for agent 0, or
/// for agent 1 when `symmetric` is set.
pub fn default_witness(fixture: WitnessFixture, symmetric: bool) -> Vec<Vec<HullPoint>> {
    let len = match fixture {
        WitnessFixture::Det => 4,
        WitnessFixture::Rand => 8,
    };
    let third = Rational::new(1, 3);
    let mut c = vec![Rational::zero(); len];
    for j in [0, 1, 3] {
        c[j] = third.clone();
    }
    let agent = usize::from(symmetric);
    let mut out = vec![Vec::new(), Vec::new()];
    out[agent].push(HullPoint::new(agent, c));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_det_fixture, build_rand_fixture};
    use crate::model::{FeasibleSet, JointAllocation, TypeVector};
    use crate::rational::{q, qi};

    #[test]
    fn det_augmentation_shape() {
        let det = build_det_fixture();
        let aug = augment(&det, &default_witness(WitnessFixture::Det, false)).unwrap();
        assert_eq!(aug.profiles.sizes(), &[5, 4]);
        assert_eq!(aug.unknown.len(), 4);
        assert_eq!(
            aug.typespaces[0].types[4].0,
            vec![q(4, 9), q(4, 9), q(1, 9)]
        );
        assert_eq!(aug.typespaces[0].label(4), "w0");
        let sym = augment(&det, &default_witness(WitnessFixture::Det, true)).unwrap();
        assert_eq!(sym.profiles.sizes(), &[4, 5]);
    }

    #[test]
    fn rand_augmentation_shape() {
        let rand = build_rand_fixture();
        let aug = augment(&rand, &default_witness(WitnessFixture::Rand, false)).unwrap();
        assert_eq!(aug.profiles.sizes(), &[9, 8]);
        assert_eq!(aug.unknown.len(), 8);
        let ext = randomized_extension_lp(&aug);
        assert_eq!(ext.payments.len() * 2, 144);
        assert_eq!(
            ext.rows
                .iter()
                .filter(|r| matches!(r, RowMeta::Simplex { .. }))
                .count(),
            8
        );
        assert_eq!(ext.rows.len(), 8 + 8 * 9 * 8 + 9 * 8 * 7);
        assert_eq!(
            ext.weights.iter().map(Vec::len).sum::<usize>(),
            8 * rand.feasible.len()
        );
    }

    #[test]
    fn empty_witness_list_is_the_base() {
        let det = build_det_fixture();
        let aug = augment(&det, &[]).unwrap();
        assert!(aug.unknown.is_empty());
        assert_eq!(aug.instance(&[]).allocation, det.allocation);
        let (ext, verdict) = check_randomized_extension(&aug).unwrap();
        assert_eq!(ext.lp.num_vars(), 32);
        assert!(verify_extendable(&aug, &verdict));
        let e = enumerate_deterministic_extensions(&aug, DEFAULT_CAP).unwrap();
        assert_eq!((e.count, e.passing.len()), (1, 1));
    }

    #[test]
    fn duplicate_witness_is_rejected() {
        let det = build_det_fixture();
        let w = vec![vec![HullPoint::new(0, vec![qi(0), qi(1), qi(0), qi(0)])]];
        assert_eq!(
            augment(&det, &w).unwrap_err(),
            AugmentError::Duplicate { agent: 0, index: 0 }
        );
    }

    #[test]
    fn cap_is_enforced() {
        let det = build_det_fixture();
        let aug = augment(&det, &default_witness(WitnessFixture::Det, false)).unwrap();
        assert_eq!(
            enumerate_deterministic_extensions(&aug, 1).unwrap_err(),
            EnumerationError::CapExceeded {
                required: 65536,
                cap: 1
            }
        );
    }

    #[test]
    fn single_type_base_extends() {
        // one agent, types [1] and [3]; F = {0, 1, 2}
        let fs = FeasibleSet::dedup(
            1,
            1,
            [0, 1, 2].iter().map(|x| JointAllocation(vec![qi(*x)])),
        );
        let inst = MechanismInstance {
            m: 1,
            typespaces: vec![AgentTypeSpace::new(vec![
                TypeVector(vec![qi(1)]),
                TypeVector(vec![qi(3)]),
            ])],
            feasible: fs,
            allocation: AllocationRule {
                entries: vec![
                    AllocationDistribution::point(1),
                    AllocationDistribution::point(2),
                ],
            },
            payments: None,
        };
        let aug = augment(&inst, &[vec![HullPoint::new(0, vec![q(1, 2), q(1, 2)])]]).unwrap();
        let e = enumerate_deterministic_extensions(&aug, DEFAULT_CAP).unwrap();
        // the witness [2] may take 1 or 2 but not 0
        assert_eq!(e.passing, vec![vec![1], vec![2]]);
        let (_, v) = check_randomized_extension(&aug).unwrap();
        assert!(verify_extendable(&aug, &v));
    }
}
