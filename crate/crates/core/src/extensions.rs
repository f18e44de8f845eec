//! Extensions of a mechanism from finite type spaces to their convex hulls.
//!
//! Two constructions are provided. [`ZeroExtension`] needs a feasible set
//! that contains the all-zero allocation and is closed under zeroing all but
//! one agent's block. [`SsfExtension`] needs a single-swap system (see
//! [`detect_ssf`]). Both answer queries in which every agent either reports
//! an original type or a point of the hull given by convex coefficients.

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::incentives::{verify_dsic, verify_ir, DsicViolation, IrViolation};
use crate::model::{
    is_zero_substitutable, AgentTypeSpace, AllocationDistribution, AllocationRule, FeasibleSet,
    JointAllocation, MechanismInstance, PaymentRule, TypeVector, ZeroSubstitution,
};
use crate::rational::{dot, Rational};
use crate::ratlp::{self, LinearProgram, LpOutcome, Relation, Sense, VarId};

/// Convex combination of one agent's original types.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HullPoint {
    pub agent: usize,
    pub coefficients: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HullPointError {
    #[error("agent {agent}: expected {expected} coefficients, found {found}")]
    Length {
        agent: usize,
        expected: usize,
        found: usize,
    },
    #[error("agent {agent}: negative coefficient at {index}")]
    Negative { agent: usize, index: usize },
    #[error("agent {agent}: coefficients sum to {sum}, not 1")]
    Sum { agent: usize, sum: Rational },
}

impl HullPoint {
    pub fn new(agent: usize, coefficients: Vec<Rational>) -> Self {
        HullPoint {
            agent,
            coefficients,
        }
    }

    pub fn validate(&self, space: &AgentTypeSpace) -> Result<(), HullPointError> {
        let agent = self.agent;
        if self.coefficients.len() != space.len() {
            return Err(HullPointError::Length {
                agent,
                expected: space.len(),
                found: self.coefficients.len(),
            });
        }
        if let Some(index) = self.coefficients.iter().position(Rational::is_negative) {
            return Err(HullPointError::Negative { agent, index });
        }
        let sum: Rational = self.coefficients.iter().sum();
        if sum != Rational::from_integer(1) {
            return Err(HullPointError::Sum { agent, sum });
        }
        Ok(())
    }

    pub fn vector(&self, space: &AgentTypeSpace) -> TypeVector {
        let m = space.types.first().map_or(0, TypeVector::dim);
        let mut v = vec![Rational::zero(); m];
        for (l, t) in self.coefficients.iter().zip(&space.types) {
            if l.is_zero() {
                continue;
            }
            for (acc, x) in v.iter_mut().zip(&t.0) {
                *acc += l * x;
            }
        }
        TypeVector(v)
    }
}

/// One agent's entry in a query or witness file: an original type index or
/// hull coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QueryEntry {
    Original(usize),
    Hull { hull: Vec<Rational> },
}

pub type QueryProfile = Vec<QueryEntry>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotInHull {
    /// Farkas multipliers for [`hull_lp`]: first the `Σλ = 1` row, then one
    /// row per coordinate.
    pub farkas: Vec<Rational>,
}

/// Feasibility LP `λ ≥ 0, Σλ = 1, Σ λ_j t_j = point`.
pub fn hull_lp(point: &TypeVector, space: &AgentTypeSpace) -> LinearProgram {
    let mut lp = LinearProgram::new(Sense::Max);
    let lambda: Vec<VarId> = (0..space.len())
        .map(|j| lp.nonneg(format!("l{j}")))
        .collect();
    lp.add_constraint(
        "sum",
        lambda.iter().map(|v| (*v, Rational::from_integer(1))),
        Relation::Eq,
        Rational::from_integer(1),
    );
    for (k, target) in point.0.iter().enumerate() {
        lp.add_constraint(
            format!("coord{k}"),
            lambda
                .iter()
                .zip(&space.types)
                .map(|(v, t)| (*v, t.0[k].clone())),
            Relation::Eq,
            target.clone(),
        );
    }
    lp
}

pub fn hull_membership(
    point: &TypeVector,
    space: &AgentTypeSpace,
    agent: usize,
) -> Result<HullPoint, NotInHull> {
    if let Some(t) = space.position(point) {
        let mut coefficients = vec![Rational::zero(); space.len()];
        coefficients[t] = Rational::from_integer(1);
        return Ok(HullPoint {
            agent,
            coefficients,
        });
    }
    let lp = hull_lp(point, space);
    match ratlp::solve(&lp).expect("hull LP is well formed") {
        LpOutcome::Optimal { assignment, .. } => Ok(HullPoint {
            agent,
            coefficients: assignment,
        }),
        LpOutcome::Infeasible { farkas } => Err(NotInHull { farkas }),
        LpOutcome::Unbounded { .. } => unreachable!("feasibility LP has a zero objective"),
    }
}

/// Per agent, the index in `F` of the allocation whose block that agent may
/// swap for its block in any other member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapSystem {
    pub swaps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("no single-swap allocation for agent {agent}")]
pub struct NoSwap {
    pub agent: usize,
}

fn swaps_for(fs: &FeasibleSet, y: usize, agent: usize) -> bool {
    let base = fs.get(y);
    fs.allocations()
        .iter()
        .all(|z| fs.contains(&base.with_block(agent, fs.m, z.block(agent, fs.m))))
}

/// The all-zero allocation is tried first when present, then members in
/// index order.
pub fn detect_ssf(fs: &FeasibleSet) -> Result<SwapSystem, NoSwap> {
    let zero = fs.zero_index();
    let order: Vec<usize> = zero
        .into_iter()
        .chain((0..fs.len()).filter(|f| Some(*f) != zero))
        .collect();
    let mut swaps = Vec::with_capacity(fs.agents);
    for agent in 0..fs.agents {
        match order.iter().find(|&&y| swaps_for(fs, y, agent)) {
            Some(&y) => swaps.push(y),
            None => return Err(NoSwap { agent }),
        }
    }
    Ok(SwapSystem { swaps })
}

impl SwapSystem {
    pub fn verify(&self, fs: &FeasibleSet) -> bool {
        self.swaps.len() == fs.agents
            && self
                .swaps
                .iter()
                .enumerate()
                .all(|(i, &y)| y < fs.len() && swaps_for(fs, y, i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error("feasible set is not zero-substitutable: {0:?}")]
    NotZeroSubstitutable(ZeroSubstitution),
    #[error(transparent)]
    NoSwap(#[from] NoSwap),
    #[error("mechanism is not DSIC on the original types: agent {} gains {}", .0.agent, .0.gain)]
    NotDsic(DsicViolation),
    #[error("mechanism is not IR on the original types: agent {} utility {}", .0.agent, .0.utility)]
    NotIr(IrViolation),
    #[error("query has {found} entries for {expected} agents")]
    QueryArity { expected: usize, found: usize },
    #[error("agent {agent}: type index {index} out of range")]
    TypeIndex { agent: usize, index: usize },
    #[error(transparent)]
    HullPoint(#[from] HullPointError),
    #[error("payment rule has the wrong shape")]
    PaymentShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionOutcome {
    pub dist: AllocationDistribution,
    pub payments: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pick {
    ArgMax,
    #[cfg(test)]
    ArgMin,
}

/// A query entry resolved against the type space.
#[derive(Debug, Clone)]
enum Resolved {
    Original(usize),
    New(TypeVector),
}

struct Base<'a> {
    inst: &'a MechanismInstance,
    payments: &'a PaymentRule,
    pick: Pick,
}

impl<'a> Base<'a> {
    fn new(inst: &'a MechanismInstance, payments: &'a PaymentRule) -> Result<Self, ExtensionError> {
        let profiles = inst.profiles().len();
        if payments.entries.len() != profiles
            || payments.entries.iter().any(|p| p.len() != inst.agents())
        {
            return Err(ExtensionError::PaymentShape);
        }
        verify_dsic(inst, payments).map_err(ExtensionError::NotDsic)?;
        Ok(Base {
            inst,
            payments,
            pick: Pick::ArgMax,
        })
    }

    fn resolve(&self, q: &[QueryEntry]) -> Result<Vec<Resolved>, ExtensionError> {
        let n = self.inst.agents();
        if q.len() != n {
            return Err(ExtensionError::QueryArity {
                expected: n,
                found: q.len(),
            });
        }
        q.iter()
            .enumerate()
            .map(|(agent, e)| {
                let space = &self.inst.typespaces[agent];
                match e {
                    QueryEntry::Original(t) if *t < space.len() => Ok(Resolved::Original(*t)),
                    QueryEntry::Original(t) => Err(ExtensionError::TypeIndex { agent, index: *t }),
                    QueryEntry::Hull { hull } => {
                        let h = HullPoint::new(agent, hull.clone());
                        h.validate(space)?;
                        let v = h.vector(space);
                        Ok(match space.position(&v) {
                            Some(t) => Resolved::Original(t),
                            None => Resolved::New(v),
                        })
                    }
                }
            })
            .collect()
    }

    /// Original outcome when every entry is original.
    fn original(&self, r: &[Resolved]) -> Option<ExtensionOutcome> {
        let profile: Option<Vec<usize>> = r
            .iter()
            .map(|e| {
                if let Resolved::Original(t) = e {
                    Some(*t)
                } else {
                    None
                }
            })
            .collect();
        let idx = self.inst.profiles().index(&profile?);
        Some(ExtensionOutcome {
            dist: self.inst.dist(idx).clone(),
            payments: self.payments.entries[idx].clone(),
        })
    }

    /// The best original report for `valuation` against fixed opponents,
    /// lowest index on ties, with its utility and profile index.
    fn best_report(
        &self,
        agent: usize,
        valuation: &TypeVector,
        r: &[Resolved],
    ) -> (usize, Rational) {
        let space = self.inst.profiles();
        let opponents: Vec<usize> = r
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != agent)
            .map(|(_, e)| match e {
                Resolved::Original(t) => *t,
                Resolved::New(_) => unreachable!("only one new agent"),
            })
            .collect();
        let mut best: Option<(usize, Rational)> = None;
        for s in 0..self.inst.typespaces[agent].len() {
            let idx = space.join(agent, s, &opponents);
            let u = self
                .inst
                .dist(idx)
                .value(&self.inst.feasible, agent, &valuation.0)
                - self.payments.get(idx, agent);
            let better = match (&best, self.pick) {
                (None, _) => true,
                (Some((_, b)), Pick::ArgMax) => u > *b,
                #[cfg(test)]
                (Some((_, b)), Pick::ArgMin) => u < *b,
            };
            if better {
                best = Some((idx, u));
            }
        }
        best.expect("nonempty type space")
    }
}

fn single_new(r: &[Resolved]) -> Option<(usize, &TypeVector)> {
    let mut it = r.iter().enumerate().filter_map(|(i, e)| match e {
        Resolved::New(v) => Some((i, v)),
        Resolved::Original(_) => None,
    });
    let first = it.next()?;
    it.next().is_none().then_some(first)
}

fn new_agents(r: &[Resolved]) -> Vec<usize> {
    r.iter()
        .enumerate()
        .filter(|(_, e)| matches!(e, Resolved::New(_)))
        .map(|(i, _)| i)
        .collect()
}

/// Extension through the all-zero allocation.
pub struct ZeroExtension<'a> {
    base: Base<'a>,
    zero: usize,
}

impl<'a> ZeroExtension<'a> {
    /// Checks zero-substitutability, DSIC and IR once.
    pub fn new(
        inst: &'a MechanismInstance,
        payments: &'a PaymentRule,
    ) -> Result<Self, ExtensionError> {
        is_zero_substitutable(&inst.feasible).map_err(ExtensionError::NotZeroSubstitutable)?;
        let base = Base::new(inst, payments)?;
        verify_ir(inst, payments).map_err(ExtensionError::NotIr)?;
        let zero = inst.feasible.zero_index().expect("checked above");
        Ok(ZeroExtension { base, zero })
    }

    pub fn query(&self, q: &[QueryEntry]) -> Result<ExtensionOutcome, ExtensionError> {
        let r = self.base.resolve(q)?;
        if let Some(out) = self.base.original(&r) {
            return Ok(out);
        }
        let inst = self.base.inst;
        let n = inst.agents();
        let nothing = ExtensionOutcome {
            dist: AllocationDistribution::point(self.zero),
            payments: vec![Rational::zero(); n],
        };
        let Some((agent, v)) = single_new(&r) else {
            return Ok(nothing);
        };
        let (idx, utility) = self.base.best_report(agent, v, &r);
        if utility.is_negative() {
            return Ok(nothing);
        }
        let fs = &inst.feasible;
        let zero = JointAllocation::zeros(fs.m * n);
        let dist =
            AllocationDistribution::from_weights(inst.dist(idx).entries().iter().map(|(f, w)| {
                let projected = zero.with_block(agent, fs.m, fs.block(*f, agent));
                (
                    fs.index_of(&projected).expect("zero-substitutable"),
                    w.clone(),
                )
            }));
        let mut payments = vec![Rational::zero(); n];
        payments[agent] = self.base.payments.get(idx, agent).clone();
        Ok(ExtensionOutcome { dist, payments })
    }
}

/// Extension through a single-swap system.
pub struct SsfExtension<'a> {
    base: Base<'a>,
    swaps: SwapSystem,
}

impl<'a> SsfExtension<'a> {
    pub fn new(
        inst: &'a MechanismInstance,
        payments: &'a PaymentRule,
    ) -> Result<Self, ExtensionError> {
        let swaps = detect_ssf(&inst.feasible)?;
        let base = Base::new(inst, payments)?;
        Ok(SsfExtension { base, swaps })
    }

    pub fn swaps(&self) -> &SwapSystem {
        &self.swaps
    }

    pub fn query(&self, q: &[QueryEntry]) -> Result<ExtensionOutcome, ExtensionError> {
        let r = self.base.resolve(q)?;
        if let Some(out) = self.base.original(&r) {
            return Ok(out);
        }
        let inst = self.base.inst;
        let fs = &inst.feasible;
        let n = inst.agents();
        let mut payments = vec![Rational::zero(); n];
        if let Some((agent, v)) = single_new(&r) {
            let (idx, _) = self.base.best_report(agent, v, &r);
            let swap = fs.get(self.swaps.swaps[agent]);
            let dist = AllocationDistribution::from_weights(inst.dist(idx).entries().iter().map(
                |(f, w)| {
                    let swapped = swap.with_block(agent, fs.m, fs.block(*f, agent));
                    (
                        fs.index_of(&swapped).expect("single-swap property"),
                        w.clone(),
                    )
                },
            ));
            payments[agent] = self.base.payments.get(idx, agent).clone();
            return Ok(ExtensionOutcome { dist, payments });
        }
        let new = new_agents(&r);
        let (j, k) = (new[0], new[1]);
        let swapped =
            fs.get(self.swaps.swaps[j])
                .with_block(j, fs.m, fs.block(self.swaps.swaps[k], j));
        let f = fs.index_of(&swapped).expect("single-swap property");
        Ok(ExtensionOutcome {
            dist: AllocationDistribution::point(f),
            payments,
        })
    }
}

pub fn extend_zero(
    inst: &MechanismInstance,
    payments: &PaymentRule,
    q: &[QueryEntry],
) -> Result<ExtensionOutcome, ExtensionError> {
    ZeroExtension::new(inst, payments)?.query(q)
}

pub fn extend_ssf(
    inst: &MechanismInstance,
    payments: &PaymentRule,
    q: &[QueryEntry],
) -> Result<ExtensionOutcome, ExtensionError> {
    SsfExtension::new(inst, payments)?.query(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Zero,
    Ssf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpotCheck {
    Ok {
        types_per_agent: Vec<usize>,
    },
    Dsic {
        instance_types: Vec<usize>,
        violation: DsicViolation,
    },
    Ir {
        instance_types: Vec<usize>,
        violation: IrViolation,
    },
}

impl SpotCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, SpotCheck::Ok { .. })
    }
}

/// The instance on `T ∪ witnesses` whose outcomes come from `answer`, with
/// its payment rule. Witnesses that coincide with an original type or an
/// earlier witness are skipped.
pub fn materialize(
    inst: &MechanismInstance,
    witnesses: &[Vec<HullPoint>],
    answer: impl Fn(&[QueryEntry]) -> Result<ExtensionOutcome, ExtensionError>,
) -> Result<(MechanismInstance, PaymentRule), ExtensionError> {
    let n = inst.agents();
    let mut typespaces = inst.typespaces.clone();
    let mut entries_per_agent: Vec<Vec<QueryEntry>> = inst
        .typespaces
        .iter()
        .map(|s| (0..s.len()).map(QueryEntry::Original).collect())
        .collect();
    for (agent, list) in witnesses.iter().enumerate().take(n) {
        let mut added = 0;
        for h in list {
            h.validate(&inst.typespaces[agent])?;
            let v = h.vector(&inst.typespaces[agent]);
            if typespaces[agent].position(&v).is_none() {
                typespaces[agent].types.push(v);
                if let Some(labels) = typespaces[agent].labels.as_mut() {
                    labels.push(format!("w{added}"));
                }
                added += 1;
                entries_per_agent[agent].push(QueryEntry::Hull {
                    hull: h.coefficients.clone(),
                });
            }
        }
    }
    let mut aug = MechanismInstance {
        m: inst.m,
        typespaces,
        feasible: inst.feasible.clone(),
        allocation: AllocationRule {
            entries: Vec::new(),
        },
        payments: None,
    };
    let space = aug.profiles();
    let mut allocation = Vec::with_capacity(space.len());
    let mut pay = Vec::with_capacity(space.len());
    for profile in space.iter() {
        let q: Vec<QueryEntry> = profile
            .iter()
            .enumerate()
            .map(|(i, t)| entries_per_agent[i][*t].clone())
            .collect();
        let out = answer(&q)?;
        allocation.push(out.dist);
        pay.push(out.payments);
    }
    aug.allocation = AllocationRule {
        entries: allocation,
    };
    let payments = PaymentRule { entries: pay };
    aug.payments = Some(payments.clone());
    Ok((aug, payments))
}

/// Runs the construction on `T ∪ witnesses` and checks DSIC (and IR for the
/// zero method) on the resulting finite instance.
pub fn spot_check_extension(
    inst: &MechanismInstance,
    payments: &PaymentRule,
    method: Method,
    witnesses: &[Vec<HullPoint>],
) -> Result<SpotCheck, ExtensionError> {
    let (aug, aug_pay) = match method {
        Method::Zero => {
            let ext = ZeroExtension::new(inst, payments)?;
            materialize(inst, witnesses, |q| ext.query(q))?
        }
        Method::Ssf => {
            let ext = SsfExtension::new(inst, payments)?;
            materialize(inst, witnesses, |q| ext.query(q))?
        }
    };
    let sizes: Vec<usize> = aug.typespaces.iter().map(AgentTypeSpace::len).collect();
    if let Err(violation) = verify_dsic(&aug, &aug_pay) {
        return Ok(SpotCheck::Dsic {
            instance_types: sizes,
            violation,
        });
    }
    if method == Method::Zero {
        if let Err(violation) = verify_ir(&aug, &aug_pay) {
            return Ok(SpotCheck::Ir {
                instance_types: sizes,
                violation,
            });
        }
    }
    Ok(SpotCheck::Ok {
        types_per_agent: sizes,
    })
}

/// Random convex combinations with common denominator at most 64, followed
/// by the midpoints of every pair of types.
pub fn sample_witnesses<R: Rng>(
    space: &AgentTypeSpace,
    agent: usize,
    random: usize,
    rng: &mut R,
) -> Vec<HullPoint> {
    let k = space.len();
    let mut out = Vec::with_capacity(random + k * k.saturating_sub(1) / 2);
    for _ in 0..random {
        let denom = rng.gen_range(1..=64u32);
        let mut counts = vec![0i64; k];
        for _ in 0..denom {
            counts[rng.gen_range(0..k)] += 1;
        }
        out.push(HullPoint::new(
            agent,
            counts
                .iter()
                .map(|c| Rational::new(*c, denom as i64))
                .collect(),
        ));
    }
    let half = Rational::new(1, 2);
    for a in 0..k {
        for b in a + 1..k {
            let mut c = vec![Rational::zero(); k];
            c[a] = half.clone();
            c[b] = half.clone();
            out.push(HullPoint::new(agent, c));
        }
    }
    out
}

/// Value of `valuation` for agent `agent`'s block of member `f`.
pub fn block_value(fs: &FeasibleSet, f: usize, agent: usize, valuation: &TypeVector) -> Rational {
    dot(&valuation.0, fs.block(f, agent))
}
