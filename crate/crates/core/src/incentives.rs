//! Weak and cyclic monotonicity, payment synthesis, DSIC/IR verification and
//! payment-lock bounds.
//!
//! Each agent is analysed one opponent column at a time: fixing the reports
//! of everyone else, the agent faces a menu indexed by its own report. Within
//! a column, `values[a][b]` is the expected value type `b` gets from the
//! outcome assigned to report `a`. Edge `a → b` of the type graph has length
//! `ℓ(a,b) = values[b][b] − values[a][b]`, and payments implement the column
//! iff they satisfy `p(b) − p(a) ≤ ℓ(a,b)` for all pairs.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{MechanismInstance, PaymentRule};
use crate::rational::{dot, Rational};
use crate::ratlp::{self, LinearProgram, LpOutcome, Relation, Sense, VarId};

/// `E<valuation, x_agent(profile)>`.
pub fn expected_value(
    inst: &MechanismInstance,
    agent: usize,
    valuation: &[Rational],
    profile: &[usize],
) -> Rational {
    let idx = inst.profiles().index(profile);
    inst.dist(idx).value(&inst.feasible, agent, valuation)
}

/// `values[a][b]` for one agent and opponent column.
pub(crate) fn column_values(
    inst: &MechanismInstance,
    agent: usize,
    opponents: &[usize],
) -> Vec<Vec<Rational>> {
    let space = inst.profiles();
    let types = &inst.typespaces[agent].types;
    (0..types.len())
        .map(|a| {
            let block = inst
                .dist(space.join(agent, a, opponents))
                .expected_block(&inst.feasible, agent);
            types.iter().map(|t| dot(&t.0, &block)).collect()
        })
        .collect()
}

fn edge(values: &[Vec<Rational>], a: usize, b: usize) -> Rational {
    &values[b][b] - &values[a][b]
}

/// Every (agent, opponent profile) pair in canonical order.
fn columns(inst: &MechanismInstance) -> Vec<(usize, Vec<usize>)> {
    let space = inst.profiles();
    (0..inst.agents())
        .flat_map(|i| {
            space
                .opponents(i)
                .iter()
                .map(move |o| (i, o))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn agent_columns(inst: &MechanismInstance, agent: usize) -> Vec<Vec<usize>> {
    inst.profiles().opponents(agent).iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WmViolation {
    pub agent: usize,
    pub t: usize,
    pub t_prime: usize,
    pub opponents: Vec<usize>,
    /// `E<t − t', x(t) − x(t')>`, negative.
    pub value: Rational,
}

impl WmViolation {
    pub fn recompute(&self, inst: &MechanismInstance) -> Rational {
        let space = inst.profiles();
        let tv = &inst.type_vector(self.agent, self.t).0;
        let tp = &inst.type_vector(self.agent, self.t_prime).0;
        let x = inst
            .dist(space.join(self.agent, self.t, &self.opponents))
            .expected_block(&inst.feasible, self.agent);
        let xp = inst
            .dist(space.join(self.agent, self.t_prime, &self.opponents))
            .expected_block(&inst.feasible, self.agent);
        let dt: Vec<Rational> = tv.iter().zip(tp).map(|(a, b)| a - b).collect();
        let dx: Vec<Rational> = x.iter().zip(&xp).map(|(a, b)| a - b).collect();
        dot(&dt, &dx)
    }

    pub fn verify(&self, inst: &MechanismInstance) -> bool {
        in_range(inst, self.agent, &[self.t, self.t_prime], &self.opponents)
            && self.value.is_negative()
            && self.recompute(inst) == self.value
    }
}

fn in_range(inst: &MechanismInstance, agent: usize, types: &[usize], opponents: &[usize]) -> bool {
    if agent >= inst.agents() || types.iter().any(|t| *t >= inst.typespaces[agent].len()) {
        return false;
    }
    inst.profiles()
        .opponents(agent)
        .try_index(opponents)
        .is_some()
}

fn wm_in_column(values: &[Vec<Rational>]) -> Option<(usize, usize, Rational)> {
    let n = values.len();
    for t in 0..n {
        for u in t + 1..n {
            // <t − u, x(t) − x(u)> = ℓ(t,u) + ℓ(u,t)
            let v = edge(values, t, u) + edge(values, u, t);
            if v.is_negative() {
                return Some((t, u, v));
            }
        }
    }
    None
}

pub fn check_weak_monotonicity(inst: &MechanismInstance) -> Result<(), WmViolation> {
    match columns(inst).par_iter().find_map_first(|(agent, opp)| {
        wm_in_column(&column_values(inst, *agent, opp)).map(|(t, t_prime, value)| WmViolation {
            agent: *agent,
            t,
            t_prime,
            opponents: opp.clone(),
            value,
        })
    }) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

pub fn check_weak_monotonicity_agent(
    inst: &MechanismInstance,
    agent: usize,
) -> Result<(), WmViolation> {
    match agent_columns(inst, agent).par_iter().find_map_first(|opp| {
        wm_in_column(&column_values(inst, agent, opp)).map(|(t, t_prime, value)| WmViolation {
            agent,
            t,
            t_prime,
            opponents: opp.clone(),
            value,
        })
    }) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeCycleCert {
    pub agent: usize,
    pub opponents: Vec<usize>,
    /// Own-type indices visited in order; the last connects back to the first.
    pub cycle: Vec<usize>,
    pub length: Rational,
}

impl NegativeCycleCert {
    pub fn recompute(&self, inst: &MechanismInstance) -> Rational {
        let values = column_values(inst, self.agent, &self.opponents);
        cycle_length(&values, &self.cycle)
    }

    pub fn verify(&self, inst: &MechanismInstance) -> bool {
        self.cycle.len() >= 2
            && in_range(inst, self.agent, &self.cycle, &self.opponents)
            && self.length.is_negative()
            && self.recompute(inst) == self.length
    }

    /// Difference constraints `p(b) − p(a) ≤ ℓ(a,b)` along the cycle as an LP
    /// over free payment variables; infeasible whenever the cycle is negative.
    pub fn as_lp(&self, inst: &MechanismInstance) -> LinearProgram {
        let values = column_values(inst, self.agent, &self.opponents);
        let mut lp = LinearProgram::new(Sense::Max);
        let vars: Vec<VarId> = (0..values.len())
            .map(|t| lp.free(format!("p{t}")))
            .collect();
        let k = self.cycle.len();
        for s in 0..k {
            let (a, b) = (self.cycle[s], self.cycle[(s + 1) % k]);
            lp.add_constraint(
                format!("e{a}_{b}"),
                [
                    (vars[b], Rational::from_integer(1)),
                    (vars[a], Rational::from_integer(-1)),
                ],
                Relation::Le,
                edge(&values, a, b),
            );
        }
        lp
    }
}

fn cycle_length(values: &[Vec<Rational>], cycle: &[usize]) -> Rational {
    let k = cycle.len();
    (0..k)
        .map(|s| edge(values, cycle[s], cycle[(s + 1) % k]))
        .sum()
}

/// Shortest-path potentials from a virtual source whose edge to type `a` has
/// length `source[a]`, or a negative cycle (2-cycles are reported first).
pub(crate) fn potentials(
    values: &[Vec<Rational>],
    source: &[Rational],
) -> Result<Vec<Rational>, Vec<usize>> {
    if let Some((t, u, _)) = wm_in_column(values) {
        return Err(vec![t, u]);
    }
    let n = values.len();
    let mut dist: Vec<Rational> = source.to_vec();
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..=n {
        last = None;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let cand = &dist[a] + &edge(values, a, b);
                if cand < dist[b] {
                    dist[b] = cand;
                    pred[b] = Some(a);
                    last = Some(b);
                }
            }
        }
        if last.is_none() {
            return Ok(dist);
        }
    }
    let mut v = last.expect("relaxation in the final round");
    for _ in 0..n {
        v = pred[v].expect("relaxed vertex has a predecessor");
    }
    let mut cycle = vec![v];
    let mut u = pred[v].expect("cycle vertex has a predecessor");
    while u != v {
        cycle.push(u);
        u = pred[u].expect("cycle vertex has a predecessor");
    }
    cycle.reverse();
    Err(cycle)
}

fn cycle_in_column(
    inst: &MechanismInstance,
    agent: usize,
    opp: &[usize],
) -> Option<NegativeCycleCert> {
    cycle_in_values(agent, opp, &column_values(inst, agent, opp))
}

pub(crate) fn cycle_in_values(
    agent: usize,
    opp: &[usize],
    values: &[Vec<Rational>],
) -> Option<NegativeCycleCert> {
    let zeros = vec![Rational::zero(); values.len()];
    match potentials(values, &zeros) {
        Ok(_) => None,
        Err(cycle) => {
            let length = cycle_length(values, &cycle);
            Some(NegativeCycleCert {
                agent,
                opponents: opp.to_vec(),
                cycle,
                length,
            })
        }
    }
}

pub fn check_cyclic_monotonicity(
    inst: &MechanismInstance,
    agent: usize,
) -> Result<(), NegativeCycleCert> {
    match agent_columns(inst, agent)
        .par_iter()
        .find_map_first(|opp| cycle_in_column(inst, agent, opp))
    {
        Some(c) => Err(c),
        None => Ok(()),
    }
}

/// Cyclic monotonicity for every agent, first failure in agent order.
pub fn check_cyclic_monotonicity_all(inst: &MechanismInstance) -> Result<(), NegativeCycleCert> {
    (0..inst.agents()).try_for_each(|i| check_cyclic_monotonicity(inst, i))
}

/// Assembles a payment rule from per-column payment vectors.
fn assemble(
    inst: &MechanismInstance,
    per_column: impl Fn(usize, &[usize], &[Vec<Rational>]) -> Result<Vec<Rational>, SynthesisError>
        + Sync,
) -> Result<PaymentRule, SynthesisError> {
    let space = inst.profiles();
    let cols = columns(inst);
    let results: Vec<Result<Vec<Rational>, SynthesisError>> = cols
        .par_iter()
        .map(|(agent, opp)| per_column(*agent, opp, &column_values(inst, *agent, opp)))
        .collect();
    let mut rule = PaymentRule::zeros(space.len(), inst.agents());
    for ((agent, opp), res) in cols.iter().zip(results) {
        for (t, p) in res?.into_iter().enumerate() {
            rule.entries[space.join(*agent, t, opp)][*agent] = p;
        }
    }
    Ok(rule)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SynthesisError {
    #[error("no implementing payments: negative cycle for agent {}", .0.agent)]
    NegativeCycle(NegativeCycleCert),
    /// The largest payments compatible with DSIC and IR are negative at
    /// `own` in this column, so no non-negative IR payment rule exists.
    #[error("no non-negative IR payments for agent {agent} type {own}: best bound {bound}")]
    NotIndividuallyRational {
        agent: usize,
        opponents: Vec<usize>,
        own: usize,
        bound: Rational,
    },
}

/// Shortest-path potentials, shifted per (agent, opponent profile) so that
/// the smallest payment in each column is zero.
pub fn synthesize_payments(inst: &MechanismInstance) -> Result<PaymentRule, NegativeCycleCert> {
    assemble(inst, |agent, opp, values| {
        let zeros = vec![Rational::zero(); values.len()];
        match potentials(values, &zeros) {
            Ok(p) => {
                let min = Rational::min_of(&p).unwrap_or_else(Rational::zero);
                Ok(p.into_iter().map(|x| x - &min).collect())
            }
            Err(cycle) => {
                let length = cycle_length(values, &cycle);
                Err(SynthesisError::NegativeCycle(NegativeCycleCert {
                    agent,
                    opponents: opp.to_vec(),
                    cycle,
                    length,
                }))
            }
        }
    })
    .map_err(|e| match e {
        SynthesisError::NegativeCycle(c) => c,
        SynthesisError::NotIndividuallyRational { .. } => unreachable!(),
    })
}

/// The pointwise largest DSIC payments with truthful utility ≥ 0, provided
/// they are all non-negative.
pub fn synthesize_ir_payments(inst: &MechanismInstance) -> Result<PaymentRule, SynthesisError> {
    assemble(inst, |agent, opp, values| {
        let truthful: Vec<Rational> = (0..values.len()).map(|a| values[a][a].clone()).collect();
        match potentials(values, &truthful) {
            Ok(p) => {
                if let Some(own) = p.iter().position(Rational::is_negative) {
                    return Err(SynthesisError::NotIndividuallyRational {
                        agent,
                        opponents: opp.to_vec(),
                        own,
                        bound: p[own].clone(),
                    });
                }
                Ok(p)
            }
            Err(cycle) => {
                let length = cycle_length(values, &cycle);
                Err(SynthesisError::NegativeCycle(NegativeCycleCert {
                    agent,
                    opponents: opp.to_vec(),
                    cycle,
                    length,
                }))
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsicViolation {
    pub agent: usize,
    pub true_type: usize,
    pub report: usize,
    pub opponents: Vec<usize>,
    /// Utility from misreporting minus truthful utility, positive.
    pub gain: Rational,
}

impl DsicViolation {
    pub fn recompute(&self, inst: &MechanismInstance, payments: &PaymentRule) -> Rational {
        let space = inst.profiles();
        let t = &inst.type_vector(self.agent, self.true_type).0;
        let honest = space.join(self.agent, self.true_type, &self.opponents);
        let lie = space.join(self.agent, self.report, &self.opponents);
        let u_honest = inst.dist(honest).value(&inst.feasible, self.agent, t)
            - payments.get(honest, self.agent);
        let u_lie =
            inst.dist(lie).value(&inst.feasible, self.agent, t) - payments.get(lie, self.agent);
        u_lie - u_honest
    }

    pub fn verify(&self, inst: &MechanismInstance, payments: &PaymentRule) -> bool {
        in_range(
            inst,
            self.agent,
            &[self.true_type, self.report],
            &self.opponents,
        ) && self.gain.is_positive()
            && self.recompute(inst, payments) == self.gain
    }
}

/// Exhaustive DSIC scan; the first violation in (agent, opponent profile,
/// true type, report) order is returned.
pub fn verify_dsic(inst: &MechanismInstance, payments: &PaymentRule) -> Result<(), DsicViolation> {
    let space = inst.profiles();
    match columns(inst).par_iter().find_map_first(|(agent, opp)| {
        let values = column_values(inst, *agent, opp);
        let n = values.len();
        let pay: Vec<&Rational> = (0..n)
            .map(|a| payments.get(space.join(*agent, a, opp), *agent))
            .collect();
        for t in 0..n {
            for r in 0..n {
                if r == t {
                    continue;
                }
                let gain = (&values[r][t] - pay[r]) - (&values[t][t] - pay[t]);
                if gain.is_positive() {
                    return Some(DsicViolation {
                        agent: *agent,
                        true_type: t,
                        report: r,
                        opponents: opp.clone(),
                        gain,
                    });
                }
            }
        }
        None
    }) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrViolation {
    pub agent: usize,
    pub profile: Vec<usize>,
    /// Truthful expected utility, negative.
    pub utility: Rational,
}

impl IrViolation {
    pub fn recompute(&self, inst: &MechanismInstance, payments: &PaymentRule) -> Rational {
        let idx = inst.profiles().index(&self.profile);
        let t = &inst.type_vector(self.agent, self.profile[self.agent]).0;
        inst.dist(idx).value(&inst.feasible, self.agent, t) - payments.get(idx, self.agent)
    }

    pub fn verify(&self, inst: &MechanismInstance, payments: &PaymentRule) -> bool {
        self.agent < inst.agents()
            && inst.profiles().try_index(&self.profile).is_some()
            && self.utility.is_negative()
            && self.recompute(inst, payments) == self.utility
    }
}

/// Expected truthful utility ≥ 0 at every profile, first failure in
/// (profile, agent) order.
pub fn verify_ir(inst: &MechanismInstance, payments: &PaymentRule) -> Result<(), IrViolation> {
    let space = inst.profiles();
    for (idx, profile) in space.iter().enumerate() {
        for agent in 0..inst.agents() {
            let t = &inst.type_vector(agent, profile[agent]).0;
            let utility = inst.dist(idx).value(&inst.feasible, agent, t) - payments.get(idx, agent);
            if utility.is_negative() {
                return Err(IrViolation {
                    agent,
                    profile,
                    utility,
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LockBounds {
    pub min: Rational,
    pub max: Rational,
}

impl LockBounds {
    pub fn is_locked(&self) -> bool {
        self.min.is_zero() && self.max.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LockError {
    #[error("agent or type index out of range")]
    OutOfRange,
    #[error("column is not implementable")]
    NotImplementable(NegativeCycleCert),
    #[error("lock LP returned {0}")]
    Solver(String),
}

/// Difference-constraint LP of one column with objective `p(a) − p(b)`.
pub fn payment_lock_lp(
    inst: &MechanismInstance,
    agent: usize,
    a: usize,
    b: usize,
    opponents: &[usize],
    sense: Sense,
) -> LinearProgram {
    let values = column_values(inst, agent, opponents);
    let n = values.len();
    let mut lp = LinearProgram::new(sense);
    let vars: Vec<VarId> = (0..n).map(|t| lp.free(format!("p{t}"))).collect();
    for x in 0..n {
        for y in 0..n {
            if x != y {
                lp.add_constraint(
                    format!("e{x}_{y}"),
                    [
                        (vars[y], Rational::from_integer(1)),
                        (vars[x], Rational::from_integer(-1)),
                    ],
                    Relation::Le,
                    edge(&values, x, y),
                );
            }
        }
    }
    if a != b {
        lp.set_objective(
            sense,
            [
                (vars[a], Rational::from_integer(1)),
                (vars[b], Rational::from_integer(-1)),
            ],
        );
    }
    lp
}

/// Range of `p(a) − p(b)` over all payments implementing the column.
pub fn payment_lock_bounds(
    inst: &MechanismInstance,
    agent: usize,
    a: usize,
    b: usize,
    opponents: &[usize],
) -> Result<LockBounds, LockError> {
    if !in_range(inst, agent, &[a, b], opponents) {
        return Err(LockError::OutOfRange);
    }
    if let Some(c) = cycle_in_column(inst, agent, opponents) {
        return Err(LockError::NotImplementable(c));
    }
    let mut ends = Vec::with_capacity(2);
    for sense in [Sense::Min, Sense::Max] {
        let lp = payment_lock_lp(inst, agent, a, b, opponents, sense);
        match ratlp::solve(&lp).map_err(|e| LockError::Solver(e.to_string()))? {
            LpOutcome::Optimal { value, .. } => ends.push(value),
            other => return Err(LockError::Solver(format!("{other:?}"))),
        }
    }
    let max = ends.pop().expect("two ends");
    let min = ends.pop().expect("two ends");
    Ok(LockBounds { min, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AgentTypeSpace, AllocationDistribution, AllocationRule, FeasibleSet, JointAllocation,
        TypeVector,
    };
    use crate::rational::{q, qi};

    /// Single agent, m = 1; types and deterministic allocations given as integers.
    fn one_agent(types: &[i64], allocs: &[i64]) -> MechanismInstance {
        let feasible =
            FeasibleSet::dedup(1, 1, allocs.iter().map(|x| JointAllocation(vec![qi(*x)])));
        let entries = allocs
            .iter()
            .map(|x| {
                AllocationDistribution::point(
                    feasible.index_of(&JointAllocation(vec![qi(*x)])).unwrap(),
                )
            })
            .collect();
        MechanismInstance {
            m: 1,
            typespaces: vec![AgentTypeSpace::new(
                types.iter().map(|t| TypeVector(vec![qi(*t)])).collect(),
            )],
            feasible,
            allocation: AllocationRule { entries },
            payments: None,
        }
    }

    #[test]
    fn swapped_allocation_violates_wm_by_one() {
        let inst = one_agent(&[1, 2], &[1, 0]);
        let v = check_weak_monotonicity(&inst).unwrap_err();
        assert_eq!((v.t, v.t_prime, v.value.clone()), (0, 1, qi(-1)));
        assert!(v.verify(&inst));
        let c = check_cyclic_monotonicity(&inst, 0).unwrap_err();
        assert_eq!(c.length, qi(-1));
        assert_eq!(c.cycle.len(), 2);
        assert!(c.verify(&inst));
        assert!(synthesize_payments(&inst).is_err());
        assert!(ratlp::solve(&c.as_lp(&inst)).unwrap().is_infeasible());
    }

    #[test]
    fn gapped_pair_lock_interval() {
        let inst = one_agent(&[1, 2], &[1, 2]);
        let b = payment_lock_bounds(&inst, 0, 0, 1, &[]).unwrap();
        assert_eq!((b.min, b.max), (qi(-2), qi(-1)));
        assert!(payment_lock_bounds(&inst, 0, 1, 1, &[])
            .unwrap()
            .is_locked());
    }

    #[test]
    fn single_type_needs_no_payment() {
        let inst = one_agent(&[3], &[5]);
        assert_eq!(check_cyclic_monotonicity(&inst, 0), Ok(()));
        let p = synthesize_payments(&inst).unwrap();
        assert_eq!(p.entries, vec![vec![qi(0)]]);
    }

    #[test]
    fn ir_payments_extract_surplus() {
        let inst = one_agent(&[1, 2], &[1, 2]);
        let p = synthesize_ir_payments(&inst).unwrap();
        // p(0) ≤ 1 and p(1) ≤ p(0) + 2 and p(1) ≤ 4
        assert_eq!(p.entries, vec![vec![qi(1)], vec![qi(3)]]);
        verify_dsic(&inst, &p).unwrap();
        verify_ir(&inst, &p).unwrap();
        let over = PaymentRule {
            entries: vec![vec![qi(2)], vec![qi(3)]],
        };
        let v = verify_ir(&inst, &over).unwrap_err();
        assert!(v.verify(&inst, &over));
        assert_eq!(v.utility, qi(-1));
    }

    #[test]
    fn three_cycle_is_found_when_every_pair_is_monotone() {
        let unit = |k: usize| TypeVector((0..3).map(|j| qi((j == k) as i64)).collect());
        let allocs = [[1, 2, 0], [0, 1, 2], [2, 0, 1]];
        let fs = FeasibleSet::dedup(
            3,
            1,
            allocs
                .iter()
                .map(|v| JointAllocation(v.iter().map(|x| qi(*x)).collect())),
        );
        let inst = MechanismInstance {
            m: 3,
            typespaces: vec![AgentTypeSpace::new((0..3).map(unit).collect())],
            feasible: fs,
            allocation: AllocationRule {
                entries: (0..3).map(AllocationDistribution::point).collect(),
            },
            payments: None,
        };
        assert_eq!(check_weak_monotonicity(&inst), Ok(()));
        let c = check_cyclic_monotonicity(&inst, 0).unwrap_err();
        assert_eq!(c.cycle.len(), 3);
        assert_eq!(c.length, qi(-3));
        assert!(c.verify(&inst));
        assert!(ratlp::solve(&c.as_lp(&inst)).unwrap().is_infeasible());
    }

    #[test]
    fn fractional_expected_values() {
        let fs = FeasibleSet::dedup(1, 1, [0, 2].iter().map(|x| JointAllocation(vec![qi(*x)])));
        let inst = MechanismInstance {
            m: 1,
            typespaces: vec![AgentTypeSpace::new(vec![TypeVector(vec![q(1, 3)])])],
            feasible: fs,
            allocation: AllocationRule {
                entries: vec![AllocationDistribution::from_weights([
                    (0, q(1, 4)),
                    (1, q(3, 4)),
                ])],
            },
            payments: None,
        };
        assert_eq!(expected_value(&inst, 0, &[q(1, 3)], &[0]), q(1, 2));
        assert_eq!(expected_value(&inst, 0, &[qi(0)], &[0]), qi(0));
    }
}
