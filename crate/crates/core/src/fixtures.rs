//! The three hard-coded constructions: the 3-dimensional deterministic
//! fixture, its 7-dimensional lift, and the single-agent revenue family.

use serde::{Deserialize, Serialize};

use crate::extensions::{detect_ssf, NoSwap, SwapSystem};
use crate::incentives::{check_cyclic_monotonicity, verify_dsic, DsicViolation, NegativeCycleCert};
use crate::model::{
    AgentTypeSpace, AllocationDistribution, AllocationRule, FeasibleSet, JointAllocation,
    MechanismInstance, PaymentRule, TypeVector,
};
use crate::rational::Rational;
use crate::revenue::{build_revenue_family, optimal_revenue, RevenueError};

/// Agent 1's allocation in the 3-dimensional fixture, rows by own type
/// (A, B, C, D), columns by the opponent's type.
pub(crate) const DET_TABLE: [[[i64; 3]; 4]; 4] = [
    [[1, 1, 0], [2, 0, 2], [3, 0, 3], [4, 0, 4]],
    [[0, 1, 1], [2, 2, 0], [3, 3, 0], [4, 4, 0]],
    [[1, 0, 1], [0, 2, 2], [0, 3, 3], [0, 4, 4]],
    [[0, 1, 1], [2, 2, 0], [3, 3, 0], [4, 4, 0]],
];

pub const DET_LABELS: [&str; 4] = ["A", "B", "C", "D"];
pub const RAND_LABELS: [&str; 8] = ["A'", "B'", "C'", "D'", "E'", "F'", "G'", "H'"];

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(*x)).collect()
}

fn det_types() -> Vec<TypeVector> {
    let third = Rational::new(1, 3);
    vec![
        TypeVector(ints(&[1, 0, 0])),
        TypeVector(ints(&[0, 1, 0])),
        TypeVector(ints(&[0, 0, 1])),
        TypeVector(vec![third.clone(), third.clone(), third]),
    ]
}

fn rand_types() -> Vec<TypeVector> {
    let third = Rational::new(1, 3);
    let unit = |k: usize| {
        TypeVector(
            (0..7)
                .map(|j| Rational::from_integer((j == k) as i64))
                .collect(),
        )
    };
    let mut d = vec![Rational::from_integer(0); 7];
    d[..3].fill(third);
    vec![
        unit(0),
        unit(1),
        unit(2),
        TypeVector(d),
        unit(3),
        unit(4),
        unit(5),
        unit(6),
    ]
}

/// Two symmetric agents sharing `types`; agent 2's block at `(v1, v2)` is
/// agent 1's block at `(v2, v1)`.
fn symmetric_instance(
    m: usize,
    types: Vec<TypeVector>,
    labels: &[&str],
    x1: impl Fn(usize, usize) -> Vec<Rational>,
) -> MechanismInstance {
    let n = types.len();
    let mut joint = Vec::with_capacity(n * n);
    for v1 in 0..n {
        for v2 in 0..n {
            let mut a = x1(v1, v2);
            a.extend(x1(v2, v1));
            joint.push(JointAllocation(a));
        }
    }
    let feasible = FeasibleSet::dedup(m, 2, joint.iter().cloned());
    let entries = joint
        .iter()
        .map(|a| AllocationDistribution::point(feasible.index_of(a).expect("member")))
        .collect();
    let space = AgentTypeSpace::labeled(types, labels.iter().map(|s| s.to_string()).collect());
    MechanismInstance {
        m,
        typespaces: vec![space.clone(), space],
        feasible,
        allocation: AllocationRule { entries },
        payments: Some(PaymentRule::zeros(n * n, 2)),
    }
}

pub fn build_det_fixture() -> MechanismInstance {
    symmetric_instance(3, det_types(), &DET_LABELS, |v1, v2| {
        ints(&DET_TABLE[v1][v2])
    })
}

pub fn build_rand_fixture() -> MechanismInstance {
    // A'..D' map onto A..D; E'..H' copy C' against A'..D'.
    let x1 = |v1: usize, v2: usize| -> Vec<Rational> {
        if v2 >= 4 {
            return ints(&[0, 0, 0, 100, 100, 100, 100]);
        }
        let row = if v1 >= 4 { 2 } else { v1 };
        let mut a = ints(&DET_TABLE[row][v2]);
        let mut tail = [100; 4];
        tail[v2] = 0;
        a.extend(ints(&tail));
        a
    };
    symmetric_instance(7, rand_types(), &RAND_LABELS, x1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "lowercase")]
pub enum FixtureId {
    Det,
    Rand,
    Revenue { k: usize, eps: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureReport {
    pub id: FixtureId,
    /// With the fixture's own payments: zero for det and rand, the optimal
    /// mechanism's payments for the revenue family.
    pub dsic: Result<(), DsicViolation>,
    pub cyclic_monotonicity: Vec<Result<(), NegativeCycleCert>>,
    pub swap_system: Result<SwapSystem, NoSwap>,
    /// Only for the revenue family.
    pub optimal_revenue: Option<Rational>,
}

/// Builds the single-agent revenue instance whose allocation and payments
/// are an optimal mechanism on the distribution's support.
pub fn build_revenue_fixture(
    k: usize,
    eps: &Rational,
) -> Result<(MechanismInstance, Vec<Rational>), RevenueError> {
    let family = build_revenue_family(k, eps)?;
    let result = optimal_revenue(&family.space, &family.feasible, &family.dist)?;
    let inst = result.instance(&family.space, &family.feasible);
    Ok((inst, family.dist))
}

pub fn fixture_sanity(id: &FixtureId) -> Result<FixtureReport, RevenueError> {
    let (inst, revenue) = match id {
        FixtureId::Det => (build_det_fixture(), None),
        FixtureId::Rand => (build_rand_fixture(), None),
        FixtureId::Revenue { k, eps } => {
            let family = build_revenue_family(*k, eps)?;
            let result = optimal_revenue(&family.space, &family.feasible, &family.dist)?;
            (
                result.instance(&family.space, &family.feasible),
                Some(result.value),
            )
        }
    };
    let payments = inst
        .payments
        .clone()
        .unwrap_or_else(|| PaymentRule::zeros(inst.profiles().len(), inst.agents()));
    Ok(FixtureReport {
        id: id.clone(),
        dsic: verify_dsic(&inst, &payments),
        cyclic_monotonicity: (0..inst.agents())
            .map(|i| check_cyclic_monotonicity(&inst, i))
            .collect(),
        swap_system: detect_ssf(&inst.feasible),
        optimal_revenue: revenue,
    })
}
