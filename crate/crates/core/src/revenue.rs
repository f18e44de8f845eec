//! Single-agent optimal revenue over lotteries of a finite feasible set, and
//! the family on which revenue collapses once one hull point is added.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::extensions::HullPoint;
use crate::model::{
    AgentTypeSpace, AllocationDistribution, AllocationRule, FeasibleSet, JointAllocation,
    MechanismInstance, PaymentRule, TypeVector,
};
use crate::rational::{dot, Rational};
use crate::ratlp::{self, LinearProgram, LpError, LpOutcome, Relation, Sense, SolveOptions, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RevenueError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("feasible set must describe a single agent with {expected} items")]
    FeasibleShape { expected: usize },
    #[error("distribution: {0}")]
    Distribution(String),
    #[error("revenue LP: {0}")]
    Solver(String),
}

impl From<LpError> for RevenueError {
    fn from(e: LpError) -> Self {
        RevenueError::Solver(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RevenueResult {
    pub value: Rational,
    pub allocations: Vec<AllocationDistribution>,
    pub payments: Vec<Rational>,
}

impl RevenueResult {
    /// The optimal mechanism as a single-agent instance with payments.
    pub fn instance(&self, space: &AgentTypeSpace, feasible: &FeasibleSet) -> MechanismInstance {
        MechanismInstance {
            m: feasible.m,
            typespaces: vec![space.clone()],
            feasible: feasible.clone(),
            allocation: AllocationRule {
                entries: self.allocations.clone(),
            },
            payments: Some(PaymentRule {
                entries: self.payments.iter().map(|p| vec![p.clone()]).collect(),
            }),
        }
    }

    pub fn expected_payment(&self, dist: &[Rational]) -> Rational {
        dot(dist, &self.payments)
    }
}

fn check_inputs(
    space: &AgentTypeSpace,
    feasible: &FeasibleSet,
    dist: &[Rational],
) -> Result<(), RevenueError> {
    let m = space.types.first().map_or(0, TypeVector::dim);
    if feasible.agents != 1 || feasible.m != m || feasible.is_empty() {
        return Err(RevenueError::FeasibleShape { expected: m });
    }
    if dist.len() != space.len() {
        return Err(RevenueError::Distribution(format!(
            "{} weights for {} types",
            dist.len(),
            space.len()
        )));
    }
    if dist.iter().any(Rational::is_negative) {
        return Err(RevenueError::Distribution("negative weight".into()));
    }
    let total: Rational = dist.iter().sum();
    if !total.is_one() {
        return Err(RevenueError::Distribution(format!(
            "weights sum to {total}"
        )));
    }
    Ok(())
}

/// Variables `q[t,f] ≥ 0` in type-major order followed by `p[t] ≥ 0`.
/// Rows: `simplex[t]`, then `ir[t]`, then `ic[t,s]` for `s ≠ t`.
pub fn revenue_lp(
    space: &AgentTypeSpace,
    feasible: &FeasibleSet,
    dist: &[Rational],
) -> LinearProgram {
    let (n, nf) = (space.len(), feasible.len());
    let mut lp = LinearProgram::new(Sense::Max);
    let q: Vec<Vec<VarId>> = (0..n)
        .map(|t| (0..nf).map(|f| lp.nonneg(format!("q[{t},{f}]"))).collect())
        .collect();
    let p: Vec<VarId> = (0..n).map(|t| lp.nonneg(format!("p[{t}]"))).collect();
    lp.set_objective(
        Sense::Max,
        p.iter()
            .zip(dist)
            .filter(|(_, d)| !d.is_zero())
            .map(|(v, d)| (*v, d.clone())),
    );
    // value[t][f] = ⟨t, f⟩
    let value: Vec<Vec<Rational>> = space
        .types
        .iter()
        .map(|t| {
            feasible
                .allocations()
                .iter()
                .map(|a| dot(&t.0, &a.0))
                .collect()
        })
        .collect();
    for (t, qt) in q.iter().enumerate() {
        lp.add_constraint(
            format!("simplex[{t}]"),
            qt.iter().map(|v| (*v, Rational::one())),
            Relation::Eq,
            Rational::one(),
        );
    }
    for t in 0..n {
        let terms = q[t]
            .iter()
            .zip(&value[t])
            .map(|(v, w)| (*v, w.clone()))
            .chain([(p[t], -Rational::one())]);
        lp.add_constraint(format!("ir[{t}]"), terms, Relation::Ge, Rational::zero());
    }
    for t in 0..n {
        for s in (0..n).filter(|s| *s != t) {
            let own = q[t].iter().zip(&value[t]).map(|(v, w)| (*v, w.clone()));
            let lie = q[s].iter().zip(&value[t]).map(|(v, w)| (*v, -w));
            let terms = own
                .chain(lie)
                .chain([(p[t], -Rational::one()), (p[s], Rational::one())]);
            lp.add_constraint(
                format!("ic[{t},{s}]"),
                terms,
                Relation::Ge,
                Rational::zero(),
            );
        }
    }
    lp
}

/// Index of the first incentive row of [`revenue_lp`].
pub fn revenue_ic_offset(types: usize) -> usize {
    2 * types
}

/// The `(t, s)` pair of incentive row `row` of [`revenue_lp`].
pub fn revenue_ic_pair(types: usize, row: usize) -> Option<(usize, usize)> {
    let r = row.checked_sub(revenue_ic_offset(types))?;
    let (t, s) = (r / (types - 1), r % (types - 1));
    (t < types).then_some((t, if s < t { s } else { s + 1 }))
}

/// Rows the lazy solve starts from: simplex and IR rows, and the incentive
/// rows that touch a type of probability zero.
fn initial_row(dist: &[Rational], row: usize) -> bool {
    match revenue_ic_pair(dist.len(), row) {
        None => true,
        Some((t, s)) => dist[t].is_zero() || dist[s].is_zero(),
    }
}

pub fn optimal_revenue(
    space: &AgentTypeSpace,
    feasible: &FeasibleSet,
    dist: &[Rational],
) -> Result<RevenueResult, RevenueError> {
    check_inputs(space, feasible, dist)?;
    let lp = revenue_lp(space, feasible, dist);
    let n = space.len();
    // incentive rows are grouped by the report they guard against
    let group = |i: usize| revenue_ic_pair(n, i).map_or(i, |(_, s)| lp.constraints.len() + s);
    let (out, _) = ratlp::solve_lazy_with(
        &lp,
        |i| initial_row(dist, i),
        group,
        &SolveOptions::default(),
    )?;
    let LpOutcome::Optimal {
        assignment, value, ..
    } = out
    else {
        return Err(RevenueError::Solver(format!("unexpected outcome {out:?}")));
    };
    let nf = feasible.len();
    let allocations = (0..n)
        .map(|t| {
            AllocationDistribution::from_weights(
                (0..nf)
                    .map(|f| (f, assignment[t * nf + f].clone()))
                    .filter(|(_, w)| !w.is_zero()),
            )
        })
        .collect();
    let payments = assignment[n * nf..].to_vec();
    Ok(RevenueResult {
        value,
        allocations,
        payments,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevenueFamily {
    pub k: usize,
    pub eps: Rational,
    /// Unit vectors `e_1..e_k` followed by the all-ones vector.
    pub space: AgentTypeSpace,
    /// The unit vectors.
    pub feasible: FeasibleSet,
    pub dist: Vec<Rational>,
    /// The barycenter of the unit vectors.
    pub witness: HullPoint,
}

impl RevenueFamily {
    pub fn witness_vector(&self) -> TypeVector {
        TypeVector(vec![Rational::new(1, self.k as i64); self.k])
    }

    /// Support plus the witness, which gets weight zero.
    pub fn augmented(&self) -> (AgentTypeSpace, Vec<Rational>) {
        let mut space = self.space.clone();
        space.types.push(self.witness_vector());
        if let Some(labels) = space.labels.as_mut() {
            labels.push(format!("t^{}", self.k));
        }
        let mut dist = self.dist.clone();
        dist.push(Rational::zero());
        (space, dist)
    }
}

pub fn build_revenue_family(k: usize, eps: &Rational) -> Result<RevenueFamily, RevenueError> {
    if k < 2 {
        return Err(RevenueError::Parameters(format!("k = {k}, need k ≥ 2")));
    }
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(RevenueError::Parameters(format!(
            "eps = {eps}, need 0 < eps < 1"
        )));
    }
    let unit = |i: usize| {
        TypeVector(
            (0..k)
                .map(|j| Rational::from_integer((i == j) as i64))
                .collect(),
        )
    };
    let mut types: Vec<TypeVector> = (0..k).map(unit).collect();
    types.push(TypeVector(vec![Rational::one(); k]));
    let mut labels: Vec<String> = (1..=k).map(|i| format!("e{i}")).collect();
    labels.push("1".into());
    let feasible =
        FeasibleSet::from_list(k, 1, (0..k).map(|i| JointAllocation(unit(i).0)).collect());
    let share = eps / &Rational::from_integer(k as i64);
    let mut dist = vec![share; k];
    dist.push(Rational::one() - eps);
    let witness = HullPoint::new(
        0,
        (0..k)
            .map(|_| Rational::new(1, k as i64))
            .chain([Rational::zero()])
            .collect(),
    );
    Ok(RevenueFamily {
        k,
        eps: eps.clone(),
        space: AgentTypeSpace::labeled(types, labels),
        feasible,
        dist,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevenueGap {
    pub k: usize,
    pub eps: Rational,
    pub opt_supp: Rational,
    pub opt_aug: Rational,
    pub ratio: Rational,
}

impl RevenueGap {
    /// `(1 − eps)/k + eps`.
    pub fn bound(&self) -> Rational {
        (Rational::one() - &self.eps) / Rational::from_integer(self.k as i64) + &self.eps
    }
}

pub fn revenue_gap(k: usize, eps: &Rational) -> Result<RevenueGap, RevenueError> {
    let family = build_revenue_family(k, eps)?;
    let opt_supp = optimal_revenue(&family.space, &family.feasible, &family.dist)?.value;
    let (space, dist) = family.augmented();
    let opt_aug = optimal_revenue(&space, &family.feasible, &dist)?.value;
    let ratio = &opt_supp / &opt_aug;
    Ok(RevenueGap {
        k,
        eps: eps.clone(),
        opt_supp,
        opt_aug,
        ratio,
    })
}
