//! Row generation: solve on a subset of the constraints and add the rows the
//! current answer violates until none are left. Rows that never become
//! active get a zero multiplier, so the returned certificate is checked
//! against the full program.

use std::collections::HashSet;

use num_traits::Zero;

use super::simplex::{solve_with, SolveOptions};
use super::{LinearProgram, LpError, LpOutcome, Relation};
use crate::rational::Rational;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LazyStats {
    pub rounds: usize,
    pub active_rows: usize,
}

fn holds(rel: Relation, lhs: &Rational, rhs: &Rational) -> bool {
    match rel {
        Relation::Le => lhs <= rhs,
        Relation::Ge => lhs >= rhs,
        Relation::Eq => lhs == rhs,
    }
}

/// Solves `lp` starting from the rows selected by `initial`.
pub fn solve_lazy(
    lp: &LinearProgram,
    initial: impl Fn(usize) -> bool,
) -> Result<LpOutcome, LpError> {
    solve_lazy_with(lp, initial, |i| i, &SolveOptions::default()).map(|(out, _)| out)
}

/// Rows with the same `group` key are activated together as soon as one of
/// them is violated.
pub fn solve_lazy_with(
    lp: &LinearProgram,
    initial: impl Fn(usize) -> bool,
    group: impl Fn(usize) -> usize,
    opts: &SolveOptions,
) -> Result<(LpOutcome, LazyStats), LpError> {
    lp.validate()?;
    let rows = lp.constraints.len();
    let mut active: Vec<bool> = (0..rows).map(initial).collect();
    let keys: Vec<usize> = (0..rows).map(group).collect();
    let mut stats = LazyStats::default();
    let zero = Rational::zero();
    loop {
        stats.rounds += 1;
        let index: Vec<usize> = (0..rows).filter(|i| active[*i]).collect();
        stats.active_rows = index.len();
        let sub = LinearProgram {
            variables: lp.variables.clone(),
            sense: lp.sense,
            objective: lp.objective.clone(),
            constraints: index.iter().map(|i| lp.constraints[*i].clone()).collect(),
        };
        let (out, _) = solve_with(&sub, opts)?;
        let widen = |mult: Vec<Rational>| {
            let mut full = vec![Rational::zero(); rows];
            for (i, y) in index.iter().zip(mult) {
                full[*i] = y;
            }
            full
        };
        let mut hit = HashSet::new();
        match out {
            LpOutcome::Infeasible { farkas } => {
                return Ok((
                    LpOutcome::Infeasible {
                        farkas: widen(farkas),
                    },
                    stats,
                ))
            }
            LpOutcome::Optimal {
                assignment,
                value,
                duals,
            } => {
                for (i, c) in lp.constraints.iter().enumerate() {
                    if !active[i] && !holds(c.relation, &c.expr.eval(&assignment), &c.rhs) {
                        hit.insert(keys[i]);
                    }
                }
                if hit.is_empty() {
                    return Ok((
                        LpOutcome::Optimal {
                            assignment,
                            value,
                            duals: widen(duals),
                        },
                        stats,
                    ));
                }
            }
            LpOutcome::Unbounded { point, ray } => {
                for (i, c) in lp.constraints.iter().enumerate() {
                    if !active[i]
                        && (!holds(c.relation, &c.expr.eval(&point), &c.rhs)
                            || !holds(c.relation, &c.expr.eval(&ray), &zero))
                    {
                        hit.insert(keys[i]);
                    }
                }
                if hit.is_empty() {
                    return Ok((LpOutcome::Unbounded { point, ray }, stats));
                }
            }
        }
        for (a, k) in active.iter_mut().zip(&keys) {
            *a = *a || hit.contains(k);
        }
    }
}
