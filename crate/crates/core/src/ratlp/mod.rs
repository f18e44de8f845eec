//! Exact rational linear programming.
//!
//! [`solve`] runs a two-phase primal simplex over [`Rational`] and always
//! returns a certificate that [`verify_outcome`] can re-check without any
//! simplex machinery:
//!
//! * `Optimal` carries the assignment together with dual multipliers whose
//!   bound matches the objective value.
//! * `Infeasible` carries Farkas multipliers.
//! * `Unbounded` carries a feasible point and an improving ray.
//!
//! Multipliers follow one convention throughout. Constraint `i` is read in
//! "≤ form": `a·x ≤ b` as is, `a·x ≥ b` as `-a·x ≤ -b`, and `a·x = b` as is.
//! A multiplier `y_i` scales the ≤-form row; it must be non-negative on
//! inequalities and is free on equalities. Every feasible `x` then satisfies
//! `Σ y_i s_i a_i · x ≤ Σ y_i s_i b_i` with `s_i = -1` on `≥` rows and `+1`
//! otherwise. Variable bounds are never given multipliers; they enter through
//! the box minimum/maximum of the combined row.

mod lazy;
mod simplex;
mod text;
mod verify;

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub use lazy::{solve_lazy, solve_lazy_with, LazyStats};
pub use simplex::{solve, solve_with, PivotRule, SolveOptions, SolveStats};
pub use text::{parse_lp, write_lp, LpParseError};
pub use verify::{verify_outcome, Mismatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    /// Sign turning the row into ≤ form.
    pub fn le_sign(self) -> i32 {
        match self {
            Relation::Ge => -1,
            _ => 1,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    /// `None` is −∞.
    pub lower: Option<Rational>,
    /// `None` is +∞.
    pub upper: Option<Rational>,
}

/// Sparse linear expression: sorted by variable, no repeats, no zeros.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinExpr(Vec<(VarId, Rational)>);

impl LinExpr {
    pub fn new() -> Self {
        LinExpr(Vec::new())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (VarId, Rational)>) -> Self {
        let mut v: Vec<(VarId, Rational)> = terms.into_iter().collect();
        v.sort_by_key(|(j, _)| *j);
        let mut out: Vec<(VarId, Rational)> = Vec::with_capacity(v.len());
        for (j, c) in v {
            match out.last_mut() {
                Some((k, acc)) if *k == j => *acc += c,
                _ => out.push((j, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        LinExpr(out)
    }

    pub fn terms(&self) -> &[(VarId, Rational)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (j, c) in &self.0 {
            if !x[j.0].is_zero() {
                acc += c * &x[j.0];
            }
        }
        acc
    }

    pub fn coeff(&self, j: VarId) -> Rational {
        match self.0.binary_search_by_key(&j, |(k, _)| *k) {
            Ok(pos) => self.0[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub sense: Sense,
    pub objective: LinExpr,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint {row} ({name}) references variable {var} out of range")]
    VariableOutOfRange {
        row: usize,
        name: String,
        var: usize,
    },
    #[error("objective references variable {0} out of range")]
    ObjectiveOutOfRange(usize),
    #[error("variable {0} has lower bound above upper bound")]
    EmptyBounds(String),
    #[error("expression for {0} is not in canonical sparse form")]
    NonCanonical(String),
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            variables: Vec::new(),
            sense,
            objective: LinExpr::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<Rational>,
        upper: Option<Rational>,
    ) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, Some(Rational::zero()), None)
    }

    pub fn free(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, None, None)
    }

    pub fn set_objective(
        &mut self,
        sense: Sense,
        terms: impl IntoIterator<Item = (VarId, Rational)>,
    ) {
        self.sense = sense;
        self.objective = LinExpr::from_terms(terms);
    }

    /// Returns the row index.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            expr: LinExpr::from_terms(terms),
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .map(VarId)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.variables.len();
        let canonical = |e: &LinExpr| {
            e.0.windows(2).all(|w| w[0].0 < w[1].0) && e.0.iter().all(|(_, c)| !c.is_zero())
        };
        for (row, c) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = c.expr.0.iter().find(|(j, _)| j.0 >= n) {
                return Err(LpError::VariableOutOfRange {
                    row,
                    name: c.name.clone(),
                    var: j.0,
                });
            }
            if !canonical(&c.expr) {
                return Err(LpError::NonCanonical(c.name.clone()));
            }
        }
        if let Some((j, _)) = self.objective.0.iter().find(|(j, _)| j.0 >= n) {
            return Err(LpError::ObjectiveOutOfRange(j.0));
        }
        if !canonical(&self.objective) {
            return Err(LpError::NonCanonical("objective".into()));
        }
        for v in &self.variables {
            if let (Some(l), Some(u)) = (&v.lower, &v.upper) {
                if l > u {
                    return Err(LpError::EmptyBounds(v.name.clone()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum LpOutcome {
    Optimal {
        assignment: Vec<Rational>,
        value: Rational,
        /// One multiplier per constraint, in the module's ≤-form convention
        /// for the maximization of the objective (negated when minimizing).
        duals: Vec<Rational>,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn assignment(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { assignment, .. } => Some(assignment),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests;
