#![allow(clippy::result_large_err)]

use std::fmt;

use num_traits::Zero;

use super::{LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    Bound {
        var: String,
        value: Rational,
    },
    Constraint {
        row: usize,
        name: String,
        lhs: Rational,
        relation: Relation,
        rhs: Rational,
    },
    Value {
        claimed: Rational,
        actual: Rational,
    },
    Sign {
        row: usize,
        name: String,
        multiplier: Rational,
    },
    UnboundedBox {
        var: String,
    },
    NoContradiction {
        box_min: Rational,
        rhs: Rational,
    },
    DualBound {
        bound: Rational,
        value: Rational,
    },
    RayRow {
        row: usize,
        name: String,
        slope: Rational,
    },
    RayBound {
        var: String,
        slope: Rational,
    },
    RayNotImproving {
        slope: Rational,
    },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Mismatch::*;
        match self {
            Length {
                what,
                expected,
                found,
            } => write!(f, "{what} has length {found}, expected {expected}"),
            Bound { var, value } => write!(f, "variable {var} = {value} violates its bounds"),
            Constraint {
                row,
                name,
                lhs,
                relation,
                rhs,
            } => {
                write!(
                    f,
                    "constraint {row} ({name}) violated: {lhs} {relation} {rhs} is false"
                )
            }
            Value { claimed, actual } => write!(
                f,
                "claimed objective {claimed} but assignment gives {actual}"
            ),
            Sign {
                row,
                name,
                multiplier,
            } => {
                write!(
                    f,
                    "multiplier {multiplier} on constraint {row} ({name}) has the wrong sign"
                )
            }
            UnboundedBox { var } => {
                write!(
                    f,
                    "combined row is unbounded over the box of variable {var}"
                )
            }
            NoContradiction { box_min, rhs } => {
                write!(
                    f,
                    "combined row minimum {box_min} does not exceed combined right-hand side {rhs}"
                )
            }
            DualBound { bound, value } => {
                write!(f, "dual bound {bound} differs from objective value {value}")
            }
            RayRow { row, name, slope } => {
                write!(f, "ray leaves constraint {row} ({name}) with slope {slope}")
            }
            RayBound { var, slope } => {
                write!(f, "ray leaves the bounds of variable {var} (slope {slope})")
            }
            RayNotImproving { slope } => write!(
                f,
                "ray changes the objective by {slope}, not an improvement"
            ),
        }
    }
}

/// Weighted sum of the rows in ≤ form: returns dense coefficients and the
/// combined right-hand side.
fn combine(lp: &LinearProgram, y: &[Rational]) -> Result<(Vec<Rational>, Rational), Mismatch> {
    if y.len() != lp.constraints.len() {
        return Err(Mismatch::Length {
            what: "multiplier vector",
            expected: lp.constraints.len(),
            found: y.len(),
        });
    }
    let mut coeffs = vec![Rational::zero(); lp.num_vars()];
    let mut rhs = Rational::zero();
    for (row, (c, yi)) in lp.constraints.iter().zip(y).enumerate() {
        if yi.is_zero() {
            continue;
        }
        if c.relation != Relation::Eq && yi.is_negative() {
            return Err(Mismatch::Sign {
                row,
                name: c.name.clone(),
                multiplier: yi.clone(),
            });
        }
        let g = if c.relation == Relation::Ge {
            -yi
        } else {
            yi.clone()
        };
        for (j, a) in c.expr.terms() {
            coeffs[j.0] += &g * a;
        }
        rhs += &g * &c.rhs;
    }
    Ok((coeffs, rhs))
}

fn box_min(lp: &LinearProgram, coeffs: &[Rational]) -> Result<Rational, Mismatch> {
    let mut acc = Rational::zero();
    for (v, c) in lp.variables.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let end = if c.is_positive() { &v.lower } else { &v.upper };
        match end {
            Some(b) => acc += c * b,
            None => {
                return Err(Mismatch::UnboundedBox {
                    var: v.name.clone(),
                })
            }
        }
    }
    Ok(acc)
}

fn check_point(lp: &LinearProgram, x: &[Rational]) -> Result<(), Mismatch> {
    if x.len() != lp.num_vars() {
        return Err(Mismatch::Length {
            what: "assignment",
            expected: lp.num_vars(),
            found: x.len(),
        });
    }
    for (v, xi) in lp.variables.iter().zip(x) {
        let low = v.lower.as_ref().is_some_and(|l| xi < l);
        let high = v.upper.as_ref().is_some_and(|u| xi > u);
        if low || high {
            return Err(Mismatch::Bound {
                var: v.name.clone(),
                value: xi.clone(),
            });
        }
    }
    for (row, c) in lp.constraints.iter().enumerate() {
        let lhs = c.expr.eval(x);
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs,
            Relation::Ge => lhs >= c.rhs,
            Relation::Eq => lhs == c.rhs,
        };
        if !ok {
            return Err(Mismatch::Constraint {
                row,
                name: c.name.clone(),
                lhs,
                relation: c.relation,
                rhs: c.rhs.clone(),
            });
        }
    }
    Ok(())
}

/// Re-checks an outcome's certificate against `lp` by direct arithmetic.
pub fn verify_outcome(lp: &LinearProgram, out: &LpOutcome) -> Result<(), Mismatch> {
    match out {
        LpOutcome::Optimal {
            assignment,
            value,
            duals,
        } => {
            check_point(lp, assignment)?;
            let actual = lp.objective.eval(assignment);
            if &actual != value {
                return Err(Mismatch::Value {
                    claimed: value.clone(),
                    actual,
                });
            }
            // Upper bound on max(σ c·x) with σ = ±1 for max/min.
            let (combined, rhs) = combine(lp, duals)?;
            let sigma_value = match lp.sense {
                Sense::Max => value.clone(),
                Sense::Min => -value,
            };
            let mut reduced = vec![Rational::zero(); lp.num_vars()];
            for (j, c) in lp.objective.terms() {
                reduced[j.0] = match lp.sense {
                    Sense::Max => c.clone(),
                    Sense::Min => -c,
                };
            }
            for (r, c) in reduced.iter_mut().zip(&combined) {
                *r -= c;
            }
            // max_box(r·x) = -min_box(-r·x)
            let neg: Vec<Rational> = reduced.iter().map(|r| -r).collect();
            let bound = rhs - box_min(lp, &neg)?;
            if bound != sigma_value {
                return Err(Mismatch::DualBound {
                    bound,
                    value: sigma_value,
                });
            }
            Ok(())
        }
        LpOutcome::Infeasible { farkas } => {
            let (combined, rhs) = combine(lp, farkas)?;
            let m = box_min(lp, &combined)?;
            if m > rhs {
                Ok(())
            } else {
                Err(Mismatch::NoContradiction { box_min: m, rhs })
            }
        }
        LpOutcome::Unbounded { point, ray } => {
            check_point(lp, point)?;
            if ray.len() != lp.num_vars() {
                return Err(Mismatch::Length {
                    what: "ray",
                    expected: lp.num_vars(),
                    found: ray.len(),
                });
            }
            for (v, d) in lp.variables.iter().zip(ray) {
                if (v.lower.is_some() && d.is_negative()) || (v.upper.is_some() && d.is_positive())
                {
                    return Err(Mismatch::RayBound {
                        var: v.name.clone(),
                        slope: d.clone(),
                    });
                }
            }
            for (row, c) in lp.constraints.iter().enumerate() {
                let slope = c.expr.eval(ray);
                let ok = match c.relation {
                    Relation::Le => !slope.is_positive(),
                    Relation::Ge => !slope.is_negative(),
                    Relation::Eq => slope.is_zero(),
                };
                if !ok {
                    return Err(Mismatch::RayRow {
                        row,
                        name: c.name.clone(),
                        slope,
                    });
                }
            }
            let slope = lp.objective.eval(ray);
            let improving = match lp.sense {
                Sense::Max => slope.is_positive(),
                Sense::Min => slope.is_negative(),
            };
            if improving {
                Ok(())
            } else {
                Err(Mismatch::RayNotImproving { slope })
            }
        }
    }
}
