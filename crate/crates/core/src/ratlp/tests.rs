use super::*;
use crate::rational::{q, qi};

fn nonneg_vars(lp: &mut LinearProgram, n: usize) -> Vec<VarId> {
    (0..n).map(|j| lp.nonneg(format!("x{j}"))).collect()
}

fn solve_checked(lp: &LinearProgram) -> LpOutcome {
    let out = solve(lp).unwrap();
    verify_outcome(lp, &out).unwrap_or_else(|m| panic!("certificate rejected: {m}"));
    for rule in [
        PivotRule::Bland,
        PivotRule::Hybrid {
            degenerate_limit: 0,
        },
        PivotRule::Hybrid {
            degenerate_limit: 50,
        },
    ] {
        let (other, _) = solve_with(lp, &SolveOptions { pivot: rule }).unwrap();
        verify_outcome(lp, &other).unwrap();
        assert_eq!(other.value(), out.value());
        assert_eq!(std::mem::discriminant(&other), std::mem::discriminant(&out));
    }
    out
}

#[test]
fn single_bound_max() {
    let mut lp = LinearProgram::new(Sense::Max);
    let x = lp.nonneg("x");
    lp.set_objective(Sense::Max, [(x, qi(1))]);
    lp.add_constraint("cap", [(x, qi(1))], Relation::Le, qi(1));
    match solve_checked(&lp) {
        LpOutcome::Optimal {
            assignment, value, ..
        } => {
            assert_eq!(assignment, vec![qi(1)]);
            assert_eq!(value, qi(1));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn contradictory_rows_give_farkas() {
    let mut lp = LinearProgram::new(Sense::Max);
    let x = lp.free("x");
    lp.add_constraint("a", [(x, qi(1))], Relation::Le, qi(-1));
    lp.add_constraint("b", [(x, qi(1))], Relation::Ge, qi(0));
    match solve_checked(&lp) {
        LpOutcome::Infeasible { farkas } => {
            assert!(farkas[0].is_positive());
            assert_eq!(farkas[0], farkas[1]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn equal_pair_is_unbounded_along_diagonal() {
    let mut lp = LinearProgram::new(Sense::Max);
    let v = nonneg_vars(&mut lp, 2);
    lp.set_objective(Sense::Max, [(v[0], qi(1)), (v[1], qi(1))]);
    lp.add_constraint("eq", [(v[0], qi(1)), (v[1], qi(-1))], Relation::Eq, qi(0));
    match solve_checked(&lp) {
        LpOutcome::Unbounded { ray, .. } => {
            assert!(ray[0].is_positive());
            assert_eq!(ray[0], ray[1]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn minimization_with_mixed_bounds() {
    // min x − y, −2 ≤ x ≤ 3, y ≤ 4 (no lower), x + y ≥ 1
    let mut lp = LinearProgram::new(Sense::Min);
    let x = lp.add_var("x", Some(qi(-2)), Some(qi(3)));
    let y = lp.add_var("y", None, Some(qi(4)));
    lp.set_objective(Sense::Min, [(x, qi(1)), (y, qi(-1))]);
    lp.add_constraint("s", [(x, qi(1)), (y, qi(1))], Relation::Ge, qi(1));
    let out = solve_checked(&lp);
    assert_eq!(out.value(), Some(&qi(-6)));
}

#[test]
fn equality_with_free_variables() {
    // max 2a + b, a + b = 3/2, a − b ≤ 1/3, both free
    let mut lp = LinearProgram::new(Sense::Max);
    let a = lp.free("a");
    let b = lp.free("b");
    lp.set_objective(Sense::Max, [(a, qi(2)), (b, qi(1))]);
    lp.add_constraint("sum", [(a, qi(1)), (b, qi(1))], Relation::Eq, q(3, 2));
    lp.add_constraint("gap", [(a, qi(1)), (b, qi(-1))], Relation::Le, q(1, 3));
    let out = solve_checked(&lp);
    // a = 11/12, b = 7/12
    assert_eq!(out.assignment().unwrap(), &[q(11, 12), q(7, 12)]);
    assert_eq!(out.value(), Some(&q(29, 12)));
}

#[test]
fn redundant_equalities_are_tolerated() {
    let mut lp = LinearProgram::new(Sense::Max);
    let v = nonneg_vars(&mut lp, 3);
    lp.set_objective(Sense::Max, [(v[0], qi(1)), (v[2], qi(2))]);
    let row = [(v[0], qi(1)), (v[1], qi(1)), (v[2], qi(1))];
    lp.add_constraint("s1", row.clone(), Relation::Eq, qi(1));
    lp.add_constraint(
        "s2",
        row.iter().map(|(j, c)| (*j, c * qi(2))),
        Relation::Eq,
        qi(2),
    );
    lp.add_constraint("s3", [(v[2], qi(1))], Relation::Le, q(1, 2));
    let out = solve_checked(&lp);
    assert_eq!(out.value(), Some(&q(3, 2)));
}

#[test]
fn empty_program_is_trivially_optimal() {
    let lp = LinearProgram::new(Sense::Max);
    let out = solve_checked(&lp);
    assert_eq!(out.value(), Some(&qi(0)));
}

#[test]
fn fixed_variable_and_infeasible_box() {
    let mut lp = LinearProgram::new(Sense::Max);
    let x = lp.add_var("x", Some(qi(2)), Some(qi(2)));
    lp.add_constraint("low", [(x, qi(1))], Relation::Ge, qi(3));
    let out = solve_checked(&lp);
    assert!(out.is_infeasible());
}

#[test]
fn beale_degenerate_lp_terminates() {
    // Classic instance on which the most-negative-cost rule with lowest-index
    // ties cycles forever.
    let mut lp = LinearProgram::new(Sense::Min);
    let v = nonneg_vars(&mut lp, 4);
    lp.set_objective(
        Sense::Min,
        [
            (v[0], q(-3, 4)),
            (v[1], qi(20)),
            (v[2], q(-1, 2)),
            (v[3], qi(6)),
        ],
    );
    lp.add_constraint(
        "r1",
        [
            (v[0], q(1, 4)),
            (v[1], qi(-8)),
            (v[2], qi(-1)),
            (v[3], qi(9)),
        ],
        Relation::Le,
        qi(0),
    );
    lp.add_constraint(
        "r2",
        [
            (v[0], q(1, 2)),
            (v[1], qi(-12)),
            (v[2], q(-1, 2)),
            (v[3], qi(3)),
        ],
        Relation::Le,
        qi(0),
    );
    lp.add_constraint("r3", [(v[2], qi(1))], Relation::Le, qi(1));
    let out = solve_checked(&lp);
    assert_eq!(out.value(), Some(&q(-5, 4)));
}

#[test]
fn deterministic_output() {
    let mut lp = LinearProgram::new(Sense::Max);
    let v = nonneg_vars(&mut lp, 3);
    lp.set_objective(Sense::Max, v.iter().map(|j| (*j, qi(1))));
    lp.add_constraint("a", [(v[0], qi(1)), (v[1], qi(1))], Relation::Le, qi(1));
    lp.add_constraint("b", [(v[1], qi(1)), (v[2], qi(1))], Relation::Le, qi(1));
    lp.add_constraint("c", [(v[0], qi(1)), (v[2], qi(1))], Relation::Le, qi(1));
    let first = solve(&lp).unwrap();
    for _ in 0..5 {
        assert_eq!(solve(&lp).unwrap(), first);
    }
    assert_eq!(first.value(), Some(&q(3, 2)));
}

#[test]
fn violated_assignment_names_constraint() {
    let mut lp = LinearProgram::new(Sense::Max);
    let x = lp.nonneg("x");
    lp.set_objective(Sense::Max, [(x, qi(1))]);
    lp.add_constraint("cap", [(x, qi(1))], Relation::Le, qi(1));
    let bad = LpOutcome::Optimal {
        assignment: vec![q(11, 10)],
        value: q(11, 10),
        duals: vec![qi(1)],
    };
    let msg = verify_outcome(&lp, &bad).unwrap_err().to_string();
    assert!(msg.contains("cap"), "{msg}");
}

#[test]
fn negative_multiplier_on_le_row_is_a_sign_error() {
    let mut lp = LinearProgram::new(Sense::Max);
    let x = lp.free("x");
    lp.add_constraint("a", [(x, qi(1))], Relation::Le, qi(-1));
    lp.add_constraint("b", [(x, qi(1))], Relation::Ge, qi(0));
    let bad = LpOutcome::Infeasible {
        farkas: vec![qi(-1), qi(1)],
    };
    let msg = verify_outcome(&lp, &bad).unwrap_err().to_string();
    assert!(msg.contains("sign"), "{msg}");
}

#[test]
fn weak_dual_bound_is_rejected() {
    let mut lp = LinearProgram::new(Sense::Max);
    let x = lp.nonneg("x");
    lp.set_objective(Sense::Max, [(x, qi(1))]);
    lp.add_constraint("cap", [(x, qi(1))], Relation::Le, qi(1));
    let loose = LpOutcome::Optimal {
        assignment: vec![qi(1)],
        value: qi(1),
        duals: vec![qi(2)],
    };
    assert!(matches!(
        verify_outcome(&lp, &loose),
        Err(Mismatch::DualBound { .. })
    ));
    let wrong_value = LpOutcome::Optimal {
        assignment: vec![qi(1)],
        value: qi(2),
        duals: vec![qi(1)],
    };
    assert!(matches!(
        verify_outcome(&lp, &wrong_value),
        Err(Mismatch::Value { .. })
    ));
}

#[test]
fn bogus_ray_is_rejected() {
    let mut lp = LinearProgram::new(Sense::Max);
    let v = nonneg_vars(&mut lp, 2);
    lp.set_objective(Sense::Max, [(v[0], qi(1)), (v[1], qi(1))]);
    lp.add_constraint("eq", [(v[0], qi(1)), (v[1], qi(-1))], Relation::Eq, qi(0));
    let bad = LpOutcome::Unbounded {
        point: vec![qi(0), qi(0)],
        ray: vec![qi(1), qi(0)],
    };
    assert!(matches!(
        verify_outcome(&lp, &bad),
        Err(Mismatch::RayRow { .. })
    ));
}

#[test]
fn invalid_program_is_reported() {
    let mut lp = LinearProgram::new(Sense::Max);
    lp.add_var("x", Some(qi(1)), Some(qi(0)));
    assert!(matches!(solve(&lp), Err(LpError::EmptyBounds(_))));
}
