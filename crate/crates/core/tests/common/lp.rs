use mexlab::ratlp::{LinearProgram, Relation, Sense, VarId};
use mexlab::Rational;
use num_traits::{One, Zero};
use rand::Rng;

fn small_rational<R: Rng>(rng: &mut R, num: i64) -> Rational {
    Rational::new(rng.gen_range(-num..=num), rng.gen_range(1..=10))
}

/// Random LP with at most 8 variables and 12 constraints, denominators ≤ 10.
/// With `boxed`, every variable gets finite bounds and at most 5 variables
/// are used so that vertex enumeration stays cheap.
pub fn random_lp<R: Rng>(rng: &mut R, boxed: bool) -> LinearProgram {
    let n = if boxed {
        rng.gen_range(1..=5)
    } else {
        rng.gen_range(1..=8)
    };
    let k = rng.gen_range(0..=12);
    let sense = if rng.gen_bool(0.5) {
        Sense::Max
    } else {
        Sense::Min
    };
    let mut lp = LinearProgram::new(sense);
    for j in 0..n {
        let (lower, upper) = if boxed {
            let l = small_rational(rng, 5);
            let u = &l + &Rational::new(rng.gen_range(0..=20), rng.gen_range(1..=4));
            (Some(l), Some(u))
        } else {
            let l = rng.gen_bool(0.75).then(|| small_rational(rng, 5));
            let u = rng.gen_bool(0.5).then(|| match &l {
                Some(l) => l + &Rational::new(rng.gen_range(0..=20), rng.gen_range(1..=4)),
                None => small_rational(rng, 5),
            });
            (l, u)
        };
        lp.add_var(format!("x{j}"), lower, upper);
    }
    let density = rng.gen_range(0.3..=1.0);
    let sparse_row = |rng: &mut R| -> Vec<(VarId, Rational)> {
        let mut out = Vec::new();
        for j in 0..n {
            if rng.gen_bool(density) {
                out.push((VarId(j), small_rational(rng, 9)));
            }
        }
        out
    };
    let obj = sparse_row(rng);
    lp.set_objective(sense, obj);
    for i in 0..k {
        let terms = sparse_row(rng);
        let rel = match rng.gen_range(0..6) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        lp.add_constraint(format!("r{i}"), terms, rel, small_rational(rng, 20));
    }
    lp
}

pub fn fully_bounded(lp: &LinearProgram) -> bool {
    lp.variables
        .iter()
        .all(|v| v.lower.is_some() && v.upper.is_some())
}

fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    #[allow(clippy::needless_range_loop)]
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some(b)
}

fn feasible(lp: &LinearProgram, x: &[Rational]) -> bool {
    lp.variables.iter().zip(x).all(|(v, xi)| {
        v.lower.as_ref().is_none_or(|l| xi >= l) && v.upper.as_ref().is_none_or(|u| xi <= u)
    }) && lp.constraints.iter().all(|c| {
        let lhs = c.expr.eval(x);
        match c.relation {
            Relation::Le => lhs <= c.rhs,
            Relation::Ge => lhs >= c.rhs,
            Relation::Eq => lhs == c.rhs,
        }
    })
}

/// Best objective over all vertices of a fully bounded LP, or `None` if the
/// feasible region is empty.
pub fn vertex_optimum(lp: &LinearProgram) -> Option<Rational> {
    let n = lp.num_vars();
    let mut planes: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut a = vec![Rational::zero(); n];
        for (j, v) in c.expr.terms() {
            a[j.0] = v.clone();
        }
        planes.push((a, c.rhs.clone()));
    }
    for (j, v) in lp.variables.iter().enumerate() {
        for b in [&v.lower, &v.upper].into_iter().flatten() {
            let mut a = vec![Rational::zero(); n];
            a[j] = Rational::one();
            planes.push((a, b.clone()));
        }
    }
    if n == 0 {
        return feasible(lp, &[]).then(Rational::zero);
    }
    let mut best: Option<Rational> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    let h = planes.len();
    if h < n {
        return None;
    }
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(lp, &x) {
                let v = lp.objective.eval(&x);
                let better = match (&best, lp.sense) {
                    (None, _) => true,
                    (Some(b), Sense::Max) => v > *b,
                    (Some(b), Sense::Min) => v < *b,
                };
                if better {
                    best = Some(v);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < h - n + i {
                break;
            }
        }
        idx[i] += 1;
        for k in i + 1..n {
            idx[k] = idx[k - 1] + 1;
        }
    }
}
