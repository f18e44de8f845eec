//! Two-phase primal simplex on a sparse row tableau.
//!
//! The user program is rewritten into `min C·z, A'z = b', z ≥ 0, b' ≥ 0`:
//! every variable is shifted or mirrored onto a non-negative column (free
//! variables are split), finite upper bounds become extra rows, and slack
//! columns turn inequalities into equalities. The column that starts basic in
//! each row (a slack or an artificial) is remembered so that simplex
//! multipliers can be read off the final reduced costs.

use num_traits::{One, Zero};

use super::{LinearProgram, LpError, LpOutcome, Relation, Sense};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index entering and leaving choice throughout.
    Bland,
    /// Most negative reduced cost, falling back to Bland after this many
    /// consecutive degenerate pivots until the objective moves again.
    Hybrid { degenerate_limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub pivot: PivotRule,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            pivot: PivotRule::Hybrid {
                degenerate_limit: 8,
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub rows: usize,
    pub columns: usize,
    pub phase1_pivots: usize,
    pub phase2_pivots: usize,
    pub bland_pivots: usize,
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    solve_with(lp, &SolveOptions::default()).map(|(out, _)| out)
}

pub fn solve_with(
    lp: &LinearProgram,
    opts: &SolveOptions,
) -> Result<(LpOutcome, SolveStats), LpError> {
    lp.validate()?;
    let mut t = Tableau::build(lp);
    let mut stats = SolveStats {
        rows: t.rows.len(),
        columns: t.ncols,
        ..Default::default()
    };

    // Phase 1.
    let cost1: Vec<Rational> = (0..t.ncols)
        .map(|j| {
            if t.artificial[j] {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    t.set_costs(&cost1);
    match t.run(opts.pivot, &mut stats.bland_pivots) {
        Run::Optimal(p) => stats.phase1_pivots = p,
        Run::Unbounded(..) => unreachable!("phase 1 objective is bounded below by zero"),
    }
    if t.obj.is_positive() {
        let farkas = t.multipliers(&cost1);
        return Ok((LpOutcome::Infeasible { farkas }, stats));
    }
    t.drive_out_artificials();

    // Phase 2.
    let cost2 = t.phase2_costs(lp);
    t.set_costs(&cost2);
    let outcome = match t.run(opts.pivot, &mut stats.bland_pivots) {
        Run::Optimal(p) => {
            stats.phase2_pivots = p;
            let assignment = t.assignment();
            let value = lp.objective.eval(&assignment);
            let duals = t.multipliers(&cost2);
            LpOutcome::Optimal {
                assignment,
                value,
                duals,
            }
        }
        Run::Unbounded(p, col) => {
            stats.phase2_pivots = p;
            let point = t.assignment();
            let ray = t.ray(col);
            LpOutcome::Unbounded { point, ray }
        }
    };
    Ok((outcome, stats))
}

/// How a user variable maps onto internal columns.
#[derive(Debug, Clone)]
enum VarMap {
    /// x = l + z
    Lower(Rational, usize),
    /// x = u − z
    Upper(Rational, usize),
    /// x = z⁺ − z⁻
    Free(usize, usize),
}

type Row = Vec<(usize, Rational)>;

enum Run {
    Optimal(usize),
    Unbounded(usize, usize),
}

struct Tableau {
    rows: Vec<Row>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Column basic in each row at the start.
    init: Vec<usize>,
    /// Row sign flips applied to make b' ≥ 0 (only user rows matter).
    flip: Vec<bool>,
    user_rows: usize,
    /// User rows with relation ≥.
    ge: Vec<bool>,
    ncols: usize,
    artificial: Vec<bool>,
    d: Vec<Rational>,
    obj: Rational,
    vars: Vec<VarMap>,
    /// Internal objective negated relative to the user maximization
    /// direction: C = −σ c T.
    sigma_neg: bool,
}

fn entry(row: &Row, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(j, _)| *j)
        .ok()
        .map(|p| &row[p].1)
}

/// `a − f·b` for sparse rows.
fn axpy(a: &Row, f: &Rational, b: &Row) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        let ja = a.get(i).map_or(usize::MAX, |e| e.0);
        let jb = b.get(k).map_or(usize::MAX, |e| e.0);
        if ja < jb {
            out.push(a[i].clone());
            i += 1;
        } else if jb < ja {
            out.push((jb, -(f * &b[k].1)));
            k += 1;
        } else {
            let v = &a[i].1 - &(f * &b[k].1);
            if !v.is_zero() {
                out.push((ja, v));
            }
            i += 1;
            k += 1;
        }
    }
    out
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0;
        let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
        for v in &lp.variables {
            match (&v.lower, &v.upper) {
                (Some(l), u) => {
                    vars.push(VarMap::Lower(l.clone(), ncols));
                    if let Some(u) = u {
                        bound_rows.push((ncols, u - l));
                    }
                    ncols += 1;
                }
                (None, Some(u)) => {
                    vars.push(VarMap::Upper(u.clone(), ncols));
                    ncols += 1;
                }
                (None, None) => {
                    vars.push(VarMap::Free(ncols, ncols + 1));
                    ncols += 2;
                }
            }
        }

        let user_rows = lp.constraints.len();
        let mut rows: Vec<Row> = Vec::with_capacity(user_rows + bound_rows.len());
        let mut rhs = Vec::with_capacity(rows.capacity());
        let mut slack_sign: Vec<i32> = Vec::with_capacity(rows.capacity());
        for c in &lp.constraints {
            let mut b = c.rhs.clone();
            let mut entries: Row = Vec::with_capacity(c.expr.terms().len());
            for (j, a) in c.expr.terms() {
                match &vars[j.0] {
                    VarMap::Lower(l, col) => {
                        b -= a * l;
                        entries.push((*col, a.clone()));
                    }
                    VarMap::Upper(u, col) => {
                        b -= a * u;
                        entries.push((*col, -a));
                    }
                    VarMap::Free(p, n) => {
                        entries.push((*p, a.clone()));
                        entries.push((*n, -a));
                    }
                }
            }
            entries.sort_by_key(|e| e.0);
            rows.push(entries);
            rhs.push(b);
            slack_sign.push(match c.relation {
                Relation::Le => 1,
                Relation::Ge => -1,
                Relation::Eq => 0,
            });
        }
        for (col, width) in bound_rows {
            rows.push(vec![(col, Rational::one())]);
            rhs.push(width);
            slack_sign.push(1);
        }

        let m = rows.len();
        let mut flip = vec![false; m];
        for i in 0..m {
            // a zero-rhs ≥ row is flipped too so that its slack can start basic
            if rhs[i].is_negative() || (rhs[i].is_zero() && slack_sign[i] == -1) {
                flip[i] = true;
                rhs[i] = -&rhs[i];
                for e in rows[i].iter_mut() {
                    e.1 = -&e.1;
                }
                slack_sign[i] = -slack_sign[i];
            }
        }
        let mut init = vec![0; m];
        for i in 0..m {
            if slack_sign[i] != 0 {
                rows[i].push((ncols, Rational::from_integer(slack_sign[i] as i64)));
                if slack_sign[i] == 1 {
                    init[i] = ncols;
                }
                ncols += 1;
            }
        }
        let mut artificial = vec![false; ncols];
        for i in 0..m {
            if slack_sign[i] != 1 {
                rows[i].push((ncols, Rational::one()));
                init[i] = ncols;
                artificial.push(true);
                ncols += 1;
            }
        }

        Tableau {
            rows,
            rhs,
            basis: init.clone(),
            init,
            flip,
            user_rows,
            ge: lp
                .constraints
                .iter()
                .map(|c| c.relation == Relation::Ge)
                .collect(),
            ncols,
            artificial,
            d: vec![Rational::zero(); ncols],
            obj: Rational::zero(),
            vars,
            sigma_neg: lp.sense == Sense::Max,
        }
    }

    fn set_costs(&mut self, cost: &[Rational]) {
        self.d = cost.to_vec();
        self.obj = Rational::zero();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in row {
                self.d[*j] -= cb * a;
            }
            self.obj += cb * &self.rhs[i];
        }
    }

    fn phase2_costs(&self, lp: &LinearProgram) -> Vec<Rational> {
        let mut cost = vec![Rational::zero(); self.ncols];
        for (j, c) in lp.objective.terms() {
            // Internal problem minimizes; a user max becomes min of −c.
            let c = if self.sigma_neg { -c } else { c.clone() };
            match &self.vars[j.0] {
                VarMap::Lower(_, col) => cost[*col] = c,
                VarMap::Upper(_, col) => cost[*col] = -c,
                VarMap::Free(p, n) => {
                    cost[*n] = -&c;
                    cost[*p] = c;
                }
            }
        }
        cost
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..self.ncols {
            if self.artificial[j] || !self.d[j].is_negative() {
                continue;
            }
            if bland {
                return Some(j);
            }
            match best {
                Some(b) if self.d[j] >= self.d[b] => {}
                _ => best = Some(j),
            }
        }
        best
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let Some(a) = entry(row, col) else { continue };
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / a;
            best = match best {
                None => Some((i, ratio)),
                Some((k, r)) => {
                    if ratio < r || (ratio == r && self.basis[i] < self.basis[k]) {
                        Some((i, ratio))
                    } else {
                        Some((k, r))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = entry(&self.rows[r], c)
            .expect("pivot on a zero entry")
            .clone();
        if !p.is_one() {
            let inv = p.recip();
            for e in self.rows[r].iter_mut() {
                e.1 = &e.1 * &inv;
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let Some(f) = entry(&self.rows[i], c).cloned() else {
                continue;
            };
            self.rows[i] = axpy(&self.rows[i], &f, &pivot_row);
            if !pivot_rhs.is_zero() {
                self.rhs[i] = &self.rhs[i] - &(&f * &pivot_rhs);
            }
        }
        let dc = self.d[c].clone();
        if !dc.is_zero() {
            for (j, a) in &pivot_row {
                self.d[*j] = &self.d[*j] - &(&dc * a);
            }
            self.obj = &self.obj + &(&dc * &pivot_rhs);
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    fn run(&mut self, rule: PivotRule, bland_count: &mut usize) -> Run {
        let limit = match rule {
            PivotRule::Bland => 0,
            PivotRule::Hybrid { degenerate_limit } => degenerate_limit,
        };
        let mut degenerate_streak = 0;
        let mut pivots = 0;
        loop {
            let bland = degenerate_streak >= limit;
            let Some(c) = self.entering(bland) else {
                return Run::Optimal(pivots);
            };
            let Some(r) = self.leaving(c) else {
                return Run::Unbounded(pivots, c);
            };
            if bland {
                *bland_count += 1;
            }
            if self.rhs[r].is_zero() {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(r, c);
            pivots += 1;
        }
    }

    /// Replaces zero-valued basic artificials by real columns where the row
    /// allows it; rows with no real entry are redundant and keep theirs.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if !self.artificial[self.basis[r]] {
                continue;
            }
            let col = self.rows[r]
                .iter()
                .find(|(j, _)| !self.artificial[*j])
                .map(|e| e.0);
            if let Some(c) = col {
                self.pivot(r, c);
            }
        }
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs[i].clone();
        }
        z
    }

    fn to_user(&self, z: &[Rational], with_offset: bool) -> Vec<Rational> {
        self.vars
            .iter()
            .map(|v| match v {
                VarMap::Lower(l, col) => {
                    if with_offset {
                        l + &z[*col]
                    } else {
                        z[*col].clone()
                    }
                }
                VarMap::Upper(u, col) => {
                    if with_offset {
                        u - &z[*col]
                    } else {
                        -&z[*col]
                    }
                }
                VarMap::Free(p, n) => &z[*p] - &z[*n],
            })
            .collect()
    }

    fn assignment(&self) -> Vec<Rational> {
        self.to_user(&self.column_values(), true)
    }

    fn ray(&self, col: usize) -> Vec<Rational> {
        let mut dz = vec![Rational::zero(); self.ncols];
        dz[col] = Rational::one();
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(a) = entry(row, col) {
                dz[self.basis[i]] = -a;
            }
        }
        self.to_user(&dz, false)
    }

    /// User-row multipliers in the ≤-form convention, from the simplex
    /// multipliers π_i = C_init(i) − d_init(i).
    fn multipliers(&self, cost: &[Rational]) -> Vec<Rational> {
        (0..self.user_rows)
            .map(|i| {
                let k = self.init[i];
                let pi = &cost[k] - &self.d[k];
                // g_i = −π_i f_i, then y_i = s_i g_i; since the internal
                // objective is a minimization of −(user max), these are the
                // multipliers for the maximization.
                let g = if self.flip[i] { pi } else { -pi };
                if self.ge[i] {
                    -g
                } else {
                    g
                }
            })
            .collect()
    }
}
