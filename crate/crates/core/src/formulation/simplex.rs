//! Small exact MIP solver for [`MipModel`]s.
//!
//! Dense two-phase simplex over big rationals with Bland's rule, inside a
//! depth-first branch and bound on the first fractional integer variable. It is
//! meant for cross-checking tiny exported models, not for speed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{MipModel, Relation};
use crate::num::Rational;

type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NodeLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MipSolution {
    pub status: MipStatus,
    pub objective: Option<Rational>,
    pub values: Option<Vec<Rational>>,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimplexError {
    #[error("value does not fit the 128-bit rational type")]
    Overflow,
}

fn to_q(r: &Rational) -> Q {
    Q::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn from_q(q: &Q) -> Result<Rational, SimplexError> {
    let n = q.numer().to_i128().ok_or(SimplexError::Overflow)?;
    let d = q.denom().to_i128().ok_or(SimplexError::Overflow)?;
    Ok(Rational::new(n, d))
}

/// How a model variable is expressed through nonnegative columns.
#[derive(Debug, Clone)]
enum Column {
    /// `x = base + y`
    Shift(usize, Q),
    /// `x = base − y`
    Mirror(usize, Q),
    /// `x = y⁺ − y⁻`
    Free(usize, usize),
}

enum LpOutcome {
    Optimal(Vec<Q>, Q),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, cost: &mut [Q]) {
        let inv = Q::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !cost[c].is_zero() {
            let f = cost[c].clone();
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimises with reduced costs in `cost` (last entry: minus the objective value).
    fn optimise(&mut self, cost: &mut [Q], allowed: usize) -> bool {
        let rhs = self.width;
        loop {
            let Some(c) = (0..allowed).find(|&j| cost[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c, cost),
                None => return false,
            }
        }
    }
}

/// `min cᵀy` s.t. `A y = b`, `y ≥ 0`.
fn solve_standard(a: Vec<Vec<Q>>, b: Vec<Q>, c: &[Q]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (mut row, rhs)) in a.into_iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        if flip {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row.resize(width + 1, Q::zero());
        row[n + i] = Q::one();
        row[width] = if flip { -rhs } else { rhs };
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), width };

    // phase one: minimise the sum of artificials
    let mut cost = vec![Q::zero(); width + 1];
    for row in &t.rows {
        for (j, v) in row.iter().enumerate() {
            if j < n || j == width {
                cost[j] -= v;
            }
        }
    }
    t.optimise(&mut cost, n);
    if !cost[width].is_zero() {
        return LpOutcome::Infeasible;
    }
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(c) => {
                    let mut dummy = vec![Q::zero(); width + 1];
                    t.pivot(r, c, &mut dummy);
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // phase two
    let mut cost = vec![Q::zero(); width + 1];
    cost[..n].clone_from_slice(c);
    for (i, &bcol) in t.basis.iter().enumerate() {
        if !cost[bcol].is_zero() {
            let f = cost[bcol].clone();
            for (v, p) in cost.iter_mut().zip(&t.rows[i]) {
                *v -= &f * p;
            }
        }
    }
    if !t.optimise(&mut cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![Q::zero(); n];
    for (i, &bcol) in t.basis.iter().enumerate() {
        if bcol < n {
            y[bcol] = t.rows[i][width].clone();
        }
    }
    let obj = -cost[width].clone();
    LpOutcome::Optimal(y, obj)
}

/// LP relaxation of `model` with the given bounds.
fn solve_relaxation(
    model: &MipModel,
    lower: &[Option<Q>],
    upper: &[Option<Q>],
) -> LpOutcome {
    let nv = model.variables.len();
    let mut columns = Vec::with_capacity(nv);
    let mut ncols = 0;
    let mut bound_rows: Vec<(usize, Q)> = Vec::new();
    for j in 0..nv {
        match (&lower[j], &upper[j]) {
            (Some(l), Some(u)) => {
                if l > u {
                    return LpOutcome::Infeasible;
                }
                columns.push(Column::Shift(ncols, l.clone()));
                bound_rows.push((ncols, u - l));
                ncols += 1;
            }
            (Some(l), None) => {
                columns.push(Column::Shift(ncols, l.clone()));
                ncols += 1;
            }
            (None, Some(u)) => {
                columns.push(Column::Mirror(ncols, u.clone()));
                ncols += 1;
            }
            (None, None) => {
                columns.push(Column::Free(ncols, ncols + 1));
                ncols += 2;
            }
        }
    }
    let slacks = bound_rows.len()
        + model.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let n = ncols + slacks;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut next_slack = ncols;
    for (col, cap) in bound_rows {
        let mut row = vec![Q::zero(); n];
        row[col] = Q::one();
        row[next_slack] = Q::one();
        next_slack += 1;
        a.push(row);
        b.push(cap);
    }
    for con in &model.constraints {
        let mut row = vec![Q::zero(); n];
        let mut rhs = to_q(&con.rhs);
        for (j, coef) in &con.terms {
            let coef = to_q(coef);
            match &columns[*j] {
                Column::Shift(c, base) => {
                    row[*c] += &coef;
                    rhs -= &coef * base;
                }
                Column::Mirror(c, base) => {
                    row[*c] -= &coef;
                    rhs -= &coef * base;
                }
                Column::Free(p, q) => {
                    row[*p] += &coef;
                    row[*q] -= &coef;
                }
            }
        }
        match con.relation {
            Relation::Eq => {}
            Relation::Le => {
                row[next_slack] = Q::one();
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Q::one();
                next_slack += 1;
            }
        }
        a.push(row);
        b.push(rhs);
    }
    let mut cost = vec![Q::zero(); n];
    let mut constant = Q::zero();
    for (j, coef) in &model.objective {
        let coef = to_q(coef);
        match &columns[*j] {
            Column::Shift(c, base) => {
                cost[*c] += &coef;
                constant += &coef * base;
            }
            Column::Mirror(c, base) => {
                cost[*c] -= &coef;
                constant += &coef * base;
            }
            Column::Free(p, q) => {
                cost[*p] += &coef;
                cost[*q] -= &coef;
            }
        }
    }
    match solve_standard(a, b, &cost) {
        LpOutcome::Optimal(y, obj) => {
            let x = columns
                .iter()
                .map(|c| match c {
                    Column::Shift(k, base) => base + &y[*k],
                    Column::Mirror(k, base) => base - &y[*k],
                    Column::Free(p, q) => &y[*p] - &y[*q],
                })
                .collect();
            LpOutcome::Optimal(x, obj + constant)
        }
        other => other,
    }
}

fn floor_q(q: &Q) -> Q {
    Q::from_integer(q.floor().to_integer())
}

/// Solves `model` to optimality or until `node_limit` relaxations were solved.
pub fn solve_mip(model: &MipModel, node_limit: u64) -> Result<MipSolution, SimplexError> {
    let lower: Vec<Option<Q>> = model.variables.iter().map(|v| v.lower.as_ref().map(to_q)).collect();
    let upper: Vec<Option<Q>> = model.variables.iter().map(|v| v.upper.as_ref().map(to_q)).collect();
    let mut stack = vec![(lower, upper)];
    let mut best: Option<(Q, Vec<Q>)> = None;
    let mut nodes = 0u64;
    let mut unbounded = false;
    while let Some((lo, hi)) = stack.pop() {
        if nodes >= node_limit {
            let (objective, values) = finish(best)?;
            return Ok(MipSolution { status: MipStatus::NodeLimit, objective, values, nodes });
        }
        nodes += 1;
        let (x, obj) = match solve_relaxation(model, &lo, &hi) {
            LpOutcome::Optimal(x, obj) => (x, obj),
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                unbounded = true;
                continue;
            }
        };
        if best.as_ref().is_some_and(|(b, _)| obj >= *b) {
            continue;
        }
        let fractional = model
            .variables
            .iter()
            .enumerate()
            .find(|(j, v)| v.integer && !x[*j].is_integer())
            .map(|(j, _)| j);
        match fractional {
            None => best = Some((obj, x)),
            Some(j) => {
                let down = floor_q(&x[j]);
                let up = &down + Q::one();
                let mut hi_down = hi.clone();
                hi_down[j] = Some(down);
                let mut lo_up = lo.clone();
                lo_up[j] = Some(up);
                stack.push((lo_up, hi));
                stack.push((lo, hi_down));
            }
        }
    }
    let status = match (&best, unbounded) {
        (Some(_), _) => MipStatus::Optimal,
        (None, true) => MipStatus::Unbounded,
        (None, false) => MipStatus::Infeasible,
    };
    let (objective, values) = finish(best)?;
    Ok(MipSolution { status, objective, values, nodes })
}

type Finished = (Option<Rational>, Option<Vec<Rational>>);

fn finish(best: Option<(Q, Vec<Q>)>) -> Result<Finished, SimplexError> {
    match best {
        None => Ok((None, None)),
        Some((obj, x)) => Ok((
            Some(from_q(&obj)?),
            Some(x.iter().map(from_q).collect::<Result<_, _>>()?),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{Constraint, VarKind, Variable};
    use crate::num::rat;

    fn var(name: &str, lower: Option<i64>, upper: Option<i64>, integer: bool) -> Variable {
        Variable {
            name: name.into(),
            lower: lower.map(rat),
            upper: upper.map(rat),
            integer,
            kind: VarKind::Other,
            source: 0,
        }
    }

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  x = 8/5, y = 6/5
        let mut m = MipModel::default();
        let x = m.add_variable(var("x", Some(0), None, false));
        let y = m.add_variable(var("y", Some(0), None, false));
        m.constraints.push(Constraint { name: "a".into(), terms: vec![(x, rat(1)), (y, rat(2))], relation: Relation::Le, rhs: rat(4) });
        m.constraints.push(Constraint { name: "b".into(), terms: vec![(x, rat(3)), (y, rat(1))], relation: Relation::Le, rhs: rat(6) });
        m.objective = vec![(x, rat(-1)), (y, rat(-1))];
        let s = solve_mip(&m, 10).unwrap();
        assert_eq!(s.status, MipStatus::Optimal);
        assert_eq!(s.objective, Some(Rational::new(-14, 5)));

        m.variables[x].integer = true;
        m.variables[y].integer = true;
        let s = solve_mip(&m, 1000).unwrap();
        assert_eq!(s.objective, Some(rat(-2)));
        assert!(m.is_feasible(s.values.as_ref().unwrap()));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut m = MipModel::default();
        let x = m.add_variable(var("x", None, None, false));
        m.constraints.push(Constraint { name: "a".into(), terms: vec![(x, rat(1))], relation: Relation::Ge, rhs: rat(3) });
        m.objective = vec![(x, rat(-1))];
        assert_eq!(solve_mip(&m, 10).unwrap().status, MipStatus::Unbounded);
        m.constraints.push(Constraint { name: "b".into(), terms: vec![(x, rat(1))], relation: Relation::Le, rhs: rat(2) });
        assert_eq!(solve_mip(&m, 10).unwrap().status, MipStatus::Infeasible);
    }

    #[test]
    fn figure_three_arc_model() {
        let net = crate::fixtures::figure3();
        let model = crate::formulation::build_arc_mpesp(&net);
        let s = solve_mip(&model, 10_000).unwrap();
        assert_eq!(s.status, MipStatus::Optimal);
        // unit weights: 1 + 7 + 2 + 16 + 6 is attainable and every arc sits at its lower bound
        assert_eq!(s.objective, Some(rat(32)));
    }
}
