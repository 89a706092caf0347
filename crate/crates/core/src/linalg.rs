//! Exact linear algebra over the rationals: elimination, determinants and a
//! small dense simplex method.
//!
//! Every system solved in this crate is tiny (tens of rows), so dense
//! tableaus with Bland's rule are plenty.

use num_traits::{Signed, Zero};

use crate::rational::{one, zero, Rational};

/// Result of eliminating `a x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// Consistent but with free variables; the particular solution sets every
    /// free variable to zero.
    Underdetermined { particular: Vec<Rational>, rank: usize },
    Inconsistent,
}

/// Solves `a x = b` by Gauss-Jordan elimination with exact pivots.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Solution {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return Solution::Inconsistent;
    }
    let mut x = vec![zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    if pivots.len() == cols {
        Solution::Unique(x)
    } else {
        Solution::Underdetermined { particular: x, rank: pivots.len() }
    }
}

pub fn rank(a: &[Vec<Rational>]) -> usize {
    let b = vec![zero(); a.len()];
    match solve(a, &b) {
        Solution::Unique(x) => x.len(),
        Solution::Underdetermined { rank, .. } => rank,
        Solution::Inconsistent => unreachable!("homogeneous systems are consistent"),
    }
}

pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for j in c..n {
                    let delta = &f * &m[c][j];
                    m[i][j] -= delta;
                }
            }
        }
    }
    det
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `minimize objective . x` over `x >= 0` subject to the constraints.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![zero(); num_vars], constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run()
    }
}

struct Tableau {
    // rows: constraints, last column is rhs
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    num_structural: usize,
    artificial_start: usize,
    total: usize,
    objective: Vec<Rational>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let slack_count =
            lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let m = lp.constraints.len();
        let artificial_start = n + slack_count;
        let total = artificial_start + m;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = n;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![zero(); total + 1];
            row[..n].clone_from_slice(&c.coeffs);
            match c.relation {
                Relation::Le => {
                    row[slack] = one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[total] = c.rhs.clone();
            if row[total].is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[artificial_start + i] = one();
            rows.push(row);
            basis.push(artificial_start + i);
        }
        let mut objective = vec![zero(); total];
        objective[..n].clone_from_slice(&lp.objective);
        Tableau { rows, basis, num_structural: n, artificial_start, total, objective }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = one() / &self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex method for `cost` restricted to columns `< limit`.
    /// Returns false on unboundedness.
    fn optimize(&mut self, cost: &[Rational], limit: usize) -> bool {
        loop {
            // reduced cost c_j - c_B B^-1 A_j; Bland: smallest improving index
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if !row[j].is_zero() && !cost[b].is_zero() {
                        reduced -= &cost[b] * &row[j];
                    }
                }
                if reduced.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.total] / &row[c];
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
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn run(mut self) -> LpOutcome {
        let mut phase1 = vec![zero(); self.total];
        for c in phase1[self.artificial_start..].iter_mut() {
            *c = one();
        }
        self.optimize(&phase1, self.total);
        let infeasibility: Rational = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, &b)| b >= self.artificial_start)
            .map(|(row, _)| row[self.total].clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive remaining (zero-valued) artificials out of the basis
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_start {
                match (0..self.artificial_start).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        // redundant row
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let cost = self.objective.clone();
        if !self.optimize(&cost, self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![zero(); self.num_structural];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_structural {
                x[b] = row[self.total].clone();
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn unique_and_inconsistent_systems() {
        let a = vec![q(&[1, 1]), q(&[1, -1])];
        assert_eq!(solve(&a, &q(&[3, 1])), Solution::Unique(q(&[2, 1])));
        let a = vec![q(&[1, 1]), q(&[2, 2])];
        assert_eq!(solve(&a, &q(&[1, 3])), Solution::Inconsistent);
        assert!(matches!(solve(&a, &q(&[1, 2])), Solution::Underdetermined { rank: 1, .. }));
    }

    #[test]
    fn determinant_tracks_row_swaps() {
        let a = vec![q(&[0, 1]), q(&[1, 0])];
        assert_eq!(determinant(&a), int(-1));
        let a = vec![q(&[2, 0, 1]), q(&[1, 3, 2]), q(&[1, 1, 1])];
        // 2*(3-2) - 0 + 1*(1-3) = 0
        assert_eq!(determinant(&a), int(0));
    }

    #[test]
    fn lp_small_optimum() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::new(2);
        lp.objective = q(&[-1, -1]);
        lp.add(q(&[1, 2]), Relation::Le, int(4));
        lp.add(q(&[3, 1]), Relation::Le, int(6));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![frac(8, 5), frac(6, 5)]);
                assert_eq!(value, frac(-14, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lp_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(q(&[1]), Relation::Ge, int(2));
        lp.add(q(&[1]), Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(1);
        lp.objective = q(&[-1]);
        lp.add(q(&[1]), Relation::Ge, int(2));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn lp_equalities_with_redundancy() {
        // x + y = 1, 2x + 2y = 2, min x
        let mut lp = LinearProgram::new(2);
        lp.objective = q(&[1, 0]);
        lp.add(q(&[1, 1]), Relation::Eq, int(1));
        lp.add(q(&[2, 2]), Relation::Eq, int(2));
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, q(&[0, 1])),
            other => panic!("{other:?}"),
        }
    }
}
