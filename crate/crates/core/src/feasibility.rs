//! Exact rational linear programming over free variables.
//!
//! A dense two-phase simplex on `BigRational` with Bland's anti-cycling
//! rule. Problems here are tiny (a handful of variables, at most a few
//! hundred constraints), so no attempt is made at sparsity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Optimum {
    Infeasible,
    Unbounded,
    Optimal {
        value: BigRational,
        point: Vec<BigRational>,
    },
}

/// A system of linear constraints over `num_vars` free rational variables.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn push(&mut self, coeffs: Vec<BigRational>, relation: Relation, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint arity");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn push_int(&mut self, coeffs: &[BigInt], relation: Relation, rhs: &BigInt) {
        self.push(
            coeffs.iter().cloned().map(BigRational::from_integer).collect(),
            relation,
            BigRational::from_integer(rhs.clone()),
        );
    }

    /// `x_var >= bound`
    pub fn push_lower_bound(&mut self, var: usize, bound: BigRational) {
        let mut coeffs = vec![BigRational::zero(); self.num_vars];
        coeffs[var] = BigRational::one();
        self.push(coeffs, Relation::Ge, bound);
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn maximize(&self, objective: &[BigRational]) -> Optimum {
        let neg: Vec<BigRational> = objective.iter().map(|c| -c).collect();
        match self.minimize(&neg) {
            Optimum::Optimal { value, point } => Optimum::Optimal {
                value: -value,
                point,
            },
            other => other,
        }
    }

    pub fn minimize(&self, objective: &[BigRational]) -> Optimum {
        assert_eq!(objective.len(), self.num_vars, "objective arity");
        Tableau::solve(self, objective)
    }

    pub fn feasible_point(&self) -> Option<Vec<BigRational>> {
        match self.minimize(&vec![BigRational::zero(); self.num_vars]) {
            Optimum::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_point().is_some()
    }

    /// Checks a point against every constraint exactly.
    pub fn satisfies(&self, point: &[BigRational]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs: BigRational = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            }
        })
    }
}

/// Standard form `min c.y, A y = b, y >= 0, b >= 0`. Columns are laid out
/// as `[x+ (n) | x- (n) | slacks | artificials]`.
struct Tableau {
    rows: Vec<Vec<BigRational>>,
    /// reduced-cost row; last entry is minus the objective value
    cost: Vec<BigRational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn solve(lp: &LinearProgram, objective: &[BigRational]) -> Optimum {
        let n = lp.num_vars;
        let m = lp.constraints.len();
        let num_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let art_start = 2 * n + num_slack;
        let width = art_start + m;

        let mut rows = Vec::with_capacity(m);
        let mut slack = 2 * n;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![BigRational::zero(); width + 1];
            for (j, a) in c.coeffs.iter().enumerate() {
                row[j] = a.clone();
                row[n + j] = -a;
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = BigRational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -BigRational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[width] = c.rhs.clone();
            if row[width].is_negative() {
                for x in row.iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            row[art_start + i] = BigRational::one();
            rows.push(row);
        }

        // phase 1: minimise the sum of artificials
        let mut cost = vec![BigRational::zero(); width + 1];
        for row in &rows {
            for (j, x) in row.iter().enumerate() {
                if j < art_start || j == width {
                    cost[j] -= x;
                }
            }
        }
        let mut t = Tableau {
            rows,
            cost,
            basis: (art_start..art_start + m).collect(),
            width,
        };
        t.run(width);
        if !t.cost[width].is_zero() {
            return Optimum::Infeasible;
        }

        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        // phase 2
        let mut cost = vec![BigRational::zero(); width + 1];
        for j in 0..n {
            cost[j] = objective[j].clone();
            cost[n + j] = -&objective[j];
        }
        for (r, &b) in t.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let cb = cost[b].clone();
            for j in 0..=width {
                let delta = &cb * &t.rows[r][j];
                cost[j] -= delta;
            }
        }
        t.cost = cost;
        if !t.run(art_start) {
            return Optimum::Unbounded;
        }

        let mut y = vec![BigRational::zero(); width];
        for (r, &b) in t.basis.iter().enumerate() {
            y[b] = t.rows[r][width].clone();
        }
        let point: Vec<BigRational> = (0..n).map(|j| &y[j] - &y[n + j]).collect();
        let value = objective.iter().zip(&point).map(|(c, x)| c * x).sum();
        Optimum::Optimal { value, point }
    }

    /// Runs simplex iterations over columns `< allowed`. Returns false when
    /// the objective is unbounded below.
    fn run(&mut self, allowed: usize) -> bool {
        let rhs = self.width;
        loop {
            let Some(q) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[q];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((p, _)) => self.pivot(p, q),
                None => return false,
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = self.rows[p][q].recip();
        for x in self.rows[p].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[p].clone();
        let eliminate = |row: &mut Vec<BigRational>| {
            if row[q].is_zero() {
                return;
            }
            let k = row[q].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &k * y;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != p {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[p] = q;
    }
}
