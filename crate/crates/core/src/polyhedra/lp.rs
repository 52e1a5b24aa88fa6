//! Exact two-phase simplex over the rationals (Bland's rule, so it always
//! terminates and the optimum it returns is deterministic).

use num_traits::{One, Signed, Zero};

use crate::exact::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Minimize `objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars;
        let m = self.constraints.len();
        // columns: original | slack/surplus | artificial | rhs
        let mut slack_cols = 0;
        let mut art_cols = 0;
        for c in &self.constraints {
            let rel = normalized_relation(c);
            if rel != Relation::Eq {
                slack_cols += 1;
            }
            if rel != Relation::Le {
                art_cols += 1;
            }
        }
        let total = n + slack_cols + art_cols;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s_idx, mut a_idx) = (n, n + slack_cols);
        for c in &self.constraints {
            let flip = c.rhs.is_negative();
            let rel = normalized_relation(c);
            let mut row = vec![Rational::zero(); total + 1];
            for (j, v) in c.coeffs.iter().enumerate() {
                row[j] = if flip { -v.clone() } else { v.clone() };
            }
            row[total] = if flip { -c.rhs.clone() } else { c.rhs.clone() };
            match rel {
                Relation::Le => {
                    row[s_idx] = Rational::one();
                    basis.push(s_idx);
                    s_idx += 1;
                }
                Relation::Ge => {
                    row[s_idx] = -Rational::one();
                    s_idx += 1;
                    row[a_idx] = Rational::one();
                    basis.push(a_idx);
                    a_idx += 1;
                }
                Relation::Eq => {
                    row[a_idx] = Rational::one();
                    basis.push(a_idx);
                    a_idx += 1;
                }
            }
            rows.push(row);
        }
        let mut t = Tableau { rows, basis, total };
        let art_start = n + slack_cols;

        if art_cols > 0 {
            let mut cost = vec![Rational::zero(); total];
            for c in cost.iter_mut().skip(art_start) {
                *c = Rational::one();
            }
            let allowed = vec![true; total];
            t.optimize(&cost, &allowed);
            if !t.objective_value(&cost).is_zero() {
                return LpOutcome::Infeasible;
            }
            // drive artificial variables out of the basis
            for r in 0..t.rows.len() {
                if t.basis[r] >= art_start {
                    if let Some(col) = (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                        t.pivot(r, col);
                    }
                }
            }
        }
        let mut cost = vec![Rational::zero(); total];
        cost[..n].clone_from_slice(&self.objective);
        let allowed: Vec<bool> = (0..total).map(|j| j < art_start).collect();
        if !t.optimize(&cost, &allowed) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); n];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rows[r][total].clone();
            }
        }
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { x, value }
    }
}

fn normalized_relation(c: &Constraint) -> Relation {
    match (c.relation, c.rhs.is_negative()) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    total: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v = &*v * &inv;
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
        self.basis[r] = c;
    }

    fn objective_value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .enumerate()
            .map(|(r, &b)| &cost[b] * &self.rows[r][self.total])
            .sum()
    }

    /// Returns false when the objective is unbounded below.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.total).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced: Rational = &cost[j]
                    - self
                        .basis
                        .iter()
                        .enumerate()
                        .map(|(r, &b)| &cost[b] * &self.rows[r][j])
                        .sum::<Rational>();
                reduced.is_negative()
            });
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if a.is_positive() {
                    let ratio = &self.rows[r][self.total] / a;
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

/// Feasibility helper for free variables: substitutes `x = p - q`.
pub fn solve_free(
    num_vars: usize,
    objective_l1: bool,
    constraints: &[(Vec<Rational>, Relation, Rational)],
) -> Option<Vec<Rational>> {
    let mut lp = LinearProgram::new(2 * num_vars);
    if objective_l1 {
        lp.objective = vec![Rational::one(); 2 * num_vars];
    }
    for (coeffs, rel, rhs) in constraints {
        let mut row = coeffs.clone();
        row.extend(coeffs.iter().map(|c| -c.clone()));
        lp.add(row, *rel, rhs.clone());
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some((0..num_vars).map(|j| &x[j] - &x[j + num_vars]).collect()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![int(-1), int(-1)];
        lp.add(vec![int(1), int(2)], Relation::Le, int(4));
        lp.add(vec![int(3), int(1)], Relation::Le, int(6));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![rat(8, 5), rat(6, 5)]);
                assert_eq!(value, rat(-14, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![int(1)], Relation::Ge, int(2));
        lp.add(vec![int(1)], Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.objective = vec![int(-1)];
        lp.add(vec![int(1)], Relation::Ge, int(2));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_and_free_variables() {
        // x - y = -3, minimize |x| + |y| -> x = -3, y = 0 or similar with total 3
        let sol = solve_free(2, true, &[(vec![int(1), int(-1)], Relation::Eq, int(-3))]).unwrap();
        assert_eq!(&sol[0] - &sol[1], int(-3));
        assert_eq!(sol[0].abs() + sol[1].abs(), int(3));
    }
}
