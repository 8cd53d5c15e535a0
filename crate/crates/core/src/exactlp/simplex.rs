//! Two-phase dense-tableau simplex over exact rationals.
//!
//! Works on the standard form `min cᵀx, Ax = b, x ≥ 0` with `b ≥ 0`. One
//! artificial column per row starts basic; those columns stay in the tableau
//! so that `B⁻¹` (and with it the dual solution) can be read off at the end.
//! Bland's rule picks both the entering and the leaving column, so the method
//! terminates on degenerate problems.

use num::{Signed, Zero};

use super::Rational;

pub(crate) struct StandardForm {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

pub(crate) enum StandardOutcome {
    Optimal {
        x: Vec<Rational>,
        y: Vec<Rational>,
        value: Rational,
    },
    /// `Aᵀy ≤ 0` and `bᵀy > 0`.
    Infeasible { y: Vec<Rational> },
    /// `x` feasible, `Ad = 0`, `d ≥ 0`, `cᵀd < 0`.
    Unbounded {
        x: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

struct Tableau {
    rows: usize,
    cols: usize,
    // rows × (cols + rows + 1); the last entry of each row is the right-hand side.
    body: Vec<Vec<Rational>>,
    // Reduced costs over all columns; the last entry is minus the objective.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(form: &StandardForm) -> Self {
        let rows = form.b.len();
        let cols = form.c.len();
        let width = cols + rows + 1;
        let body = (0..rows)
            .map(|i| {
                let mut row = Vec::with_capacity(width);
                row.extend(form.a[i].iter().cloned());
                row.extend((0..rows).map(|k| {
                    if k == i {
                        Rational::from_integer(1.into())
                    } else {
                        Rational::zero()
                    }
                }));
                row.push(form.b[i].clone());
                row
            })
            .collect();
        Tableau {
            rows,
            cols,
            body,
            cost: vec![Rational::zero(); width],
            basis: (cols..cols + rows).collect(),
        }
    }

    fn rhs(&self) -> usize {
        self.cols + self.rows
    }

    /// Installs a cost vector over all columns and prices out the basis.
    fn set_costs(&mut self, costs: &[Rational]) {
        let mut reduced: Vec<Rational> = costs.to_vec();
        reduced.push(Rational::zero());
        for (i, &col) in self.basis.iter().enumerate() {
            let cb = &costs[col];
            if cb.is_zero() {
                continue;
            }
            for (r, t) in reduced.iter_mut().zip(&self.body[i]) {
                if !t.is_zero() {
                    *r -= cb * t;
                }
            }
        }
        self.cost = reduced;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.body[row][col].recip();
        for t in self.body[row].iter_mut() {
            if !t.is_zero() {
                *t *= &inv;
            }
        }
        let pivot_row = self.body[row].clone();
        let eliminate = |target: &mut Vec<Rational>| {
            let factor = target[col].clone();
            if factor.is_zero() {
                return;
            }
            for (t, p) in target.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
        };
        for (i, target) in self.body.iter_mut().enumerate() {
            if i != row {
                eliminate(target);
            }
        }
        eliminate(&mut self.cost);
        self.basis[row] = col;
    }

    /// Bland's rule over the first `allowed` columns. Returns `Err(col)` when
    /// `col` improves without bound.
    fn run(&mut self, allowed: usize) -> Result<(), usize> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return Ok(());
            };
            let rhs = self.rhs();
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows {
                let t = &self.body[i][enter];
                if !t.is_positive() {
                    continue;
                }
                let ratio = &self.body[i][rhs] / t;
                let better = match &best {
                    None => true,
                    Some((r, b)) => ratio < *b || (ratio == *b && self.basis[i] < self.basis[*r]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, enter),
                None => return Err(enter),
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.cols];
        let rhs = self.rhs();
        for (i, &col) in self.basis.iter().enumerate() {
            if col < self.cols {
                x[col] = self.body[i][rhs].clone();
            }
        }
        x
    }
}

pub(crate) fn solve(form: &StandardForm) -> StandardOutcome {
    let mut tab = Tableau::new(form);
    let (m, n) = (tab.rows, tab.cols);

    let mut phase_one = vec![Rational::zero(); n];
    phase_one.extend((0..m).map(|_| Rational::from_integer(1.into())));
    tab.set_costs(&phase_one);
    tab.run(n).expect("phase one is bounded below by zero");

    let infeasibility = -tab.cost[tab.rhs()].clone();
    if infeasibility.is_positive() {
        // Phase-one duals: w_k = 1 − r_k for artificial column k.
        let y = (0..m)
            .map(|k| Rational::from_integer(1.into()) - &tab.cost[n + k])
            .collect();
        return StandardOutcome::Infeasible { y };
    }

    // Drive zero-valued artificials out where an original column allows it;
    // rows with no such column are redundant and keep their artificial at 0.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.body[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    let mut phase_two = form.c.clone();
    phase_two.extend((0..m).map(|_| Rational::zero()));
    tab.set_costs(&phase_two);
    if let Err(enter) = tab.run(n) {
        let mut ray = vec![Rational::zero(); n];
        ray[enter] = Rational::from_integer(1.into());
        for (i, &col) in tab.basis.iter().enumerate() {
            if col < n {
                ray[col] = -tab.body[i][enter].clone();
            }
        }
        return StandardOutcome::Unbounded {
            x: tab.primal(),
            ray,
        };
    }

    // Phase-two duals: y_k = −r_k for artificial column k.
    let y = (0..m).map(|k| -tab.cost[n + k].clone()).collect();
    StandardOutcome::Optimal {
        x: tab.primal(),
        y,
        value: -tab.cost[tab.rhs()].clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::{int, rat};

    fn form(a: &[&[i64]], b: &[i64], c: &[i64]) -> StandardForm {
        StandardForm {
            a: a.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
            b: b.iter().map(|&v| int(v)).collect(),
            c: c.iter().map(|&v| int(v)).collect(),
        }
    }

    #[test]
    fn small_optimum_with_duals() {
        // min -x1 - x2 s.t. x1 + 2x2 + s1 = 4, 3x1 + x2 + s2 = 6
        let f = form(&[&[1, 2, 1, 0], &[3, 1, 0, 1]], &[4, 6], &[-1, -1, 0, 0]);
        let StandardOutcome::Optimal { x, y, value } = solve(&f) else {
            panic!("expected optimum");
        };
        assert_eq!(x[..2], [rat(8, 5), rat(6, 5)]);
        assert_eq!(value, rat(-14, 5));
        let dual_value = &y[0] * int(4) + &y[1] * int(6);
        assert_eq!(dual_value, value);
    }

    #[test]
    fn infeasible_rows_give_farkas_vector() {
        // x = 1 and x = 2
        let f = form(&[&[1], &[1]], &[1, 2], &[0]);
        let StandardOutcome::Infeasible { y } = solve(&f) else {
            panic!("expected infeasible");
        };
        assert!(!(&y[0] + &y[1]).is_positive());
        assert!((&y[0] + &y[1] * int(2)).is_positive());
    }

    #[test]
    fn redundant_rows_survive() {
        let f = form(&[&[1, 1], &[2, 2]], &[1, 2], &[1, 2]);
        let StandardOutcome::Optimal { x, value, .. } = solve(&f) else {
            panic!("expected optimum");
        };
        assert_eq!(x, [int(1), int(0)]);
        assert_eq!(value, int(1));
    }

    #[test]
    fn unbounded_direction() {
        // min -x1 s.t. x1 - x2 = 0
        let f = form(&[&[1, -1]], &[0], &[-1, 0]);
        let StandardOutcome::Unbounded { ray, .. } = solve(&f) else {
            panic!("expected unbounded");
        };
        assert_eq!(ray, [int(1), int(1)]);
    }
}
