use num::{Signed, Zero};
use serde::Serialize;

use super::simplex::{self, StandardForm, StandardOutcome};
use super::{LpError, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    #[serde(rename = "le")]
    LessEq,
    #[serde(rename = "eq")]
    Equal,
    #[serde(rename = "ge")]
    GreaterEq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarSign {
    NonNegative,
    NonPositive,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: Vec<Rational>,
    pub kind: ConstraintKind,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<Rational>, kind: ConstraintKind, rhs: Rational) -> Self {
        LinearConstraint {
            coefficients,
            kind,
            rhs,
        }
    }
}

/// `optimize objective·x` subject to the constraints and per-variable signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<LinearConstraint>,
    pub signs: Vec<VarSign>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let signs = vec![VarSign::NonNegative; objective.len()];
        LpProblem {
            sense,
            objective,
            constraints: Vec::new(),
            signs,
        }
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coefficients: Vec<Rational>, kind: ConstraintKind, rhs: Rational) {
        self.constraints
            .push(LinearConstraint::new(coefficients, kind, rhs));
    }

    pub fn with_sign(mut self, var: usize, sign: VarSign) -> Self {
        self.signs[var] = sign;
        self
    }

    pub fn check(&self) -> Result<(), LpError> {
        let n = self.variables();
        if self.signs.len() != n {
            return Err(LpError::MalformedProblem(format!(
                "{} sign constraints for {n} variables",
                self.signs.len()
            )));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(LpError::MalformedProblem(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    row.coefficients.len()
                )));
            }
        }
        Ok(())
    }

    /// Objective as minimized internally.
    fn min_objective(&self) -> Vec<Rational> {
        match self.sense {
            Sense::Minimize => self.objective.clone(),
            Sense::Maximize => self.objective.iter().map(|c| -c).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Certificates, one per status.
///
/// Dual and Farkas vectors carry one entry per constraint, with the sign
/// pattern of the problem's Lagrangian dual: for a minimization, `≥` rows get
/// `y ≥ 0`, `≤` rows `y ≤ 0`, and equality rows are free; a maximization flips
/// both. A Farkas vector `y` uses the minimization signs, makes every column of
/// `Aᵀy` agree with its variable's sign (`≤ 0` for `x ≥ 0`, `≥ 0` for `x ≤ 0`,
/// `= 0` for free), and has `bᵀy > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpCertificate {
    Dual(Vec<Rational>),
    Farkas(Vec<Rational>),
    Ray(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal point, or a feasible point when unbounded.
    pub x: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
    pub certificate: LpCertificate,
}

enum Column {
    Plus(usize),
    Minus(usize),
    Slack,
}

pub fn lp_solve(problem: &LpProblem) -> Result<LpResult, LpError> {
    problem.check()?;
    let n = problem.variables();
    let m = problem.constraints.len();
    let c = problem.min_objective();

    let mut columns = Vec::new();
    for (j, sign) in problem.signs.iter().enumerate() {
        match sign {
            VarSign::NonNegative => columns.push(Column::Plus(j)),
            VarSign::NonPositive => columns.push(Column::Minus(j)),
            VarSign::Free => {
                columns.push(Column::Plus(j));
                columns.push(Column::Minus(j));
            }
        }
    }
    let structural = columns.len();
    let slack_rows: Vec<usize> = (0..m)
        .filter(|&i| problem.constraints[i].kind != ConstraintKind::Equal)
        .collect();
    columns.extend(slack_rows.iter().map(|_| Column::Slack));

    let flip: Vec<bool> = problem
        .constraints
        .iter()
        .map(|row| row.rhs.is_negative())
        .collect();
    let mut a = vec![vec![Rational::zero(); columns.len()]; m];
    let mut b = Vec::with_capacity(m);
    for (i, row) in problem.constraints.iter().enumerate() {
        for (k, col) in columns[..structural].iter().enumerate() {
            a[i][k] = match col {
                Column::Plus(j) => row.coefficients[*j].clone(),
                Column::Minus(j) => -row.coefficients[*j].clone(),
                Column::Slack => unreachable!(),
            };
        }
        b.push(row.rhs.clone());
    }
    for (s, &i) in slack_rows.iter().enumerate() {
        a[i][structural + s] = match problem.constraints[i].kind {
            ConstraintKind::LessEq => Rational::from_integer(1.into()),
            _ => Rational::from_integer((-1).into()),
        };
    }
    for i in 0..m {
        if flip[i] {
            for t in a[i].iter_mut() {
                *t = -t.clone();
            }
            b[i] = -b[i].clone();
        }
    }
    let mut cost: Vec<Rational> = columns[..structural]
        .iter()
        .map(|col| match col {
            Column::Plus(j) => c[*j].clone(),
            Column::Minus(j) => -c[*j].clone(),
            Column::Slack => unreachable!(),
        })
        .collect();
    cost.extend(slack_rows.iter().map(|_| Rational::zero()));

    let recover = |values: &[Rational]| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (k, col) in columns[..structural].iter().enumerate() {
            match col {
                Column::Plus(j) => x[*j] += &values[k],
                Column::Minus(j) => x[*j] -= &values[k],
                Column::Slack => {}
            }
        }
        x
    };
    let unflip = |y: Vec<Rational>| -> Vec<Rational> {
        y.into_iter()
            .zip(&flip)
            .map(|(v, &f)| if f { -v } else { v })
            .collect()
    };

    let outcome = simplex::solve(&StandardForm { a, b, c: cost });
    let negate = problem.sense == Sense::Maximize;
    Ok(match outcome {
        StandardOutcome::Optimal { x, y, value } => {
            let mut y = unflip(y);
            let mut value = value;
            if negate {
                y.iter_mut().for_each(|v| *v = -v.clone());
                value = -value;
            }
            LpResult {
                status: LpStatus::Optimal,
                x: Some(recover(&x)),
                objective: Some(value),
                certificate: LpCertificate::Dual(y),
            }
        }
        StandardOutcome::Infeasible { y } => LpResult {
            status: LpStatus::Infeasible,
            x: None,
            objective: None,
            certificate: LpCertificate::Farkas(unflip(y)),
        },
        StandardOutcome::Unbounded { x, ray } => LpResult {
            status: LpStatus::Unbounded,
            x: Some(recover(&x)),
            objective: None,
            certificate: LpCertificate::Ray(recover(&ray)),
        },
    })
}

/// Solves `problem` through its Lagrangian dual.
///
/// The tableau has one row per constraint, so problems with many more
/// constraints than variables are far cheaper this way round. Results follow
/// the same conventions as [`lp_solve`].
pub fn lp_solve_via_dual(problem: &LpProblem) -> Result<LpResult, LpError> {
    problem.check()?;
    let n = problem.variables();
    let c = problem.min_objective();

    // max bᵀy  s.t. (Aᵀy)_j ≤ / = / ≥ c_j  with the sign pattern of y fixed by row kinds.
    let mut dual = LpProblem::new(
        Sense::Maximize,
        problem.constraints.iter().map(|r| r.rhs.clone()).collect(),
    );
    dual.signs = problem
        .constraints
        .iter()
        .map(|r| match r.kind {
            ConstraintKind::GreaterEq => VarSign::NonNegative,
            ConstraintKind::LessEq => VarSign::NonPositive,
            ConstraintKind::Equal => VarSign::Free,
        })
        .collect();
    for (j, cj) in c.iter().enumerate().take(n) {
        let column = problem
            .constraints
            .iter()
            .map(|r| r.coefficients[j].clone())
            .collect();
        let kind = match problem.signs[j] {
            VarSign::NonNegative => ConstraintKind::LessEq,
            VarSign::NonPositive => ConstraintKind::GreaterEq,
            VarSign::Free => ConstraintKind::Equal,
        };
        dual.constrain(column, kind, cj.clone());
    }

    let solved = lp_solve(&dual)?;
    let negate = problem.sense == Sense::Maximize;
    match (solved.status, solved.certificate) {
        (LpStatus::Optimal, LpCertificate::Dual(x)) => {
            let mut y = solved.x.expect("optimal dual has a point");
            let mut value = solved.objective.expect("optimal dual has a value");
            if negate {
                y.iter_mut().for_each(|v| *v = -v.clone());
                value = -value;
            }
            Ok(LpResult {
                status: LpStatus::Optimal,
                x: Some(x),
                objective: Some(value),
                certificate: LpCertificate::Dual(y),
            })
        }
        (LpStatus::Unbounded, LpCertificate::Ray(ray)) => Ok(LpResult {
            status: LpStatus::Infeasible,
            x: None,
            objective: None,
            certificate: LpCertificate::Farkas(ray),
        }),
        // An infeasible dual leaves the primal infeasible or unbounded; let the
        // primal solver tell them apart and produce the matching certificate.
        _ => lp_solve(problem),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::verify::verify_lp;
    use crate::exactlp::{int, rat};

    fn max_x_below(bound: Rational) -> LpProblem {
        let mut p = LpProblem::new(Sense::Maximize, vec![int(1)]);
        p.constrain(vec![int(1)], ConstraintKind::LessEq, bound);
        p.constrain(vec![int(1)], ConstraintKind::GreaterEq, int(0));
        p
    }

    #[test]
    fn optimum_is_exact() {
        let p = max_x_below(rat(3, 7));
        for solved in [lp_solve(&p).unwrap(), lp_solve_via_dual(&p).unwrap()] {
            assert_eq!(solved.status, LpStatus::Optimal);
            assert_eq!(solved.x, Some(vec![rat(3, 7)]));
            assert_eq!(solved.objective, Some(rat(3, 7)));
            verify_lp(&p, &solved).unwrap();
        }
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut p = LpProblem::new(Sense::Minimize, vec![int(0)]);
        p.constrain(vec![int(1)], ConstraintKind::GreaterEq, int(1));
        p.constrain(vec![int(1)], ConstraintKind::LessEq, int(0));
        for solved in [lp_solve(&p).unwrap(), lp_solve_via_dual(&p).unwrap()] {
            assert_eq!(solved.status, LpStatus::Infeasible);
            verify_lp(&p, &solved).unwrap();
        }
    }

    #[test]
    fn unbounded_ray_is_unit() {
        let mut p = LpProblem::new(Sense::Maximize, vec![int(1)]);
        p.constrain(vec![int(1)], ConstraintKind::GreaterEq, int(0));
        for solved in [lp_solve(&p).unwrap(), lp_solve_via_dual(&p).unwrap()] {
            assert_eq!(solved.status, LpStatus::Unbounded);
            assert_eq!(solved.certificate, LpCertificate::Ray(vec![int(1)]));
            verify_lp(&p, &solved).unwrap();
        }
    }

    #[test]
    fn free_and_nonpositive_variables() {
        // min x + y  s.t. x - y = -3, x free, y ≤ 0, x ≥ -5 (as a row)
        let mut p = LpProblem::new(Sense::Minimize, vec![int(1), int(1)])
            .with_sign(0, VarSign::Free)
            .with_sign(1, VarSign::NonPositive);
        p.constrain(vec![int(1), int(-1)], ConstraintKind::Equal, int(-3));
        p.constrain(vec![int(1), int(0)], ConstraintKind::GreaterEq, int(-5));
        for solved in [lp_solve(&p).unwrap(), lp_solve_via_dual(&p).unwrap()] {
            assert_eq!(solved.status, LpStatus::Optimal);
            assert_eq!(solved.x, Some(vec![int(-5), int(-2)]));
            assert_eq!(solved.objective, Some(int(-7)));
            verify_lp(&p, &solved).unwrap();
        }
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let mut p = LpProblem::new(Sense::Minimize, vec![int(1), int(1)]);
        p.constrain(vec![int(1)], ConstraintKind::Equal, int(0));
        assert!(matches!(lp_solve(&p), Err(LpError::MalformedProblem(_))));
    }

    fn kind_of(k: u8) -> ConstraintKind {
        [
            ConstraintKind::LessEq,
            ConstraintKind::Equal,
            ConstraintKind::GreaterEq,
        ][k as usize % 3]
    }

    fn sign_of(k: u8) -> VarSign {
        [VarSign::NonNegative, VarSign::NonPositive, VarSign::Free][k as usize % 3]
    }

    fn random_problem() -> impl Strategy<Value = LpProblem> {
        (1usize..=3, 1usize..=4).prop_flat_map(|(n, m)| {
            (
                any::<bool>(),
                proptest::collection::vec(-3i64..=3, n),
                proptest::collection::vec(0u8..3, n),
                proptest::collection::vec(
                    (proptest::collection::vec(-3i64..=3, n), 0u8..3, -4i64..=4),
                    m,
                ),
            )
                .prop_map(move |(maximize, c, signs, rows)| {
                    let sense = if maximize {
                        Sense::Maximize
                    } else {
                        Sense::Minimize
                    };
                    let mut p = LpProblem::new(sense, c.into_iter().map(int).collect());
                    p.signs = signs.into_iter().map(sign_of).collect();
                    for (coeffs, k, rhs) in rows {
                        p.constrain(coeffs.into_iter().map(int).collect(), kind_of(k), int(rhs));
                    }
                    p
                })
        })
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn both_solvers_certify_the_same_status(p in random_problem()) {
            let primal = lp_solve(&p).unwrap();
            let dual = lp_solve_via_dual(&p).unwrap();
            prop_assert_eq!(verify_lp(&p, &primal), Ok(()));
            prop_assert_eq!(verify_lp(&p, &dual), Ok(()));
            prop_assert_eq!(primal.status, dual.status);
            prop_assert_eq!(primal.objective, dual.objective);
        }
    }
}
