//! Independent certificate checks.
//!
//! Nothing here calls the solver; every check is a direct evaluation with
//! rational addition, multiplication and comparison.

use std::cmp::Ordering;

use num::{Signed, Zero};

use super::{
    ConeResult, ConstraintKind, LpCertificate, LpProblem, LpResult, LpStatus, OutcomeVector,
    Rational, Sense, VarSign,
};

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn holds(lhs: &Rational, kind: ConstraintKind, rhs: &Rational) -> bool {
    match kind {
        ConstraintKind::LessEq => lhs <= rhs,
        ConstraintKind::Equal => lhs == rhs,
        ConstraintKind::GreaterEq => lhs >= rhs,
    }
}

fn sign_ok(value: &Rational, sign: VarSign) -> bool {
    match sign {
        VarSign::NonNegative => !value.is_negative(),
        VarSign::NonPositive => !value.is_positive(),
        VarSign::Free => true,
    }
}

fn check_len(what: &str, v: &[Rational], n: usize) -> Result<(), String> {
    if v.len() == n {
        Ok(())
    } else {
        Err(format!("{what} has length {}, expected {n}", v.len()))
    }
}

fn check_feasible(problem: &LpProblem, x: &[Rational], homogeneous: bool) -> Result<(), String> {
    check_len("point", x, problem.variables())?;
    for (j, (v, &s)) in x.iter().zip(&problem.signs).enumerate() {
        if !sign_ok(v, s) {
            return Err(format!("variable {j} violates its sign constraint"));
        }
    }
    let zero = Rational::zero();
    for (i, row) in problem.constraints.iter().enumerate() {
        let rhs = if homogeneous { &zero } else { &row.rhs };
        if !holds(&dot(&row.coefficients, x), row.kind, rhs) {
            return Err(format!("constraint {i} is violated"));
        }
    }
    Ok(())
}

/// Row multiplier signs for the minimization form; `flip` turns them around.
fn check_multiplier_signs(problem: &LpProblem, y: &[Rational], flip: bool) -> Result<(), String> {
    check_len("multiplier vector", y, problem.constraints.len())?;
    for (i, (v, row)) in y.iter().zip(&problem.constraints).enumerate() {
        let v = if flip { -v.clone() } else { v.clone() };
        let ok = match row.kind {
            ConstraintKind::GreaterEq => !v.is_negative(),
            ConstraintKind::LessEq => !v.is_positive(),
            ConstraintKind::Equal => true,
        };
        if !ok {
            return Err(format!("multiplier {i} has the wrong sign"));
        }
    }
    Ok(())
}

fn transpose_times(problem: &LpProblem, y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); problem.variables()];
    for (row, v) in problem.constraints.iter().zip(y) {
        for (o, a) in out.iter_mut().zip(&row.coefficients) {
            *o += a * v;
        }
    }
    out
}

/// `(Aᵀy)_j` against `bound_j`, in the direction required by each variable's
/// sign (`≤` for `x ≥ 0`, `≥` for `x ≤ 0`, `=` for free), reversed by `flip`.
fn check_columns(
    problem: &LpProblem,
    y: &[Rational],
    bound: &[Rational],
    flip: bool,
) -> Result<(), String> {
    for (j, (value, b)) in transpose_times(problem, y).iter().zip(bound).enumerate() {
        let want = match problem.signs[j] {
            VarSign::NonNegative => Ordering::Less,
            VarSign::NonPositive => Ordering::Greater,
            VarSign::Free => Ordering::Equal,
        };
        let want = if flip { want.reverse() } else { want };
        let got = value.cmp(b);
        if got != Ordering::Equal && got != want {
            return Err(format!("dual column {j} is violated"));
        }
    }
    Ok(())
}

/// Checks that `result` is a valid certificate for `problem`.
pub fn verify_lp(problem: &LpProblem, result: &LpResult) -> Result<(), String> {
    problem.check().map_err(|e| e.to_string())?;
    let maximize = problem.sense == Sense::Maximize;
    match (&result.status, &result.certificate) {
        (LpStatus::Optimal, LpCertificate::Dual(y)) => {
            let x = result
                .x
                .as_deref()
                .ok_or("optimal result without a point")?;
            let value = result
                .objective
                .as_ref()
                .ok_or("optimal result without a value")?;
            check_feasible(problem, x, false)?;
            if dot(&problem.objective, x) != *value {
                return Err("objective value does not match the point".into());
            }
            check_multiplier_signs(problem, y, maximize)?;
            check_columns(problem, y, &problem.objective, maximize)?;
            let b: Vec<Rational> = problem.constraints.iter().map(|r| r.rhs.clone()).collect();
            if dot(&b, y) != *value {
                return Err("duality gap is not zero".into());
            }
            Ok(())
        }
        (LpStatus::Infeasible, LpCertificate::Farkas(y)) => {
            check_multiplier_signs(problem, y, false)?;
            let zeros = vec![Rational::zero(); problem.variables()];
            check_columns(problem, y, &zeros, false)?;
            let b: Vec<Rational> = problem.constraints.iter().map(|r| r.rhs.clone()).collect();
            if !dot(&b, y).is_positive() {
                return Err("Farkas vector does not separate the right-hand side".into());
            }
            Ok(())
        }
        (LpStatus::Unbounded, LpCertificate::Ray(d)) => {
            let x = result
                .x
                .as_deref()
                .ok_or("unbounded result without a point")?;
            check_feasible(problem, x, false)?;
            check_feasible(problem, d, true)?;
            let slope = dot(&problem.objective, d);
            let improving = if maximize {
                slope.is_positive()
            } else {
                slope.is_negative()
            };
            if !improving {
                return Err("ray does not improve the objective".into());
            }
            Ok(())
        }
        _ => Err("certificate kind does not match the status".into()),
    }
}

fn check_dims(generators: &[OutcomeVector], v: &OutcomeVector) -> Result<(), String> {
    match generators.iter().find(|g| g.dim() != v.dim()) {
        Some(g) => Err(format!(
            "generator of dimension {} against {}",
            g.dim(),
            v.dim()
        )),
        None => Ok(()),
    }
}

/// `Σ λ_i g_i = v` with every `λ_i ≥ 0`.
pub fn verify_coefficients(
    generators: &[OutcomeVector],
    v: &OutcomeVector,
    lambda: &[Rational],
) -> Result<(), String> {
    check_dims(generators, v)?;
    check_len("coefficient vector", lambda, generators.len())?;
    if let Some(i) = lambda.iter().position(Signed::is_negative) {
        return Err(format!("coefficient {i} is negative"));
    }
    let mut sum = vec![Rational::zero(); v.dim()];
    for (g, l) in generators.iter().zip(lambda) {
        if l.is_zero() {
            continue;
        }
        for (i, x) in g.iter() {
            sum[i] += l * x;
        }
    }
    for (i, s) in sum.iter().enumerate() {
        if *s != v.get(i) {
            return Err(format!(
                "combination differs from the target at coordinate {i}"
            ));
        }
    }
    Ok(())
}

/// `ρ·g ≥ 0` for every generator and `ρ·v < 0`.
pub fn verify_separator(
    generators: &[OutcomeVector],
    v: &OutcomeVector,
    rho: &OutcomeVector,
) -> Result<(), String> {
    check_dims(generators, v)?;
    let apply = |x: &OutcomeVector| {
        x.iter()
            .fold(Rational::zero(), |acc, (i, value)| acc + value * rho.get(i))
    };
    if let Some(i) = generators.iter().position(|g| apply(g).is_negative()) {
        return Err(format!("separator is negative on generator {i}"));
    }
    if !apply(v).is_negative() {
        return Err("separator does not cut off the target".into());
    }
    Ok(())
}

pub fn verify_cone_result(
    generators: &[OutcomeVector],
    v: &OutcomeVector,
    result: &ConeResult,
) -> Result<(), String> {
    match result {
        ConeResult::Coeffs(lambda) => verify_coefficients(generators, v, lambda),
        ConeResult::Separator(rho) => verify_separator(generators, v, rho),
    }
}
