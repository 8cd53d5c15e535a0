//! Fourier–Motzkin elimination for systems `a·x ≥ b`.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::exactlp::Rational;

/// One inequality `coefficients · x ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

impl Inequality {
    pub fn new(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Inequality { coefficients, rhs }
    }
}

/// Scales so the leading non-zero coefficient has absolute value one.
fn normalize(ineq: Inequality) -> Inequality {
    let lead = ineq
        .coefficients
        .iter()
        .find(|c| !c.is_zero())
        .map(|c| c.abs());
    match lead {
        Some(s) => Inequality {
            coefficients: ineq.coefficients.iter().map(|c| c / &s).collect(),
            rhs: &ineq.rhs / &s,
        },
        None => ineq,
    }
}

/// Drops duplicates, keeping the tightest right-hand side per direction.
/// Returns `None` if some constraint reads `0 ≥ b` with `b > 0`.
fn tidy(system: Vec<Inequality>) -> Option<Vec<Inequality>> {
    let mut best: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    for ineq in system.into_iter().map(normalize) {
        if ineq.coefficients.iter().all(Zero::is_zero) {
            if ineq.rhs.is_positive() {
                return None;
            }
            continue;
        }
        best.entry(ineq.coefficients)
            .and_modify(|b| {
                if ineq.rhs > *b {
                    *b = ineq.rhs.clone();
                }
            })
            .or_insert(ineq.rhs);
    }
    Some(
        best.into_iter()
            .map(|(coefficients, rhs)| Inequality { coefficients, rhs })
            .collect(),
    )
}

fn eliminate(system: &[Inequality], var: usize) -> Vec<Inequality> {
    let mut out = Vec::new();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for ineq in system {
        let a = &ineq.coefficients[var];
        if a.is_positive() {
            pos.push(ineq);
        } else if a.is_negative() {
            neg.push(ineq);
        } else {
            out.push(ineq.clone());
        }
    }
    for p in &pos {
        for q in &neg {
            let (sp, sq) = (q.coefficients[var].abs(), p.coefficients[var].clone());
            let coefficients = p
                .coefficients
                .iter()
                .zip(&q.coefficients)
                .map(|(x, y)| x * &sp + y * &sq)
                .collect();
            out.push(Inequality::new(coefficients, &p.rhs * &sp + &q.rhs * &sq));
        }
    }
    out
}

/// A point satisfying every inequality over `vars` variables, if one exists.
pub fn fm_solve(system: &[Inequality], vars: usize) -> Option<Vec<Rational>> {
    // stages[k] mentions only variables 0..k.
    let mut stages = vec![tidy(system.to_vec())?];
    for var in (0..vars).rev() {
        let next = tidy(eliminate(stages.last().expect("non-empty"), var))?;
        stages.push(next);
    }
    stages.reverse();

    let mut x = vec![Rational::zero(); vars];
    for var in 0..vars {
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for ineq in &stages[var + 1] {
            let a = &ineq.coefficients[var];
            if a.is_zero() {
                continue;
            }
            let rest = (0..var).fold(Rational::zero(), |acc, j| {
                acc + &ineq.coefficients[j] * &x[j]
            });
            let bound = (&ineq.rhs - rest) / a;
            if a.is_positive() {
                lower = Some(lower.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                upper = Some(upper.map_or(bound.clone(), |u| u.min(bound)));
            }
        }
        x[var] = lower.or(upper).unwrap_or_else(Rational::zero);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::{int, rat};

    fn ineq(a: &[i64], b: i64) -> Inequality {
        Inequality::new(a.iter().map(|&v| int(v)).collect(), int(b))
    }

    fn satisfies(x: &[Rational], system: &[Inequality]) -> bool {
        system.iter().all(|i| {
            let lhs = i
                .coefficients
                .iter()
                .zip(x)
                .fold(Rational::zero(), |acc, (a, v)| acc + a * v);
            lhs >= i.rhs
        })
    }

    #[test]
    fn triangle_region() {
        let system = vec![
            ineq(&[1, 0], 0),
            ineq(&[0, 1], 0),
            ineq(&[-1, -1], -1),
            ineq(&[2, -1], 1),
        ];
        let x = fm_solve(&system, 2).unwrap();
        assert!(satisfies(&x, &system));
    }

    #[test]
    fn empty_region() {
        let system = vec![ineq(&[1], 1), ineq(&[-1], 0)];
        assert_eq!(fm_solve(&system, 1), None);
        let system = vec![ineq(&[1, 1], 3), ineq(&[-1, 0], 0), ineq(&[0, -1], -2)];
        assert_eq!(fm_solve(&system, 2), None);
    }

    #[test]
    fn fractional_vertex() {
        let system = vec![ineq(&[3, 0], 1), ineq(&[-3, 0], -1), ineq(&[0, 7], 2)];
        let x = fm_solve(&system, 2).unwrap();
        assert_eq!(x, [rat(1, 3), rat(2, 7)]);
    }
}
