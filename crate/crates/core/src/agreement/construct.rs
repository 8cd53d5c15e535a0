use num::{Signed, Zero};

use super::check::violation_at;
use super::{build_cone, sparse, AgreementError, ConeSystem};
use crate::exactlp::{
    lp_solve_via_dual, ConeResult, ConstraintKind, LpProblem, LpStatus, OutcomeVector, Rational,
    Sense, VarSign,
};
use crate::order::{Measure, PlausibilityOrder};
use crate::par::Execution;

/// Maximizes the least gap `ρ(B) − ρ(A)` over `pairs` (capped at 1) among
/// functionals non-negative on the cone with `ρ(e_T) = 1`.
///
/// Returns `None` when no such functional exists at all.
pub(crate) fn margin_functional(
    cone: &ConeSystem,
    pairs: &[(usize, usize)],
) -> Result<Option<(OutcomeVector, Rational)>, AgreementError> {
    let dim = cone.dim();
    let one = || Rational::from_integer(1.into());
    let mut objective = vec![Rational::zero(); dim];
    objective.push(one());
    let mut lp = LpProblem::new(Sense::Maximize, objective);
    lp.signs = vec![VarSign::Free; dim + 1];

    let row = |v: &OutcomeVector, t: Rational| {
        let mut r = v.to_dense();
        r.push(t);
        r
    };
    for g in cone.spanning_vectors() {
        lp.constrain(
            row(g, Rational::zero()),
            ConstraintKind::GreaterEq,
            Rational::zero(),
        );
    }
    for &(a, b) in pairs {
        let gap = OutcomeVector::difference(dim, &cone.scope()[b], &cone.scope()[a]);
        lp.constrain(
            row(&gap, -one()),
            ConstraintKind::GreaterEq,
            Rational::zero(),
        );
    }
    lp.constrain(
        row(cone.unit(), Rational::zero()),
        ConstraintKind::Equal,
        one(),
    );
    lp.constrain(
        row(&OutcomeVector::zeros(dim), one()),
        ConstraintKind::LessEq,
        one(),
    );

    let solved = lp_solve_via_dual(&lp)?;
    Ok(match solved.status {
        LpStatus::Optimal => {
            let mut x = solved.x.expect("optimal point");
            let t = x.pop().expect("margin variable");
            Some((OutcomeVector::from_dense(&x), t))
        }
        LpStatus::Infeasible => None,
        LpStatus::Unbounded => unreachable!("the margin is capped"),
    })
}

fn normalized(cone: &ConeSystem, rho: &OutcomeVector) -> OutcomeVector {
    rho.scale(&rho.dot(cone.unit()).recip())
}

/// A measure `μ` with `A ⪯ B ⟹ μ(A) ≤ μ(B)`, or the decomposition of `−e_T`
/// showing none exists.
pub fn find_almost_agreeing(order: &PlausibilityOrder) -> Result<Measure, AgreementError> {
    let cone = build_cone(order);
    match cone.membership(&-cone.unit())? {
        ConeResult::Separator(rho) => Ok(Measure::from_vector(
            order.space(),
            &normalized(&cone, &rho),
        )?),
        ConeResult::Coeffs(lambda) => Err(AgreementError::Infeasible {
            coefficients: sparse(&lambda),
        }),
    }
}

fn require_total(order: &PlausibilityOrder) -> Result<(), AgreementError> {
    match order.first_incomparable() {
        Some((i, j)) => Err(AgreementError::NotTotal {
            lhs: order.show(i),
            rhs: order.show(j),
        }),
        None => Ok(()),
    }
}

/// First covering pair whose reversal lies in the cone.
fn trapped_cover(
    order: &PlausibilityOrder,
    cone: &ConeSystem,
    covers: &[(usize, usize)],
) -> Result<AgreementError, AgreementError> {
    let scope = order.scope();
    for &(a, b) in covers {
        let reversed = OutcomeVector::difference(cone.dim(), &scope[a], &scope[b]);
        if let ConeResult::Coeffs(lambda) = cone.membership(&reversed)? {
            let v = violation_at(cone, lambda, &scope[a], &scope[b])?;
            return Ok(AgreementError::NotArchimedean(Box::new(v)));
        }
    }
    unreachable!("separators for every cover would add up to a positive margin")
}

/// A measure that agrees with a total order in both directions.
///
/// One LP maximizes the smallest gap across covering pairs of the quotient
/// poset; a positive optimum gives strict inequalities along every chain.
pub fn find_agreeing(order: &PlausibilityOrder) -> Result<Measure, AgreementError> {
    require_total(order)?;
    let cone = build_cone(order);
    let covers = order.cover_pairs();
    match margin_functional(&cone, &covers)? {
        Some((rho, t)) if t.is_positive() => Ok(Measure::from_vector(order.space(), &rho)?),
        _ => Err(trapped_cover(order, &cone, &covers)?),
    }
}

/// The averaging construction: one separating functional per strictly
/// ordered pair, each normalized on `e_T`, then averaged.
pub fn find_agreeing_averaged(
    order: &PlausibilityOrder,
    execution: Execution,
) -> Result<Measure, AgreementError> {
    require_total(order)?;
    let cone = build_cone(order);
    let n = order.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| order.below(i, j))
        .collect();
    let scope = order.scope();
    let results = execution.map(&pairs, |&(a, b)| {
        cone.membership(&OutcomeVector::difference(cone.dim(), &scope[a], &scope[b]))
    });

    let mut sum = OutcomeVector::zeros(cone.dim());
    for (&(a, b), result) in pairs.iter().zip(results) {
        match result? {
            ConeResult::Separator(rho) => {
                sum.add_scaled(&Rational::from_integer(1.into()), &normalized(&cone, &rho))
            }
            ConeResult::Coeffs(lambda) => {
                let v = violation_at(&cone, lambda, &scope[a], &scope[b])?;
                return Err(AgreementError::NotArchimedean(Box::new(v)));
            }
        }
    }
    // ∅ ≺ T always holds, so there is at least one pair.
    let rho = sum.scale(&Rational::new(1.into(), pairs.len().into()));
    Ok(Measure::from_vector(order.space(), &rho)?)
}
