use std::collections::HashSet;

use num::{BigInt, Signed, Zero};

use super::check::separates;
use super::{build_cone, ArchimedeanReport, ArchimedeanStatus, ConeSystem, Violation};
use crate::exactlp::verify::verify_coefficients;
use crate::exactlp::{OutcomeVector, Rational};
use crate::order::{Measure, PlausibilityOrder};
use crate::testspace::Event;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgreementMode {
    /// `A ⪯ B ⟺ μ(A) ≤ μ(B)`
    Agree,
    /// `A ⪯ B ⟹ μ(A) ≤ μ(B)`
    Almost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgreementVerdict {
    Agrees,
    AlmostAgrees,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFailure {
    /// `A ⪯ B` but `μ(A) > μ(B)`.
    WeakNotLe,
    /// `A ≺ B` but `μ(A) ≥ μ(B)`.
    StrictNotLt,
    /// `μ(A) ≤ μ(B)` but `A ⋠ B`.
    LeNotWeak,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolatedPair {
    pub lhs: Event,
    pub rhs: Event,
    pub failure: PairFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementReport {
    pub mode: AgreementMode,
    pub verdict: AgreementVerdict,
    pub measure: Measure,
    pub violated_pairs: Vec<ViolatedPair>,
}

impl AgreementReport {
    pub fn passed(&self) -> bool {
        self.verdict != AgreementVerdict::Fails
    }
}

/// Checks `μ` against every ordered pair of the order's scope.
pub fn verify_agreement(
    order: &PlausibilityOrder,
    measure: &Measure,
    mode: AgreementMode,
) -> AgreementReport {
    let values: Vec<Rational> = order.scope().iter().map(|e| measure.eval(e)).collect();
    let n = order.len();
    let mut violated_pairs = Vec::new();
    let mut fail = |i: usize, j: usize, failure| {
        violated_pairs.push(ViolatedPair {
            lhs: order.event(i).clone(),
            rhs: order.event(j).clone(),
            failure,
        })
    };
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&values[i], &values[j]);
            if order.weak(i, j) && a > b {
                fail(i, j, PairFailure::WeakNotLe);
            }
            if mode == AgreementMode::Agree {
                if order.below(i, j) && a >= b {
                    fail(i, j, PairFailure::StrictNotLt);
                }
                if a <= b && !order.weak(i, j) {
                    fail(i, j, PairFailure::LeNotWeak);
                }
            }
        }
    }
    let verdict = match (violated_pairs.is_empty(), mode) {
        (false, _) => AgreementVerdict::Fails,
        (true, AgreementMode::Agree) => AgreementVerdict::Agrees,
        (true, AgreementMode::Almost) => AgreementVerdict::AlmostAgrees,
    };
    AgreementReport {
        mode,
        verdict,
        measure: measure.clone(),
        violated_pairs,
    }
}

fn index(order: &PlausibilityOrder, e: &Event) -> Result<usize, String> {
    order
        .index_of(e)
        .ok_or_else(|| format!("{} is outside the scope", order.space().show(e)))
}

/// Re-checks a violation from scratch: the coefficients, the family
/// multiplicities, every premise against the order, and the failed conclusion.
pub fn certify_violation(
    order: &PlausibilityOrder,
    cone: &ConeSystem,
    violation: &Violation,
) -> Result<(), String> {
    let (a, b) = (index(order, &violation.lhs)?, index(order, &violation.rhs)?);
    if order.weak(b, a) {
        return Err("the conclusion holds in the order".into());
    }
    let mut lambda = vec![Rational::zero(); cone.len()];
    for (k, l) in &violation.coefficients {
        *lambda.get_mut(*k).ok_or("generator index out of range")? = l.clone();
    }
    let target = OutcomeVector::difference(cone.dim(), &violation.lhs, &violation.rhs);
    verify_coefficients(cone.generators(), &target, &lambda)?;

    let w = &violation.witness;
    if w.conclusion != (violation.lhs.clone(), violation.rhs.clone()) {
        return Err("witness conclusion differs from the pair".into());
    }
    if !w.n.is_positive() {
        return Err("witness multiplier is not positive".into());
    }
    for p in &w.premises {
        if !p.copies.is_positive() {
            return Err("premise with no copies".into());
        }
        let (lo, hi) = (index(order, &p.low)?, index(order, &p.high)?);
        if !order.weak(lo, hi) {
            return Err(format!(
                "premise {} ⪯ {} is not in the order",
                order.show(lo),
                order.show(hi)
            ));
        }
        let expected = &lambda[p.generator] * Rational::from_integer(w.n.clone());
        if expected != Rational::from_integer(p.copies.clone()) {
            return Err("premise copies disagree with the coefficients".into());
        }
    }
    let (left, right) = w.occurrence_counts(cone.dim());
    if left != right {
        return Err("families have different outcome multiplicities".into());
    }
    if let (Some(l), Some(r)) = (w.lhs(), w.rhs()) {
        let mut counts = vec![BigInt::zero(); cone.dim()];
        for e in &l {
            for &x in e.members() {
                counts[x] += 1;
            }
        }
        for e in &r {
            for &x in e.members() {
                counts[x] -= 1;
            }
        }
        if counts.iter().any(|c| !c.is_zero()) {
            return Err("listed families are unbalanced".into());
        }
    }
    Ok(())
}

/// Re-checks a whole report: each violation, each separator against every
/// generator, and that every scanned pair is accounted for.
pub fn certify_archimedean(
    order: &PlausibilityOrder,
    report: &ArchimedeanReport,
) -> Result<(), String> {
    let cone = build_cone(order);
    let one = Rational::from_integer(1.into());
    for (s, rho) in report.separators.iter().enumerate() {
        if rho.dim() != cone.dim() {
            return Err(format!("separator {s} has the wrong dimension"));
        }
        if rho.dot(cone.unit()) != one {
            return Err(format!("separator {s} is not normalized"));
        }
        if let Some(k) = cone
            .generators()
            .iter()
            .position(|g| g.dot(rho).is_negative())
        {
            return Err(format!("separator {s} is negative on generator {k}"));
        }
    }
    let mut trapped = HashSet::new();
    for v in &report.violations {
        certify_violation(order, &cone, v)?;
        trapped.insert((v.lhs.clone(), v.rhs.clone()));
    }

    let n = order.len();
    let mut scanned = 0;
    for i in 0..n {
        for j in 0..n {
            if order.weak(j, i) {
                continue;
            }
            scanned += 1;
            let (a, b) = (order.event(i), order.event(j));
            if trapped.contains(&(a.clone(), b.clone())) {
                continue;
            }
            if !report.separators.iter().any(|rho| separates(rho, a, b)) {
                return Err(format!(
                    "pair ({}, {}) is neither trapped nor separated",
                    order.show(i),
                    order.show(j)
                ));
            }
        }
    }
    if scanned != report.pairs_scanned {
        return Err("scanned pair count disagrees".into());
    }
    let expected = if report.violations.is_empty() {
        ArchimedeanStatus::Archimedean
    } else {
        ArchimedeanStatus::Violated
    };
    if report.status != expected {
        return Err("status disagrees with the violations".into());
    }
    Ok(())
}
