use num::Signed;

use super::construct::margin_functional;
use super::{
    build_cone, sparse, verify_order_unit, witness_families, AgreementError, ConeSystem,
    OrderUnitCheck, Witness, DEFAULT_PAIR_CAP,
};
use crate::exactlp::{ConeResult, OutcomeVector, Rational};
use crate::order::PlausibilityOrder;
use crate::par::Execution;
use crate::testspace::Event;

/// Pairs handed to the solver per round. Fixed so that the set of separators
/// found, and with it the report, does not depend on the thread count.
const BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub pair_cap: usize,
    pub execution: Execution,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            pair_cap: DEFAULT_PAIR_CAP,
            execution: Execution::default(),
        }
    }
}

impl CheckOptions {
    pub fn sequential() -> Self {
        CheckOptions {
            execution: Execution::Sequential,
            ..CheckOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchimedeanStatus {
    Archimedean,
    Violated,
}

/// A pair `(A, B)` with `B ⋠ A` whose difference `e_A − e_B` lies in the cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub lhs: Event,
    pub rhs: Event,
    /// Non-zero generator weights with `Σ λ_k g_k = e_A − e_B`.
    pub coefficients: Vec<(usize, Rational)>,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchimedeanReport {
    pub status: ArchimedeanStatus,
    /// Number of pairs `(A, B)` with `B ⋠ A`.
    pub pairs_scanned: usize,
    pub violations: Vec<Violation>,
    /// Functionals non-negative on the cone with `ρ(e_T) = 1`; every scanned
    /// pair that is not a violation has `ρ(A) < ρ(B)` for one of them.
    pub separators: Vec<OutcomeVector>,
}

impl ArchimedeanReport {
    pub fn is_archimedean(&self) -> bool {
        self.status == ArchimedeanStatus::Archimedean
    }
}

pub(crate) fn separates(rho: &OutcomeVector, a: &Event, b: &Event) -> bool {
    rho.eval(a) < rho.eval(b)
}

/// Packages dense coefficients for `e_A − e_B` as a violation with its families.
pub fn violation_at(
    cone: &ConeSystem,
    lambda: Vec<Rational>,
    a: &Event,
    b: &Event,
) -> Result<Violation, AgreementError> {
    let witness = witness_families(cone, &lambda, (a, b))?;
    Ok(Violation {
        lhs: a.clone(),
        rhs: b.clone(),
        coefficients: sparse(&lambda),
        witness,
    })
}

/// Scans every pair `(A, B)` with `B ⋠ A` for `e_A − e_B ∈ C`.
///
/// Separators found along the way are pooled and reused: a pair already cut
/// off by a pooled functional needs no LP of its own.
pub fn check_archimedean(
    order: &PlausibilityOrder,
    options: CheckOptions,
) -> Result<ArchimedeanReport, AgreementError> {
    let n = order.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !order.weak(j, i))
        .collect();
    if pairs.len() > options.pair_cap {
        return Err(AgreementError::ScopeTooLarge {
            pairs: pairs.len(),
            cap: options.pair_cap,
        });
    }
    let cone = build_cone(order);
    let scope = order.scope();

    let mut pool: Vec<OutcomeVector> = Vec::new();
    let covers = order.cover_pairs();
    if let Some((rho, _)) = margin_functional(&cone, &covers)? {
        pool.push(rho);
    }
    if let OrderUnitCheck::Holds(rho) = verify_order_unit(&cone)? {
        if !pool.contains(&rho) {
            pool.push(rho);
        }
    }

    let open = |pool: &[OutcomeVector], &(i, j): &(usize, usize)| {
        !pool.iter().any(|rho| separates(rho, &scope[i], &scope[j]))
    };
    let mut pending: Vec<(usize, usize)> =
        pairs.iter().filter(|p| open(&pool, p)).copied().collect();
    let mut violations = Vec::new();
    while !pending.is_empty() {
        let rest = pending.split_off(pending.len().min(BATCH));
        let batch = pending;
        let results = options.execution.map(&batch, |&(i, j)| {
            cone.membership(&OutcomeVector::difference(cone.dim(), &scope[i], &scope[j]))
        });
        let fresh_from = pool.len();
        for (&(i, j), result) in batch.iter().zip(results) {
            match result? {
                ConeResult::Coeffs(lambda) => {
                    violations.push(violation_at(&cone, lambda, &scope[i], &scope[j])?)
                }
                ConeResult::Separator(rho) => {
                    let unit = rho.dot(cone.unit());
                    debug_assert!(unit.is_positive());
                    pool.push(rho.scale(&unit.recip()));
                }
            }
        }
        let fresh = &pool[fresh_from..];
        pending = rest.into_iter().filter(|p| open(fresh, p)).collect();
    }

    Ok(ArchimedeanReport {
        status: if violations.is_empty() {
            ArchimedeanStatus::Archimedean
        } else {
            ArchimedeanStatus::Violated
        },
        pairs_scanned: pairs.len(),
        violations,
        separators: pool,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agreement::certify_archimedean;
    use crate::exactlp::int;
    use crate::fixtures;
    use crate::order::{order_from_measure, Measure};

    #[test]
    fn triangle_possibility_is_violated() {
        let order = fixtures::triangle_possibility();
        let report = check_archimedean(&order, CheckOptions::default()).unwrap();
        assert_eq!(report.status, ArchimedeanStatus::Violated);
        certify_archimedean(&order, &report).unwrap();
    }

    #[test]
    fn kps_is_violated_by_the_sum_of_three() {
        let order = fixtures::kps();
        let report = check_archimedean(&order, CheckOptions::default()).unwrap();
        assert_eq!(report.status, ArchimedeanStatus::Violated);
        let s = order.space();
        let a = s.event(&["2", "5"]).unwrap();
        let b = s.event(&["1", "3", "4"]).unwrap();
        let v = report
            .violations
            .iter()
            .find(|v| v.lhs == a && v.rhs == b)
            .expect("the KPS pair is trapped");
        assert_eq!(v.coefficients.len(), 3);
        assert!(v.coefficients.iter().all(|(_, l)| *l == int(1)));
        certify_archimedean(&order, &report).unwrap();
    }

    #[test]
    fn measure_orders_are_archimedean() {
        let s = fixtures::classical(3);
        let m = Measure::new(
            &s,
            vec![
                crate::exactlp::rat(1, 6),
                crate::exactlp::rat(1, 3),
                crate::exactlp::rat(1, 2),
            ],
        )
        .unwrap();
        let events = s.enumerate_events(64).unwrap();
        let order = order_from_measure(&m, &events).unwrap();
        let report = check_archimedean(&order, CheckOptions::default()).unwrap();
        assert!(report.is_archimedean());
        certify_archimedean(&order, &report).unwrap();
    }

    #[test]
    fn pair_cap() {
        let order = fixtures::kps();
        let options = CheckOptions {
            pair_cap: 3,
            ..CheckOptions::default()
        };
        assert!(matches!(
            check_archimedean(&order, options),
            Err(AgreementError::ScopeTooLarge { cap: 3, .. })
        ));
    }

    #[test]
    fn thread_independent() {
        for order in [
            fixtures::triangle_possibility(),
            fixtures::kps(),
            fixtures::kps_total(),
        ] {
            let a = check_archimedean(&order, CheckOptions::sequential()).unwrap();
            let b = check_archimedean(&order, CheckOptions::default()).unwrap();
            assert_eq!(a, b);
        }
    }
}
