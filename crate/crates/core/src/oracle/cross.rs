//! Side-by-side runs of the engine and the brute-force procedures.

use std::collections::BTreeSet;

use num::{BigInt, Signed, Zero};
use serde::Serialize;

use super::{
    averaged_agreeing_measure, brute_archimedean, brute_cone_membership, fm_cone_membership,
    is_family_violation, FmCone, OracleConfig, OracleError, MAX_BRUTE_GENERATORS,
};
use crate::agreement::{
    build_cone, check_archimedean, find_agreeing, verify_agreement, AgreementError, AgreementMode,
    CheckOptions,
};
use crate::exactlp::verify::verify_cone_result;
use crate::exactlp::{cone_membership, OutcomeVector, Rational};
use crate::order::PlausibilityOrder;
use crate::par::Execution;
use crate::testspace::Event;

/// Largest outcome count the membership comparison accepts.
pub const MAX_MEMBERSHIP_DIM: usize = 6;

/// Largest spanning set handed to Fourier–Motzkin elimination.
pub const MAX_FM_GENERATORS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckLine {
    pub name: String,
    pub engine: String,
    pub oracle: String,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CrossCheck {
    pub lines: Vec<CrossCheckLine>,
    pub skipped: Vec<String>,
}

impl CrossCheck {
    pub fn consistent(&self) -> bool {
        self.lines.iter().all(|l| l.agree)
    }

    fn push(&mut self, name: &str, engine: String, oracle: String, agree: bool) {
        self.lines.push(CrossCheckLine {
            name: name.into(),
            engine,
            oracle,
            agree,
        });
    }
}

/// Runs every comparison whose oracle bounds the order fits in.
pub fn cross_check(
    order: &PlausibilityOrder,
    config: &OracleConfig,
    execution: Execution,
) -> Result<CrossCheck, AgreementError> {
    let mut out = CrossCheck::default();
    archimedean(order, config, execution, &mut out)?;
    membership(order, config, &mut out)?;
    agreeing(order, config, &mut out)?;
    Ok(out)
}

fn archimedean(
    order: &PlausibilityOrder,
    config: &OracleConfig,
    execution: Execution,
    out: &mut CrossCheck,
) -> Result<(), AgreementError> {
    let brute = match brute_archimedean(order, config) {
        Ok(found) => found,
        Err(e) => {
            out.skipped.push(format!("archimedean: {e}"));
            return Ok(());
        }
    };
    let report = check_archimedean(
        order,
        CheckOptions {
            execution,
            ..CheckOptions::default()
        },
    )?;
    let engine: BTreeSet<(Event, Event)> = report
        .violations
        .iter()
        .map(|v| (v.lhs.clone(), v.rhs.clone()))
        .collect();
    let short: BTreeSet<(Event, Event)> = report
        .violations
        .iter()
        .filter(|v| v.witness.family_length() <= BigInt::from(config.max_family_length))
        .map(|v| (v.lhs.clone(), v.rhs.clone()))
        .collect();
    let found: BTreeSet<(Event, Event)> = brute
        .iter()
        .map(|v| {
            (
                v.lhs.last().cloned().unwrap(),
                v.rhs.last().cloned().unwrap(),
            )
        })
        .collect();
    let sound = brute.iter().all(|v| is_family_violation(order, v));
    let agree = sound && found.is_subset(&engine) && short.is_subset(&found);
    out.push(
        "archimedean",
        format!(
            "{} violated pairs ({} with families of length <= {})",
            engine.len(),
            short.len(),
            config.max_family_length
        ),
        format!(
            "{} violated pairs from {} families",
            found.len(),
            brute.len()
        ),
        agree,
    );
    Ok(())
}

fn membership(
    order: &PlausibilityOrder,
    config: &OracleConfig,
    out: &mut CrossCheck,
) -> Result<(), AgreementError> {
    let cone = build_cone(order);
    let gens = cone.spanning_vectors();
    if cone.dim() > MAX_MEMBERSHIP_DIM || gens.len() > MAX_FM_GENERATORS {
        out.skipped.push(format!(
            "cone membership: {} outcomes and {} generators exceed {} and {}",
            cone.dim(),
            gens.len(),
            MAX_MEMBERSHIP_DIM,
            MAX_FM_GENERATORS
        ));
        return Ok(());
    }
    // The integer search is exponential in the generator count.
    let search = gens.len() <= MAX_BRUTE_GENERATORS;
    let dense: Vec<Vec<Rational>> = gens.iter().map(OutcomeVector::to_dense).collect();
    let n = order.len();
    let mut targets = vec![-cone.unit()];
    for i in 0..n {
        for j in 0..n {
            if !order.weak(j, i) {
                targets.push(OutcomeVector::difference(
                    cone.dim(),
                    order.event(i),
                    order.event(j),
                ));
            }
        }
    }

    let (mut engine_members, mut oracle_members, mut agree) = (0, 0, true);
    for v in &targets {
        let engine = cone_membership(gens, v)?;
        agree &= verify_cone_result(gens, v, &engine).is_ok();
        let target = v.to_dense();
        let fm = fm_cone_membership(&dense, &target);
        if let FmCone::Separated(rho) = &fm {
            let rho = OutcomeVector::from_dense(rho);
            agree &=
                gens.iter().all(|g| !g.dot(&rho).is_negative()) && v.dot(&rho) < Rational::zero();
        }
        let brute = if search {
            brute_cone_membership(&dense, &target, config.max_coefficient)
                .map_err(|e| AgreementError::NotACertificate(e.to_string()))?
        } else {
            None
        };
        let engine_member = engine.is_member();
        let fm_member = fm == FmCone::Member;
        engine_members += usize::from(engine_member);
        oracle_members += usize::from(fm_member);
        agree &= engine_member == fm_member && (brute.is_none() || fm_member);
    }
    out.push(
        "cone_membership",
        format!("{engine_members} of {} targets in the cone", targets.len()),
        format!(
            "{oracle_members} of {} targets in the cone{}",
            targets.len(),
            if search {
                ""
            } else {
                " (integer search skipped)"
            }
        ),
        agree,
    );
    Ok(())
}

fn agreeing(
    order: &PlausibilityOrder,
    config: &OracleConfig,
    out: &mut CrossCheck,
) -> Result<(), AgreementError> {
    if !order.is_total() {
        out.skipped
            .push("agreeing measure: the order is not total".into());
        return Ok(());
    }
    let oracle = match averaged_agreeing_measure(order, config) {
        Err(OracleError::ScopeTooLarge { .. }) => {
            out.skipped
                .push("agreeing measure: scope exceeds the oracle limit".into());
            return Ok(());
        }
        other => other,
    };
    let engine = match find_agreeing(order) {
        Ok(m) => Some(m),
        Err(AgreementError::NotArchimedean(_)) => None,
        Err(e) => return Err(e),
    };
    let passes =
        |m: &crate::order::Measure| verify_agreement(order, m, AgreementMode::Agree).passed();
    let agree = match (&engine, &oracle) {
        (Some(a), Ok(b)) => passes(a) && passes(b),
        (None, Err(OracleError::SeparationFailed { .. })) => true,
        _ => false,
    };
    let describe = |ok: bool| if ok { "measure found" } else { "no measure" }.to_string();
    out.push(
        "agreeing_measure",
        describe(engine.is_some()),
        describe(oracle.is_ok()),
        agree,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::rat;
    use crate::fixtures;
    use crate::order::{order_from_measure, Measure};

    #[test]
    fn fixtures_are_consistent() {
        let s = fixtures::classical(2);
        let m = Measure::new(&s, vec![rat(1, 3), rat(2, 3)]).unwrap();
        let measured = order_from_measure(&m, &s.enumerate_events(8).unwrap()).unwrap();
        for order in [
            fixtures::triangle_possibility(),
            measured,
            fixtures::axioms_only(&s),
        ] {
            let report =
                cross_check(&order, &OracleConfig::default(), Execution::Sequential).unwrap();
            assert!(report.consistent(), "{report:?}");
            assert_eq!(report.lines.len() + report.skipped.len(), 3);
        }
    }

    #[test]
    fn large_scopes_are_skipped() {
        let report = cross_check(
            &fixtures::kps(),
            &OracleConfig::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert!(report.skipped.iter().any(|s| s.starts_with("archimedean")));
        assert!(report.consistent());
    }
}
