use std::fmt::Write as _;

use serde::Serialize;

use plausible::agreement::{
    build_cone, certify_archimedean, certify_violation, check_archimedean, find_agreeing,
    find_agreeing_averaged, find_almost_agreeing, verify_agreement, violation_at, AgreementError,
    AgreementMode, AgreementReport, CheckOptions, ConeSystem,
};
use plausible::doc::{
    coefficient_docs, to_json, AgreementReportDoc, ArchimedeanReportDoc, CoefficientDoc, DocError,
    OrderDoc, StatusDoc, ViolationDoc,
};
use plausible::exactlp::verify::verify_coefficients;
use plausible::exactlp::{parse_rational, Rational};
use plausible::fixtures;
use plausible::oracle::{cross_check, CrossCheck, OracleConfig};
use plausible::order::{order_from_measure, Measure, OrderError, PlausibilityOrder, ScopePolicy};
use plausible::par::Execution;
use plausible::testspace::{modal_test_space, TestSpace};

use crate::args::{Fixture, InputArgs, Method, OracleArgs, OracleBounds};
use crate::{CliError, DECIDED_NEGATIVE, DECIDED_POSITIVE};

/// A decided verb: its exit code plus both renderings of one report.
pub struct Report {
    pub code: u8,
    pub json: String,
    pub human: String,
}

impl Report {
    fn new<T: Serialize>(code: u8, doc: &T, human: String) -> Self {
        Report {
            code,
            json: to_json(doc),
            human,
        }
    }
}

fn shown(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(","))
}

fn order_of(doc: &OrderDoc, input: &InputArgs) -> Result<PlausibilityOrder, CliError> {
    Ok(doc.to_order(input.scope.map(ScopePolicy::from), input.event_cap)?)
}

/// Runs the cross-checks when asked; a mismatch is an error, not a verdict.
fn oracle_pass(
    order: &PlausibilityOrder,
    args: &OracleArgs,
    execution: Execution,
) -> Result<Option<CrossCheck>, CliError> {
    if !args.oracle {
        return Ok(None);
    }
    let config = checked(&args.bounds)?;
    let cross = cross_check(order, &config, execution)?;
    if let Some(line) = cross.lines.iter().find(|l| !l.agree) {
        return Err(CliError::new(format!(
            "oracle mismatch on {}: engine reports {}, oracle reports {}",
            line.name, line.engine, line.oracle
        )));
    }
    Ok(Some(cross))
}

fn checked(bounds: &OracleBounds) -> Result<OracleConfig, CliError> {
    let config = bounds.config();
    config.check().map_err(|e| CliError::new(e.to_string()))?;
    Ok(config)
}

fn oracle_note(out: &mut String, cross: &Option<CrossCheck>) {
    if let Some(c) = cross {
        let _ = writeln!(
            out,
            "oracle: {} checks agree, {} skipped",
            c.lines.len(),
            c.skipped.len()
        );
    }
}

#[derive(Serialize)]
struct ValidateDoc {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcomes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tests: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scope: Option<ScopePolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scope_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<Vec<String>>,
}

pub fn validate(doc: &OrderDoc, input: &InputArgs) -> Result<Report, CliError> {
    let space = doc.space.to_space()?;
    let invalid = |error: String, cycle: Option<Vec<String>>| ValidateDoc {
        valid: false,
        outcomes: None,
        tests: None,
        scope: None,
        scope_size: None,
        classes: None,
        total: None,
        error: Some(error),
        cycle,
    };
    match order_of(doc, input) {
        Ok(order) => {
            let out = ValidateDoc {
                valid: true,
                outcomes: Some(space.outcome_count()),
                tests: Some(space.tests().len()),
                scope: Some(order.policy()),
                scope_size: Some(order.len()),
                classes: Some(order.classes().len()),
                total: Some(order.is_total()),
                error: None,
                cycle: None,
            };
            let human = format!(
                "valid: {} outcomes, {} tests, {} scoped events in {} classes{}\n",
                space.outcome_count(),
                space.tests().len(),
                order.len(),
                order.classes().len(),
                if order.is_total() { ", total" } else { "" }
            );
            Ok(Report::new(DECIDED_POSITIVE, &out, human))
        }
        Err(CliError::Doc(DocError::Order(e @ OrderError::InconsistentOrder { .. }))) => {
            let OrderError::InconsistentOrder { cycle } = &e else {
                unreachable!()
            };
            let out = invalid("inconsistent".into(), Some(cycle.clone()));
            Ok(Report::new(
                DECIDED_NEGATIVE,
                &out,
                format!("invalid: {e}\n"),
            ))
        }
        Err(CliError::Doc(DocError::Order(e @ OrderError::Axiom3Violation { .. }))) => {
            let out = invalid(e.to_string(), None);
            Ok(Report::new(
                DECIDED_NEGATIVE,
                &out,
                format!("invalid: {e}\n"),
            ))
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct EventsDoc {
    count: usize,
    events: Vec<Vec<String>>,
}

pub fn events(doc: &OrderDoc, input: &InputArgs) -> Result<Report, CliError> {
    let space = doc.space.to_space()?;
    let events = space.enumerate_events(input.event_cap)?;
    let out = EventsDoc {
        count: events.len(),
        events: events
            .iter()
            .map(|e| space.labels_of(e).into_iter().map(String::from).collect())
            .collect(),
    };
    let mut human = format!("{} events\n", events.len());
    for e in &events {
        let _ = writeln!(human, "  {}", space.show(e));
    }
    Ok(Report::new(DECIDED_POSITIVE, &out, human))
}

#[derive(Serialize)]
struct CheckDoc {
    #[serde(flatten)]
    report: ArchimedeanReportDoc,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<CrossCheck>,
}

pub fn check(
    doc: &OrderDoc,
    input: &InputArgs,
    pair_cap: usize,
    oracle: &OracleArgs,
    execution: Execution,
) -> Result<Report, CliError> {
    let order = order_of(doc, input)?;
    let report = check_archimedean(
        &order,
        CheckOptions {
            pair_cap,
            execution,
        },
    )?;
    certify_archimedean(&order, &report).map_err(CliError::uncertified)?;
    let cross = oracle_pass(&order, oracle, execution)?;
    let cone = build_cone(&order);
    let out = CheckDoc {
        report: ArchimedeanReportDoc::new(&order, &cone, &report),
        verified: true,
        oracle: cross,
    };

    let mut human = String::new();
    let code = match out.report.status {
        StatusDoc::Archimedean => {
            let _ = writeln!(
                human,
                "ARCHIMEDEAN: {} pairs scanned, {} separating functionals",
                report.pairs_scanned,
                report.separators.len()
            );
            DECIDED_POSITIVE
        }
        StatusDoc::Violated => {
            let _ = writeln!(
                human,
                "VIOLATED: {} of {} scanned pairs are forced the wrong way",
                report.violations.len(),
                report.pairs_scanned
            );
            for v in &out.report.violations {
                let w = v.witness.as_ref().expect("reports carry witnesses");
                let _ = writeln!(
                    human,
                    "  {} ⪰ {} fails; families of length {} with N = {}",
                    shown(&v.lhs),
                    shown(&v.rhs),
                    w.family_length,
                    w.n
                );
            }
            DECIDED_NEGATIVE
        }
    };
    oracle_note(&mut human, &out.oracle);
    Ok(Report::new(code, &out, human))
}

fn measure_lines(out: &mut String, report: &AgreementReport) {
    let space = report.measure.space();
    for (x, w) in report.measure.weights().iter().enumerate() {
        let _ = writeln!(out, "  μ({}) = {}", space.label(x), w);
    }
}

#[derive(Serialize)]
struct AgreeDoc {
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<AgreementReportDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<ViolationDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    incomparable: Option<[Vec<String>; 2]>,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<CrossCheck>,
}

pub fn agree(
    doc: &OrderDoc,
    input: &InputArgs,
    method: Method,
    oracle: &OracleArgs,
    execution: Execution,
) -> Result<Report, CliError> {
    let order = order_of(doc, input)?;
    let mut out = AgreeDoc {
        result: "",
        report: None,
        violation: None,
        incomparable: None,
        verified: false,
        oracle: None,
    };
    let mut human = String::new();

    if let Some((i, j)) = order.first_incomparable() {
        let labels = |k: usize| -> Vec<String> {
            order
                .space()
                .labels_of(order.event(k))
                .into_iter()
                .map(String::from)
                .collect()
        };
        out.result = "NOT_TOTAL";
        out.incomparable = Some([labels(i), labels(j)]);
        out.verified = !order.comparable(i, j);
        let _ = writeln!(
            human,
            "NOT_TOTAL: {} and {} are incomparable",
            order.show(i),
            order.show(j)
        );
        return Ok(Report::new(DECIDED_NEGATIVE, &out, human));
    }

    out.oracle = oracle_pass(&order, oracle, execution)?;
    let found = match method {
        Method::Margin => find_agreeing(&order),
        Method::Averaged => find_agreeing_averaged(&order, execution),
    };
    let code = match found {
        Ok(m) => {
            let report = verify_agreement(&order, &m, AgreementMode::Agree);
            if !report.passed() {
                return Err(CliError::uncertified(
                    "constructed measure fails verification",
                ));
            }
            out.result = "AGREES";
            out.verified = true;
            let _ = writeln!(human, "AGREES");
            measure_lines(&mut human, &report);
            out.report = Some(AgreementReportDoc::new(&order, &report));
            DECIDED_POSITIVE
        }
        Err(AgreementError::NotArchimedean(v)) => {
            let cone = build_cone(&order);
            certify_violation(&order, &cone, &v).map_err(CliError::uncertified)?;
            out.result = "NOT_ARCHIMEDEAN";
            out.verified = true;
            let _ = writeln!(
                human,
                "NOT_ARCHIMEDEAN: {} ⪰ {} is forced to fail",
                order.space().show(&v.lhs),
                order.space().show(&v.rhs)
            );
            out.violation = Some(ViolationDoc::new(&cone, &v));
            DECIDED_NEGATIVE
        }
        Err(e) => return Err(e.into()),
    };
    oracle_note(&mut human, &out.oracle);
    Ok(Report::new(code, &out, human))
}

#[derive(Serialize)]
struct AlmostDoc {
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<AgreementReportDoc>,
    /// Weights writing `−e_T` as a combination of generators.
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<CoefficientDoc>>,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<CrossCheck>,
}

pub fn almost_agree(
    doc: &OrderDoc,
    input: &InputArgs,
    oracle: &OracleArgs,
    execution: Execution,
) -> Result<Report, CliError> {
    let order = order_of(doc, input)?;
    let cross = oracle_pass(&order, oracle, execution)?;
    let mut human = String::new();
    let (code, out) = match find_almost_agreeing(&order) {
        Ok(m) => {
            let report = verify_agreement(&order, &m, AgreementMode::Almost);
            if !report.passed() {
                return Err(CliError::uncertified(
                    "constructed measure fails verification",
                ));
            }
            let _ = writeln!(human, "ALMOST_AGREES");
            measure_lines(&mut human, &report);
            let out = AlmostDoc {
                result: "ALMOST_AGREES",
                report: Some(AgreementReportDoc::new(&order, &report)),
                coefficients: None,
                verified: true,
                oracle: cross,
            };
            (DECIDED_POSITIVE, out)
        }
        Err(AgreementError::Infeasible { coefficients }) => {
            let cone = build_cone(&order);
            certify_infeasible(&cone, &coefficients)?;
            let _ = writeln!(
                human,
                "INFEASIBLE: the comparisons add up to ∅ ⪰ T using {} of them",
                coefficients.len()
            );
            let out = AlmostDoc {
                result: "INFEASIBLE",
                report: None,
                coefficients: Some(coefficient_docs(&cone, &coefficients)),
                verified: true,
                oracle: cross,
            };
            (DECIDED_NEGATIVE, out)
        }
        Err(e) => return Err(e.into()),
    };
    oracle_note(&mut human, &out.oracle);
    Ok(Report::new(code, &out, human))
}

fn certify_infeasible(cone: &ConeSystem, sparse: &[(usize, Rational)]) -> Result<(), CliError> {
    let mut lambda = vec![Rational::default(); cone.len()];
    for (k, l) in sparse {
        lambda[*k] = l.clone();
    }
    verify_coefficients(cone.generators(), &-cone.unit(), &lambda).map_err(CliError::uncertified)
}

/// Picks the violation out of whichever report shape was stored.
fn stored_violation(text: &str, index: usize) -> Result<ViolationDoc, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(DocError::from)?;
    let picked = if let Some(list) = value.get("violations") {
        list.get(index)
            .ok_or_else(|| CliError::new(format!("the report has no violation #{index}")))?
    } else if let Some(v) = value.get("violation") {
        v
    } else {
        &value
    };
    Ok(serde_json::from_value(picked.clone()).map_err(DocError::from)?)
}

#[derive(Serialize)]
struct WitnessOut {
    #[serde(flatten)]
    violation: ViolationDoc,
    verified: bool,
}

pub fn witness(
    doc: &OrderDoc,
    input: &InputArgs,
    certificate: &str,
    index: usize,
) -> Result<Report, CliError> {
    let order = order_of(doc, input)?;
    let cone = build_cone(&order);
    let stored = stored_violation(certificate, index)?;
    let (a, b, lambda) = stored.decode(&cone)?;
    let bad = |e: &dyn std::fmt::Display| CliError::new(format!("bad certificate: {e}"));
    let v = violation_at(&cone, lambda, &a, &b).map_err(|e| bad(&e))?;
    certify_violation(&order, &cone, &v).map_err(|e| bad(&e))?;
    let out = WitnessOut {
        violation: ViolationDoc::new(&cone, &v),
        verified: true,
    };
    let w = out.violation.witness.as_ref().expect("freshly built");
    let mut human = format!(
        "{} ⪰ {} fails: N = {}, families of length {}\n",
        order.space().show(&v.lhs),
        order.space().show(&v.rhs),
        w.n,
        w.family_length
    );
    match &w.families {
        Some(f) => {
            let row =
                |es: &[Vec<String>]| es.iter().map(|e| shown(e)).collect::<Vec<_>>().join(" ");
            let _ = writeln!(human, "  lhs: {}", row(&f.lhs));
            let _ = writeln!(human, "  rhs: {}", row(&f.rhs));
        }
        None => {
            for p in &w.premises {
                let _ = writeln!(
                    human,
                    "  {} × {} ⪯ {}",
                    p.copies,
                    shown(&p.low),
                    shown(&p.high)
                );
            }
        }
    }
    Ok(Report::new(DECIDED_POSITIVE, &out, human))
}

pub fn generate(fixture: &Fixture) -> Result<Report, CliError> {
    let doc = match fixture {
        Fixture::Classical { n } => {
            if *n == 0 {
                return Err(CliError::new("n must be at least 1"));
            }
            OrderDoc::new(&fixtures::classical(*n), &[], ScopePolicy::Active)
        }
        Fixture::Triangle => OrderDoc::new(&TestSpace::triangle(), &[], ScopePolicy::Active),
        Fixture::Possibility => OrderDoc::from_order(&fixtures::triangle_possibility()),
        Fixture::Kps => OrderDoc::from_order(&fixtures::kps()),
        Fixture::KpsTotal => OrderDoc::from_order(&fixtures::kps_total()),
        Fixture::Modal { p, d } => {
            OrderDoc::new(&modal_test_space(*p, *d)?, &[], ScopePolicy::Active)
        }
        Fixture::Measure { weights } => {
            let weights = weights
                .iter()
                .map(|w| {
                    parse_rational(w)
                        .ok_or_else(|| CliError::new(format!("not a rational number: {w:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let space = fixtures::classical(weights.len());
            let m = Measure::new(&space, weights).map_err(|e| CliError::new(e.to_string()))?;
            let events = space.enumerate_events(usize::MAX)?;
            let order = order_from_measure(&m, &events)?;
            OrderDoc::new(&space, &order.emitted_comparisons(), ScopePolicy::Full)
        }
        Fixture::Random {
            seed,
            max_outcomes,
            max_tests,
            comparisons,
        } => {
            if *max_outcomes == 0 || *max_tests == 0 {
                return Err(CliError::new("bounds must be at least 1"));
            }
            let mut rng = fixtures::rng(*seed);
            let (space, m) =
                fixtures::random_space_with_measure(&mut rng, *max_outcomes, *max_tests);
            let cs = fixtures::random_comparisons(&mut rng, &space, &m, *comparisons, 0.0);
            OrderDoc::new(&space, &cs, ScopePolicy::Active)
        }
    };
    // Every emitted document must validate.
    doc.to_order(None, usize::MAX)?;
    let json = to_json(&doc);
    Ok(Report {
        code: DECIDED_POSITIVE,
        human: json.clone(),
        json,
    })
}

pub fn oracle(
    doc: &OrderDoc,
    input: &InputArgs,
    bounds: &OracleBounds,
    execution: Execution,
) -> Result<Report, CliError> {
    let order = order_of(doc, input)?;
    let config = checked(bounds)?;
    let cross = cross_check(&order, &config, execution)?;
    let mut human = String::new();
    for l in &cross.lines {
        let _ = writeln!(
            human,
            "{} {}: engine {}; oracle {}",
            if l.agree { "ok  " } else { "FAIL" },
            l.name,
            l.engine,
            l.oracle
        );
    }
    for s in &cross.skipped {
        let _ = writeln!(human, "skip {s}");
    }
    let code = if cross.consistent() {
        DECIDED_POSITIVE
    } else {
        DECIDED_NEGATIVE
    };
    Ok(Report::new(code, &cross, human))
}
