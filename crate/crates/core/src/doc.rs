//! JSON documents for spaces, orders, measures and reports.
//!
//! Every rational is written as a `"p/q"` string (or `"p"` when integral) and
//! every event as an array of outcome labels in canonical order, so that equal
//! inputs serialize to identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::{
    AgreementMode, AgreementReport, AgreementVerdict, ArchimedeanReport, ArchimedeanStatus,
    ConeSystem, PairFailure, Violation, Witness,
};
use crate::exactlp::{format_rational, parse_rational, OutcomeVector, Rational};
use crate::order::{
    build_order, Comparison, Measure, OrderError, OrderOptions, PlausibilityOrder, Relation,
    ScopePolicy,
};
use crate::testspace::{Event, TestSpace, TestSpaceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Space(#[from] TestSpaceError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("not a rational number: {0:?}")]
    Rational(String),
    #[error("bad certificate: {0}")]
    Certificate(String),
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        DocError::Json(e.to_string())
    }
}

fn labels(space: &TestSpace, e: &Event) -> Vec<String> {
    space.labels_of(e).into_iter().map(String::from).collect()
}

fn event_of(space: &TestSpace, members: &[String]) -> Result<Event, DocError> {
    Ok(space.event(members)?)
}

fn parse(text: &str) -> Result<Rational, DocError> {
    parse_rational(text).ok_or_else(|| DocError::Rational(text.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSpaceDoc {
    pub outcomes: Vec<String>,
    pub tests: Vec<Vec<String>>,
}

impl TestSpaceDoc {
    pub fn from_space(space: &TestSpace) -> Self {
        TestSpaceDoc {
            outcomes: space.outcomes().iter().map(|o| o.to_string()).collect(),
            tests: space.tests().iter().map(|t| labels(space, t)).collect(),
        }
    }

    pub fn to_space(&self) -> Result<TestSpace, DocError> {
        Ok(TestSpace::validate(&self.outcomes, &self.tests)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonDoc {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub rel: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderDoc {
    pub space: TestSpaceDoc,
    #[serde(default)]
    pub comparisons: Vec<ComparisonDoc>,
    #[serde(default)]
    pub scope: ScopePolicy,
}

impl OrderDoc {
    pub fn new(space: &TestSpace, comparisons: &[Comparison], scope: ScopePolicy) -> Self {
        OrderDoc {
            space: TestSpaceDoc::from_space(space),
            comparisons: comparisons
                .iter()
                .map(|c| ComparisonDoc {
                    lhs: labels(space, &c.lhs),
                    rhs: labels(space, &c.rhs),
                    rel: c.relation,
                })
                .collect(),
            scope,
        }
    }

    pub fn from_order(order: &PlausibilityOrder) -> Self {
        OrderDoc::new(order.space(), order.comparisons(), order.policy())
    }

    pub fn comparisons(&self, space: &TestSpace) -> Result<Vec<Comparison>, DocError> {
        self.comparisons
            .iter()
            .map(|c| {
                Ok(Comparison::new(
                    event_of(space, &c.lhs)?,
                    event_of(space, &c.rhs)?,
                    c.rel,
                ))
            })
            .collect()
    }

    /// Builds the order; `scope` overrides the document's own policy.
    pub fn to_order(
        &self,
        scope: Option<ScopePolicy>,
        event_cap: usize,
    ) -> Result<PlausibilityOrder, DocError> {
        let space = self.space.to_space()?;
        let comparisons = self.comparisons(&space)?;
        let options = OrderOptions {
            scope: scope.unwrap_or(self.scope),
            event_cap,
        };
        Ok(build_order(&space, &comparisons, options)?)
    }
}

/// Reads an order document, or a bare test space document as an order with
/// no comparisons.
pub fn parse_order_doc(text: &str) -> Result<OrderDoc, DocError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Input {
        Order(OrderDoc),
        Space(TestSpaceDoc),
    }
    match serde_json::from_str::<Input>(text) {
        Ok(Input::Order(doc)) => Ok(doc),
        Ok(Input::Space(space)) => Ok(OrderDoc {
            space,
            comparisons: Vec::new(),
            scope: ScopePolicy::Active,
        }),
        // Re-parse strictly for a useful message.
        Err(_) => Err(serde_json::from_str::<OrderDoc>(text)
            .err()
            .map(DocError::from)
            .unwrap_or_else(|| DocError::Json("unrecognized document".into()))),
    }
}

/// Outcome label to weight.
pub type MeasureDoc = BTreeMap<String, String>;

pub fn measure_doc(measure: &Measure) -> MeasureDoc {
    vector_doc(measure.space(), &measure.to_vector())
}

pub fn vector_doc(space: &TestSpace, v: &OutcomeVector) -> MeasureDoc {
    (0..space.outcome_count())
        .map(|x| (space.label(x).to_string(), format_rational(&v.get(x))))
        .collect()
}

pub fn parse_measure_doc(space: &TestSpace, doc: &MeasureDoc) -> Result<Measure, DocError> {
    let mut weights = Vec::with_capacity(space.outcome_count());
    for x in 0..space.outcome_count() {
        let w = doc.get(space.label(x)).ok_or_else(|| {
            DocError::Certificate(format!("no weight for outcome {}", space.label(x)))
        })?;
        weights.push(parse(w)?);
    }
    if let Some(extra) = doc.keys().find(|k| space.outcome_index(k).is_none()) {
        return Err(DocError::Certificate(format!("unknown outcome {extra}")));
    }
    Measure::new(space, weights).map_err(|e| DocError::Certificate(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionDoc {
    pub generators: String,
    pub scan: String,
    pub scope: ScopePolicy,
}

impl ConventionDoc {
    pub fn for_order(order: &PlausibilityOrder) -> Self {
        ConventionDoc {
            generators: "e_high - e_low for every weak pair low <= high of distinct scoped events"
                .into(),
            scan:
                "conclusion pairs (A, B) with B not weakly below A; strict and incomparable alike"
                    .into(),
            scope: order.policy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientDoc {
    pub generator: usize,
    pub low: Vec<String>,
    pub high: Vec<String>,
    pub lambda: String,
}

/// Non-zero cone coefficients, each with the weak pair its generator encodes.
pub fn coefficient_docs(
    cone: &ConeSystem,
    coefficients: &[(usize, Rational)],
) -> Vec<CoefficientDoc> {
    let space = cone.space();
    coefficients
        .iter()
        .map(|(k, lambda)| {
            let (low, high) = cone.provenance(*k);
            CoefficientDoc {
                generator: *k,
                low: labels(space, low),
                high: labels(space, high),
                lambda: format_rational(lambda),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremiseDoc {
    pub low: Vec<String>,
    pub high: Vec<String>,
    pub copies: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamiliesDoc {
    pub lhs: Vec<Vec<String>>,
    pub rhs: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub n: String,
    pub family_length: String,
    pub premises: Vec<PremiseDoc>,
    /// Absent when the families are too long to list.
    pub families: Option<FamiliesDoc>,
}

impl WitnessDoc {
    pub fn new(space: &TestSpace, w: &Witness) -> Self {
        let list = |f: Option<Vec<Event>>| -> Option<Vec<Vec<String>>> {
            f.map(|es| es.iter().map(|e| labels(space, e)).collect())
        };
        let families = match (list(w.lhs()), list(w.rhs())) {
            (Some(lhs), Some(rhs)) => Some(FamiliesDoc { lhs, rhs }),
            _ => None,
        };
        WitnessDoc {
            n: w.n.to_string(),
            family_length: w.family_length().to_string(),
            premises: w
                .premises
                .iter()
                .map(|p| PremiseDoc {
                    low: labels(space, &p.low),
                    high: labels(space, &p.high),
                    copies: p.copies.to_string(),
                })
                .collect(),
            families,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub coefficients: Vec<CoefficientDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
}

impl ViolationDoc {
    pub fn new(cone: &ConeSystem, v: &Violation) -> Self {
        let space = cone.space();
        ViolationDoc {
            lhs: labels(space, &v.lhs),
            rhs: labels(space, &v.rhs),
            coefficients: coefficient_docs(cone, &v.coefficients),
            witness: Some(WitnessDoc::new(space, &v.witness)),
        }
    }

    /// The conclusion pair and dense coefficients over `cone`'s generators.
    /// Each coefficient's premise must name the generator at its index.
    pub fn decode(&self, cone: &ConeSystem) -> Result<(Event, Event, Vec<Rational>), DocError> {
        let space = cone.space();
        let a = event_of(space, &self.lhs)?;
        let b = event_of(space, &self.rhs)?;
        let mut lambda = vec![Rational::default(); cone.len()];
        for c in &self.coefficients {
            if c.generator >= cone.len() {
                return Err(DocError::Certificate(format!(
                    "generator {} out of range",
                    c.generator
                )));
            }
            let (low, high) = cone.provenance(c.generator);
            if event_of(space, &c.low)? != *low || event_of(space, &c.high)? != *high {
                return Err(DocError::Certificate(format!(
                    "generator {} is {} <= {}",
                    c.generator,
                    space.show(low),
                    space.show(high)
                )));
            }
            lambda[c.generator] = parse(&c.lambda)?;
        }
        Ok((a, b, lambda))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StatusDoc {
    Archimedean,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchimedeanReportDoc {
    pub convention: ConventionDoc,
    pub status: StatusDoc,
    pub scope_size: usize,
    pub generators: usize,
    pub pairs_scanned: usize,
    pub violations: Vec<ViolationDoc>,
    pub separators: Vec<MeasureDoc>,
}

impl ArchimedeanReportDoc {
    pub fn new(order: &PlausibilityOrder, cone: &ConeSystem, report: &ArchimedeanReport) -> Self {
        ArchimedeanReportDoc {
            convention: ConventionDoc::for_order(order),
            status: match report.status {
                ArchimedeanStatus::Archimedean => StatusDoc::Archimedean,
                ArchimedeanStatus::Violated => StatusDoc::Violated,
            },
            scope_size: order.len(),
            generators: cone.len(),
            pairs_scanned: report.pairs_scanned,
            violations: report
                .violations
                .iter()
                .map(|v| ViolationDoc::new(cone, v))
                .collect(),
            separators: report
                .separators
                .iter()
                .map(|rho| vector_doc(order.space(), rho))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolatedPairDoc {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub failure: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementReportDoc {
    pub convention: ConventionDoc,
    pub mode: String,
    pub verdict: String,
    pub measure: MeasureDoc,
    pub violated_pairs: Vec<ViolatedPairDoc>,
}

impl AgreementReportDoc {
    pub fn new(order: &PlausibilityOrder, report: &AgreementReport) -> Self {
        let space = order.space();
        AgreementReportDoc {
            convention: ConventionDoc::for_order(order),
            mode: match report.mode {
                AgreementMode::Agree => "AGREE",
                AgreementMode::Almost => "ALMOST",
            }
            .into(),
            verdict: match report.verdict {
                AgreementVerdict::Agrees => "AGREES",
                AgreementVerdict::AlmostAgrees => "ALMOST_AGREES",
                AgreementVerdict::Fails => "FAILS",
            }
            .into(),
            measure: measure_doc(&report.measure),
            violated_pairs: report
                .violated_pairs
                .iter()
                .map(|p| ViolatedPairDoc {
                    lhs: labels(space, &p.lhs),
                    rhs: labels(space, &p.rhs),
                    failure: match p.failure {
                        PairFailure::WeakNotLe => "weak_not_le",
                        PairFailure::StrictNotLt => "strict_not_lt",
                        PairFailure::LeNotWeak => "le_not_weak",
                    }
                    .into(),
                })
                .collect(),
        }
    }
}

/// Serializes with two-space indentation and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}
