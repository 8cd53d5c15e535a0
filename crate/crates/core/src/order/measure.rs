use num::{Signed, Zero};
use thiserror::Error;

use crate::exactlp::{format_rational, OutcomeVector, Rational};
use crate::testspace::{Event, TestSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("outcome {0} has a negative weight")]
    NegativeWeight(String),
    #[error("test {test} has total weight {sum}, not 1")]
    TestSumNotOne { test: String, sum: String },
}

/// A probability measure: non-negative outcome weights summing to one on every test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    space: TestSpace,
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(space: &TestSpace, weights: Vec<Rational>) -> Result<Self, MeasureError> {
        if weights.len() != space.outcome_count() {
            return Err(MeasureError::WeightCount {
                expected: space.outcome_count(),
                found: weights.len(),
            });
        }
        if let Some(x) = weights.iter().position(Signed::is_negative) {
            return Err(MeasureError::NegativeWeight(space.label(x).to_string()));
        }
        let measure = Measure {
            space: space.clone(),
            weights,
        };
        let one = Rational::from_integer(1.into());
        for test in space.tests() {
            let sum = measure.eval(test);
            if sum != one {
                return Err(MeasureError::TestSumNotOne {
                    test: space.show(test),
                    sum: format_rational(&sum),
                });
            }
        }
        Ok(measure)
    }

    /// Reads a functional as a measure, checking the measure conditions.
    pub fn from_vector(space: &TestSpace, rho: &OutcomeVector) -> Result<Self, MeasureError> {
        Measure::new(space, rho.to_dense())
    }

    pub fn space(&self) -> &TestSpace {
        &self.space
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, outcome: usize) -> &Rational {
        &self.weights[outcome]
    }

    /// `μ(A) = Σ_{x∈A} μ(x)`.
    pub fn eval(&self, event: &Event) -> Rational {
        event
            .members()
            .iter()
            .fold(Rational::zero(), |acc, &x| acc + &self.weights[x])
    }

    pub fn to_vector(&self) -> OutcomeVector {
        OutcomeVector::from_dense(&self.weights)
    }
}
