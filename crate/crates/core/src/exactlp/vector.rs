use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num::{Signed, Zero};

use super::Rational;
use crate::testspace::Event;

/// A sparse rational vector indexed by outcome.
///
/// Zero entries are never stored, so two vectors are equal exactly when their
/// entry maps are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeVector {
    dim: usize,
    entries: BTreeMap<usize, Rational>,
}

impl OutcomeVector {
    pub fn zeros(dim: usize) -> Self {
        OutcomeVector {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = OutcomeVector::zeros(dim);
        v.set(index, Rational::from_integer(1.into()));
        v
    }

    /// The indicator vector `e_A` of an event.
    pub fn indicator(dim: usize, event: &Event) -> Self {
        let mut v = OutcomeVector::zeros(dim);
        for &x in event.members() {
            v.set(x, Rational::from_integer(1.into()));
        }
        v
    }

    /// `e_high - e_low`.
    pub fn difference(dim: usize, high: &Event, low: &Event) -> Self {
        OutcomeVector::indicator(dim, high) - OutcomeVector::indicator(dim, low)
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        let mut v = OutcomeVector::zeros(values.len());
        for (i, x) in values.iter().enumerate() {
            v.set(i, x.clone());
        }
        v
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, index: usize) -> Rational {
        self.entries
            .get(&index)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, index: usize, value: Rational) {
        assert!(
            index < self.dim,
            "index {index} outside dimension {}",
            self.dim
        );
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(&i, v)| (i, v))
    }

    pub fn dot(&self, other: &OutcomeVector) -> Rational {
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .filter_map(|(i, a)| large.entries.get(i).map(|b| a * b))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    /// Sum of the entries over an event's outcomes, i.e. `self · e_A`.
    pub fn eval(&self, event: &Event) -> Rational {
        event
            .members()
            .iter()
            .filter_map(|x| self.entries.get(x))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = OutcomeVector::zeros(self.dim);
        if !factor.is_zero() {
            for (&i, v) in &self.entries {
                out.entries.insert(i, v * factor);
            }
        }
        out
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: &Rational, other: &OutcomeVector) {
        for (&i, v) in &other.entries {
            let updated = self.get(i) + factor * v;
            self.set(i, updated);
        }
    }

    pub fn has_negative_entry(&self) -> bool {
        self.entries.values().any(Signed::is_negative)
    }
}

impl Add for &OutcomeVector {
    type Output = OutcomeVector;

    fn add(self, rhs: &OutcomeVector) -> OutcomeVector {
        let mut out = self.clone();
        out.add_scaled(&Rational::from_integer(1.into()), rhs);
        out
    }
}

impl Sub for &OutcomeVector {
    type Output = OutcomeVector;

    fn sub(self, rhs: &OutcomeVector) -> OutcomeVector {
        let mut out = self.clone();
        out.add_scaled(&Rational::from_integer((-1).into()), rhs);
        out
    }
}

impl Sub for OutcomeVector {
    type Output = OutcomeVector;

    fn sub(self, rhs: OutcomeVector) -> OutcomeVector {
        &self - &rhs
    }
}

impl Neg for &OutcomeVector {
    type Output = OutcomeVector;

    fn neg(self) -> OutcomeVector {
        self.scale(&Rational::from_integer((-1).into()))
    }
}
