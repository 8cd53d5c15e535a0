//! Test spaces, their events, and generators for the standard fixtures.
//!
//! A test space is a finite set of outcomes covered by a family of finite
//! tests. Outcomes are kept in sorted order and addressed by index; an
//! [`Event`] is a sorted list of outcome indices, so its ordering matches the
//! lexicographic ordering of the outcome labels.

mod modal;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

pub use modal::{
    modal_possibility_table, modal_test_space, modal_test_space_with, noncontextual_possibility,
    projective_points, ContextualConflict, ModalLimits, ModalState, NoncontextualCheck,
    PossibilityRow, PossibilityTable,
};

/// Default bound on the number of events produced by [`TestSpace::enumerate_events`].
pub const DEFAULT_EVENT_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestSpaceError {
    #[error("outcome `{0}` belongs to no test")]
    CoverViolation(String),
    #[error("test #{0} is empty")]
    EmptyTest(usize),
    #[error("outcome id `{0}` appears more than once")]
    DuplicateOutcomeId(String),
    #[error("test mentions unknown outcome `{0}`")]
    UnknownOutcomeInTest(String),
    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),
    #[error("invalid outcome id {0:?}: ids must be non-empty and contain no whitespace")]
    InvalidOutcomeId(String),
    #[error("a test space needs at least one test")]
    NoTests,
    #[error("label list is empty")]
    EmptyLabelList,
    #[error("{} events exceed the cap of {cap}", if *.exact { format!("{count}") } else { format!("at least {count}") })]
    EventExplosion {
        count: u128,
        exact: bool,
        cap: usize,
    },
    #[error("{{{}}} is not contained in any test", .0.join(","))]
    NotAnEvent(Vec<String>),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension {0} is below 2")]
    DimensionTooSmall(usize),
    #[error("modal space over p={p}, d={d} exceeds the configured size limits")]
    SpaceTooLarge { p: u64, d: usize },
    #[error("state does not belong to the modal space over p={p}, d={d}")]
    StateNotInSpace { p: u64, d: usize },
}

/// A canonical outcome label: non-empty, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(String);

impl Outcome {
    pub fn new(id: impl Into<String>) -> Result<Self, TestSpaceError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(TestSpaceError::InvalidOutcomeId(id));
        }
        Ok(Outcome(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A set of outcomes, stored as sorted, duplicate-free outcome indices.
///
/// Events order by size first and lexicographically second; this is the
/// canonical order used for scopes, tests and reports.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Event(Vec<usize>);

impl Event {
    pub fn empty() -> Self {
        Event(Vec::new())
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = indices.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Event(members)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, outcome: usize) -> bool {
        self.0.binary_search(&outcome).is_ok()
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut rest = other.0.iter();
        'outer: for x in &self.0 {
            for y in rest.by_ref() {
                match y.cmp(x) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite, validated test space in canonical form.
#[derive(Debug, Clone)]
pub struct TestSpace {
    outcomes: Vec<Outcome>,
    tests: Vec<Event>,
    lookup: HashMap<String, usize>,
}

impl PartialEq for TestSpace {
    fn eq(&self, other: &Self) -> bool {
        self.outcomes == other.outcomes && self.tests == other.tests
    }
}

impl Eq for TestSpace {}

impl TestSpace {
    /// Validates raw outcome and test lists and returns the canonical space.
    ///
    /// Repeated members inside a test and repeated tests are collapsed, since
    /// tests are sets.
    pub fn validate<S, T>(outcomes: &[S], tests: &[T]) -> Result<Self, TestSpaceError>
    where
        S: AsRef<str>,
        T: AsRef<[S]>,
    {
        let mut sorted = Vec::with_capacity(outcomes.len());
        let mut seen = HashSet::new();
        for raw in outcomes {
            let outcome = Outcome::new(raw.as_ref())?;
            if !seen.insert(outcome.0.clone()) {
                return Err(TestSpaceError::DuplicateOutcomeId(outcome.0));
            }
            sorted.push(outcome);
        }
        sorted.sort();
        let lookup: HashMap<String, usize> = sorted
            .iter()
            .enumerate()
            .map(|(i, o)| (o.0.clone(), i))
            .collect();

        let mut canonical = Vec::with_capacity(tests.len());
        for (t, raw) in tests.iter().enumerate() {
            let raw = raw.as_ref();
            if raw.is_empty() {
                return Err(TestSpaceError::EmptyTest(t));
            }
            let mut members = Vec::with_capacity(raw.len());
            for label in raw {
                let label = label.as_ref();
                match lookup.get(label) {
                    Some(&i) => members.push(i),
                    None => return Err(TestSpaceError::UnknownOutcomeInTest(label.to_string())),
                }
            }
            canonical.push(Event::from_indices(members));
        }
        canonical.sort();
        canonical.dedup();

        if canonical.is_empty() {
            return match sorted.first() {
                Some(first) => Err(TestSpaceError::CoverViolation(first.0.clone())),
                None => Err(TestSpaceError::NoTests),
            };
        }
        let mut covered = vec![false; sorted.len()];
        for test in &canonical {
            for &x in test.members() {
                covered[x] = true;
            }
        }
        if let Some(x) = covered.iter().position(|c| !c) {
            return Err(TestSpaceError::CoverViolation(sorted[x].0.clone()));
        }

        Ok(TestSpace {
            outcomes: sorted,
            tests: canonical,
            lookup,
        })
    }

    /// The classical space: one test holding every outcome.
    pub fn classical<S: AsRef<str>>(labels: &[S]) -> Result<Self, TestSpaceError> {
        if labels.is_empty() {
            return Err(TestSpaceError::EmptyLabelList);
        }
        TestSpace::validate(labels, &[labels])
    }

    /// Three outcomes, pairwise joined into three two-outcome tests.
    pub fn triangle() -> Self {
        TestSpace::validate(&["x", "y", "z"], &[["x", "y"], ["y", "z"], ["z", "x"]])
            .expect("triangle space is valid")
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn label(&self, outcome: usize) -> &str {
        &self.outcomes[outcome].0
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.lookup.get(label).copied()
    }

    pub fn tests(&self) -> &[Event] {
        &self.tests
    }

    /// The first test in canonical order; used wherever a fixed test is needed.
    pub fn designated_test(&self) -> &Event {
        &self.tests[0]
    }

    pub fn contains_event(&self, event: &Event) -> bool {
        event.is_empty() || self.tests.iter().any(|t| event.is_subset(t))
    }

    /// Whether the given outcomes lie together in some test.
    pub fn is_event<S: AsRef<str>>(&self, members: &[S]) -> Result<bool, TestSpaceError> {
        let event = self.resolve(members)?;
        Ok(self.contains_event(&event))
    }

    /// Resolves labels into an event, failing if they do not fit in one test.
    pub fn event<S: AsRef<str>>(&self, members: &[S]) -> Result<Event, TestSpaceError> {
        let event = self.resolve(members)?;
        if self.contains_event(&event) {
            Ok(event)
        } else {
            Err(TestSpaceError::NotAnEvent(
                self.labels_of(&event)
                    .into_iter()
                    .map(String::from)
                    .collect(),
            ))
        }
    }

    fn resolve<S: AsRef<str>>(&self, members: &[S]) -> Result<Event, TestSpaceError> {
        let mut indices = Vec::with_capacity(members.len());
        for m in members {
            let m = m.as_ref();
            indices.push(
                self.outcome_index(m)
                    .ok_or_else(|| TestSpaceError::UnknownOutcome(m.to_string()))?,
            );
        }
        Ok(Event::from_indices(indices))
    }

    pub fn labels_of(&self, event: &Event) -> Vec<&str> {
        event.members().iter().map(|&i| self.label(i)).collect()
    }

    /// `{a,b}`-style rendering for summaries and diagnostics.
    pub fn show(&self, event: &Event) -> String {
        format!("{{{}}}", self.labels_of(event).join(","))
    }

    pub fn singleton(&self, outcome: usize) -> Event {
        Event(vec![outcome])
    }

    /// Tests that are not contained in another test. Their power sets cover
    /// every event.
    fn maximal_tests(&self) -> Vec<&Event> {
        self.tests
            .iter()
            .filter(|t| !self.tests.iter().any(|u| u != *t && t.is_subset(u)))
            .collect()
    }

    /// All events, in canonical order. Fails instead of truncating when the
    /// count exceeds `cap`.
    pub fn enumerate_events(&self, cap: usize) -> Result<Vec<Event>, TestSpaceError> {
        let maximal = self.maximal_tests();
        let mut found: HashSet<Event> = HashSet::new();
        for test in &maximal {
            let k = test.len();
            if k >= 63 || (1usize << k) > cap {
                return Err(self.explosion(&maximal, found.len(), cap));
            }
            let members = test.members();
            for mask in 0u64..(1u64 << k) {
                let subset = members
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, &x)| x);
                found.insert(Event(subset.collect()));
                if found.len() > cap {
                    return Err(self.explosion(&maximal, found.len(), cap));
                }
            }
        }
        let mut events: Vec<Event> = found.into_iter().collect();
        events.sort();
        Ok(events)
    }

    fn explosion(&self, maximal: &[&Event], seen: usize, cap: usize) -> TestSpaceError {
        let (count, exact) = count_events(maximal).unwrap_or_else(|| {
            let largest = maximal.iter().map(|t| t.len()).max().unwrap_or(0);
            let bound = if largest >= 127 {
                u128::MAX
            } else {
                1u128 << largest
            };
            (bound.max(seen as u128), false)
        });
        TestSpaceError::EventExplosion { count, exact, cap }
    }
}

/// Number of distinct subsets of the given tests, by inclusion-exclusion over
/// their intersections. `None` when that is too expensive or overflows.
fn count_events(maximal: &[&Event]) -> Option<(u128, bool)> {
    if maximal.len() > 20 {
        return None;
    }
    let mut total: i128 = 0;
    for mask in 1u32..(1u32 << maximal.len()) {
        let mut members: Option<Vec<usize>> = None;
        for (i, t) in maximal.iter().enumerate() {
            if mask >> i & 1 == 1 {
                members = Some(match members {
                    None => t.members().to_vec(),
                    Some(m) => m.into_iter().filter(|x| t.contains(*x)).collect(),
                });
            }
        }
        let size = members.map_or(0, |m| m.len());
        if size >= 120 {
            return None;
        }
        let term = 1i128 << size;
        if mask.count_ones() % 2 == 1 {
            total = total.checked_add(term)?;
        } else {
            total = total.checked_sub(term)?;
        }
    }
    Some((total as u128, true))
}
