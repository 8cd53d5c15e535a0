//! Comparative plausibility orders.
//!
//! An order is a preorder `weak` on a finite scope of events together with a
//! sub-relation `strict`. [`build_order`] closes user comparisons under the
//! plausibility axioms: tests are all equivalent, inclusion implies `⪯`, and
//! the empty event lies strictly below every test. Plausibility values are
//! never materialized; they are the equivalence classes of `weak`.

mod bitmatrix;
mod measure;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::testspace::{Event, TestSpace, TestSpaceError, DEFAULT_EVENT_CAP};
use bitmatrix::BitMatrix;

pub use measure::{Measure, MeasureError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs ⪯ rhs`
    Weak,
    /// `lhs ≺ rhs`
    Strict,
    /// `lhs ≈ rhs`
    Equiv,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Weak => "⪯",
            Relation::Strict => "≺",
            Relation::Equiv => "≈",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Comparison {
    pub lhs: Event,
    pub rhs: Event,
    pub relation: Relation,
}

impl Comparison {
    pub fn new(lhs: Event, rhs: Event, relation: Relation) -> Self {
        Comparison { lhs, rhs, relation }
    }

    pub fn weak(lhs: Event, rhs: Event) -> Self {
        Comparison::new(lhs, rhs, Relation::Weak)
    }

    pub fn strict(lhs: Event, rhs: Event) -> Self {
        Comparison::new(lhs, rhs, Relation::Strict)
    }

    pub fn equiv(lhs: Event, rhs: Event) -> Self {
        Comparison::new(lhs, rhs, Relation::Equiv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScopePolicy {
    /// `∅`, singletons, tests and every event named by a comparison.
    #[default]
    Active,
    /// Every event of the space.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderOptions {
    pub scope: ScopePolicy,
    pub event_cap: usize,
}

impl Default for OrderOptions {
    fn default() -> Self {
        OrderOptions {
            scope: ScopePolicy::Active,
            event_cap: DEFAULT_EVENT_CAP,
        }
    }
}

impl OrderOptions {
    pub fn full() -> Self {
        OrderOptions {
            scope: ScopePolicy::Full,
            ..OrderOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("{0} is not an event of the space")]
    NotAnEvent(String),
    #[error("inconsistent order: cycle {}", cycle.join(" ⪯ "))]
    InconsistentOrder { cycle: Vec<String> },
    #[error("the closure forces test {test} below the empty event")]
    Axiom3Violation { test: String },
    #[error("at least one measure is required")]
    EmptyMeasureList,
    #[error("measure is defined on a different space")]
    SpaceMismatch,
    #[error(transparent)]
    Space(#[from] TestSpaceError),
}

/// A closed plausibility order on a finite scope of events.
#[derive(Debug, Clone)]
pub struct PlausibilityOrder {
    space: TestSpace,
    policy: ScopePolicy,
    scope: Vec<Event>,
    index: HashMap<Event, usize>,
    comparisons: Vec<Comparison>,
    weak: BitMatrix,
    strict: BitMatrix,
}

impl PartialEq for PlausibilityOrder {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.scope == other.scope
            && self.weak == other.weak
            && self.strict == other.strict
    }
}

impl Eq for PlausibilityOrder {}

fn assemble_scope(
    space: &TestSpace,
    extra: impl IntoIterator<Item = Event>,
    options: OrderOptions,
) -> Result<Vec<Event>, OrderError> {
    let mut scope: Vec<Event> = match options.scope {
        ScopePolicy::Full => space.enumerate_events(options.event_cap)?,
        ScopePolicy::Active => {
            let mut s = vec![Event::empty()];
            s.extend((0..space.outcome_count()).map(|x| space.singleton(x)));
            s.extend(space.tests().iter().cloned());
            s
        }
    };
    scope.extend(extra);
    scope.sort();
    scope.dedup();
    Ok(scope)
}

fn index_of(scope: &[Event]) -> HashMap<Event, usize> {
    scope
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect()
}

/// Closes `comparisons` under the plausibility axioms.
pub fn build_order(
    space: &TestSpace,
    comparisons: &[Comparison],
    options: OrderOptions,
) -> Result<PlausibilityOrder, OrderError> {
    for c in comparisons {
        for e in [&c.lhs, &c.rhs] {
            let in_range = e.members().iter().all(|&x| x < space.outcome_count());
            if !in_range || !space.contains_event(e) {
                let shown = if in_range {
                    space.show(e)
                } else {
                    format!("{:?}", e.members())
                };
                return Err(OrderError::NotAnEvent(shown));
            }
        }
    }
    let scope = assemble_scope(
        space,
        comparisons
            .iter()
            .flat_map(|c| [c.lhs.clone(), c.rhs.clone()]),
        options,
    )?;
    let index = index_of(&scope);
    let n = scope.len();

    // Base edges; strict edges are recorded separately as (from, to, user?).
    let mut base = BitMatrix::new(n);
    let mut strict_edges: Vec<(usize, usize, bool)> = Vec::new();
    for c in comparisons {
        let (a, b) = (index[&c.lhs], index[&c.rhs]);
        base.set(a, b);
        match c.relation {
            Relation::Weak => {}
            Relation::Equiv => base.set(b, a),
            Relation::Strict => strict_edges.push((a, b, true)),
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && scope[i].is_subset(&scope[j]) {
                base.set(i, j);
            }
        }
    }
    let designated = index[space.designated_test()];
    let empty = index[&Event::empty()];
    for test in space.tests() {
        let t = index[test];
        base.set(designated, t);
        base.set(t, designated);
        base.set(empty, t);
        strict_edges.push((empty, t, false));
    }

    let mut weak = base.clone();
    for i in 0..n {
        weak.set(i, i);
    }
    weak.transitive_closure();

    if let Some(&(a, b, _)) = strict_edges
        .iter()
        .find(|&&(a, b, user)| user && weak.get(b, a))
    {
        let mut cycle = vec![a, b];
        cycle.extend(shortest_path(&base, b, a));
        cycle.pop();
        return Err(OrderError::InconsistentOrder {
            cycle: cycle.iter().map(|&i| space.show(&scope[i])).collect(),
        });
    }
    if let Some(&(_, t, _)) = strict_edges.iter().find(|&&(a, b, _)| weak.get(b, a)) {
        return Err(OrderError::Axiom3Violation {
            test: space.show(&scope[t]),
        });
    }

    // strict = weak ∘ E_strict ∘ weak
    let weak_t = weak.transpose();
    let mut strict = BitMatrix::new(n);
    for &(a, b, _) in &strict_edges {
        let below: Vec<usize> = weak_t.ones(a).collect();
        let above = weak.row(b).to_vec();
        for i in below {
            strict.or_bits(i, &above);
        }
    }

    Ok(PlausibilityOrder {
        space: space.clone(),
        policy: options.scope,
        scope,
        index,
        comparisons: comparisons.to_vec(),
        weak,
        strict,
    })
}

/// Vertices after `from` on a shortest path `from → … → to`.
fn shortest_path(edges: &BitMatrix, from: usize, to: usize) -> Vec<usize> {
    let n = edges.len();
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::from([from]);
    parent[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for w in edges.ones(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = parent[v];
        path.push(v);
    }
    path.pop();
    path.reverse();
    path
}

/// The order induced by `μ` on the given events (plus the mandatory ones):
/// `A ⪯ B` iff `μ(A) ≤ μ(B)`, strictly iff `<`.
pub fn order_from_measure(
    measure: &Measure,
    events: &[Event],
) -> Result<PlausibilityOrder, OrderError> {
    envelope_order(measure.space(), std::slice::from_ref(measure), events)
}

/// `A ⪯ B` iff every measure gives `μ_i(A) ≤ μ_i(B)`; strict when additionally
/// at least one inequality is strict.
pub fn envelope_order(
    space: &TestSpace,
    measures: &[Measure],
    events: &[Event],
) -> Result<PlausibilityOrder, OrderError> {
    if measures.is_empty() {
        return Err(OrderError::EmptyMeasureList);
    }
    if measures.iter().any(|m| m.space() != space) {
        return Err(OrderError::SpaceMismatch);
    }
    if let Some(e) = events.iter().find(|e| !space.contains_event(e)) {
        return Err(OrderError::NotAnEvent(format!("{:?}", e.members())));
    }
    let scope = assemble_scope(space, events.iter().cloned(), OrderOptions::default())?;
    let n = scope.len();
    let values: Vec<Vec<_>> = measures
        .iter()
        .map(|m| scope.iter().map(|e| m.eval(e)).collect())
        .collect();
    let mut weak = BitMatrix::new(n);
    let mut strict = BitMatrix::new(n);
    for i in 0..n {
        for j in 0..n {
            if values.iter().all(|v| v[i] <= v[j]) {
                weak.set(i, j);
                if values.iter().any(|v| v[i] < v[j]) {
                    strict.set(i, j);
                }
            }
        }
    }
    Ok(PlausibilityOrder {
        space: space.clone(),
        policy: ScopePolicy::Active,
        index: index_of(&scope),
        scope,
        comparisons: Vec::new(),
        weak,
        strict,
    })
}

impl PlausibilityOrder {
    pub fn space(&self) -> &TestSpace {
        &self.space
    }

    pub fn policy(&self) -> ScopePolicy {
        self.policy
    }

    pub fn scope(&self) -> &[Event] {
        &self.scope
    }

    pub fn len(&self) -> usize {
        self.scope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scope.is_empty()
    }

    pub fn event(&self, i: usize) -> &Event {
        &self.scope[i]
    }

    pub fn index_of(&self, event: &Event) -> Option<usize> {
        self.index.get(event).copied()
    }

    /// The comparisons the order was built from.
    pub fn comparisons(&self) -> &[Comparison] {
        &self.comparisons
    }

    /// `scope[i] ⪯ scope[j]`.
    pub fn weak(&self, i: usize, j: usize) -> bool {
        self.weak.get(i, j)
    }

    /// `scope[i] ≺ scope[j]`.
    pub fn strict(&self, i: usize, j: usize) -> bool {
        self.strict.get(i, j)
    }

    pub fn equiv(&self, i: usize, j: usize) -> bool {
        self.weak(i, j) && self.weak(j, i)
    }

    /// `i ⪯ j` but not `j ⪯ i`: strictly below in the quotient poset.
    pub fn below(&self, i: usize, j: usize) -> bool {
        self.weak(i, j) && !self.weak(j, i)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.weak(i, j) || self.weak(j, i)
    }

    pub fn empty_index(&self) -> usize {
        self.index[&Event::empty()]
    }

    pub fn designated_index(&self) -> usize {
        self.index[self.space.designated_test()]
    }

    pub fn show(&self, i: usize) -> String {
        self.space.show(&self.scope[i])
    }

    /// First incomparable pair in index order.
    pub fn first_incomparable(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !self.comparable(i, j))
    }

    pub fn is_total(&self) -> bool {
        self.first_incomparable().is_none()
    }

    /// `Po(A) = 0` iff `A ≈ ∅`.
    pub fn to_possibility(&self) -> BTreeMap<Event, u8> {
        let empty = self.empty_index();
        self.scope
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), u8::from(!self.weak(i, empty))))
            .collect()
    }

    /// Representative (least index) of each event's equivalence class.
    pub fn class_representatives(&self) -> Vec<usize> {
        (0..self.len())
            .map(|i| {
                self.weak
                    .ones(i)
                    .find(|&j| self.weak(j, i))
                    .expect("weak is reflexive")
            })
            .collect()
    }

    /// Equivalence classes, each sorted, ordered by representative.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let reps = self.class_representatives();
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in reps.into_iter().enumerate() {
            classes.entry(r).or_default().push(i);
        }
        classes.into_values().collect()
    }

    /// Covering pairs `(r, s)` of class representatives in the quotient poset.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let reps = self.class_representatives();
        let is_rep: Vec<bool> = (0..self.len()).map(|i| reps[i] == i).collect();
        let above: Vec<Vec<usize>> = (0..self.len())
            .map(|r| {
                if is_rep[r] {
                    self.weak
                        .ones(r)
                        .filter(|&s| is_rep[s] && s != r && !self.weak(s, r))
                        .collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut covers = Vec::new();
        for r in (0..self.len()).filter(|&r| is_rep[r]) {
            for &s in &above[r] {
                if !above[r].iter().any(|&t| t != s && self.below(t, s)) {
                    covers.push((r, s));
                }
            }
        }
        covers
    }

    /// Comparisons whose closure reproduces this order exactly: each event is
    /// tied to its class representative, and every pair of representatives is
    /// listed with its strongest relation.
    pub fn emitted_comparisons(&self) -> Vec<Comparison> {
        let reps = self.class_representatives();
        let mut out = Vec::new();
        for (i, &r) in reps.iter().enumerate() {
            if r != i {
                out.push(Comparison::equiv(
                    self.scope[r].clone(),
                    self.scope[i].clone(),
                ));
            }
        }
        for r in (0..self.len()).filter(|&r| reps[r] == r) {
            for s in (0..self.len()).filter(|&s| reps[s] == s && s != r) {
                if self.strict(r, s) {
                    out.push(Comparison::strict(
                        self.scope[r].clone(),
                        self.scope[s].clone(),
                    ));
                } else if self.weak(r, s) {
                    out.push(Comparison::weak(
                        self.scope[r].clone(),
                        self.scope[s].clone(),
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::{int, rat};
    use proptest::prelude::*;

    fn ev(space: &TestSpace, labels: &[&str]) -> Event {
        space.event(labels).unwrap()
    }

    fn triangle_possibility() -> PlausibilityOrder {
        let t = TestSpace::triangle();
        let comparisons = vec![
            Comparison::equiv(ev(&t, &["x"]), Event::empty()),
            Comparison::equiv(ev(&t, &["y"]), ev(&t, &["x", "y"])),
            Comparison::equiv(ev(&t, &["z"]), ev(&t, &["x", "y"])),
        ];
        build_order(&t, &comparisons, OrderOptions::default()).unwrap()
    }

    fn classical(n: usize) -> TestSpace {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        TestSpace::classical(&labels).unwrap()
    }

    #[test]
    fn triangle_possibility_is_consistent_and_total() {
        let o = triangle_possibility();
        assert_eq!(o.len(), 7);
        let t = o.space();
        let x = o.index_of(&ev(t, &["x"])).unwrap();
        let y = o.index_of(&ev(t, &["y"])).unwrap();
        assert!(o.strict(x, y));
        assert!(o.is_total());
        let po = o.to_possibility();
        assert_eq!(po[&ev(t, &["x"])], 0);
        assert_eq!(po[&ev(t, &["y"])], 1);
        assert_eq!(po[&ev(t, &["z"])], 1);
        assert_eq!(po[&Event::empty()], 0);
    }

    #[test]
    fn kps_comparisons_are_consistent() {
        let s = classical(5);
        let e = |l: &[&str]| ev(&s, l);
        let comparisons = vec![
            Comparison::strict(e(&["1", "3"]), e(&["4"])),
            Comparison::strict(e(&["1", "4"]), e(&["2", "3"])),
            Comparison::strict(e(&["3", "4"]), e(&["1", "5"])),
            Comparison::strict(e(&["2", "5"]), e(&["1", "3", "4"])),
        ];
        assert!(build_order(&s, &comparisons, OrderOptions::default()).is_ok());
    }

    #[test]
    fn reversed_test_is_rejected() {
        let t = TestSpace::triangle();
        let xy = ev(&t, &["x", "y"]);
        let err = build_order(
            &t,
            &[Comparison::strict(xy.clone(), Event::empty())],
            OrderOptions::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            OrderError::InconsistentOrder {
                cycle: vec!["{x,y}".into(), "{}".into()]
            }
        );
        let err = build_order(
            &t,
            &[Comparison::weak(xy, Event::empty())],
            OrderOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, OrderError::Axiom3Violation { .. }));
    }

    #[test]
    fn shortest_cycle_is_reported() {
        let s = classical(3);
        let e = |l: &[&str]| ev(&s, l);
        let comparisons = vec![
            Comparison::strict(e(&["1"]), e(&["2"])),
            Comparison::weak(e(&["2"]), e(&["3"])),
            Comparison::weak(e(&["3"]), e(&["1"])),
        ];
        let err = build_order(&s, &comparisons, OrderOptions::default()).unwrap_err();
        assert_eq!(
            err,
            OrderError::InconsistentOrder {
                cycle: vec!["{1}".into(), "{2}".into(), "{3}".into()]
            }
        );
    }

    #[test]
    fn not_an_event() {
        let t = TestSpace::triangle();
        let xyz = Event::from_indices([0, 1, 2]);
        let err = build_order(
            &t,
            &[Comparison::weak(xyz, Event::empty())],
            OrderOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, OrderError::NotAnEvent("{x,y,z}".into()));
    }

    #[test]
    fn axioms_only_classical_pair_is_partial() {
        let s = classical(2);
        let o = build_order(&s, &[], OrderOptions::default()).unwrap();
        let (i, j) = o.first_incomparable().unwrap();
        assert_eq!((o.show(i), o.show(j)), ("{1}".into(), "{2}".into()));
    }

    #[test]
    fn measure_orders() {
        let s = classical(2);
        let events = s.enumerate_events(16).unwrap();
        let uniform = Measure::new(&s, vec![rat(1, 2); 2]).unwrap();
        let o = order_from_measure(&uniform, &events).unwrap();
        let (one, two) = (
            o.index_of(&ev(&s, &["1"])).unwrap(),
            o.index_of(&ev(&s, &["2"])).unwrap(),
        );
        assert!(o.equiv(one, two));
        assert!(o
            .to_possibility()
            .iter()
            .all(|(e, &p)| p == u8::from(!e.is_empty())));

        let skew = Measure::new(&s, vec![rat(1, 3), rat(2, 3)]).unwrap();
        let o = order_from_measure(&skew, &events).unwrap();
        assert!(o.strict(one, two));

        let flipped = Measure::new(&s, vec![rat(2, 3), rat(1, 3)]).unwrap();
        let env = envelope_order(&s, &[skew.clone(), flipped], &events).unwrap();
        assert!(!env.comparable(one, two));
        assert_eq!(
            envelope_order(&s, std::slice::from_ref(&skew), &events).unwrap(),
            order_from_measure(&skew, &events).unwrap()
        );
        assert_eq!(
            envelope_order(&s, &[], &events),
            Err(OrderError::EmptyMeasureList)
        );
    }

    #[test]
    fn triangle_half_measure_ties_singletons() {
        let t = TestSpace::triangle();
        let m = Measure::new(&t, vec![rat(1, 2); 3]).unwrap();
        let o = order_from_measure(&m, &[]).unwrap();
        assert!(o.equiv(1, 2) && o.equiv(2, 3));
        assert_eq!(m.eval(o.event(1)), rat(1, 2));
        assert_eq!(m.eval(o.event(4)), int(1));
    }

    #[test]
    fn full_scope_respects_the_cap() {
        let s = classical(13);
        let opts = OrderOptions {
            scope: ScopePolicy::Full,
            event_cap: 4096,
        };
        assert!(matches!(
            build_order(&s, &[], opts),
            Err(OrderError::Space(TestSpaceError::EventExplosion { .. }))
        ));
    }

    fn random_order() -> impl Strategy<Value = (TestSpace, Vec<Comparison>, bool)> {
        let spaces = prop_oneof![
            Just(TestSpace::triangle()),
            Just(classical(3)),
            Just(
                TestSpace::validate(
                    &["a", "b", "c", "d"],
                    &[vec!["a", "b"], vec!["b", "c", "d"]]
                )
                .unwrap()
            ),
        ];
        (spaces, any::<bool>()).prop_flat_map(|(space, full)| {
            let events = space.enumerate_events(64).unwrap();
            let k = events.len();
            let pick = proptest::collection::vec((0..k, 0..k, 0u8..3), 0..6);
            (Just(space), Just(events), pick, Just(full)).prop_map(
                |(space, events, picks, full)| {
                    let comparisons = picks
                        .into_iter()
                        .map(|(a, b, r)| {
                            let rel =
                                [Relation::Weak, Relation::Strict, Relation::Equiv][r as usize];
                            Comparison::new(events[a].clone(), events[b].clone(), rel)
                        })
                        .collect();
                    (space, comparisons, full)
                },
            )
        })
    }

    proptest! {
        #[test]
        fn closure_invariants((space, comparisons, full) in random_order()) {
            let opts = if full { OrderOptions::full() } else { OrderOptions::default() };
            let Ok(o) = build_order(&space, &comparisons, opts) else {
                return Ok(());
            };
            let n = o.len();
            let (empty, top) = (o.empty_index(), o.designated_index());
            for i in 0..n {
                prop_assert!(o.weak(i, i) && !o.strict(i, i));
                prop_assert!(o.weak(empty, i) && o.weak(i, top));
                for j in 0..n {
                    if o.strict(i, j) {
                        prop_assert!(o.weak(i, j) && !o.weak(j, i));
                    }
                    for k in 0..n {
                        if o.weak(i, j) && o.weak(j, k) {
                            prop_assert!(o.weak(i, k));
                        }
                        if (o.strict(i, j) && o.weak(j, k)) || (o.weak(i, j) && o.strict(j, k)) {
                            prop_assert!(o.strict(i, k));
                        }
                    }
                }
            }
            for t in space.tests() {
                let ti = o.index_of(t).unwrap();
                prop_assert!(o.equiv(ti, top) && o.strict(empty, ti));
            }

            let again = build_order(&space, &o.emitted_comparisons(), opts).unwrap();
            prop_assert_eq!(&again, &o);
        }
    }
}
