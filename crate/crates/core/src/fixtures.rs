//! Ready-made spaces and orders, plus seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlp::Rational;
use crate::order::{build_order, Comparison, Measure, OrderOptions, PlausibilityOrder, Relation};
use crate::testspace::{Event, TestSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The classical space on outcomes `1..=n`.
pub fn classical(n: usize) -> TestSpace {
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    TestSpace::classical(&labels).expect("n ≥ 1")
}

fn event(space: &TestSpace, labels: &[&str]) -> Event {
    space.event(labels).expect("fixture events are valid")
}

pub fn axioms_only(space: &TestSpace) -> PlausibilityOrder {
    build_order(space, &[], OrderOptions::default()).expect("the axioms are consistent")
}

/// The triangle possibility measure: `{x} ≈ ∅`, `{y} ≈ T`, `{z} ≈ T`.
pub fn triangle_possibility_comparisons(space: &TestSpace) -> Vec<Comparison> {
    let top = space.designated_test().clone();
    vec![
        Comparison::equiv(event(space, &["x"]), Event::empty()),
        Comparison::equiv(event(space, &["y"]), top.clone()),
        Comparison::equiv(event(space, &["z"]), top),
    ]
}

pub fn triangle_possibility() -> PlausibilityOrder {
    let t = TestSpace::triangle();
    build_order(
        &t,
        &triangle_possibility_comparisons(&t),
        OrderOptions::default(),
    )
    .expect("consistent")
}

/// The four strict comparisons on five outcomes that no measure can satisfy.
pub fn kps_comparisons(space: &TestSpace) -> Vec<Comparison> {
    let e = |l: &[&str]| event(space, l);
    vec![
        Comparison::strict(e(&["1", "3"]), e(&["4"])),
        Comparison::strict(e(&["1", "4"]), e(&["2", "3"])),
        Comparison::strict(e(&["3", "4"]), e(&["1", "5"])),
        Comparison::strict(e(&["2", "5"]), e(&["1", "3", "4"])),
    ]
}

pub fn kps() -> PlausibilityOrder {
    let s = classical(5);
    build_order(&s, &kps_comparisons(&s), OrderOptions::default()).expect("consistent")
}

/// A total order on the KPS scope containing all four comparisons. It follows
/// the weights (2, 8, 4, 7, 10) except that `{2,5}` and `{1,3,4}` trade places.
pub fn kps_total_comparisons(space: &TestSpace) -> Vec<Comparison> {
    let chain: [&[&str]; 14] = [
        &[],
        &["1"],
        &["3"],
        &["1", "3"],
        &["4"],
        &["2"],
        &["1", "4"],
        &["5"],
        &["3", "4"],
        &["2", "3"],
        &["1", "5"],
        &["2", "5"],
        &["1", "3", "4"],
        &["1", "2", "3", "4", "5"],
    ];
    let events: Vec<Event> = chain.iter().map(|l| event(space, l)).collect();
    events
        .windows(2)
        .map(|w| {
            let rel = if w[0] == event(space, &["2", "3"]) {
                Relation::Equiv
            } else {
                Relation::Strict
            };
            Comparison::new(w[0].clone(), w[1].clone(), rel)
        })
        .collect()
}

pub fn kps_total() -> PlausibilityOrder {
    let s = classical(5);
    build_order(&s, &kps_total_comparisons(&s), OrderOptions::default()).expect("consistent")
}

fn random_weights<R: Rng>(rng: &mut R, k: usize, total: &Rational) -> Vec<Rational> {
    loop {
        let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=4)).collect();
        let sum: i64 = raw.iter().sum();
        if sum > 0 {
            return raw
                .into_iter()
                .map(|w| Rational::new(w.into(), sum.into()) * total)
                .collect();
        }
    }
}

/// A random space with at most `max_outcomes` outcomes and `max_tests` tests,
/// together with a measure on it.
///
/// Tests are added one at a time: each new test reuses a random set of earlier
/// outcomes of total weight at most one and tops it up with fresh outcomes.
pub fn random_space_with_measure<R: Rng>(
    rng: &mut R,
    max_outcomes: usize,
    max_tests: usize,
) -> (TestSpace, Measure) {
    assert!(max_outcomes >= 1 && max_tests >= 1);
    let one = Rational::from_integer(1.into());
    let first = rng.gen_range(1..=max_outcomes.min(4));
    let mut weights = random_weights(rng, first, &one);
    let mut tests: Vec<Vec<usize>> = vec![(0..first).collect()];

    let wanted = rng.gen_range(1..=max_tests);
    for _ in 0..wanted * 4 {
        if tests.len() >= wanted {
            break;
        }
        let n = weights.len();
        let mut reused: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        reused.sort_unstable();
        let mass: Rational = reused.iter().map(|&x| weights[x].clone()).sum();
        if mass > one {
            continue;
        }
        let room = max_outcomes - n;
        let fresh = if mass == one {
            0
        } else if room == 0 {
            continue;
        } else {
            rng.gen_range(1..=room.min(3))
        };
        let mut test = reused;
        if fresh > 0 {
            let extra = random_weights(rng, fresh, &(&one - &mass));
            test.extend(n..n + fresh);
            weights.extend(extra);
        }
        if test.is_empty() || tests.contains(&test) {
            continue;
        }
        tests.push(test);
    }

    let labels: Vec<String> = (0..weights.len()).map(|i| format!("o{i}")).collect();
    let named: Vec<Vec<String>> = tests
        .iter()
        .map(|t| t.iter().map(|&x| labels[x].clone()).collect())
        .collect();
    let space = TestSpace::validate(&labels, &named).expect("tests cover all outcomes");
    // Labels o0..o9 sort in creation order, so weights line up with indices.
    let measure = Measure::new(&space, weights).expect("every test sums to one");
    (space, measure)
}

/// Random comparisons on `space`, drawn from events that `measure` orders
/// correctly, with occasional arbitrary ones mixed in.
pub fn random_comparisons<R: Rng>(
    rng: &mut R,
    space: &TestSpace,
    measure: &Measure,
    count: usize,
    arbitrary: f64,
) -> Vec<Comparison> {
    let events = space.enumerate_events(usize::MAX).expect("small space");
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a = events.choose(rng).expect("non-empty").clone();
        let b = events.choose(rng).expect("non-empty").clone();
        if rng.gen_bool(arbitrary) {
            let rel = [Relation::Weak, Relation::Strict, Relation::Equiv][rng.gen_range(0..3)];
            out.push(Comparison::new(a, b, rel));
            continue;
        }
        let (lo, hi) = if measure.eval(&a) <= measure.eval(&b) {
            (a, b)
        } else {
            (b, a)
        };
        let rel = if measure.eval(&lo) < measure.eval(&hi) && rng.gen_bool(0.5) {
            Relation::Strict
        } else if measure.eval(&lo) == measure.eval(&hi) && rng.gen_bool(0.5) {
            Relation::Equiv
        } else {
            Relation::Weak
        };
        out.push(Comparison::new(lo, hi, rel));
    }
    out
}
