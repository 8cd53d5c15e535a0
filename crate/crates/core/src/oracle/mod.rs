//! Brute-force reference procedures.
//!
//! These are deliberately naive and reuse nothing from the LP engine except
//! the rational type: cone membership by bounded integer search or by
//! Fourier–Motzkin elimination, the Archimedean condition by enumerating event
//! families, and agreeing measures by averaging one separation per pair.

mod cross;
mod fm;

use std::collections::HashMap;

use num::{BigInt, Integer, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactlp::Rational;
use crate::order::{Measure, MeasureError, PlausibilityOrder};
use crate::testspace::Event;

pub use cross::{cross_check, CrossCheck, CrossCheckLine, MAX_FM_GENERATORS, MAX_MEMBERSHIP_DIM};
pub use fm::{fm_solve, Inequality};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest integer multiplier tried per generator.
    pub max_coefficient: u64,
    /// Longest event family enumerated, conclusion included.
    pub max_family_length: usize,
    /// Largest scope the family enumeration accepts.
    pub max_events: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_coefficient: 2,
            max_family_length: 4,
            max_events: 7,
        }
    }
}

pub const MAX_BRUTE_GENERATORS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle bounds must be at least 1")]
    InvalidConfig,
    #[error("{count} generators exceed the brute-force limit of {MAX_BRUTE_GENERATORS}")]
    TooManyGenerators { count: usize },
    #[error("scope of {events} events exceeds the oracle limit of {max}")]
    ScopeTooLarge { events: usize, max: usize },
    #[error("the order is not total")]
    NotTotal,
    #[error("no functional separates {lhs} from {rhs}")]
    SeparationFailed { lhs: String, rhs: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

impl OracleConfig {
    pub fn check(&self) -> Result<(), OracleError> {
        if self.max_coefficient == 0 || self.max_family_length == 0 || self.max_events == 0 {
            Err(OracleError::InvalidConfig)
        } else {
            Ok(())
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Clears denominators: the smallest positive integer multiple of `v`.
fn integral(v: &[Rational]) -> Vec<i128> {
    let d = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter()
        .map(|x| {
            (x * Rational::from_integer(d.clone()))
                .to_integer()
                .to_i128()
                .expect("oracle inputs are small")
        })
        .collect()
}

/// Searches `n ∈ {0..=bound}^k` with `Σ n_i g_i = m·v` for a positive integer
/// `m`, after scaling each `g_i` and `v` to their smallest integer multiples.
/// Returns the first multipliers found in lexicographic order.
pub fn brute_cone_membership(
    generators: &[Vec<Rational>],
    v: &[Rational],
    bound: u64,
) -> Result<Option<Vec<u64>>, OracleError> {
    if generators.len() > MAX_BRUTE_GENERATORS {
        return Err(OracleError::TooManyGenerators {
            count: generators.len(),
        });
    }
    if v.iter().all(Zero::is_zero) {
        return Ok(Some(vec![0; generators.len()]));
    }
    let gens: Vec<Vec<i128>> = generators.iter().map(|g| integral(g)).collect();
    let target = integral(v);
    let pivot = target.iter().position(|&x| x != 0).expect("v is non-zero");

    let mut n = vec![0u64; gens.len()];
    let mut sum = vec![0i128; target.len()];
    loop {
        let (s, t) = (sum[pivot], target[pivot]);
        if s % t == 0 && s / t > 0 {
            let m = s / t;
            if sum.iter().zip(&target).all(|(s, t)| *s == m * t) {
                return Ok(Some(n));
            }
        }
        // Odometer step, keeping `sum` in step with `n`.
        let Some(slot) = n.iter().rposition(|&k| k < bound) else {
            return Ok(None);
        };
        n[slot] += 1;
        sum.iter_mut().zip(&gens[slot]).for_each(|(s, g)| *s += g);
        for k in slot + 1..n.len() {
            let back = n[k] as i128;
            sum.iter_mut()
                .zip(&gens[k])
                .for_each(|(s, g)| *s -= back * g);
            n[k] = 0;
        }
    }
}

/// Either the target is in the cone, or a functional `ρ` with `ρ·g ≥ 0` for
/// every generator and `ρ·v ≤ −1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FmCone {
    Member,
    Separated(Vec<Rational>),
}

pub fn fm_cone_membership(generators: &[Vec<Rational>], v: &[Rational]) -> FmCone {
    let mut system: Vec<Inequality> = generators
        .iter()
        .map(|g| Inequality::new(g.clone(), Rational::zero()))
        .collect();
    system.push(Inequality::new(
        v.iter().map(|x| -x).collect(),
        Rational::one(),
    ));
    match fm_solve(&system, v.len()) {
        Some(rho) => FmCone::Separated(rho),
        None => FmCone::Member,
    }
}

/// Two families `(A_1, …, A_n)` and `(B_1, …, B_n)` with equal outcome counts,
/// `A_i ⪯ B_i` for `i < n` and `A_n ⪰ B_n` failing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyViolation {
    pub lhs: Vec<Event>,
    pub rhs: Vec<Event>,
}

fn indicator_diff(dim: usize, plus: &Event, minus: &Event) -> Vec<i64> {
    let mut v = vec![0i64; dim];
    for &x in plus.members() {
        v[x] += 1;
    }
    for &x in minus.members() {
        v[x] -= 1;
    }
    v
}

fn scope_guard(order: &PlausibilityOrder, config: &OracleConfig) -> Result<(), OracleError> {
    config.check()?;
    if order.len() > config.max_events {
        return Err(OracleError::ScopeTooLarge {
            events: order.len(),
            max: config.max_events,
        });
    }
    Ok(())
}

/// Every family violation up to the configured length.
pub fn brute_archimedean(
    order: &PlausibilityOrder,
    config: &OracleConfig,
) -> Result<Vec<FamilyViolation>, OracleError> {
    scope_guard(order, config)?;
    let dim = order.space().outcome_count();
    let n = order.len();
    let premises: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| order.weak(i, j))
        .collect();
    // Conclusions (A, B) with B ⋠ A, keyed by e_A − e_B.
    let mut conclusions: HashMap<Vec<i64>, Vec<(usize, usize)>> = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            if !order.weak(b, a) {
                conclusions
                    .entry(indicator_diff(dim, order.event(a), order.event(b)))
                    .or_default()
                    .push((a, b));
            }
        }
    }

    let mut found = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    let mut sum = vec![0i64; dim];
    enumerate_premises(
        order,
        &premises,
        &conclusions,
        config.max_family_length - 1,
        0,
        &mut chosen,
        &mut sum,
        &mut found,
    );
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_premises(
    order: &PlausibilityOrder,
    premises: &[(usize, usize)],
    conclusions: &HashMap<Vec<i64>, Vec<(usize, usize)>>,
    budget: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    sum: &mut [i64],
    found: &mut Vec<FamilyViolation>,
) {
    // Σ (e_{B_i} − e_{A_i}) over premises must equal e_{A_n} − e_{B_n}.
    if let Some(hits) = conclusions.get(&sum.to_vec()) {
        for &(a, b) in hits {
            let mut lhs: Vec<Event> = chosen
                .iter()
                .map(|&p| order.event(premises[p].0).clone())
                .collect();
            let mut rhs: Vec<Event> = chosen
                .iter()
                .map(|&p| order.event(premises[p].1).clone())
                .collect();
            lhs.push(order.event(a).clone());
            rhs.push(order.event(b).clone());
            found.push(FamilyViolation { lhs, rhs });
        }
    }
    if budget == 0 {
        return;
    }
    for p in start..premises.len() {
        let (lo, hi) = premises[p];
        for &x in order.event(hi).members() {
            sum[x] += 1;
        }
        for &x in order.event(lo).members() {
            sum[x] -= 1;
        }
        chosen.push(p);
        enumerate_premises(
            order,
            premises,
            conclusions,
            budget - 1,
            p,
            chosen,
            sum,
            found,
        );
        chosen.pop();
        for &x in order.event(hi).members() {
            sum[x] -= 1;
        }
        for &x in order.event(lo).members() {
            sum[x] += 1;
        }
    }
}

/// Checks a family violation by direct counting.
pub fn is_family_violation(order: &PlausibilityOrder, v: &FamilyViolation) -> bool {
    let dim = order.space().outcome_count();
    if v.lhs.len() != v.rhs.len() || v.lhs.is_empty() {
        return false;
    }
    let mut counts = vec![0i64; dim];
    for e in &v.lhs {
        e.members().iter().for_each(|&x| counts[x] += 1);
    }
    for e in &v.rhs {
        e.members().iter().for_each(|&x| counts[x] -= 1);
    }
    if counts.iter().any(|&c| c != 0) {
        return false;
    }
    let idx = |e: &Event| order.index_of(e);
    let last = v.lhs.len() - 1;
    let premises_hold = (0..last).all(|i| match (idx(&v.lhs[i]), idx(&v.rhs[i])) {
        (Some(a), Some(b)) => order.weak(a, b),
        _ => false,
    });
    let conclusion_fails = match (idx(&v.lhs[last]), idx(&v.rhs[last])) {
        (Some(a), Some(b)) => !order.weak(b, a),
        _ => false,
    };
    premises_hold && conclusion_fails
}

/// One separating functional per strictly ordered pair, each found by
/// Fourier–Motzkin and normalized on `e_T`, averaged into a measure.
pub fn averaged_agreeing_measure(
    order: &PlausibilityOrder,
    config: &OracleConfig,
) -> Result<Measure, OracleError> {
    scope_guard(order, config)?;
    if !order.is_total() {
        return Err(OracleError::NotTotal);
    }
    let dim = order.space().outcome_count();
    let n = order.len();
    let as_rational = |v: Vec<i64>| -> Vec<Rational> {
        v.into_iter()
            .map(|x| Rational::from_integer(x.into()))
            .collect()
    };
    let monotone: Vec<Inequality> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && order.weak(i, j))
        .map(|(i, j)| {
            Inequality::new(
                as_rational(indicator_diff(dim, order.event(j), order.event(i))),
                Rational::zero(),
            )
        })
        .collect();
    let unit = as_rational(indicator_diff(
        dim,
        order.space().designated_test(),
        &Event::empty(),
    ));

    let mut total = vec![Rational::zero(); dim];
    let mut count = 0u64;
    for a in 0..n {
        for b in 0..n {
            if !order.below(a, b) {
                continue;
            }
            let mut system = monotone.clone();
            system.push(Inequality::new(
                as_rational(indicator_diff(dim, order.event(b), order.event(a))),
                Rational::one(),
            ));
            let rho = fm_solve(&system, dim).ok_or_else(|| OracleError::SeparationFailed {
                lhs: order.show(a),
                rhs: order.show(b),
            })?;
            let scale = dot(&rho, &unit);
            for (t, r) in total.iter_mut().zip(&rho) {
                *t += r / &scale;
            }
            count += 1;
        }
    }
    let weights = total
        .into_iter()
        .map(|t| t / Rational::from_integer(count.into()))
        .collect();
    Ok(Measure::new(order.space(), weights)?)
}
