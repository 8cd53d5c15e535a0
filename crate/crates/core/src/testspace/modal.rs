//! Modal test spaces over prime fields.
//!
//! Outcomes are the projective points of `GF(p)^d`, each labelled by its
//! canonical representative (first non-zero coordinate scaled to 1). Tests
//! are the unordered bases: sets of `d` points whose representatives are
//! linearly independent.

use std::collections::BTreeMap;

use super::{TestSpace, TestSpaceError};

/// Size limits for [`modal_test_space`].
#[derive(Debug, Clone, Copy)]
pub struct ModalLimits {
    pub max_outcomes: usize,
    /// Bound on the number of `d`-subsets of points examined for independence.
    pub max_candidates: u128,
}

impl Default for ModalLimits {
    fn default() -> Self {
        ModalLimits {
            max_outcomes: 1024,
            max_candidates: 2_000_000,
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn check_field(p: u64, d: usize) -> Result<(), TestSpaceError> {
    if !is_prime(p) {
        return Err(TestSpaceError::NotPrime(p));
    }
    if d < 2 {
        return Err(TestSpaceError::DimensionTooSmall(d));
    }
    // keeps products of residues inside u64
    if p > u32::MAX as u64 {
        return Err(TestSpaceError::SpaceTooLarge { p, d });
    }
    Ok(())
}

fn normalize(coords: &mut [u64], p: u64) {
    if let Some(&lead) = coords.iter().find(|&&c| c != 0) {
        let inv = inv_mod(lead, p);
        for c in coords.iter_mut() {
            *c = *c * inv % p;
        }
    }
}

fn label_of(coords: &[u64], p: u64) -> String {
    if p <= 10 {
        coords.iter().map(|c| c.to_string()).collect()
    } else {
        coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// A state vector of a modal space, kept in projective normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModalState {
    p: u64,
    coords: Vec<u64>,
}

impl ModalState {
    pub fn new(p: u64, coords: &[u64]) -> Result<Self, TestSpaceError> {
        check_field(p, coords.len())?;
        let mut coords: Vec<u64> = coords.iter().map(|c| c % p).collect();
        if coords.iter().all(|&c| c == 0) {
            return Err(TestSpaceError::StateNotInSpace { p, d: coords.len() });
        }
        normalize(&mut coords, p);
        Ok(ModalState { p, coords })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// The outcome label of this state's projective point.
    pub fn label(&self) -> String {
        label_of(&self.coords, self.p)
    }
}

/// Canonical representatives of all projective points, sorted by label.
pub fn projective_points(p: u64, d: usize) -> Result<Vec<ModalState>, TestSpaceError> {
    check_field(p, d)?;
    let mut points = Vec::new();
    // leading coordinate position, then free coordinates after it
    for lead in 0..d {
        let free = d - lead - 1;
        let count = (p as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
        if count > ModalLimits::default().max_outcomes as u128 * 16 {
            return Err(TestSpaceError::SpaceTooLarge { p, d });
        }
        for n in 0..count as u64 {
            let mut coords = vec![0u64; d];
            coords[lead] = 1;
            let mut rest = n;
            for slot in (lead + 1..d).rev() {
                coords[slot] = rest % p;
                rest /= p;
            }
            points.push(ModalState { p, coords });
        }
    }
    points.sort_by_key(|s| s.label());
    Ok(points)
}

/// Rank of the given vectors over `GF(p)`.
fn rank_mod(vectors: &[&[u64]], p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.to_vec()).collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], p);
        rows[rank].iter_mut().for_each(|x| *x = *x * inv % p);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                eliminate(row, &pivot_row, factor, p);
            }
        }
        rank += 1;
    }
    rank
}

/// Coefficients of `target` in the basis `basis` over `GF(p)`, or `None` when
/// the basis is singular.
fn expand_in_basis(basis: &[&[u64]], target: &[u64], p: u64) -> Option<Vec<u64>> {
    let d = target.len();
    let n = basis.len();
    // augmented matrix: columns are basis vectors, last column the target
    let mut m: Vec<Vec<u64>> = (0..d)
        .map(|row| {
            let mut r: Vec<u64> = basis.iter().map(|b| b[row]).collect();
            r.push(target[row]);
            r
        })
        .collect();
    for col in 0..n {
        let pr = (col..d).find(|&r| m[r][col] != 0)?;
        m.swap(col, pr);
        let inv = inv_mod(m[col][col], p);
        m[col].iter_mut().for_each(|x| *x = *x * inv % p);
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && row[col] != 0 {
                let factor = row[col];
                eliminate(row, &pivot, factor, p);
            }
        }
    }
    Some(m.iter().take(n).map(|row| row[n]).collect())
}

/// `row -= factor * pivot` over `GF(p)`.
fn eliminate(row: &mut [u64], pivot: &[u64], factor: u64, p: u64) {
    for (x, &y) in row.iter_mut().zip(pivot) {
        let sub = factor * y % p;
        *x = (*x + p - sub) % p;
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// The modal test space of `GF(p)^d`.
pub fn modal_test_space(p: u64, d: usize) -> Result<TestSpace, TestSpaceError> {
    modal_test_space_with(p, d, ModalLimits::default())
}

pub fn modal_test_space_with(
    p: u64,
    d: usize,
    limits: ModalLimits,
) -> Result<TestSpace, TestSpaceError> {
    check_field(p, d)?;
    let points = projective_points(p, d)?;
    if points.len() > limits.max_outcomes || binomial(points.len(), d) > limits.max_candidates {
        return Err(TestSpaceError::SpaceTooLarge { p, d });
    }
    let labels: Vec<String> = points.iter().map(ModalState::label).collect();
    let mut tests: Vec<Vec<&str>> = Vec::new();
    let mut combo: Vec<usize> = (0..d).collect();
    loop {
        let vectors: Vec<&[u64]> = combo.iter().map(|&i| points[i].coords()).collect();
        if rank_mod(&vectors, p) == d {
            tests.push(combo.iter().map(|&i| labels[i].as_str()).collect());
        }
        // next d-combination of 0..n
        let n = points.len();
        let Some(slot) = (0..d).rev().find(|&s| combo[s] < n - d + s) else {
            break;
        };
        combo[slot] += 1;
        for s in slot + 1..d {
            combo[s] = combo[s - 1] + 1;
        }
    }
    let outcomes: Vec<&str> = labels.iter().map(String::as_str).collect();
    TestSpace::validate(&outcomes, &tests)
}

/// One test of a possibility table with its per-outcome verdicts
/// (`true` = possible).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilityRow {
    pub test: Vec<String>,
    pub verdicts: Vec<(String, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PossibilityTable {
    pub rows: Vec<PossibilityRow>,
}

/// Per-test possibilities of `state`: an outcome of a test is possible iff
/// it carries a non-zero coefficient when `state` is expanded in that test's
/// basis.
pub fn modal_possibility_table(
    p: u64,
    d: usize,
    state: &ModalState,
) -> Result<PossibilityTable, TestSpaceError> {
    if state.modulus() != p || state.dimension() != d {
        return Err(TestSpaceError::StateNotInSpace { p, d });
    }
    let space = modal_test_space(p, d)?;
    let points = projective_points(p, d)?;
    let by_label: BTreeMap<String, &ModalState> = points.iter().map(|s| (s.label(), s)).collect();
    let mut rows = Vec::with_capacity(space.tests().len());
    for test in space.tests() {
        let labels: Vec<String> = space
            .labels_of(test)
            .into_iter()
            .map(String::from)
            .collect();
        let basis: Vec<&[u64]> = labels.iter().map(|l| by_label[l].coords()).collect();
        let coeffs =
            expand_in_basis(&basis, state.coords(), p).expect("tests are bases by construction");
        rows.push(PossibilityRow {
            verdicts: labels
                .iter()
                .zip(&coeffs)
                .map(|(l, &c)| (l.clone(), c != 0))
                .collect(),
            test: labels,
        });
    }
    Ok(PossibilityTable { rows })
}

/// An outcome whose verdict depends on the test it is measured in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextualConflict {
    pub outcome: String,
    pub possible_in: Vec<Vec<String>>,
    pub impossible_in: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoncontextualCheck {
    Noncontextual(BTreeMap<String, bool>),
    Contextual(Vec<ContextualConflict>),
}

impl NoncontextualCheck {
    pub fn is_contextual(&self) -> bool {
        matches!(self, NoncontextualCheck::Contextual(_))
    }
}

/// Contexts in which an outcome was seen possible, and impossible.
type Sightings = (Vec<Vec<String>>, Vec<Vec<String>>);

pub fn noncontextual_possibility(table: &PossibilityTable) -> NoncontextualCheck {
    let mut seen: BTreeMap<&str, Sightings> = BTreeMap::new();
    for row in &table.rows {
        for (outcome, possible) in &row.verdicts {
            let entry = seen.entry(outcome.as_str()).or_default();
            if *possible {
                entry.0.push(row.test.clone());
            } else {
                entry.1.push(row.test.clone());
            }
        }
    }
    let conflicts: Vec<ContextualConflict> = seen
        .iter()
        .filter(|(_, (yes, no))| !yes.is_empty() && !no.is_empty())
        .map(|(outcome, (yes, no))| ContextualConflict {
            outcome: outcome.to_string(),
            possible_in: yes.clone(),
            impossible_in: no.clone(),
        })
        .collect();
    if conflicts.is_empty() {
        NoncontextualCheck::Noncontextual(
            seen.into_iter()
                .map(|(o, (yes, _))| (o.to_string(), !yes.is_empty()))
                .collect(),
        )
    } else {
        NoncontextualCheck::Contextual(conflicts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_tests(
        space: &TestSpace,
        relabel: impl Fn(&str) -> &'static str,
    ) -> Vec<Vec<&'static str>> {
        let mut tests: Vec<Vec<&'static str>> = space
            .tests()
            .iter()
            .map(|t| {
                let mut v: Vec<_> = space.labels_of(t).into_iter().map(&relabel).collect();
                v.sort();
                v
            })
            .collect();
        tests.sort();
        tests
    }

    #[test]
    fn modal_qubit_is_the_triangle() {
        let modal = modal_test_space(2, 2).unwrap();
        assert_eq!(
            modal
                .outcomes()
                .iter()
                .map(|o| o.as_str())
                .collect::<Vec<_>>(),
            ["01", "10", "11"]
        );
        let relabel = |l: &str| match l {
            "01" => "x",
            "10" => "y",
            "11" => "z",
            _ => unreachable!(),
        };
        let triangle = TestSpace::triangle();
        assert_eq!(
            sorted_tests(&modal, relabel),
            sorted_tests(&triangle, |l| match l {
                "x" => "x",
                "y" => "y",
                _ => "z",
            })
        );
    }

    /// Independent count: unordered pairs of distinct projective points over
    /// GF(3) in dimension 2 are always independent, so C(4,2).
    #[test]
    fn gf3_line_counts() {
        let s = modal_test_space(3, 2).unwrap();
        assert_eq!(s.outcome_count(), 4);
        let mut brute = 0;
        let pts = projective_points(3, 2).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let (a, b) = (pts[i].coords(), pts[j].coords());
                let det = (a[0] * b[1] % 3 + 3 - a[1] * b[0] % 3) % 3;
                if det != 0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(s.tests().len(), brute);
        assert_eq!(brute, 6);
        for x in 0..s.outcome_count() {
            assert!(s.tests().iter().any(|t| t.contains(x)));
        }
    }

    #[test]
    fn basis_counts_in_dimension_three() {
        // ordered bases / (d! (p-1)^d): GF(2)^3 has 7*6*4/6 = 28 unordered bases
        assert_eq!(modal_test_space(2, 3).unwrap().tests().len(), 28);
        // GF(3)^3: 26*24*18 / (6*8) = 234
        assert_eq!(modal_test_space(3, 3).unwrap().tests().len(), 234);
    }

    #[test]
    fn field_errors() {
        assert_eq!(modal_test_space(4, 2), Err(TestSpaceError::NotPrime(4)));
        assert_eq!(
            modal_test_space(2, 1),
            Err(TestSpaceError::DimensionTooSmall(1))
        );
        assert!(matches!(
            modal_test_space(101, 4),
            Err(TestSpaceError::SpaceTooLarge { .. })
        ));
        assert!(ModalState::new(3, &[0, 0]).is_err());
    }

    #[test]
    fn state_normalization() {
        let s = ModalState::new(3, &[0, 2]).unwrap();
        assert_eq!(s.coords(), [0, 1]);
        assert_eq!(ModalState::new(5, &[3, 1]).unwrap().coords(), [1, 2]);
    }

    #[test]
    fn qubit_state_01_is_contextual() {
        let state = ModalState::new(2, &[0, 1]).unwrap();
        let table = modal_possibility_table(2, 2, &state).unwrap();
        let row = |a: &str, b: &str| {
            table
                .rows
                .iter()
                .find(|r| r.test == [a, b])
                .unwrap()
                .verdicts
                .clone()
        };
        assert_eq!(row("01", "10"), [("01".into(), true), ("10".into(), false)]);
        assert_eq!(row("10", "11"), [("10".into(), true), ("11".into(), true)]);

        match noncontextual_possibility(&table) {
            NoncontextualCheck::Contextual(conflicts) => {
                let c = conflicts.iter().find(|c| c.outcome == "10").unwrap();
                assert_eq!(c.impossible_in, [vec!["01".to_string(), "10".into()]]);
                assert_eq!(c.possible_in, [vec!["10".to_string(), "11".into()]]);
            }
            other => panic!("expected contextual, got {other:?}"),
        }
    }

    #[test]
    fn state_mismatch() {
        let state = ModalState::new(3, &[0, 1]).unwrap();
        assert!(matches!(
            modal_possibility_table(2, 2, &state),
            Err(TestSpaceError::StateNotInSpace { .. })
        ));
    }

    #[test]
    fn uniform_table_is_noncontextual() {
        let table = PossibilityTable {
            rows: vec![PossibilityRow {
                test: vec!["a".into(), "b".into()],
                verdicts: vec![("a".into(), true), ("b".into(), false)],
            }],
        };
        let expected: BTreeMap<String, bool> =
            [("a".to_string(), true), ("b".to_string(), false)].into();
        assert_eq!(
            noncontextual_possibility(&table),
            NoncontextualCheck::Noncontextual(expected)
        );
    }

    #[test]
    fn state_is_possible_in_its_own_bases_and_rows_never_all_impossible() {
        for (p, d) in [(2, 2), (3, 2), (2, 3), (5, 2)] {
            let space = modal_test_space(p, d).unwrap();
            for point in projective_points(p, d).unwrap() {
                let table = modal_possibility_table(p, d, &point).unwrap();
                assert_eq!(table.rows.len(), space.tests().len());
                for row in &table.rows {
                    assert!(row.verdicts.iter().any(|(_, v)| *v));
                    if let Some((_, v)) = row.verdicts.iter().find(|(o, _)| *o == point.label()) {
                        assert!(v);
                    }
                }
            }
        }
    }
}
