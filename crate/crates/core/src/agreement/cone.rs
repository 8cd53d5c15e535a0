use std::collections::HashMap;

use num::Zero;

use super::{sparse, AgreementError};
use crate::exactlp::{cone_membership, ConeResult, OutcomeVector, Rational};
use crate::order::PlausibilityOrder;
use crate::testspace::{Event, TestSpace};

/// The cone spanned by a plausibility order.
///
/// `generators[k] = e_high − e_low` for the weak pair `provenance[k] = (low, high)`
/// (indices into `scope`). LPs run on the smaller `spanning` subset, which
/// generates the same cone: each event tied to its class representative in
/// both directions, plus the covering pairs between representatives.
#[derive(Debug, Clone)]
pub struct ConeSystem {
    space: TestSpace,
    scope: Vec<Event>,
    generators: Vec<OutcomeVector>,
    provenance: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
    spanning: Vec<usize>,
    spanning_vectors: Vec<OutcomeVector>,
    unit: OutcomeVector,
}

impl ConeSystem {
    fn assemble(
        space: &TestSpace,
        scope: Vec<Event>,
        provenance: Vec<(usize, usize)>,
        spanning: Vec<usize>,
    ) -> Self {
        let dim = space.outcome_count();
        let generators: Vec<OutcomeVector> = provenance
            .iter()
            .map(|&(low, high)| OutcomeVector::difference(dim, &scope[high], &scope[low]))
            .collect();
        let lookup = provenance
            .iter()
            .enumerate()
            .map(|(k, &pair)| (pair, k))
            .collect();
        let spanning_vectors = spanning.iter().map(|&k| generators[k].clone()).collect();
        ConeSystem {
            unit: OutcomeVector::indicator(dim, space.designated_test()),
            space: space.clone(),
            scope,
            generators,
            provenance,
            lookup,
            spanning,
            spanning_vectors,
        }
    }

    /// A cone from explicit `(low, high)` event pairs, all of which span.
    pub fn from_pairs(space: &TestSpace, pairs: &[(Event, Event)]) -> Self {
        let mut scope: Vec<Event> = pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        scope.sort();
        scope.dedup();
        let at = |e: &Event| scope.binary_search(e).expect("collected above");
        let provenance: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (at(a), at(b))).collect();
        let spanning = (0..provenance.len()).collect();
        ConeSystem::assemble(space, scope, provenance, spanning)
    }

    pub fn space(&self) -> &TestSpace {
        &self.space
    }

    pub fn scope(&self) -> &[Event] {
        &self.scope
    }

    pub fn generators(&self) -> &[OutcomeVector] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `(low, high)` events of generator `k`.
    pub fn provenance(&self, k: usize) -> (&Event, &Event) {
        let (low, high) = self.provenance[k];
        (&self.scope[low], &self.scope[high])
    }

    pub fn generator_for(&self, low: usize, high: usize) -> Option<usize> {
        self.lookup.get(&(low, high)).copied()
    }

    pub fn spanning(&self) -> &[usize] {
        &self.spanning
    }

    pub fn spanning_vectors(&self) -> &[OutcomeVector] {
        &self.spanning_vectors
    }

    /// `e_T` for the designated test.
    pub fn unit(&self) -> &OutcomeVector {
        &self.unit
    }

    pub fn dim(&self) -> usize {
        self.space.outcome_count()
    }

    /// Membership of `v`, with coefficients reported over all generators.
    pub fn membership(&self, v: &OutcomeVector) -> Result<ConeResult, AgreementError> {
        Ok(match cone_membership(&self.spanning_vectors, v)? {
            ConeResult::Coeffs(lambda) => ConeResult::Coeffs(self.expand(&lambda)),
            separator => separator,
        })
    }

    /// Spreads coefficients over the spanning subset onto the full generator list.
    pub fn expand(&self, spanning_coefficients: &[Rational]) -> Vec<Rational> {
        let mut full = vec![Rational::zero(); self.generators.len()];
        for (&k, l) in self.spanning.iter().zip(spanning_coefficients) {
            full[k] += l;
        }
        full
    }
}

/// One generator per non-reflexive weak pair of the order.
pub fn build_cone(order: &PlausibilityOrder) -> ConeSystem {
    let n = order.len();
    let provenance: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && order.weak(i, j))
        .collect();
    let at: HashMap<(usize, usize), usize> = provenance
        .iter()
        .enumerate()
        .map(|(k, &p)| (p, k))
        .collect();

    let reps = order.class_representatives();
    let mut spanning = Vec::new();
    for (i, &r) in reps.iter().enumerate() {
        if r != i {
            spanning.push(at[&(r, i)]);
            spanning.push(at[&(i, r)]);
        }
    }
    spanning.extend(order.cover_pairs().iter().map(|p| at[p]));
    spanning.sort_unstable();

    ConeSystem::assemble(order.space(), order.scope().to_vec(), provenance, spanning)
}

/// Whether `−e_T` stays outside the cone, i.e. whether `e_T` can serve as an
/// order unit. The order unit's lower bound holds by construction: every
/// `−e_x` is dominated through `e_S − e_x ≥ 0` and `e_T − e_S ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderUnitCheck {
    /// A functional non-negative on the cone with `ρ(e_T) = 1`.
    Holds(OutcomeVector),
    /// Non-negative generator weights summing to `−e_T`.
    Fails(Vec<(usize, Rational)>),
}

impl OrderUnitCheck {
    pub fn holds(&self) -> bool {
        matches!(self, OrderUnitCheck::Holds(_))
    }
}

pub fn verify_order_unit(cone: &ConeSystem) -> Result<OrderUnitCheck, AgreementError> {
    Ok(match cone.membership(&-cone.unit())? {
        ConeResult::Separator(rho) => {
            let scale = rho.dot(cone.unit()).recip();
            OrderUnitCheck::Holds(rho.scale(&scale))
        }
        ConeResult::Coeffs(lambda) => OrderUnitCheck::Fails(sparse(&lambda)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::verify::{verify_coefficients, verify_separator};
    use crate::fixtures;

    #[test]
    fn classical_pair_generators() {
        let order = fixtures::axioms_only(&fixtures::classical(2));
        let cone = build_cone(&order);
        let shown: Vec<String> = (0..cone.len())
            .map(|k| {
                let (lo, hi) = cone.provenance(k);
                format!("{}<{}", cone.space().show(lo), cone.space().show(hi))
            })
            .collect();
        assert_eq!(
            shown,
            ["{}<{1}", "{}<{2}", "{}<{1,2}", "{1}<{1,2}", "{2}<{1,2}"]
        );
        assert!(cone
            .membership(&OutcomeVector::zeros(2))
            .unwrap()
            .is_member());
    }

    #[test]
    fn triangle_generators_include_test_swaps() {
        let order = fixtures::triangle_possibility();
        let cone = build_cone(&order);
        let t = cone.space().clone();
        let xy = order.index_of(&t.event(&["x", "y"]).unwrap()).unwrap();
        let yz = order.index_of(&t.event(&["y", "z"]).unwrap()).unwrap();
        assert!(cone.generator_for(xy, yz).is_some());
        assert!(cone.generator_for(yz, xy).is_some());
        for x in 0..3 {
            let k = cone.generator_for(order.empty_index(), x + 1).unwrap();
            assert_eq!(cone.generators()[k], OutcomeVector::basis(3, x));
        }
    }

    #[test]
    fn order_unit_checks() {
        let kps = build_cone(&fixtures::kps());
        let OrderUnitCheck::Holds(rho) = verify_order_unit(&kps).unwrap() else {
            panic!("a measure exists on the classical space");
        };
        verify_separator(kps.generators(), &-kps.unit(), &rho).unwrap();

        // The triangle order forces μ(x) = 0 and μ(y) = μ(z) = 1 at once.
        let possibility = build_cone(&fixtures::triangle_possibility());
        let OrderUnitCheck::Fails(lambda) = verify_order_unit(&possibility).unwrap() else {
            panic!("no measure satisfies the triangle order");
        };
        let mut dense = vec![Rational::zero(); possibility.len()];
        for (k, l) in lambda {
            dense[k] = l;
        }
        verify_coefficients(possibility.generators(), &-possibility.unit(), &dense).unwrap();
    }

    #[test]
    fn contradictory_raw_cone() {
        let t = TestSpace::triangle();
        let top = t.designated_test().clone();
        let mut pairs = vec![(Event::empty(), top.clone()), (top, Event::empty())];
        for x in 0..3 {
            pairs.push((Event::empty(), t.singleton(x)));
            pairs.push((t.singleton(x), Event::empty()));
        }
        let cone = ConeSystem::from_pairs(&t, &pairs);
        assert!(!verify_order_unit(&cone).unwrap().holds());
    }
}
