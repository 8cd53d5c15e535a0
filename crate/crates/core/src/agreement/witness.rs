use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::{AgreementError, ConeSystem};
use crate::exactlp::verify::verify_coefficients;
use crate::exactlp::{OutcomeVector, Rational};
use crate::testspace::Event;

/// Families longer than this are only reported through their multiplicities.
pub const MATERIALIZE_LIMIT: usize = 4096;

/// `copies` repetitions of the premise `low ⪯ high`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PremiseBlock {
    pub generator: usize,
    pub low: Event,
    pub high: Event,
    pub copies: BigInt,
}

/// Two event families with equal outcome multiplicities.
///
/// The left family lists every premise's lower event followed by `N` copies
/// of `A`; the right family lists the matching upper events followed by `N`
/// copies of `B`. Every premise holds weakly in the order while `A ⪰ B` does
/// not, so the families break the Archimedean condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub premises: Vec<PremiseBlock>,
    pub conclusion: (Event, Event),
    /// The common denominator `N`, also the number of conclusion copies.
    pub n: BigInt,
}

impl Witness {
    pub fn family_length(&self) -> BigInt {
        self.premises
            .iter()
            .fold(self.n.clone(), |acc, p| acc + &p.copies)
    }

    fn materialize(
        &self,
        side: impl Fn(&PremiseBlock) -> &Event,
        last: &Event,
    ) -> Option<Vec<Event>> {
        let len = self.family_length().to_usize()?;
        if len > MATERIALIZE_LIMIT {
            return None;
        }
        let mut out = Vec::with_capacity(len);
        for p in &self.premises {
            let k = p.copies.to_usize()?;
            out.extend(std::iter::repeat_n(side(p).clone(), k));
        }
        out.extend(std::iter::repeat_n(last.clone(), self.n.to_usize()?));
        Some(out)
    }

    /// `(A_1, …, A_n)`, when short enough to list.
    pub fn lhs(&self) -> Option<Vec<Event>> {
        self.materialize(|p| &p.low, &self.conclusion.0)
    }

    /// `(B_1, …, B_n)`, when short enough to list.
    pub fn rhs(&self) -> Option<Vec<Event>> {
        self.materialize(|p| &p.high, &self.conclusion.1)
    }

    /// Per-outcome occurrence counts of the left and right families.
    pub fn occurrence_counts(&self, dim: usize) -> (Vec<BigInt>, Vec<BigInt>) {
        let mut left = vec![BigInt::zero(); dim];
        let mut right = vec![BigInt::zero(); dim];
        let add = |counts: &mut Vec<BigInt>, e: &Event, k: &BigInt| {
            for &x in e.members() {
                counts[x] += k;
            }
        };
        for p in &self.premises {
            add(&mut left, &p.low, &p.copies);
            add(&mut right, &p.high, &p.copies);
        }
        add(&mut left, &self.conclusion.0, &self.n);
        add(&mut right, &self.conclusion.1, &self.n);
        (left, right)
    }
}

/// Clears denominators in `λ` and expands it into event families.
///
/// `coefficients` are indexed by the cone's full generator list and must
/// certify `e_A − e_B ∈ C` exactly.
pub fn witness_families(
    cone: &ConeSystem,
    coefficients: &[Rational],
    pair: (&Event, &Event),
) -> Result<Witness, AgreementError> {
    let (a, b) = pair;
    let target = OutcomeVector::difference(cone.dim(), a, b);
    verify_coefficients(cone.generators(), &target, coefficients)
        .map_err(AgreementError::NotACertificate)?;

    let n = coefficients
        .iter()
        .filter(|l| !l.is_zero())
        .fold(BigInt::one(), |acc, l| acc.lcm(l.denom()));
    let premises = coefficients
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_positive())
        .map(|(k, l)| {
            let copies = (l * Rational::from_integer(n.clone())).to_integer();
            let (low, high) = cone.provenance(k);
            PremiseBlock {
                generator: k,
                low: low.clone(),
                high: high.clone(),
                copies,
            }
        })
        .collect();
    Ok(Witness {
        premises,
        conclusion: (a.clone(), b.clone()),
        n,
    })
}
