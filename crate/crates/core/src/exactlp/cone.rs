use num::Zero;

use super::{
    lp_solve, ConstraintKind, LpCertificate, LpError, LpProblem, OutcomeVector, Rational, Sense,
};

/// Outcome of a cone membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeResult {
    /// One non-negative coefficient per generator; the combination equals the target.
    Coeffs(Vec<Rational>),
    /// A functional non-negative on every generator and negative on the target.
    Separator(OutcomeVector),
}

impl ConeResult {
    pub fn is_member(&self) -> bool {
        matches!(self, ConeResult::Coeffs(_))
    }
}

/// Decides whether `v` is a non-negative combination of `generators`.
///
/// Among all decompositions the one with least total weight is returned, which
/// keeps certificates canonical for a fixed generator order.
pub fn cone_membership(
    generators: &[OutcomeVector],
    v: &OutcomeVector,
) -> Result<ConeResult, LpError> {
    let dim = v.dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
        return Err(LpError::IndexMismatch {
            expected: dim,
            found: g.dim(),
        });
    }
    if v.is_zero() {
        return Ok(ConeResult::Coeffs(vec![Rational::zero(); generators.len()]));
    }

    let one = Rational::from_integer(1.into());
    let mut problem = LpProblem::new(Sense::Minimize, vec![one; generators.len()]);
    for x in 0..dim {
        let row = generators.iter().map(|g| g.get(x)).collect();
        problem.constrain(row, ConstraintKind::Equal, v.get(x));
    }
    let solved = lp_solve(&problem)?;
    Ok(match solved.certificate {
        LpCertificate::Dual(_) => ConeResult::Coeffs(solved.x.expect("optimal point")),
        // Gᵀy ≤ 0 and vᵀy > 0, so ρ = −y separates.
        LpCertificate::Farkas(y) => ConeResult::Separator(-&OutcomeVector::from_dense(&y)),
        LpCertificate::Ray(_) => unreachable!("total weight is bounded below by zero"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::verify::verify_cone_result;
    use crate::exactlp::{int, rat};
    use crate::testspace::Event;
    use proptest::prelude::*;

    fn ev(xs: &[usize]) -> Event {
        Event::from_indices(xs.iter().copied())
    }

    #[test]
    fn zero_target_is_trivially_inside() {
        let gens = vec![OutcomeVector::basis(2, 0)];
        let r = cone_membership(&gens, &OutcomeVector::zeros(2)).unwrap();
        assert_eq!(r, ConeResult::Coeffs(vec![int(0)]));
    }

    #[test]
    fn independent_direction_is_separated() {
        let gens = vec![OutcomeVector::basis(2, 0)];
        let v = OutcomeVector::from_dense(&[int(1), int(1)]);
        let r = cone_membership(&gens, &v).unwrap();
        let ConeResult::Separator(rho) = &r else {
            panic!("expected a separator");
        };
        assert!(rho.get(1) < int(0));
        verify_cone_result(&gens, &v, &r).unwrap();
    }

    #[test]
    fn kps_sum_of_three() {
        // Outcomes 1..5 as indices 0..4.
        let gens = vec![
            OutcomeVector::difference(5, &ev(&[3]), &ev(&[0, 2])),
            OutcomeVector::difference(5, &ev(&[1, 2]), &ev(&[0, 3])),
            OutcomeVector::difference(5, &ev(&[0, 4]), &ev(&[2, 3])),
        ];
        let v = OutcomeVector::difference(5, &ev(&[1, 4]), &ev(&[0, 2, 3]));
        let r = cone_membership(&gens, &v).unwrap();
        assert_eq!(r, ConeResult::Coeffs(vec![int(1), int(1), int(1)]));
        verify_cone_result(&gens, &v, &r).unwrap();
    }

    #[test]
    fn fractional_coefficients() {
        let gens = vec![
            OutcomeVector::from_dense(&[int(2), int(0)]),
            OutcomeVector::from_dense(&[int(0), int(3)]),
        ];
        let v = OutcomeVector::from_dense(&[int(1), int(1)]);
        let r = cone_membership(&gens, &v).unwrap();
        assert_eq!(r, ConeResult::Coeffs(vec![rat(1, 2), rat(1, 3)]));
    }

    #[test]
    fn dimension_mismatch() {
        let gens = vec![OutcomeVector::basis(3, 0)];
        let err = cone_membership(&gens, &OutcomeVector::basis(2, 0)).unwrap_err();
        assert_eq!(
            err,
            LpError::IndexMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    fn small_vector(dim: usize) -> impl Strategy<Value = OutcomeVector> {
        proptest::collection::vec(-3i64..=3, dim)
            .prop_map(|xs| OutcomeVector::from_dense(&xs.into_iter().map(int).collect::<Vec<_>>()))
    }

    fn instance() -> impl Strategy<Value = (Vec<OutcomeVector>, OutcomeVector)> {
        (1usize..=4).prop_flat_map(|dim| {
            (
                proptest::collection::vec(small_vector(dim), 0..=6),
                small_vector(dim),
            )
        })
    }

    proptest! {
        #[test]
        fn certificates_always_verify((gens, v) in instance()) {
            let r = cone_membership(&gens, &v).unwrap();
            prop_assert!(verify_cone_result(&gens, &v, &r).is_ok());
        }

        #[test]
        fn positive_scaling_keeps_the_branch((gens, v) in instance(), num in 1i64..20, den in 1i64..20) {
            let scaled = v.scale(&rat(num, den));
            let a = cone_membership(&gens, &v).unwrap();
            let b = cone_membership(&gens, &scaled).unwrap();
            prop_assert_eq!(a.is_member(), b.is_member());
        }
    }
}
