//! Archimedean checks and agreeing measures.
//!
//! A plausibility order spans a convex cone `C` in the rational vector space
//! with basis the outcomes: one generator `e_B − e_A` for every weak pair
//! `A ⪯ B`. A functional that is non-negative on `C` and positive on `e_T` is
//! exactly a probability measure that almost agrees with the order, and a
//! pair `(A, B)` with `B ⋠ A` breaks the Archimedean condition precisely when
//! `e_A − e_B` already lies in `C`. Everything below is phrased as cone
//! membership questions answered with exact certificates.

mod check;
mod cone;
mod construct;
mod verify;
mod witness;

use thiserror::Error;

use crate::exactlp::{LpError, Rational};
use crate::order::MeasureError;
use crate::testspace::Event;

pub use check::{
    check_archimedean, violation_at, ArchimedeanReport, ArchimedeanStatus, CheckOptions, Violation,
};
pub use cone::{build_cone, verify_order_unit, ConeSystem, OrderUnitCheck};
pub use construct::{find_agreeing, find_agreeing_averaged, find_almost_agreeing};
pub use verify::{
    certify_archimedean, certify_violation, verify_agreement, AgreementMode, AgreementReport,
    AgreementVerdict, PairFailure, ViolatedPair,
};
pub use witness::{witness_families, PremiseBlock, Witness, MATERIALIZE_LIMIT};

pub const DEFAULT_PAIR_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgreementError {
    #[error("{pairs} pairs to scan exceed the cap of {cap}")]
    ScopeTooLarge { pairs: usize, cap: usize },
    #[error("coefficients do not certify the pair: {0}")]
    NotACertificate(String),
    #[error("no measure almost agrees with the order")]
    Infeasible {
        /// Non-negative weights on the cone generators summing to `−e_T`.
        coefficients: Vec<(usize, Rational)>,
    },
    #[error("the order is not total: {lhs} and {rhs} are incomparable")]
    NotTotal { lhs: String, rhs: String },
    #[error("the order is not Archimedean")]
    NotArchimedean(Box<Violation>),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub(crate) fn sparse(dense: &[Rational]) -> Vec<(usize, Rational)> {
    use num::Zero;
    dense
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

/// A pair of scope events `(A, B)`.
pub type EventPair = (Event, Event);
