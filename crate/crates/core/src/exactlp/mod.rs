//! Exact rational linear programming.
//!
//! Everything here runs over arbitrary-precision rationals; there is no
//! floating-point path. [`lp_solve`] is a two-phase dense-tableau simplex with
//! Bland's rule and returns a certificate with every status, and
//! [`cone_membership`] decides membership in a finitely generated cone,
//! answering with either non-negative coefficients or a separating
//! functional. The [`verify`] module re-checks those certificates using only
//! rational addition, multiplication and comparison.

mod cone;
mod problem;
mod simplex;
mod vector;
pub mod verify;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

pub use cone::{cone_membership, ConeResult};
pub use problem::{
    lp_solve, lp_solve_via_dual, ConstraintKind, LinearConstraint, LpCertificate, LpProblem,
    LpResult, LpStatus, Sense, VarSign,
};
pub use vector::OutcomeVector;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    MalformedProblem(String),
    #[error("vector dimensions disagree: expected {expected}, found {found}")]
    IndexMismatch { expected: usize, found: usize },
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `p/q`, or `p` when `q` is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `0.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = match whole {
            "" | "-" | "+" => BigInt::zero(),
            w => w.parse().ok()?,
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().ok()?;
        let magnitude = Rational::new(frac, scale);
        let whole = Rational::from_integer(whole);
        return Some(if negative {
            whole - magnitude
        } else {
            whole + magnitude
        });
    }
    text.parse::<BigInt>().ok().map(Rational::from_integer)
}
