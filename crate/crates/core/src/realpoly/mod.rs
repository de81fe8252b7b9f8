//! Univariate polynomials over `Q` with real critical data.

mod charpoly;
mod critical;
mod decompose;
mod parse;
mod poly;
mod roots;

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use critical::{critical_data, CriticalData, Role};
pub use decompose::{decompose, outer_for_inner, Decomposition};
pub use parse::parse_any;
pub use poly::Poly;
pub use roots::{RealAlgebraic, RealRoot, RootIsolation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial")]
    ConstantPolynomial,
    #[error("only {real} of {expected} critical points are real")]
    NonRealCriticalPoint { real: usize, expected: usize },
    #[error("derivative has a multiple root")]
    DegenerateCriticalPoint,
    #[error("inner degree {inner} is not a proper divisor of {degree}")]
    InvalidInnerDegree { degree: usize, inner: usize },
    #[error("interval refinement limit reached")]
    RefinementLimit,
    #[error("critical value multiplicities disagree with the resultant")]
    CoincidenceCertificate,
}

/// A polynomial of degree at least one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealPoly(Poly);

impl RealPoly {
    pub fn new(p: Poly) -> Result<Self, PolyError> {
        if p.is_zero() {
            Err(PolyError::ZeroPolynomial)
        } else if p.is_constant() {
            Err(PolyError::ConstantPolynomial)
        } else {
            Ok(RealPoly(p))
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<Self, PolyError> {
        Self::new(Poly::from_ints(coeffs))
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }
}

impl Deref for RealPoly {
    type Target = Poly;
    fn deref(&self) -> &Poly {
        &self.0
    }
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for RealPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_coeff_list())
    }
}

impl<'de> Deserialize<'de> for RealPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_poly(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses an expression such as `(x+1)^2 - 3x` or a list `coeffs: 1,0,-2`.
pub fn parse_poly(text: &str) -> Result<RealPoly, PolyError> {
    RealPoly::new(parse_any(text)?.0)
}

/// Real roots with multiplicities and the number of non-real roots.
pub fn real_roots(p: &RealPoly) -> RootIsolation {
    roots::isolate(p)
}

pub fn compose(outer: &RealPoly, inner: &RealPoly) -> RealPoly {
    RealPoly(outer.compose(inner))
}

/// Rank of the fiber homology of `g(x) + h(y)` with `deg g = d`, `deg h = e`.
pub fn milnor_number(d: usize, e: usize) -> usize {
    d.saturating_sub(1) * e.saturating_sub(1)
}
