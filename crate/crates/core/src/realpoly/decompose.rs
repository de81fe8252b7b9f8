use num_traits::{One, Zero};
use serde::Serialize;

use super::poly::{rat, Poly};
use super::{PolyError, RealPoly};
use crate::exactlin::Rat;

/// `original = outer ∘ inner`, with `inner` monic and without constant term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub inner: RealPoly,
    pub outer: RealPoly,
}

/// Coefficients `b_k` with `p = Σ b_k · base^k`, if all of them are constant.
fn constant_base_expansion(p: &Poly, base: &Poly) -> Option<Vec<Rat>> {
    let mut digits = Vec::new();
    let mut rest = p.clone();
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(base);
        if !r.is_constant() {
            return None;
        }
        digits.push(r.coeff(0));
        rest = q;
    }
    Some(digits)
}

/// The unique monic `g1` of degree `a` with zero constant term whose `b`-th
/// power agrees with monic `q` in the top `a` coefficients below the lead.
fn candidate_inner(q: &Poly, a: usize, b: usize) -> Poly {
    let n = a * b;
    let mut g1 = Poly::monomial(Rat::one(), a);
    let b_inv = Rat::one() / rat(b as i64);
    for k in 1..a {
        let current = g1.pow(b as u32).coeff(n - k);
        let c = (q.coeff(n - k) - current) * &b_inv;
        g1 = &g1 + &Poly::monomial(c, a - k);
    }
    g1
}

/// The `g2` with `p = g2 ∘ inner`, if one exists.
pub fn outer_for_inner(p: &RealPoly, inner: &RealPoly) -> Option<RealPoly> {
    if inner.degree() < 2 || p.degree() % inner.degree() != 0 {
        return None;
    }
    let digits = constant_base_expansion(p, inner)?;
    RealPoly::new(Poly::from_coeffs(digits)).ok()
}

/// Looks for `p = g2 ∘ g1` with `deg g1 = inner_degree`.
///
/// Returns `Ok(None)` when no such decomposition exists; the degree must
/// divide `deg p` and lie in `2..=deg p / 2`.
pub fn decompose(p: &RealPoly, inner_degree: usize) -> Result<Option<Decomposition>, PolyError> {
    let n = p.degree();
    let a = inner_degree;
    if a < 2 || n % a != 0 || a > n / 2 {
        return Err(PolyError::InvalidInnerDegree { degree: n, inner: a });
    }
    let g1 = candidate_inner(&p.monic(), a, n / a);
    let Some(digits) = constant_base_expansion(p, &g1) else {
        return Ok(None);
    };
    let outer = Poly::from_coeffs(digits);
    debug_assert!(!outer.coeffs().iter().all(Zero::is_zero));
    Ok(Some(Decomposition {
        inner: RealPoly::new(g1)?,
        outer: RealPoly::new(outer)?,
    }))
}
