//! Real root isolation with Sturm sequences, and real algebraic numbers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::charpoly::sum_poly;
use super::poly::{rat, sign_of_ints, Poly};
use super::PolyError;
use crate::exactlin::Rat;

/// Halvings allowed before an equality question is reported as undecided.
pub(crate) const MAX_REFINEMENT: usize = 4000;
/// Isolating intervals are refined to this many bits below the root bound.
pub(crate) const TARGET_BITS: usize = 32;

#[derive(Clone, Debug)]
pub(crate) struct SturmSequence {
    seq: Vec<Vec<BigInt>>,
}

impl SturmSequence {
    pub(crate) fn new(p: &Poly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq[seq.len() - 1].is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            // Any positive rescaling keeps the sign pattern.
            let c = r.leading_coeff().abs();
            seq.push(if c.is_zero() { r } else { (-&r).scale(&(Rat::one() / c)) });
        }
        seq.pop();
        SturmSequence {
            seq: seq.iter().map(Poly::primitive_ints).collect(),
        }
    }

    fn variations(&self, x: &Rat) -> usize {
        count_changes(self.seq.iter().map(|q| sign_of_ints(q, x)))
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    pub(crate) fn count(&self, a: &Rat, b: &Rat) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    /// Number of distinct roots in the closed interval `[a, b]`.
    pub(crate) fn count_closed(&self, a: &Rat, b: &Rat) -> usize {
        let at_a = usize::from(sign_of_ints(&self.seq[0], a) == 0);
        if a == b {
            return at_a;
        }
        self.count(a, b) + at_a
    }
}

fn count_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut changes = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// A power of two strictly above the modulus of every complex root, from
/// Fujiwara's bound `2 · max |a_{n-k} / a_n|^{1/k}`.
pub(crate) fn root_bound(p: &Poly) -> Rat {
    let n = p.degree();
    let lc = p.leading_coeff().abs();
    let ratios: Vec<Rat> = (1..=n).map(|k| p.coeff(n - k).abs() / &lc).collect();
    // Smallest power of two b with (b/2)^k > ratio_k for every k.
    let mut half_b = Rat::one();
    loop {
        let mut pow = Rat::one();
        let mut ok = true;
        for r in &ratios {
            pow *= &half_b;
            if pow <= *r {
                ok = false;
                break;
            }
        }
        if ok {
            return half_b * rat(2);
        }
        half_b *= rat(2);
    }
}

fn half(a: &Rat, b: &Rat) -> Rat {
    (a + b) / rat(2)
}

/// The rational with the smallest denominator in `[lo, hi]`.
pub(crate) fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let up = &fl + Rat::one();
    if up <= *hi {
        return up;
    }
    // Both ends lie in (fl, fl + 1): recurse on the reciprocals.
    let inner = simplest_between(&(Rat::one() / (hi - &fl)), &(Rat::one() / (lo - &fl)));
    fl + Rat::one() / inner
}

/// A point strictly inside `(lo, hi)` that is not a root of `p`.
fn split_point(p: &Poly, lo: &Rat, hi: &Rat) -> Rat {
    let width = hi - lo;
    let mut den = 2i64;
    loop {
        for num in 1..den {
            let t = lo + &width * Rat::new(num.into(), den.into());
            if p.sign_at(&t) != 0 {
                return t;
            }
        }
        den += 1;
    }
}

/// A real root of a squarefree rational polynomial, given by an isolating
/// interval `[lo, hi]` holding exactly that root of `poly`. Either
/// `lo == hi` (an exact rational root) or `poly` has opposite nonzero signs
/// at the endpoints.
#[derive(Clone, Debug)]
pub struct RealAlgebraic {
    poly: Poly,
    ints: Vec<BigInt>,
    lo: Rat,
    hi: Rat,
}

impl RealAlgebraic {
    pub fn from_rational(x: Rat) -> Self {
        let poly = Poly::from_coeffs(vec![-x.clone(), Rat::one()]);
        RealAlgebraic {
            ints: poly.primitive_ints(),
            poly,
            lo: x.clone(),
            hi: x,
        }
    }

    pub(crate) fn new_unchecked(poly: Poly, lo: Rat, hi: Rat) -> Self {
        let mut a = RealAlgebraic {
            ints: poly.primitive_ints(),
            poly,
            lo,
            hi,
        };
        a.normalize();
        a
    }

    /// Defining squarefree polynomial (monic).
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn to_f64(&self) -> f64 {
        half(&self.lo, &self.hi).to_f64().unwrap_or(f64::NAN)
    }

    fn normalize(&mut self) {
        if !self.is_exact() {
            for end in [self.lo.clone(), self.hi.clone()] {
                if sign_of_ints(&self.ints, &end) == 0 {
                    self.lo = end.clone();
                    self.hi = end;
                    return;
                }
            }
        }
    }

    /// Halves the isolating interval.
    pub fn refine(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = half(&self.lo, &self.hi);
        let s_mid = sign_of_ints(&self.ints, &mid);
        if s_mid == 0 {
            self.lo = mid.clone();
            self.hi = mid;
        } else if s_mid == sign_of_ints(&self.ints, &self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Snaps to the simplest rational in the interval if it is the root.
    pub(crate) fn try_rational(&mut self) -> bool {
        if !self.is_exact() {
            let q = simplest_between(&self.lo, &self.hi);
            if sign_of_ints(&self.ints, &q) == 0 {
                self.lo = q.clone();
                self.hi = q;
            }
        }
        self.is_exact()
    }

    pub fn refine_to(&mut self, width: &Rat) {
        while !self.is_exact() && self.width() > *width {
            self.refine();
        }
    }

    fn disjoint_from(&self, other: &RealAlgebraic) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if other.hi < self.lo {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Exact equality: a common factor of the defining polynomials must
    /// vanish inside the intersection of the two intervals.
    pub fn equals(&self, other: &RealAlgebraic) -> bool {
        if self.disjoint_from(other).is_some() {
            return false;
        }
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        let g = Poly::gcd(&self.poly, &other.poly);
        if g.is_constant() {
            return false;
        }
        SturmSequence::new(&g).count_closed(lo, hi) > 0
    }

    /// Exact comparison, refining copies until the intervals separate.
    pub fn cmp_exact(&self, other: &RealAlgebraic) -> Ordering {
        if self.equals(other) {
            return Ordering::Equal;
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        loop {
            if let Some(o) = a.disjoint_from(&b) {
                return o;
            }
            a.refine();
            b.refine();
        }
    }

    /// Sign of `q` at this number, decided exactly.
    pub fn sign_of(&self, q: &Poly) -> i32 {
        if q.is_zero() {
            return 0;
        }
        if self.is_exact() {
            return q.sign_at(&self.lo);
        }
        let g = Poly::gcd(q, &self.poly);
        if !g.is_constant() && SturmSequence::new(&g).count_closed(&self.lo, &self.hi) > 0 {
            return 0;
        }
        let mut a = self.clone();
        loop {
            let (lo, hi) = q.eval_interval(&a.lo, &a.hi);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            a.refine();
            if a.is_exact() {
                return q.sign_at(&a.lo);
            }
        }
    }

    /// The sum `self + other` as a real algebraic number.
    pub fn add(&self, other: &RealAlgebraic) -> Result<RealAlgebraic, PolyError> {
        if self.is_exact() && other.is_exact() {
            return Ok(RealAlgebraic::from_rational(&self.lo + &other.lo));
        }
        let poly = sum_poly(&self.poly, &other.poly).squarefree_part();
        let sturm = SturmSequence::new(&poly);
        let (mut a, mut b) = (self.clone(), other.clone());
        for _ in 0..MAX_REFINEMENT {
            let lo = &a.lo + &b.lo;
            let hi = &a.hi + &b.hi;
            if lo == hi {
                return Ok(RealAlgebraic::from_rational(lo));
            }
            let endpoints_clear = !poly.eval(&lo).is_zero() && !poly.eval(&hi).is_zero();
            if endpoints_clear && sturm.count(&lo, &hi) == 1 {
                return Ok(RealAlgebraic::new_unchecked(poly, lo, hi));
            }
            a.refine();
            b.refine();
        }
        Err(PolyError::RefinementLimit)
    }
}

impl PartialEq for RealAlgebraic {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Serialize for RealAlgebraic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

/// Isolating intervals for the real roots of a squarefree polynomial, in
/// increasing order.
pub(crate) fn isolate_squarefree(p: &Poly) -> Vec<RealAlgebraic> {
    if p.is_constant() {
        return Vec::new();
    }
    let p = p.monic();
    let sturm = SturmSequence::new(&p);
    let b = root_bound(&p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count(&lo, &hi) {
            0 => {}
            1 => out.push(RealAlgebraic::new_unchecked(p.clone(), lo, hi)),
            _ => {
                let mid = split_point(&p, &lo, &hi);
                // Right half first so the left half is processed first.
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out
}

/// One real root with its multiplicity in the original polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct RealRoot {
    pub root: RealAlgebraic,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootIsolation {
    pub roots: Vec<RealRoot>,
    /// Non-real roots counted with multiplicity.
    pub nonreal_count: usize,
}

/// Isolates the real roots of `p`, refined to `2^-32` times the root bound.
pub(crate) fn isolate(p: &Poly) -> RootIsolation {
    let target = root_bound(p) / Rat::from_integer(BigInt::one() << TARGET_BITS);
    let mut roots = Vec::new();
    for (i, f) in p.squarefree_factors().iter().enumerate() {
        for mut r in isolate_squarefree(f) {
            r.refine_to(&target);
            roots.push(RealRoot {
                root: r,
                multiplicity: i + 1,
            });
        }
    }
    roots.sort_by(|a, b| a.root.cmp_exact(&b.root));
    let real: usize = roots.iter().map(|r| r.multiplicity).sum();
    RootIsolation {
        roots,
        nonreal_count: p.degree() - real,
    }
}
