//! Exact rational linear algebra on the join-cycle lattice.
//!
//! Subspaces are kept in reduced row-echelon form. Internally the elimination
//! is fraction-free: rows are primitive integer vectors and only the final
//! [`SubspaceBasis`] is normalized to rationals with unit pivots.

mod echelon;
pub(crate) mod eigen;
mod matrix;
mod modular;
pub mod text;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use echelon::Echelon;
pub use eigen::{eigen_krylov_support, EigenBasis, EigenStatus, EigenSupport, DEFAULT_SEPARATION_TOL, DEFAULT_SUPPORT_TOL};
pub use matrix::IntMatrix;
pub use modular::krylov_span_certified;

/// Exact rational with a normalized sign and reduced fraction.
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator {index} is singular")]
    SingularGenerator { index: usize },
    #[error("matrix is not skew-symmetric")]
    NotSkewSymmetric,
    #[error("eigen solver failed to converge")]
    EigenNonConvergence,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected == found {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, found })
    }
}

/// An element of the fiber homology written in the join-cycle basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleVector {
    entries: Vec<Rat>,
}

impl CycleVector {
    pub fn zeros(dim: usize) -> Self {
        CycleVector {
            entries: vec![Rat::zero(); dim],
        }
    }

    /// Unit vector at 0-based position `k`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[k] = Rat::one();
        v
    }

    pub fn from_rats(entries: Vec<Rat>) -> Self {
        CycleVector { entries }
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        CycleVector {
            entries: entries.iter().map(|&x| Rat::from_integer(x.into())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> &Rat {
        &self.entries[k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn add_scaled(&mut self, coeff: &Rat, other: &CycleVector) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if !b.is_zero() {
                *a += coeff * b;
            }
        }
    }

    /// Smallest positive multiple with coprime integer entries, together with
    /// the scale. The zero vector maps to itself.
    pub(crate) fn to_primitive_ints(&self) -> Vec<BigInt> {
        let lcm = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let mut ints: Vec<BigInt> = self
            .entries
            .iter()
            .map(|r| r.numer() * (&lcm / r.denom()))
            .collect();
        make_primitive(&mut ints);
        ints
    }
}

impl fmt::Display for CycleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Divides out the content so that entries are coprime. Sign is untouched.
pub(crate) fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        if !x.is_zero() {
            *x /= &g;
        }
    }
}

/// Canonical reduced row-echelon basis of a subspace of `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    rows: Vec<CycleVector>,
    pivot_cols: Vec<usize>,
}

impl SubspaceBasis {
    pub fn empty(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            rows: Vec::new(),
            pivot_cols: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            rows: (0..ambient_dim)
                .map(|k| CycleVector::unit(ambient_dim, k))
                .collect(),
            pivot_cols: (0..ambient_dim).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[CycleVector] {
        &self.rows
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    /// Residual of `v` after subtracting its projection along the pivot rows.
    fn residual(&self, v: &CycleVector) -> CycleVector {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivot_cols) {
            let c = r.entries[p].clone();
            if !c.is_zero() {
                r.add_scaled(&-c, row);
            }
        }
        r
    }

    /// True when `other` is a subspace of `self`.
    pub fn contains_subspace(&self, other: &SubspaceBasis) -> Result<bool, LinalgError> {
        check_dim(self.ambient_dim, other.ambient_dim)?;
        for row in &other.rows {
            if !member(self, row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn to_echelon(&self) -> Echelon {
        Echelon::from_basis(self)
    }

    pub(crate) fn from_parts(
        ambient_dim: usize,
        rows: Vec<CycleVector>,
        pivot_cols: Vec<usize>,
    ) -> Self {
        SubspaceBasis {
            ambient_dim,
            rows,
            pivot_cols,
        }
    }
}

/// Basis of `{x : A x = 0}`, where `a_rows` are the rows of `A`.
pub fn null_space(ncols: usize, a_rows: &[CycleVector]) -> Result<SubspaceBasis, LinalgError> {
    let r = rref_basis(ncols, a_rows)?;
    let mut vectors = Vec::new();
    for f in (0..ncols).filter(|c| !r.pivot_cols.contains(c)) {
        let mut x = CycleVector::unit(ncols, f);
        for (row, &p) in r.rows.iter().zip(&r.pivot_cols) {
            x.entries[p] = -row.entries[f].clone();
        }
        vectors.push(x);
    }
    rref_basis(ncols, &vectors)
}

/// Reduced row-echelon basis of the span of `vectors` in `Q^ambient_dim`.
pub fn rref_basis(ambient_dim: usize, vectors: &[CycleVector]) -> Result<SubspaceBasis, LinalgError> {
    let mut ech = Echelon::new(ambient_dim);
    for v in vectors {
        check_dim(ambient_dim, v.dim())?;
        ech.insert(v.to_primitive_ints());
    }
    Ok(ech.to_basis())
}

pub fn member(basis: &SubspaceBasis, v: &CycleVector) -> Result<bool, LinalgError> {
    check_dim(basis.ambient_dim, v.dim())?;
    Ok(basis.residual(v).is_zero())
}

/// Canonical basis of `span(basis ∪ {v})` and whether the rank grew.
pub fn extend_span(
    basis: &SubspaceBasis,
    v: &CycleVector,
) -> Result<(SubspaceBasis, bool), LinalgError> {
    check_dim(basis.ambient_dim, v.dim())?;
    let mut ech = basis.to_echelon();
    let grew = ech.insert(v.to_primitive_ints());
    Ok((ech.to_basis(), grew))
}

/// Exact basis of the Krylov span `span{v, Ψv, Ψ²v, …}`.
///
/// Each step multiplies the most recent reduced remainder by `Ψ`, which spans
/// the same space as the raw powers while keeping entries small.
pub fn krylov_span(psi: &IntMatrix, v: &CycleVector) -> Result<SubspaceBasis, LinalgError> {
    Ok(krylov_echelon(psi, v)?.to_basis())
}

pub(crate) fn krylov_echelon(psi: &IntMatrix, v: &CycleVector) -> Result<Echelon, LinalgError> {
    let n = psi.dim();
    check_dim(n, v.dim())?;
    let mut ech = Echelon::new(n);
    let mut current = v.to_primitive_ints();
    loop {
        match ech.insert_returning(current) {
            Some(reduced) => current = psi.mul_bigint(&reduced),
            None => break,
        }
    }
    Ok(ech)
}

/// Smallest subspace containing `seed` and invariant under every generator.
pub fn invariant_closure(
    generators: &[IntMatrix],
    seed: &CycleVector,
) -> Result<SubspaceBasis, LinalgError> {
    let n = seed.dim();
    for (index, m) in generators.iter().enumerate() {
        check_dim(n, m.dim())?;
        if m.determinant().is_zero() {
            return Err(LinalgError::SingularGenerator { index });
        }
    }
    Ok(closure_echelon(generators, seed).to_basis())
}

/// Closure without the determinant check, for callers whose generators are
/// unipotent by construction.
pub(crate) fn closure_echelon(generators: &[IntMatrix], seed: &CycleVector) -> Echelon {
    let mut ech = Echelon::new(seed.dim());
    let mut queue = std::collections::VecDeque::new();
    if let Some(r) = ech.insert_returning(seed.to_primitive_ints()) {
        queue.push_back(r);
    }
    while let Some(b) = queue.pop_front() {
        for m in generators {
            let image = m.mul_bigint(&b);
            if let Some(r) = ech.insert_returning(image) {
                queue.push_back(r);
            }
        }
    }
    ech
}

/// Serde adapter writing rationals as strings.
pub(crate) mod rat_serde {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| super::text::parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Serialize for CycleVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rat_serde::serialize(&self.entries, s)
    }
}

impl<'de> Deserialize<'de> for CycleVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        rat_serde::deserialize(d).map(CycleVector::from_rats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> CycleVector {
        CycleVector::from_ints(xs)
    }

    #[test]
    fn rref_zero_vector_spans_nothing() {
        let b = rref_basis(2, &[v(&[0, 0])]).unwrap();
        assert_eq!(b.rank(), 0);
    }

    #[test]
    fn rref_collinear() {
        let b = rref_basis(2, &[v(&[2, 0]), v(&[1, 0])]).unwrap();
        assert_eq!(b.rank(), 1);
        assert_eq!(b.rows(), &[v(&[1, 0])]);
    }

    #[test]
    fn rref_plane() {
        let b = rref_basis(2, &[v(&[1, 1]), v(&[1, -1])]).unwrap();
        assert_eq!(b.rows(), &[v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(b.pivot_cols(), &[0, 1]);
    }

    #[test]
    fn rref_is_reduced_with_rational_entries() {
        let b = rref_basis(3, &[v(&[2, 1, 0]), v(&[0, 3, 1])]).unwrap();
        // rows: (1, 0, -1/6), (0, 1, 1/3)
        let sixth = Rat::new((-1).into(), 6.into());
        let third = Rat::new(1.into(), 3.into());
        assert_eq!(b.rows()[0].entries()[2], sixth);
        assert_eq!(b.rows()[1].entries()[2], third);
    }

    #[test]
    fn rref_dimension_mismatch() {
        let err = rref_basis(2, &[v(&[1, 0, 0])]).unwrap_err();
        assert_eq!(err, LinalgError::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn membership() {
        let e1 = rref_basis(2, &[v(&[1, 0])]).unwrap();
        assert!(member(&e1, &v(&[0, 0])).unwrap());
        assert!(!member(&e1, &v(&[1, 1])).unwrap());
        let diag = rref_basis(2, &[v(&[1, -1])]).unwrap();
        assert!(member(&diag, &v(&[3, -3])).unwrap());
        assert!(member(&SubspaceBasis::empty(2), &v(&[0, 0])).unwrap());
        assert!(member(&e1, &v(&[1])).is_err());
    }

    #[test]
    fn extend() {
        let (b, grew) = extend_span(&SubspaceBasis::empty(2), &v(&[0, 1])).unwrap();
        assert!(grew);
        assert_eq!(b.rank(), 1);
        let e1 = rref_basis(2, &[v(&[1, 0])]).unwrap();
        let (b, grew) = extend_span(&e1, &v(&[2, 0])).unwrap();
        assert!(!grew);
        assert_eq!(b, e1);
        let (b, grew) = extend_span(&e1, &v(&[1, 1])).unwrap();
        assert!(grew);
        assert!(b.is_full());
    }

    #[test]
    fn krylov_small() {
        let zero = IntMatrix::zeros(1);
        assert_eq!(krylov_span(&zero, &v(&[1])).unwrap().rank(), 1);
        let psi = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        assert_eq!(krylov_span(&psi, &v(&[1, 0])).unwrap().rank(), 2);
        assert_eq!(krylov_span(&psi, &v(&[0, 0])).unwrap().rank(), 0);
    }

    #[test]
    fn closure_identity_and_twist() {
        let id = IntMatrix::identity(2);
        let b = invariant_closure(&[id], &v(&[1, 2])).unwrap();
        assert_eq!(b.rank(), 1);
        // Twists of the 2x2 lattice: e1 -> e1 + e2 and e2 -> e2 - e1.
        let m2 = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        let m1 = IntMatrix::from_rows(&[vec![1, -1], vec![0, 1]]).unwrap();
        let b = invariant_closure(&[m1, m2], &v(&[1, 0])).unwrap();
        assert!(b.is_full());
    }

    #[test]
    fn closure_rejects_singular() {
        let z = IntMatrix::zeros(2);
        let err = invariant_closure(&[IntMatrix::identity(2), z], &v(&[1, 0])).unwrap_err();
        assert_eq!(err, LinalgError::SingularGenerator { index: 1 });
    }
}
