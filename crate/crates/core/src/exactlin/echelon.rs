use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{make_primitive, CycleVector, Rat, SubspaceBasis};

/// Fraction-free reduced echelon form.
///
/// Rows are primitive integer vectors with a positive pivot, sorted by pivot
/// column, and every pivot column is zero in all other rows. Scaling each row
/// by its pivot gives the rational RREF, so this form is canonical as well.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    dim: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

/// `target <- a * target - b * row`, with `a`, `b` first divided by their gcd.
fn eliminate(target: &mut [BigInt], row: &[BigInt], a: &BigInt, b: &BigInt) {
    let g = a.gcd(b);
    let (a, b) = if g.is_one() {
        (a.clone(), b.clone())
    } else {
        (a / &g, b / &g)
    };
    let a_is_one = a.is_one();
    for (t, r) in target.iter_mut().zip(row) {
        if r.is_zero() {
            if !a_is_one && !t.is_zero() {
                *t *= &a;
            }
        } else {
            if !a_is_one {
                *t *= &a;
            }
            *t -= &b * r;
        }
    }
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_basis(basis: &SubspaceBasis) -> Self {
        Echelon {
            dim: basis.ambient_dim(),
            rows: basis.rows().iter().map(|r| r.to_primitive_ints()).collect(),
            pivots: basis.pivot_cols().to_vec(),
        }
    }

    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Eliminates every pivot column from `v`; the result is primitive.
    pub fn reduce(&self, v: &mut [BigInt]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let b = v[p].clone();
                eliminate(v, row, &row[p], &b);
            }
        }
        make_primitive(v);
    }

    #[cfg(test)]
    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Zero::is_zero)
    }

    pub fn insert(&mut self, v: Vec<BigInt>) -> bool {
        self.insert_returning(v).is_some()
    }

    /// Inserts `v` and returns its reduced remainder when the rank grew.
    pub fn insert_returning(&mut self, mut v: Vec<BigInt>) -> Option<Vec<BigInt>> {
        debug_assert_eq!(v.len(), self.dim);
        self.reduce(&mut v);
        let p = v.iter().position(|x| !x.is_zero())?;
        if v[p].is_negative() {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let b = row[p].clone();
                eliminate(row, &v, &v[p], &b);
                make_primitive(row);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v.clone());
        Some(v)
    }

    pub fn to_basis(&self) -> SubspaceBasis {
        let rows = self
            .rows
            .iter()
            .zip(&self.pivots)
            .map(|(row, &p)| {
                let lead = &row[p];
                CycleVector::from_rats(
                    row.iter()
                        .map(|x| Rat::new(x.clone(), lead.clone()))
                        .collect(),
                )
            })
            .collect();
        SubspaceBasis::from_parts(self.dim, rows, self.pivots.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rows_stay_reduced_and_primitive() {
        let mut e = Echelon::new(3);
        assert!(e.insert(ints(&[0, 2, 4])));
        assert!(e.insert(ints(&[3, 3, 0])));
        assert!(!e.insert(ints(&[3, 5, 4])));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.rows[0], ints(&[1, 0, -2]));
        assert_eq!(e.rows[1], ints(&[0, 1, 2]));
        assert!(e.contains(&ints(&[1, 1, 0])));
        assert!(!e.contains(&ints(&[0, 0, 1])));
    }
}
