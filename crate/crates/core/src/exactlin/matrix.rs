use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{check_dim, CycleVector, LinalgError, Rat};

/// Dense square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m.set(k, k, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(IntMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == -self.get(j, i)))
    }

    /// Matrix product; panics on dimension mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b != 0 {
                        let cell = &mut out.data[i * n + j];
                        *cell = cell
                            .checked_add(a.checked_mul(b).expect("integer overflow"))
                            .expect("integer overflow");
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CycleVector) -> Result<CycleVector, LinalgError> {
        check_dim(self.n, v.dim())?;
        let out = (0..self.n)
            .map(|i| {
                let mut acc = Rat::zero();
                for (a, x) in self.row(i).iter().zip(v.entries()) {
                    if *a != 0 && !x.is_zero() {
                        acc += x * Rat::from_integer((*a).into());
                    }
                }
                acc
            })
            .collect();
        Ok(CycleVector::from_rats(out))
    }

    pub(crate) fn mul_bigint(&self, v: &[BigInt]) -> Vec<BigInt> {
        debug_assert_eq!(self.n, v.len());
        let nz: Vec<usize> = (0..v.len()).filter(|&j| !v[j].is_zero()).collect();
        (0..self.n)
            .map(|i| {
                let row = self.row(i);
                let mut acc = BigInt::zero();
                for &j in &nz {
                    match row[j] {
                        0 => {}
                        1 => acc += &v[j],
                        -1 => acc -= &v[j],
                        a => acc += &v[j] * a,
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self
            .rows()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

impl fmt::Display for IntMatrix {
    /// The shared text format: the dimension, then one line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Serialized as a list of rows.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.rows())
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
