//! Certified Krylov spans through modular arithmetic.
//!
//! The span is computed in reduced echelon form over `F_p`, lifted to `Q` by
//! rational reconstruction, and then checked exactly: the candidate must
//! contain the seed and be `Ψ`-invariant. The rank over `F_p` of integer
//! vectors never exceeds their rank over `Q`, so a verified candidate of that
//! rank is the Krylov span itself.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{check_dim, krylov_span, CycleVector, IntMatrix, LinalgError, Rat, SubspaceBasis};

/// Primes below 2^62, so that a sum of two residues fits in a `u64`.
const PRIMES: [u64; 6] = [
    (1 << 61) - 1,
    (1 << 62) - 57,
    (1 << 62) - 87,
    (1 << 60) - 93,
    (1 << 59) - 55,
    (1 << 58) - 27,
];

#[derive(Clone, Copy)]
struct Field {
    p: u64,
}

impl Field {
    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        let x = a as u128 * b as u128;
        if self.p == PRIMES[0] {
            let lo = (x as u64) & self.p;
            let hi = (x >> 61) as u64;
            let s = lo + hi;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            (x % self.p as u128) as u64
        }
    }

    #[inline]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    fn from_i64(self, x: i64) -> u64 {
        let r = x.rem_euclid(self.p as i64);
        r as u64
    }

    fn from_bigint(self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue fits")
    }
}

/// Reduced echelon form over `F_p` with unit pivots.
struct ModEchelon {
    field: Field,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModEchelon {
    fn new(field: Field) -> Self {
        ModEchelon {
            field,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Reduces `v` in place; returns the normalized remainder when it is new.
    fn insert(&mut self, mut v: Vec<u64>) -> Option<Vec<u64>> {
        let f = self.field;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (t, &r) in v.iter_mut().zip(row) {
                    if r != 0 {
                        *t = f.sub(*t, f.mul(c, r));
                    }
                }
            }
        }
        let p = v.iter().position(|&x| x != 0)?;
        let inv = f.inv(v[p]);
        for x in v.iter_mut() {
            if *x != 0 {
                *x = f.mul(*x, inv);
            }
        }
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                for (t, &r) in row.iter_mut().zip(&v) {
                    if r != 0 {
                        *t = f.sub(*t, f.mul(c, r));
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v.clone());
        Some(v)
    }
}

fn mat_vec_mod(psi: &IntMatrix, v: &[u64], f: Field) -> Vec<u64> {
    let nz: Vec<usize> = (0..v.len()).filter(|&j| v[j] != 0).collect();
    (0..psi.dim())
        .map(|i| {
            let row = psi.row(i);
            let mut acc = 0u64;
            for &j in &nz {
                match row[j] {
                    0 => {}
                    1 => acc = f.add(acc, v[j]),
                    -1 => acc = f.sub(acc, v[j]),
                    a => acc = f.add(acc, f.mul(f.from_i64(a), v[j])),
                }
            }
            acc
        })
        .collect()
}

fn krylov_mod(psi: &IntMatrix, seed: &[BigInt], field: Field) -> ModEchelon {
    let mut ech = ModEchelon::new(field);
    let mut current: Vec<u64> = seed.iter().map(|x| field.from_bigint(x)).collect();
    while let Some(r) = ech.insert(current) {
        current = mat_vec_mod(psi, &r, field);
    }
    ech
}

/// Residues of one echelon entry accumulated across primes.
struct Crt {
    modulus: BigInt,
    residues: Vec<Vec<BigInt>>,
}

impl Crt {
    fn start(ech: &ModEchelon) -> Self {
        Crt {
            modulus: BigInt::from(ech.field.p),
            residues: ech
                .rows
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        }
    }

    fn absorb(&mut self, ech: &ModEchelon) {
        let p = BigInt::from(ech.field.p);
        // x = a (mod M), x = b (mod p)  =>  x = a + M * ((b - a) * M^-1 mod p)
        let m_inv = BigInt::from(ech.field.inv(ech.field.from_bigint(&self.modulus)));
        for (acc_row, row) in self.residues.iter_mut().zip(&ech.rows) {
            for (a, &b) in acc_row.iter_mut().zip(row) {
                let t = ((BigInt::from(b) - &*a) * &m_inv).mod_floor(&p);
                *a += &self.modulus * t;
            }
        }
        self.modulus *= p;
    }
}

/// Smallest `n/d` congruent to `a` modulo `m` with `|n|, d ≤ sqrt(m/2)`.
fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<Rat> {
    if a.is_zero() {
        return Some(Rat::zero());
    }
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let candidate = Rat::new(r1, t1);
    let check = (candidate.numer() - a * candidate.denom()).mod_floor(m);
    check.is_zero().then_some(candidate)
}

fn reconstruct(crt: &Crt, pivots: &[usize], dim: usize) -> Option<SubspaceBasis> {
    let mut rows = Vec::with_capacity(crt.residues.len());
    for row in &crt.residues {
        let entries = row
            .iter()
            .map(|a| rational_reconstruct(a, &crt.modulus))
            .collect::<Option<Vec<_>>>()?;
        rows.push(CycleVector::from_rats(entries));
    }
    for (row, &p) in rows.iter().zip(pivots) {
        if !row.get(p).is_one() {
            return None;
        }
        for (other, &q) in rows.iter().zip(pivots) {
            if q != p && !other.get(p).is_zero() {
                return None;
            }
        }
    }
    Some(SubspaceBasis::from_parts(dim, rows, pivots.to_vec()))
}

/// Sparse rational residual of `w` against an RREF basis.
fn residual_is_zero(basis: &SparseRref, w: &[Rat]) -> bool {
    let mut r: Vec<Rat> = w.to_vec();
    for (row, &p) in basis.rows.iter().zip(&basis.pivots) {
        let c = r[p].clone();
        if c.is_zero() {
            continue;
        }
        for (col, x) in row {
            r[*col] -= &c * x;
        }
    }
    r.iter().all(Zero::is_zero)
}

struct SparseRref {
    rows: Vec<Vec<(usize, Rat)>>,
    pivots: Vec<usize>,
}

impl SparseRref {
    fn new(basis: &SubspaceBasis) -> Self {
        SparseRref {
            rows: basis
                .rows()
                .iter()
                .map(|r| {
                    r.entries()
                        .iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(c, x)| (c, x.clone()))
                        .collect()
                })
                .collect(),
            pivots: basis.pivot_cols().to_vec(),
        }
    }
}

fn sparse_mat_vec(psi: &IntMatrix, row: &[(usize, Rat)]) -> Vec<Rat> {
    let n = psi.dim();
    let mut out = vec![Rat::zero(); n];
    for (j, x) in row {
        // Column j of Ψ.
        for (i, slot) in out.iter_mut().enumerate() {
            let a = psi.get(i, *j);
            if a != 0 {
                *slot += x * Rat::from_integer(a.into());
            }
        }
    }
    out
}

/// Exact check that `basis` contains `seed` and is mapped into itself by `Ψ`.
pub(crate) fn verify_invariant_span(psi: &IntMatrix, basis: &SubspaceBasis, seed: &CycleVector) -> bool {
    let sparse = SparseRref::new(basis);
    if !residual_is_zero(&sparse, seed.entries()) {
        return false;
    }
    sparse
        .rows
        .iter()
        .all(|row| residual_is_zero(&sparse, &sparse_mat_vec(psi, row)))
}

/// Krylov span computed modulo primes and certified exactly over `Q`.
///
/// Produces the same canonical basis as [`krylov_span`]; falls back to it if
/// reconstruction cannot be certified with the built-in primes.
pub fn krylov_span_certified(psi: &IntMatrix, v: &CycleVector) -> Result<SubspaceBasis, LinalgError> {
    let n = psi.dim();
    check_dim(n, v.dim())?;
    let seed = v.to_primitive_ints();
    let mut best: Option<(Vec<usize>, Crt)> = None;
    for &p in &PRIMES {
        let ech = krylov_mod(psi, &seed, Field { p });
        match &mut best {
            Some((pivots, crt)) if *pivots == ech.pivots => crt.absorb(&ech),
            Some((pivots, _)) if pivots.len() >= ech.pivots.len() => continue,
            _ => best = Some((ech.pivots.clone(), Crt::start(&ech))),
        }
        let (pivots, crt) = best.as_ref().expect("set above");
        if let Some(candidate) = reconstruct(crt, pivots, n) {
            if verify_invariant_span(psi, &candidate, v) {
                return Ok(candidate);
            }
        }
    }
    krylov_span(psi, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruction_recovers_small_fractions() {
        let m = BigInt::from(PRIMES[0]);
        let f = Field { p: PRIMES[0] };
        let a = BigInt::from(f.mul(f.from_i64(-3), f.inv(7)));
        assert_eq!(
            rational_reconstruct(&a, &m),
            Some(Rat::new((-3).into(), 7.into()))
        );
    }

    #[test]
    fn mersenne_reduction_agrees_with_generic() {
        let f = Field { p: PRIMES[0] };
        let (a, b) = (PRIMES[0] - 2, PRIMES[0] - 3);
        let expected = ((a as u128 * b as u128) % PRIMES[0] as u128) as u64;
        assert_eq!(f.mul(a, b), expected);
        assert_eq!(f.mul(a, f.inv(a)), 1);
    }

    #[test]
    fn certified_matches_direct_on_rotation() {
        let psi = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let v = CycleVector::from_ints(&[1, 0]);
        assert_eq!(krylov_span_certified(&psi, &v).unwrap(), krylov_span(&psi, &v).unwrap());
    }
}
