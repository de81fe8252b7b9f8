//! Characteristic polynomials over `Q`, used as resultants.

use num_traits::{One, Zero};

use super::poly::Poly;
use crate::exactlin::Rat;

type Mat = Vec<Vec<Rat>>;

/// Monic `det(x·I - m)` via reduction to upper Hessenberg form.
pub(crate) fn charpoly(mut m: Mat) -> Poly {
    let n = m.len();
    hessenberg(&mut m);
    // p[k] is the characteristic polynomial of the leading k×k block.
    let mut p: Vec<Poly> = Vec::with_capacity(n + 1);
    p.push(Poly::one());
    for k in 1..=n {
        let lin = Poly::from_coeffs(vec![-m[k - 1][k - 1].clone(), Rat::one()]);
        let mut pk = &lin * &p[k - 1];
        let mut t = Rat::one();
        for i in (1..k).rev() {
            t *= &m[i][i - 1];
            if t.is_zero() {
                break;
            }
            let c = &t * &m[i - 1][k - 1];
            if !c.is_zero() {
                pk = &pk - &p[i - 1].scale(&c);
            }
        }
        p.push(pk);
    }
    p.pop().expect("nonempty")
}

/// Similarity transform to upper Hessenberg form by Gaussian elimination.
fn hessenberg(m: &mut Mat) {
    let n = m.len();
    for col in 0..n.saturating_sub(2) {
        let Some(piv) = (col + 1..n).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        if piv != col + 1 {
            m.swap(piv, col + 1);
            for row in m.iter_mut() {
                row.swap(piv, col + 1);
            }
        }
        let inv = Rat::one() / &m[col + 1][col];
        for r in col + 2..n {
            if m[r][col].is_zero() {
                continue;
            }
            let u = &m[r][col] * &inv;
            // Row r -= u · row (col+1); then column (col+1) += u · column r.
            let (head, tail) = m.split_at_mut(r);
            let src = &head[col + 1];
            for (t, s) in tail[0].iter_mut().zip(src).skip(col) {
                if !s.is_zero() {
                    *t -= &u * s;
                }
            }
            for row in m.iter_mut() {
                if !row[r].is_zero() {
                    let add = &u * &row[r];
                    row[col + 1] += add;
                }
            }
        }
    }
}

/// Companion matrix of a monic polynomial; acts on `Q[x]/(p)` in the
/// monomial basis as multiplication by `x`.
fn companion(p: &Poly) -> Mat {
    let p = p.monic();
    let n = p.degree();
    let mut c = vec![vec![Rat::zero(); n]; n];
    for i in 1..n {
        c[i][i - 1] = Rat::one();
    }
    for (i, row) in c.iter_mut().enumerate() {
        row[n - 1] = -p.coeff(i);
    }
    c
}

/// Monic polynomial whose roots are `q(x_k)` over the roots `x_k` of `m`,
/// with multiplicity. Up to a nonzero constant this is
/// `Res_x(m(x), y - q(x))`.
pub(crate) fn value_resultant(m: &Poly, q: &Poly) -> Poly {
    let m = m.monic();
    let n = m.degree();
    let mut mat = vec![vec![Rat::zero(); n]; n];
    let mut col = q.rem(&m);
    for k in 0..n {
        for (i, row) in mat.iter_mut().enumerate() {
            row[k] = col.coeff(i);
        }
        col = (&col * &Poly::x()).rem(&m);
    }
    charpoly(mat)
}

/// Monic polynomial whose roots are all sums `a_i + b_j` of roots of `a`
/// and `b`, as the characteristic polynomial of a Kronecker sum.
pub(crate) fn sum_poly(a: &Poly, b: &Poly) -> Poly {
    let (ca, cb) = (companion(a), companion(b));
    let (m, n) = (ca.len(), cb.len());
    let mut k = vec![vec![Rat::zero(); m * n]; m * n];
    for i in 0..m {
        for j in 0..m {
            if !ca[i][j].is_zero() {
                for l in 0..n {
                    k[i * n + l][j * n + l] += &ca[i][j];
                }
            }
        }
        for l in 0..n {
            for r in 0..n {
                if !cb[l][r].is_zero() {
                    k[i * n + l][i * n + r] += &cb[l][r];
                }
            }
        }
    }
    charpoly(k)
}
