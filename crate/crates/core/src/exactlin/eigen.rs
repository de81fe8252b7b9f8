//! Floating eigen backend for Krylov ranks.
//!
//! A real skew-symmetric `Ψ` becomes Hermitian after multiplying by `i`, so
//! its spectrum is purely imaginary and it has an orthonormal eigenbasis.
//! When the eigenvalues are pairwise distinct the Krylov span of `v` is the
//! span of the eigenvectors on which `v` has a nonzero coefficient.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{check_dim, CycleVector, IntMatrix, LinalgError};

pub type Complex64 = Complex<f64>;

/// Default relative cutoff for nonzero expansion coefficients.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-9;
/// Default threshold below which two eigenvalues count as repeated.
pub const DEFAULT_SEPARATION_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EigenStatus {
    Reliable,
    /// Two eigenvalues closer than the separation threshold; the support count
    /// no longer determines the Krylov rank.
    Unreliable { min_gap: f64 },
}

#[derive(Clone, Debug)]
pub struct EigenSupport {
    pub eigenvalues: Vec<Complex64>,
    pub coefficients: Vec<Complex64>,
    pub support_dim: usize,
    pub status: EigenStatus,
}

/// Eigendecomposition of one intersection matrix, reusable across seeds.
#[derive(Clone, Debug)]
pub struct EigenBasis {
    /// Eigenvalues of `iΨ`, ascending; the eigenvalues of `Ψ` are `-i·mu`.
    mu: Vec<f64>,
    vectors: DMatrix<Complex64>,
    min_gap: f64,
    separation_tol: f64,
    max_real_part: f64,
}

impl EigenBasis {
    pub fn new(psi: &IntMatrix) -> Result<Self, LinalgError> {
        Self::with_separation(psi, DEFAULT_SEPARATION_TOL)
    }

    pub fn with_separation(psi: &IntMatrix, separation_tol: f64) -> Result<Self, LinalgError> {
        if !psi.is_skew_symmetric() {
            return Err(LinalgError::NotSkewSymmetric);
        }
        if !(separation_tol > 0.0) {
            return Err(LinalgError::BadTolerance(separation_tol));
        }
        let n = psi.dim();
        let h = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            Complex64::new(0.0, psi.get(i, j) as f64)
        });
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, 1000 * n.max(1))
            .ok_or(LinalgError::EigenNonConvergence)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mu: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, l| eig.eigenvectors[(i, order[l])]);
        let min_gap = mu
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);

        // Rayleigh quotients u*Ψu are purely imaginary for skew-symmetric Ψ;
        // their real parts measure how far the float path drifted.
        let psi_f = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            Complex64::new(psi.get(i, j) as f64, 0.0)
        });
        let mut max_real_part: f64 = 0.0;
        for l in 0..n {
            let u = vectors.column(l);
            let pu = &psi_f * u;
            let q = u.dotc(&pu);
            max_real_part = max_real_part.max(q.re.abs());
        }

        Ok(EigenBasis {
            mu,
            vectors,
            min_gap,
            separation_tol,
            max_real_part,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.mu.iter().map(|&m| Complex64::new(0.0, -m)).collect()
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn max_real_part(&self) -> f64 {
        self.max_real_part
    }

    pub fn status(&self) -> EigenStatus {
        if self.min_gap < self.separation_tol {
            EigenStatus::Unreliable {
                min_gap: self.min_gap,
            }
        } else {
            EigenStatus::Reliable
        }
    }

    /// Expansion coefficients `r_l = u_l* v`.
    pub fn coefficients(&self, v: &[f64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &x) in v.iter().enumerate() {
                    if x != 0.0 {
                        acc += self.vectors[(k, l)].conj() * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// Indices of eigenvectors carrying a coefficient above `tol·max|r|`.
    pub fn support_indices(&self, v: &[f64], tol: f64) -> Vec<usize> {
        support_of(&self.coefficients(v), tol)
    }

    pub fn support(&self, v: &CycleVector, tol: f64) -> Result<EigenSupport, LinalgError> {
        check_dim(self.dim(), v.dim())?;
        if !(tol > 0.0) {
            return Err(LinalgError::BadTolerance(tol));
        }
        let x = to_f64(v);
        let coefficients = self.coefficients(&x);
        let support_dim = support_of(&coefficients, tol).len();
        Ok(EigenSupport {
            eigenvalues: self.eigenvalues(),
            coefficients,
            support_dim,
            status: self.status(),
        })
    }
}

fn support_of(coefficients: &[Complex64], tol: f64) -> Vec<usize> {
    let max = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Vec::new();
    }
    coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > tol * max)
        .map(|(l, _)| l)
        .collect()
}

pub(crate) fn to_f64(v: &CycleVector) -> Vec<f64> {
    v.entries()
        .iter()
        .map(|r| r.to_f64().unwrap_or(f64::NAN))
        .collect()
}

pub fn eigen_krylov_support(
    psi: &IntMatrix,
    v: &CycleVector,
    tol: f64,
) -> Result<EigenSupport, LinalgError> {
    check_dim(psi.dim(), v.dim())?;
    EigenBasis::new(psi)?.support(v, tol)
}
