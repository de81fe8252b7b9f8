//! Picard–Lefschetz action on the join-cycle lattice.
//!
//! The twist around the critical value of `δ_k` is
//! `δ ↦ δ − ⟨δ, δ_k⟩ δ_k`. In coordinates this adds `(Ψw)_k` to the `k`-th
//! entry of `w`, so its matrix is the identity with row `k` of `Ψ` added.

mod classify;
mod lemma;
mod symmetry;

use serde::Serialize;
use thiserror::Error;

use crate::dynkin::{chain_diagram, intersection_matrix, join_grid, DynkinError, JoinGrid, SignMode};
use crate::exactlin::{closure_echelon, CycleVector, IntMatrix, LinalgError, SubspaceBasis};
use crate::pushforward::PushforwardError;
use crate::realpoly::{critical_data, CriticalData, PolyError, RealPoly, Role};

pub use classify::{classify_cycle, classify_grid_cycle, Axis, ClassificationReport, Verdict};
pub use lemma::{
    cross_validate, verify_lemma, verify_lemma_with, Backend, CycleComparison, FailureKind, LemmaFailure,
    LemmaOptions, LemmaReport,
};
pub use symmetry::{detect_symmetry, lemma_targets, AxisSymmetry, SymmetryReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("cycle index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("cycles {a} and {b} share a critical value but intersect")]
    NonCommutingGroup { a: usize, b: usize },
    #[error("gcd({d}, {e}) = {gcd} exceeds 2")]
    GcdOutOfRange { d: usize, e: usize, gcd: usize },
    #[error("degrees must be at least 2, got ({d}, {e})")]
    DegreeTooSmall { d: usize, e: usize },
    #[error(
        "cycle ({row}, {col}) has orbit rank {orbit_rank} < {ambient_rank} without a matching decomposition"
    )]
    ContractViolation {
        row: usize,
        col: usize,
        orbit_rank: usize,
        ambient_rank: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Dynkin(#[from] DynkinError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Pushforward(Box<PushforwardError>),
}

impl From<PushforwardError> for MonodromyError {
    fn from(e: PushforwardError) -> Self {
        MonodromyError::Pushforward(Box::new(e))
    }
}

/// A monodromy operator together with the cycles whose twists compose it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PLOperator {
    pub matrix: IntMatrix,
    /// 1-based indices of the vanishing cycles at the encircled value.
    pub site: Vec<usize>,
}

impl PLOperator {
    pub fn apply(&self, v: &CycleVector) -> Result<CycleVector, LinalgError> {
        self.matrix.mul_vec(v)
    }

    /// Whether `Mᵀ Ψ M = Ψ`.
    pub fn preserves(&self, psi: &IntMatrix) -> bool {
        self.matrix.transpose().mul(psi).mul(&self.matrix) == *psi
    }
}

/// Twist around the critical value of `δ_k` (1-based).
pub fn pl_twist(psi: &IntMatrix, k: usize) -> Result<PLOperator, MonodromyError> {
    let n = psi.dim();
    if k == 0 || k > n {
        return Err(MonodromyError::IndexOutOfRange { index: k, max: n });
    }
    let mut m = IntMatrix::identity(n);
    for (j, &x) in psi.row(k - 1).iter().enumerate() {
        if x != 0 {
            m.set(k - 1, j, m.get(k - 1, j) + x);
        }
    }
    Ok(PLOperator {
        matrix: m,
        site: vec![k],
    })
}

/// One operator per group of cycles with a common critical value: the
/// product of the member twists in ascending index order.
pub fn generators_for_groups(psi: &IntMatrix, groups: &[Vec<usize>]) -> Result<Vec<PLOperator>, MonodromyError> {
    let mut out = Vec::with_capacity(groups.len());
    for group in groups {
        for (x, &a) in group.iter().enumerate() {
            for &b in &group[x + 1..] {
                if psi.get(a - 1, b - 1) != 0 {
                    return Err(MonodromyError::NonCommutingGroup { a, b });
                }
            }
        }
        let mut sorted = group.clone();
        sorted.sort_unstable();
        let mut m = IntMatrix::identity(psi.dim());
        for &k in &sorted {
            m = m.mul(&pl_twist(psi, k)?.matrix);
        }
        out.push(PLOperator { matrix: m, site: sorted });
    }
    Ok(out)
}

/// Generators of the monodromy group of `f` from its grid grouping.
pub fn group_generators(psi: &IntMatrix, grid: &JoinGrid) -> Result<Vec<PLOperator>, MonodromyError> {
    generators_for_groups(psi, grid.groups())
}

/// Span of the monodromy orbit of `δ_k` (1-based).
pub fn orbit_span(generators: &[PLOperator], dim: usize, k: usize) -> Result<SubspaceBasis, MonodromyError> {
    if k == 0 || k > dim {
        return Err(MonodromyError::IndexOutOfRange { index: k, max: dim });
    }
    let mats: Vec<IntMatrix> = generators.iter().map(|g| g.matrix.clone()).collect();
    for m in &mats {
        crate::exactlin::check_dim(dim, m.dim())?;
    }
    // Twists are unipotent, so the closure needs no invertibility check.
    Ok(closure_echelon(&mats, &CycleVector::unit(dim, k - 1)).to_basis())
}

/// Everything needed to act on the fiber homology of `f = g + h`.
#[derive(Clone, Debug)]
pub struct JoinSystem {
    pub g: RealPoly,
    pub h: RealPoly,
    pub g_data: CriticalData,
    pub h_data: CriticalData,
    pub grid: JoinGrid,
    pub psi: IntMatrix,
    pub generators: Vec<PLOperator>,
}

impl JoinSystem {
    pub fn new(g: &RealPoly, h: &RealPoly) -> Result<Self, MonodromyError> {
        let g_data = critical_data(g, Role::G)?;
        let h_data = critical_data(h, Role::H)?;
        if g_data.is_empty() || h_data.is_empty() {
            return Err(MonodromyError::DegreeTooSmall {
                d: g.degree(),
                e: h.degree(),
            });
        }
        let grid = join_grid(
            &chain_diagram(&h_data, Role::H),
            &chain_diagram(&g_data, Role::G),
            &h_data,
            &g_data,
        )?;
        let psi = intersection_matrix(&grid, SignMode::Plus).into_matrix();
        let generators = group_generators(&psi, &grid)?;
        Ok(JoinSystem {
            g: g.clone(),
            h: h.clone(),
            g_data,
            h_data,
            grid,
            psi,
            generators,
        })
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    /// Orbit span of the cycle in grid cell `(i, j)`.
    pub fn orbit(&self, i: usize, j: usize) -> Result<SubspaceBasis, MonodromyError> {
        let k = self.grid.index_of(i, j)?;
        orbit_span(&self.generators, self.dim(), k)
    }
}
