//! Dynkin chains, the join-cycle grid and the intersection matrix.
//!
//! Join cycles are indexed column-major: the cycle in grid row `r` and
//! column `c` (both 1-based, `e - 1` rows and `d - 1` columns) is
//! `δ_k` with `k = (c - 1)(e - 1) + r`.

mod grid;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::IntMatrix;
pub use crate::realpoly::Role;
use crate::realpoly::{CriticalData, PolyError};

pub use grid::{join_grid, GridCell, JoinGrid};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynkinError {
    #[error("labels {0:?} are not a permutation of 1..=n")]
    NotAPermutation(Vec<usize>),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("cell ({row}, {col}) outside a {rows}x{cols} grid")]
    CellOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("chain sizes do not match the critical data")]
    ChainMismatch,
    #[error("could not decide whether two critical values of f coincide")]
    UndecidedCoincidence,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `f = g + h` or `f = g - h`; the second negates every intersection number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    #[default]
    Plus,
    Minus,
}

/// A 0-dimensional Dynkin diagram: a chain of `n` vanishing 0-cycles in
/// spatial order, each carrying its critical-value label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ChainDiagram {
    labels: Vec<usize>,
    role: Role,
}

impl ChainDiagram {
    pub fn new(labels: Vec<usize>, role: Role) -> Result<Self, DynkinError> {
        let mut seen = vec![false; labels.len()];
        for &l in &labels {
            if l == 0 || l > labels.len() || std::mem::replace(&mut seen[l - 1], true) {
                return Err(DynkinError::NotAPermutation(labels));
            }
        }
        Ok(ChainDiagram { labels, role })
    }

    /// Chain whose labels equal the spatial positions, the model for
    /// `x^(n+1)` after a monotone Morsification.
    pub fn identity(n: usize, role: Role) -> Self {
        ChainDiagram {
            labels: (1..=n).collect(),
            role,
        }
    }

    /// Labels that rise and fall alternately along the chain, starting with a
    /// rise.
    pub fn alternating(n: usize, role: Role) -> Self {
        let odd = n.div_ceil(2);
        let labels = (1..=n)
            .map(|pos| if pos % 2 == 1 { pos / 2 + 1 } else { odd + pos / 2 })
            .collect();
        ChainDiagram { labels, role }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// Label of the 1-based spatial position `pos`.
    pub fn label(&self, pos: usize) -> usize {
        self.labels[pos - 1]
    }

    /// Intersection of the 0-cycles at spatial positions `a` and `b`.
    pub fn intersection(&self, a: usize, b: usize) -> i64 {
        if a.abs_diff(b) == 1 {
            -1
        } else {
            0
        }
    }
}

/// Chain of a polynomial from its critical data, ranked for `role`.
pub fn chain_diagram(cd: &CriticalData, role: Role) -> ChainDiagram {
    let labels = if cd.role == role {
        cd.value_rank.clone()
    } else {
        cd.with_role(role).value_rank
    };
    ChainDiagram { labels, role }
}

/// Column-major index `k` (1-based) of grid cell `(row, col)`.
pub fn index_of(rows: usize, cols: usize, row: usize, col: usize) -> Result<usize, DynkinError> {
    if row == 0 || col == 0 || row > rows || col > cols {
        return Err(DynkinError::CellOutOfRange { row, col, rows, cols });
    }
    Ok((col - 1) * rows + row)
}

/// Grid cell `(row, col)` of the 1-based column-major index `k`.
pub fn position_of(rows: usize, cols: usize, k: usize) -> Result<(usize, usize), DynkinError> {
    let max = rows * cols;
    if k == 0 || k > max {
        return Err(DynkinError::IndexOutOfRange { index: k, max });
    }
    Ok(((k - 1) % rows + 1, (k - 1) / rows + 1))
}

fn sgn(x: i64) -> i64 {
    x.signum()
}

/// Skew-symmetric matrix `Ψ` of intersection numbers of the join cycles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionMatrix {
    rows: usize,
    cols: usize,
    sign_mode: SignMode,
    matrix: IntMatrix,
}

impl IntersectionMatrix {
    /// Builds `Ψ` from the `h` chain (grid rows) and the `g` chain (grid
    /// columns). Signs come from the labels, adjacency from spatial order.
    pub fn from_chains(hchain: &ChainDiagram, gchain: &ChainDiagram, sign_mode: SignMode) -> Self {
        let (rows, cols) = (hchain.size(), gchain.size());
        let n = rows * cols;
        let mut m = IntMatrix::zeros(n);
        let flip = if sign_mode == SignMode::Minus { -1 } else { 1 };
        for c in 1..=cols {
            for r in 1..=rows {
                let a = (c - 1) * rows + r - 1;
                let (i, j) = (hchain.label(r) as i64, gchain.label(c) as i64);
                // Only neighbours in the grid can intersect.
                for c2 in c.saturating_sub(1).max(1)..=(c + 1).min(cols) {
                    for r2 in r.saturating_sub(1).max(1)..=(r + 1).min(rows) {
                        let (i2, j2) = (hchain.label(r2) as i64, gchain.label(c2) as i64);
                        let gamma = hchain.intersection(r, r2);
                        let sigma = gchain.intersection(c, c2);
                        let v = if r == r2 && c == c2 {
                            0
                        } else if r == r2 {
                            sgn(j2 - j) * sigma
                        } else if c == c2 {
                            sgn(i2 - i) * gamma
                        } else if (i2 - i) * (j2 - j) > 0 {
                            sgn(i2 - i) * gamma * sigma
                        } else {
                            0
                        };
                        if v != 0 {
                            m.set(a, (c2 - 1) * rows + r2 - 1, flip * v);
                        }
                    }
                }
            }
        }
        IntersectionMatrix {
            rows,
            cols,
            sign_mode,
            matrix: m,
        }
    }

    /// `Ψ` of a real Morsification of `x^d + y^e`. Both chains zigzag, as
    /// for any real polynomial with only real critical points and distinct
    /// critical values.
    pub fn model(d: usize, e: usize) -> Self {
        Self::from_chains(
            &ChainDiagram::alternating(e - 1, Role::H),
            &ChainDiagram::alternating(d - 1, Role::G),
            SignMode::Plus,
        )
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Grid rows, `e - 1`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Grid columns, `d - 1`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sign_mode(&self) -> SignMode {
        self.sign_mode
    }

    pub fn get(&self, k: usize, l: usize) -> i64 {
        self.matrix.get(k - 1, l - 1)
    }

    pub fn index_of(&self, row: usize, col: usize) -> Result<usize, DynkinError> {
        index_of(self.rows, self.cols, row, col)
    }

    pub fn position_of(&self, k: usize) -> Result<(usize, usize), DynkinError> {
        position_of(self.rows, self.cols, k)
    }

    pub fn negated(&self) -> Self {
        IntersectionMatrix {
            rows: self.rows,
            cols: self.cols,
            sign_mode: match self.sign_mode {
                SignMode::Plus => SignMode::Minus,
                SignMode::Minus => SignMode::Plus,
            },
            matrix: self.matrix.neg(),
        }
    }
}

/// `Ψ` of the grid in the requested sign mode.
pub fn intersection_matrix(grid: &JoinGrid, sign_mode: SignMode) -> IntersectionMatrix {
    IntersectionMatrix::from_chains(grid.hchain(), grid.gchain(), sign_mode)
}
