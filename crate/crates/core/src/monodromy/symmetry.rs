use num_integer::Integer;
use serde::Serialize;

use crate::dynkin::{index_of, JoinGrid};
use crate::exactlin::CycleVector;

/// A symmetry step `p` along one axis and the grid lines it fixes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxisSymmetry {
    pub p: usize,
    /// 1-based columns (horizontal) or rows (vertical): the multiples of `p`.
    pub positions: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub horizontal: Vec<AxisSymmetry>,
    pub vertical: Vec<AxisSymmetry>,
}

impl SymmetryReport {
    pub fn horizontal_ps(&self) -> Vec<usize> {
        self.horizontal.iter().map(|s| s.p).collect()
    }

    pub fn vertical_ps(&self) -> Vec<usize> {
        self.vertical.iter().map(|s| s.p).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.horizontal.is_empty() && self.vertical.is_empty()
    }
}

/// Steps `p` with `1 < p < deg` such that the value classes of a chain of
/// `deg - 1` points are mirror-symmetric about every `j` with
/// `gcd(j, deg) = p`.
fn axis_symmetries(classes: &[usize]) -> Vec<AxisSymmetry> {
    let deg = classes.len() + 1;
    let mut out = Vec::new();
    for p in (2..deg).filter(|p| deg % p == 0) {
        let holds = (1..deg).filter(|j| j.gcd(&deg) == p).all(|j| {
            (1..p).all(|k| classes[j - k - 1] == classes[j + k - 1])
        });
        if holds {
            out.push(AxisSymmetry {
                p,
                positions: (1..deg / p).map(|m| m * p).collect(),
            });
        }
    }
    out
}

/// Horizontal symmetries come from the `g` values, vertical ones from `h`,
/// since `c_{i,j} = c^h_i + c^g_j`.
pub fn detect_symmetry(grid: &JoinGrid) -> SymmetryReport {
    SymmetryReport {
        horizontal: axis_symmetries(grid.g_classes()),
        vertical: axis_symmetries(grid.h_classes()),
    }
}

/// The combinations of vanishing cycles that the orbit of `v_{i,j}` under
/// the one-critical-value monodromy of `x^d + y^e` must contain.
///
/// Terms outside the grid are dropped; empty and repeated combinations are
/// skipped.
pub fn lemma_targets(d: usize, e: usize, i: usize, j: usize) -> Vec<CycleVector> {
    let (rows, cols) = (e - 1, d - 1);
    let n = rows * cols;
    let p = d.gcd(&j);
    let r = e.gcd(&i);
    let mut out: Vec<CycleVector> = Vec::new();
    let mut push = |terms: &[(usize, usize)]| {
        let mut v = vec![0i64; n];
        for &(row, col) in terms {
            if let Ok(k) = index_of(rows, cols, row, col) {
                v[k - 1] += 1;
            }
        }
        if v.iter().any(|&x| x != 0) {
            let v = CycleVector::from_ints(&v);
            if !out.contains(&v) {
                out.push(v);
            }
        }
    };
    for m in 1..d / p {
        let c = m * p;
        push(&[(i, c)]);
        for k in 1..p {
            push(&[(i, c - k), (i, c + k)]);
        }
        for k in 1..p {
            push(&[(i - 1, c - k), (i - 1, c + k), (i + 1, c - k), (i + 1, c + k)]);
        }
    }
    for m in 1..e / r {
        let row = m * r;
        push(&[(row, j)]);
        for l in 1..r {
            push(&[(row - l, j), (row + l, j)]);
        }
        for l in 1..r {
            push(&[(row - l, j - 1), (row + l, j - 1), (row - l, j + 1), (row + l, j + 1)]);
        }
    }
    out
}
