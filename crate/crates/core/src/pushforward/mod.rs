//! The map on fiber homology induced by `π(x, y) = (g₁(x), y)` when
//! `g = g₂ ∘ g₁`.
//!
//! A join cycle is the join of a 0-cycle of `g` with one of `h`, so `π_*`
//! acts column by column. A critical point of `g` that is critical for `g₁`
//! has its two merging preimages sent to the same point and the column dies.
//! Every other critical point sits over a critical point `z*` of `g₂`, and
//! its column goes to the column of `z*` with the orientation of `g₁` there.

use serde::Serialize;
use thiserror::Error;

use crate::dynkin::index_of;
use crate::exactlin::{null_space, rref_basis, CycleVector, LinalgError, Rat, SubspaceBasis};
use crate::monodromy::{JoinSystem, MonodromyError};
use crate::realpoly::{critical_data, outer_for_inner, PolyError, Poly, RealAlgebraic, RealPoly, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PushforwardError {
    #[error("g is not of the form g2(g1(x)) with deg g2 >= 2")]
    NotAComposition,
    #[error("a critical point of g1 maps onto a critical point of g2")]
    DegenerateOverlap,
    #[error("column {col} is not a multiple of {step}")]
    NotSymmetricPosition { col: usize, step: usize },
    #[error("critical point {col} of g matches no critical point of g2")]
    Unmatched { col: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
}

impl From<crate::dynkin::DynkinError> for PushforwardError {
    fn from(e: crate::dynkin::DynkinError) -> Self {
        PushforwardError::Monodromy(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    /// The critical point is critical for `g₁`.
    Collapsed,
    /// Sent to target column `target` (1-based) with sign `sign`.
    Mapped { target: usize, sign: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PushforwardMatrix {
    /// `(e - 1, d - 1)`.
    pub source_dims: (usize, usize),
    /// `(e - 1, deg g₂ - 1)`.
    pub target_dims: (usize, usize),
    /// Rows index target join cycles, columns source join cycles.
    pub matrix: Vec<Vec<i64>>,
    pub column_kinds: Vec<ColumnKind>,
    pub outer: RealPoly,
}

impl PushforwardMatrix {
    pub fn source_dim(&self) -> usize {
        self.source_dims.0 * self.source_dims.1
    }

    pub fn target_dim(&self) -> usize {
        self.target_dims.0 * self.target_dims.1
    }

    /// Image of a source cycle vector.
    pub fn apply(&self, v: &CycleVector) -> Result<CycleVector, LinalgError> {
        if v.dim() != self.source_dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.source_dim(),
                found: v.dim(),
            });
        }
        let entries = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v.entries())
                    .filter(|(a, _)| **a != 0)
                    .map(|(a, x)| x * Rat::from_integer((*a).into()))
                    .sum()
            })
            .collect();
        Ok(CycleVector::from_rats(entries))
    }

    fn row_vectors(&self) -> Vec<CycleVector> {
        self.matrix.iter().map(|r| CycleVector::from_ints(r)).collect()
    }

    /// Rank of the matrix.
    pub fn rank(&self) -> Result<usize, LinalgError> {
        Ok(rref_basis(self.source_dim(), &self.row_vectors())?.rank())
    }

    pub fn is_surjective(&self) -> Result<bool, LinalgError> {
        Ok(self.rank()? == self.target_dim())
    }

    /// The plain-text matrix format with a `rows cols` header, since `P` is
    /// rectangular.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.target_dim(), self.source_dim());
        for row in &self.matrix {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Index of the critical point of `g₂` equal to `g₁(x)`.
fn match_target(x: &RealAlgebraic, g1: &Poly, targets: &[RealAlgebraic]) -> Option<usize> {
    for (m, z) in targets.iter().enumerate() {
        let hit = if z.is_exact() {
            let shifted = g1 - &Poly::constant(z.lo().clone());
            x.sign_of(&shifted) == 0
        } else {
            // Isolation endpoints are never roots of g₂', so they cannot
            // equal g₁(x).
            let above = g1 - &Poly::constant(z.lo().clone());
            let below = g1 - &Poly::constant(z.hi().clone());
            x.sign_of(&above) > 0 && x.sign_of(&below) < 0
        };
        if hit {
            return Some(m);
        }
    }
    None
}

/// Matrix of `π_*` for `g = g₂ ∘ g₁`, with `g₂` recovered from `g` and `g1`.
pub fn pushforward_matrix(g: &RealPoly, g1: &RealPoly, h: &RealPoly) -> Result<PushforwardMatrix, PushforwardError> {
    let g2 = outer_for_inner(g, g1).ok_or(PushforwardError::NotAComposition)?;
    if g2.degree() < 2 {
        return Err(PushforwardError::NotAComposition);
    }
    let dg1 = g1.derivative();
    if !Poly::gcd(&dg1, &g2.derivative().compose(g1)).is_constant() {
        return Err(PushforwardError::DegenerateOverlap);
    }
    let g_data = critical_data(g, Role::G)?;
    let g2_data = critical_data(&g2, Role::G)?;
    let h_data = critical_data(h, Role::H)?;
    let rows = h_data.len();
    let (cols, tcols) = (g_data.len(), g2_data.len());

    let mut column_kinds = Vec::with_capacity(cols);
    for (c, x) in g_data.critical_points.iter().enumerate() {
        let slope = x.sign_of(&dg1);
        if slope == 0 {
            column_kinds.push(ColumnKind::Collapsed);
            continue;
        }
        let m = match_target(x, g1, &g2_data.critical_points).ok_or(PushforwardError::Unmatched { col: c + 1 })?;
        column_kinds.push(ColumnKind::Mapped {
            target: m + 1,
            sign: slope as i64,
        });
    }

    let mut matrix = vec![vec![0i64; rows * cols]; rows * tcols];
    for (c, kind) in column_kinds.iter().enumerate() {
        if let ColumnKind::Mapped { target, sign } = *kind {
            for r in 1..=rows {
                let src = index_of(rows, cols, r, c + 1)?;
                let dst = index_of(rows, tcols, r, target)?;
                matrix[dst - 1][src - 1] = sign;
            }
        }
    }
    Ok(PushforwardMatrix {
        source_dims: (rows, cols),
        target_dims: (rows, tcols),
        matrix,
        column_kinds,
        outer: g2,
    })
}

/// Exact kernel of `π_*`.
pub fn kernel_basis(p: &PushforwardMatrix) -> Result<SubspaceBasis, LinalgError> {
    null_space(p.source_dim(), &p.row_vectors())
}

/// Checks that the kernel of `π_*` is the orbit span of the cycle at
/// `(i, j)`, where `j` must be a multiple of `deg g / deg g₁`.
pub fn verify_kernel_lemma(
    g: &RealPoly,
    g1: &RealPoly,
    h: &RealPoly,
    cycle: (usize, usize),
) -> Result<bool, PushforwardError> {
    let system = JoinSystem::new(g, h)?;
    verify_kernel_lemma_in(&system, g1, cycle)
}

/// As [`verify_kernel_lemma`], reusing a prepared system for `g + h`.
pub fn verify_kernel_lemma_in(
    system: &JoinSystem,
    g1: &RealPoly,
    cycle: (usize, usize),
) -> Result<bool, PushforwardError> {
    let (i, j) = cycle;
    let (d, a) = (system.g.degree(), g1.degree());
    if a < 2 || d % a != 0 {
        return Err(PushforwardError::NotAComposition);
    }
    let step = d / a;
    if j % step != 0 {
        return Err(PushforwardError::NotSymmetricPosition { col: j, step });
    }
    system.grid.index_of(i, j)?;
    let p = pushforward_matrix(&system.g, g1, &system.h)?;
    let kernel = kernel_basis(&p)?;
    let orbit = system.orbit(i, j)?;
    Ok(kernel.contains_subspace(&orbit)? && orbit.contains_subspace(&kernel)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realpoly::parse_poly;

    fn p(s: &str) -> RealPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn double_well_columns() {
        let pf = pushforward_matrix(&p("(x^2-1)^2"), &p("x^2"), &p("y^3-3y")).unwrap();
        assert_eq!(pf.source_dims, (2, 3));
        assert_eq!(pf.target_dims, (2, 1));
        assert_eq!(
            pf.column_kinds,
            vec![
                ColumnKind::Mapped { target: 1, sign: -1 },
                ColumnKind::Collapsed,
                ColumnKind::Mapped { target: 1, sign: 1 },
            ]
        );
        assert_eq!(pf.matrix, vec![vec![-1, 0, 0, 0, 1, 0], vec![0, -1, 0, 0, 0, 1]]);
        assert_eq!(pf.outer, p("z^2 - 2z + 1"));
        assert_eq!(pf.to_text(), "2 6\n-1 0 0 0 1 0\n0 -1 0 0 0 1\n");
        assert!(pf.is_surjective().unwrap());
    }

    #[test]
    fn double_well_kernel() {
        let pf = pushforward_matrix(&p("(x^2-1)^2"), &p("x^2"), &p("y^3-3y")).unwrap();
        let k = kernel_basis(&pf).unwrap();
        assert_eq!(k.rank(), 4);
        let expected = rref_basis(
            6,
            &[
                CycleVector::from_ints(&[0, 0, 1, 0, 0, 0]),
                CycleVector::from_ints(&[0, 0, 0, 1, 0, 0]),
                CycleVector::from_ints(&[1, 0, 0, 0, 1, 0]),
                CycleVector::from_ints(&[0, 1, 0, 0, 0, 1]),
            ],
        )
        .unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn lemma_on_double_well() {
        let (g, g1, h) = (p("(x^2-1)^2"), p("x^2"), p("y^3-3y"));
        assert!(verify_kernel_lemma(&g, &g1, &h, (1, 2)).unwrap());
        assert!(verify_kernel_lemma(&g, &g1, &h, (2, 2)).unwrap());
        assert_eq!(
            verify_kernel_lemma(&g, &g1, &h, (1, 1)).unwrap_err(),
            PushforwardError::NotSymmetricPosition { col: 1, step: 2 }
        );
    }

    #[test]
    fn not_a_composition() {
        let h = p("y^2");
        assert_eq!(
            pushforward_matrix(&p("x^4 - 2x^2 + x"), &p("x^2"), &h).unwrap_err(),
            PushforwardError::NotAComposition
        );
        assert_eq!(
            pushforward_matrix(&p("x^4 - 2x^2"), &p("x^4 - 2x^2"), &h).unwrap_err(),
            PushforwardError::NotAComposition
        );
    }

    #[test]
    fn overlapping_criticality() {
        // g₂ is critical at g₁(0) = 0, where g₁ is critical too.
        let g = p("(x^2)^3 - 3*(x^2)^2");
        assert_eq!(
            pushforward_matrix(&g, &p("x^2"), &p("y^2")).unwrap_err(),
            PushforwardError::DegenerateOverlap
        );
    }

    #[test]
    fn cubic_inner() {
        // g = (g₁)² - 1 with g₁ = x³ - 3x: critical points of g₁ at ±1 collapse.
        let g = p("(x^3-3x)^2 - 1");
        let pf = pushforward_matrix(&g, &p("x^3 - 3x"), &p("y^2")).unwrap();
        let collapsed = pf.column_kinds.iter().filter(|k| **k == ColumnKind::Collapsed).count();
        assert_eq!(collapsed, 2);
        assert_eq!(pf.target_dims, (1, 1));
        let signs: i64 = pf.matrix[0].iter().sum();
        assert_eq!(signs, 1);
        assert_eq!(kernel_basis(&pf).unwrap().rank(), 4);
        for j in [2, 4] {
            assert!(verify_kernel_lemma(&g, &p("x^3 - 3x"), &p("y^2"), (1, j)).unwrap());
        }
    }
}
