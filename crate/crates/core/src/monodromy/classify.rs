use num_integer::Integer;
use serde::Serialize;

use super::symmetry::detect_symmetry;
use super::{JoinSystem, MonodromyError};
use crate::exactlin::SubspaceBasis;
use crate::pushforward::verify_kernel_lemma_in;
use crate::realpoly::{decompose, Decomposition, RealPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Symmetry of the `g` values; positions are columns.
    Horizontal,
    /// Symmetry of the `h` values; positions are rows.
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    FullHomology,
    /// The orbit is a proper subspace, explained by `g = g₂ ∘ g₁` (or the
    /// same for `h` on the vertical axis) with `deg g₁ = deg / p`.
    Symmetric {
        axis: Axis,
        p: usize,
        decomposition: Decomposition,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub cycle: (usize, usize),
    pub index: usize,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub orbit_rank: usize,
    pub ambient_rank: usize,
    pub orbit_basis: SubspaceBasis,
    /// Whether the orbit equals the pushforward kernel; absent for full
    /// orbits.
    pub kernel_check: Option<bool>,
}

impl ClassificationReport {
    pub fn is_full(&self) -> bool {
        self.verdict == Verdict::FullHomology
    }
}

/// Classifies the orbit of the cycle in grid cell `(i, j)` of `g(x) + h(y)`.
pub fn classify_cycle(g: &RealPoly, h: &RealPoly, i: usize, j: usize) -> Result<ClassificationReport, MonodromyError> {
    let (d, e) = (g.degree(), h.degree());
    let gcd = d.gcd(&e);
    if gcd > 2 {
        return Err(MonodromyError::GcdOutOfRange { d, e, gcd });
    }
    let system = JoinSystem::new(g, h)?;
    classify_grid_cycle(&system, i, j)
}

/// As [`classify_cycle`] on a prepared system, without the degree check.
pub fn classify_grid_cycle(system: &JoinSystem, i: usize, j: usize) -> Result<ClassificationReport, MonodromyError> {
    let index = system.grid.index_of(i, j)?;
    let orbit = system.orbit(i, j)?;
    let ambient_rank = system.dim();
    let orbit_rank = orbit.rank();
    let report = |verdict, kernel_check| ClassificationReport {
        cycle: (i, j),
        index,
        verdict,
        orbit_rank,
        ambient_rank,
        orbit_basis: orbit.clone(),
        kernel_check,
    };
    if orbit.is_full() {
        return Ok(report(Verdict::FullHomology, None));
    }

    let symmetry = detect_symmetry(&system.grid);
    let candidates = symmetry
        .horizontal
        .iter()
        .filter(|s| j % s.p == 0)
        .map(|s| (Axis::Horizontal, s.p))
        .chain(
            symmetry
                .vertical
                .iter()
                .filter(|s| i % s.p == 0)
                .map(|s| (Axis::Vertical, s.p)),
        );
    let mut swapped: Option<JoinSystem> = None;
    for (axis, p) in candidates {
        let (poly, deg) = match axis {
            Axis::Horizontal => (&system.g, system.g.degree()),
            Axis::Vertical => (&system.h, system.h.degree()),
        };
        let Some(decomposition) = decompose(poly, deg / p)? else {
            continue;
        };
        let holds = match axis {
            Axis::Horizontal => verify_kernel_lemma_in(system, &decomposition.inner, (i, j))?,
            Axis::Vertical => {
                // The vertical case is the horizontal one for h(x) + g(y).
                if swapped.is_none() {
                    swapped = Some(JoinSystem::new(&system.h, &system.g)?);
                }
                let other = swapped.as_ref().expect("just built");
                verify_kernel_lemma_in(other, &decomposition.inner, (j, i))?
            }
        };
        if holds {
            return Ok(report(Verdict::Symmetric { axis, p, decomposition }, Some(true)));
        }
    }
    Err(MonodromyError::ContractViolation {
        row: i,
        col: j,
        orbit_rank,
        ambient_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realpoly::parse_poly;

    fn p(s: &str) -> RealPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn double_well_symmetric_column() {
        let (g, h) = (p("(x^2-1)^2"), p("y^3-3y"));
        let r = classify_cycle(&g, &h, 1, 2).unwrap();
        match &r.verdict {
            Verdict::Symmetric { axis, p: step, decomposition } => {
                assert_eq!(*axis, Axis::Horizontal);
                assert_eq!(*step, 2);
                assert_eq!(decomposition.inner, p("x^2"));
                assert_eq!(decomposition.outer, p("z^2 - 2z + 1"));
            }
            v => panic!("unexpected {v:?}"),
        }
        assert_eq!((r.orbit_rank, r.ambient_rank), (4, 6));
        assert_eq!(r.kernel_check, Some(true));
        assert_eq!(classify_cycle(&g, &h, 2, 2).unwrap().orbit_rank, 4);
    }

    #[test]
    fn double_well_other_columns_are_full() {
        let (g, h) = (p("(x^2-1)^2"), p("y^3-3y"));
        for (i, j) in [(1, 1), (2, 1), (1, 3), (2, 3)] {
            let r = classify_cycle(&g, &h, i, j).unwrap();
            assert!(r.is_full(), "({i},{j})");
            assert_eq!(r.orbit_rank, 6);
        }
    }

    #[test]
    fn vertical_axis() {
        let (g, h) = (p("x^3-3x"), p("(y^2-1)^2"));
        let r = classify_cycle(&g, &h, 2, 1).unwrap();
        assert!(matches!(r.verdict, Verdict::Symmetric { axis: Axis::Vertical, p: 2, .. }));
        assert!(classify_cycle(&g, &h, 1, 1).unwrap().is_full());
    }

    #[test]
    fn worked_example_is_full() {
        let g = p("(x+3)*(x+2)*(x+1)*(x-1)*(x-2)*(x-4)");
        let h = p("(3-y)*(y-1)*(y+1)*(y+2)");
        let system = JoinSystem::new(&g, &h).unwrap();
        for (i, j) in [(1, 1), (2, 2), (3, 5), (2, 4)] {
            assert!(classify_grid_cycle(&system, i, j).unwrap().is_full());
        }
    }

    #[test]
    fn refuses_large_gcd() {
        let err = classify_cycle(&p("x^3-3x"), &p("y^3-3y"), 1, 1).unwrap_err();
        assert_eq!(err, MonodromyError::GcdOutOfRange { d: 3, e: 3, gcd: 3 });
    }

    #[test]
    fn report_serializes_flat() {
        let r = classify_cycle(&p("(x^2-1)^2"), &p("y^3-3y"), 1, 1).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "full_homology");
        assert_eq!(v["orbit_rank"], 6);
    }
}
