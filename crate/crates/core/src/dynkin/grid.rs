use std::cmp::Ordering;

use serde::Serialize;

use super::{index_of, position_of, ChainDiagram, DynkinError, Role};
use crate::exactlin::Rat;
use crate::realpoly::{CriticalData, RealAlgebraic};

/// Interval halvings tried before falling back to exact sum polynomials.
const SEPARATION_STEPS: usize = 48;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub row: usize,
    pub col: usize,
    pub index: usize,
    pub h_label: usize,
    pub g_label: usize,
    /// Approximation of `c^h_i + c^g_j`.
    pub value: f64,
    /// Position of this cell's coincidence group in [`JoinGrid::groups`].
    pub group: usize,
}

/// The `(e - 1) × (d - 1)` arrangement of join cycles and the partition of
/// its cells by exactly equal critical value of `f`.
#[derive(Clone, Debug, Serialize)]
pub struct JoinGrid {
    hchain: ChainDiagram,
    gchain: ChainDiagram,
    #[serde(skip)]
    h_values: Vec<RealAlgebraic>,
    #[serde(skip)]
    g_values: Vec<RealAlgebraic>,
    h_classes: Vec<usize>,
    g_classes: Vec<usize>,
    cells: Vec<GridCell>,
    groups: Vec<Vec<usize>>,
}

fn classes_of(values: &[RealAlgebraic]) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(values.len());
    for (k, v) in values.iter().enumerate() {
        match reps.iter().position(|&r| values[r].equals(v)) {
            Some(c) => out.push(c),
            None => {
                out.push(reps.len());
                reps.push(k);
            }
        }
    }
    out
}

fn sums_equal(
    a1: &RealAlgebraic,
    b1: &RealAlgebraic,
    a2: &RealAlgebraic,
    b2: &RealAlgebraic,
) -> Result<bool, DynkinError> {
    let mut v = [a1.clone(), b1.clone(), a2.clone(), b2.clone()];
    for _ in 0..SEPARATION_STEPS {
        let lo1 = v[0].lo() + v[1].lo();
        let hi1 = v[0].hi() + v[1].hi();
        let lo2 = v[2].lo() + v[3].lo();
        let hi2 = v[2].hi() + v[3].hi();
        if hi1 < lo2 || hi2 < lo1 {
            return Ok(false);
        }
        if v.iter().all(RealAlgebraic::is_exact) {
            return Ok(lo1 == lo2);
        }
        v.iter_mut().for_each(RealAlgebraic::refine);
    }
    let undecided = |_| DynkinError::UndecidedCoincidence;
    let s1 = v[0].add(&v[1]).map_err(undecided)?;
    let s2 = v[2].add(&v[3]).map_err(undecided)?;
    Ok(s1.equals(&s2))
}

fn rational_ranks(values: &[Rat], role: Role) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let o = values[a].cmp(&values[b]);
        let o = if role == Role::H { o.reverse() } else { o };
        o.then(a.cmp(&b))
    });
    let mut rank = vec![0; values.len()];
    for (r, &pos) in order.iter().enumerate() {
        rank[pos] = r + 1;
    }
    rank
}

impl JoinGrid {
    /// Grid from chains and the critical values of `h` and `g` in spatial
    /// order.
    pub fn new(
        hchain: ChainDiagram,
        gchain: ChainDiagram,
        h_values: Vec<RealAlgebraic>,
        g_values: Vec<RealAlgebraic>,
    ) -> Result<Self, DynkinError> {
        let h_classes = classes_of(&h_values);
        let g_classes = classes_of(&g_values);
        Self::build(hchain, gchain, h_values, h_classes, g_values, g_classes)
    }

    /// Combinatorial model with prescribed rational critical values, listed
    /// in spatial order; chain labels are ranked from the values.
    pub fn from_rational_values(h_values: &[Rat], g_values: &[Rat]) -> Result<Self, DynkinError> {
        let hchain = ChainDiagram::new(rational_ranks(h_values, Role::H), Role::H)?;
        let gchain = ChainDiagram::new(rational_ranks(g_values, Role::G), Role::G)?;
        let lift = |v: &[Rat]| v.iter().cloned().map(RealAlgebraic::from_rational).collect();
        Self::new(hchain, gchain, lift(h_values), lift(g_values))
    }

    fn build(
        hchain: ChainDiagram,
        gchain: ChainDiagram,
        h_values: Vec<RealAlgebraic>,
        h_classes: Vec<usize>,
        g_values: Vec<RealAlgebraic>,
        g_classes: Vec<usize>,
    ) -> Result<Self, DynkinError> {
        if hchain.size() != h_values.len() || gchain.size() != g_values.len() {
            return Err(DynkinError::ChainMismatch);
        }
        let (rows, cols) = (hchain.size(), gchain.size());
        let mut cells: Vec<GridCell> = Vec::with_capacity(rows * cols);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for c in 1..=cols {
            for r in 1..=rows {
                let k = cells.len() + 1;
                let mut group = None;
                for (gi, members) in groups.iter().enumerate() {
                    let rep = &cells[members[0] - 1];
                    let (r0, c0) = (rep.row, rep.col);
                    let same_h = h_classes[r - 1] == h_classes[r0 - 1];
                    let same_g = g_classes[c - 1] == g_classes[c0 - 1];
                    let equal = if same_h || same_g {
                        same_h && same_g
                    } else {
                        sums_equal(&h_values[r - 1], &g_values[c - 1], &h_values[r0 - 1], &g_values[c0 - 1])?
                    };
                    if equal {
                        group = Some(gi);
                        break;
                    }
                }
                let group = group.unwrap_or_else(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[group].push(k);
                cells.push(GridCell {
                    row: r,
                    col: c,
                    index: k,
                    h_label: hchain.label(r),
                    g_label: gchain.label(c),
                    value: h_values[r - 1].to_f64() + g_values[c - 1].to_f64(),
                    group,
                });
            }
        }
        Ok(JoinGrid {
            hchain,
            gchain,
            h_values,
            g_values,
            h_classes,
            g_classes,
            cells,
            groups,
        })
    }

    pub fn rows(&self) -> usize {
        self.hchain.size()
    }

    pub fn cols(&self) -> usize {
        self.gchain.size()
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn hchain(&self) -> &ChainDiagram {
        &self.hchain
    }

    pub fn gchain(&self) -> &ChainDiagram {
        &self.gchain
    }

    pub fn h_values(&self) -> &[RealAlgebraic] {
        &self.h_values
    }

    pub fn g_values(&self) -> &[RealAlgebraic] {
        &self.g_values
    }

    /// Value class of each `h` position; equal classes mean equal values.
    pub fn h_classes(&self) -> &[usize] {
        &self.h_classes
    }

    pub fn g_classes(&self) -> &[usize] {
        &self.g_classes
    }

    /// Cells in column-major order.
    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> Result<&GridCell, DynkinError> {
        Ok(&self.cells[self.index_of(row, col)? - 1])
    }

    /// Groups of 1-based cycle indices with equal critical value, each
    /// ascending, ordered by their smallest index.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn index_of(&self, row: usize, col: usize) -> Result<usize, DynkinError> {
        index_of(self.rows(), self.cols(), row, col)
    }

    pub fn position_of(&self, k: usize) -> Result<(usize, usize), DynkinError> {
        position_of(self.rows(), self.cols(), k)
    }

    /// Groups as lists of `(row, col)` cells.
    pub fn group_cells(&self) -> Vec<Vec<(usize, usize)>> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&k| (self.cells[k - 1].row, self.cells[k - 1].col)).collect())
            .collect()
    }

    /// Exact order of the critical values of cells `a` and `b` (1-based).
    pub fn compare_cells(&self, a: usize, b: usize) -> Result<Ordering, DynkinError> {
        let (ca, cb) = (&self.cells[a - 1], &self.cells[b - 1]);
        if ca.group == cb.group {
            return Ok(Ordering::Equal);
        }
        let sa = self.h_values[ca.row - 1]
            .add(&self.g_values[ca.col - 1])
            .map_err(|_| DynkinError::UndecidedCoincidence)?;
        let sb = self.h_values[cb.row - 1]
            .add(&self.g_values[cb.col - 1])
            .map_err(|_| DynkinError::UndecidedCoincidence)?;
        Ok(sa.cmp_exact(&sb))
    }
}

/// Grid of `f = g + h` from the chains and critical data of both factors.
pub fn join_grid(
    hchain: &ChainDiagram,
    gchain: &ChainDiagram,
    hcd: &CriticalData,
    gcd: &CriticalData,
) -> Result<JoinGrid, DynkinError> {
    JoinGrid::build(
        hchain.clone(),
        gchain.clone(),
        hcd.critical_values.clone(),
        hcd.value_class.clone(),
        gcd.critical_values.clone(),
        gcd.value_class.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynkin::chain_diagram;
    use crate::realpoly::{critical_data, parse_poly};

    fn grid(g: &str, h: &str) -> JoinGrid {
        let gcd = critical_data(&parse_poly(g).unwrap(), Role::G).unwrap();
        let hcd = critical_data(&parse_poly(h).unwrap(), Role::H).unwrap();
        join_grid(&chain_diagram(&hcd, Role::H), &chain_diagram(&gcd, Role::G), &hcd, &gcd).unwrap()
    }

    #[test]
    fn worked_example_is_generic() {
        let gr = grid("(x+3)*(x+2)*(x+1)*(x-1)*(x-2)*(x-4)", "(3-y)*(y-1)*(y+1)*(y+2)");
        assert_eq!((gr.rows(), gr.cols()), (3, 5));
        assert_eq!(gr.groups().len(), 15);
    }

    #[test]
    fn double_well_plus_square() {
        let gr = grid("(x^2-1)^2", "y^2");
        assert_eq!((gr.rows(), gr.cols()), (1, 3));
        assert_eq!(gr.group_cells(), vec![vec![(1, 1), (1, 3)], vec![(1, 2)]]);
    }

    #[test]
    fn single_cell() {
        let gr = grid("x^2", "y^2 + 1");
        assert_eq!(gr.groups(), &[vec![1]]);
    }

    #[test]
    fn cross_coincidence_between_rows() {
        // h values 0, -1 and g values 1, 2: cells (1,1) and (2,2) both give 1.
        let r = |x: i64| Rat::from_integer(x.into());
        let gr = JoinGrid::from_rational_values(&[r(0), r(-1)], &[r(1), r(2)]).unwrap();
        assert_eq!(gr.group_cells(), vec![vec![(1, 1), (2, 2)], vec![(2, 1)], vec![(1, 2)]]);
    }

    #[test]
    fn irrational_cross_coincidence() {
        // h = -g with irrational critical values: both diagonal cells are 0.
        let gr = grid("x^3 - 2x", "-(y^3 - 2y)");
        assert_eq!(gr.groups().len(), 3);
        assert_eq!(gr.compare_cells(1, 4).unwrap(), Ordering::Equal);
    }
}
