use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::charpoly::value_resultant;
use super::poly::Poly;
use super::roots::{isolate_squarefree, root_bound, RealAlgebraic, SturmSequence, MAX_REFINEMENT, TARGET_BITS};
use super::{PolyError, RealPoly};
use crate::exactlin::Rat;

/// Which axis a polynomial plays: `g` ranks its critical values upward,
/// `h` downward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    G,
    H,
}

/// Critical points and values of a Morse polynomial on the real line.
///
/// Positions are spatial: position `k` (1-based) is the `k`-th critical
/// point from the left. `value_rank[k - 1]` is its critical-value label.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalData {
    pub role: Role,
    pub degree: usize,
    pub critical_points: Vec<RealAlgebraic>,
    pub critical_values: Vec<RealAlgebraic>,
    /// Distinct critical values in increasing order.
    pub distinct_values: Vec<RealAlgebraic>,
    /// For each position, the index of its value in `distinct_values`.
    pub value_class: Vec<usize>,
    /// Blocks of 1-based positions sharing a critical value, ordered by
    /// their first position.
    pub coincidence_partition: Vec<Vec<usize>>,
    pub value_rank: Vec<usize>,
}

impl CriticalData {
    pub fn len(&self) -> usize {
        self.critical_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.critical_points.is_empty()
    }

    pub fn all_distinct(&self) -> bool {
        self.distinct_values.len() == self.len()
    }

    /// Whether the 1-based positions `a` and `b` share a critical value.
    pub fn same_value(&self, a: usize, b: usize) -> bool {
        self.value_class[a - 1] == self.value_class[b - 1]
    }

    /// Same data with the opposite ranking convention.
    pub fn with_role(&self, role: Role) -> CriticalData {
        let mut out = self.clone();
        out.role = role;
        out.value_rank = ranks(&self.value_class, role);
        out
    }
}

fn ranks(value_class: &[usize], role: Role) -> Vec<usize> {
    let mut order: Vec<usize> = (0..value_class.len()).collect();
    order.sort_by(|&a, &b| {
        let by_value = value_class[a].cmp(&value_class[b]);
        let by_value = if role == Role::H { by_value.reverse() } else { by_value };
        by_value.then(a.cmp(&b))
    });
    let mut rank = vec![0; value_class.len()];
    for (r, &pos) in order.iter().enumerate() {
        rank[pos] = r + 1;
    }
    rank
}

/// Values at exact rational critical points need no certificate.
fn rational_values(p: &RealPoly, points: &[RealAlgebraic]) -> (Vec<RealAlgebraic>, Vec<usize>) {
    let exact: Vec<Rat> = points.iter().map(|x| p.eval(x.lo())).collect();
    let mut distinct = exact.clone();
    distinct.sort();
    distinct.dedup();
    let class = exact
        .iter()
        .map(|v| distinct.binary_search(v).expect("present"))
        .collect();
    (distinct.into_iter().map(RealAlgebraic::from_rational).collect(), class)
}

/// Groups critical values by overlapping enclosures until every group holds
/// exactly one root of the value polynomial, whose multiplicity must equal
/// the group size.
fn certified_values(
    p: &RealPoly,
    dp: &Poly,
    points: &[RealAlgebraic],
) -> Result<(Vec<RealAlgebraic>, Vec<usize>), PolyError> {
    let r = value_resultant(dp, p);
    let factors = r.squarefree_factors();
    let sturm = SturmSequence::new(&r.squarefree_part());
    let factor_sturm: Vec<Option<SturmSequence>> = factors
        .iter()
        .map(|f| (!f.is_constant()).then(|| SturmSequence::new(f)))
        .collect();
    let mut points = points.to_vec();

    for _ in 0..MAX_REFINEMENT {
        let boxes: Vec<(Rat, Rat)> = points.iter().map(|x| p.eval_interval(x.lo(), x.hi())).collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| boxes[a].0.cmp(&boxes[b].0));
        let mut clusters: Vec<(Rat, Rat, Vec<usize>)> = Vec::new();
        for k in order {
            let (lo, hi) = &boxes[k];
            match clusters.last_mut() {
                Some((_, chi, members)) if lo <= chi => {
                    if hi > chi {
                        *chi = hi.clone();
                    }
                    members.push(k);
                }
                _ => clusters.push((lo.clone(), hi.clone(), vec![k])),
            }
        }

        let mut settled = true;
        for (lo, hi, members) in &clusters {
            match sturm.count_closed(lo, hi) {
                0 => return Err(PolyError::CoincidenceCertificate),
                1 => {}
                _ => {
                    settled = false;
                    for &k in members {
                        points[k].refine();
                    }
                }
            }
        }
        if !settled {
            continue;
        }

        let mut values = Vec::with_capacity(clusters.len());
        let mut class = vec![0; points.len()];
        for (c, (lo, hi, members)) in clusters.iter().enumerate() {
            let m = factor_sturm
                .iter()
                .position(|s| s.as_ref().is_some_and(|s| s.count_closed(lo, hi) > 0))
                .ok_or(PolyError::CoincidenceCertificate)?
                + 1;
            if m != members.len() {
                return Err(PolyError::CoincidenceCertificate);
            }
            for &k in members {
                class[k] = c;
            }
            values.push(RealAlgebraic::new_unchecked(factors[m - 1].clone(), lo.clone(), hi.clone()));
        }
        return Ok((values, class));
    }
    Err(PolyError::RefinementLimit)
}

/// Computes critical data, certifying coincidences of critical values
/// exactly through the polynomial whose roots are the critical values.
pub fn critical_data(p: &RealPoly, role: Role) -> Result<CriticalData, PolyError> {
    let dp = p.derivative();
    let expected = p.degree() - 1;
    if expected > 0 && !dp.is_squarefree() {
        return Err(PolyError::DegenerateCriticalPoint);
    }
    let mut points = isolate_squarefree(&dp);
    if points.len() != expected {
        return Err(PolyError::NonRealCriticalPoint {
            real: points.len(),
            expected,
        });
    }
    if expected == 0 {
        return Ok(CriticalData {
            role,
            degree: p.degree(),
            critical_points: Vec::new(),
            critical_values: Vec::new(),
            distinct_values: Vec::new(),
            value_class: Vec::new(),
            coincidence_partition: Vec::new(),
            value_rank: Vec::new(),
        });
    }
    let target = root_bound(&dp) / Rat::from_integer(BigInt::one() << TARGET_BITS);
    let mut all_rational = true;
    for x in &mut points {
        x.refine_to(&target);
        all_rational &= x.try_rational();
    }

    let (values, value_class) = if all_rational {
        rational_values(p, &points)
    } else {
        certified_values(p, &dp, &points)?
    };

    let mut coincidence_partition: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; values.len()];
    for (pos, &k) in value_class.iter().enumerate() {
        if block_of[k] == usize::MAX {
            block_of[k] = coincidence_partition.len();
            coincidence_partition.push(Vec::new());
        }
        coincidence_partition[block_of[k]].push(pos + 1);
    }

    Ok(CriticalData {
        role,
        degree: p.degree(),
        critical_values: value_class.iter().map(|&k| values[k].clone()).collect(),
        critical_points: points,
        value_rank: ranks(&value_class, role),
        distinct_values: values,
        value_class,
        coincidence_partition,
    })
}
