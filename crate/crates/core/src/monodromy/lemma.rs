use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::symmetry::lemma_targets;
use super::MonodromyError;
use crate::dynkin::{position_of, IntersectionMatrix};
use crate::exactlin::eigen::{to_f64, DEFAULT_SEPARATION_TOL, DEFAULT_SUPPORT_TOL};
use crate::exactlin::{krylov_span_certified, member, CycleVector, EigenBasis, EigenStatus, IntMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Exact,
    Eigen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// A lemma combination lies outside the Krylov span.
    NotInSpan,
    /// Exact rank and eigen support disagree on a spot-checked cycle.
    BackendDisagreement,
    /// The eigenvalues are too close for the eigen backend to decide.
    Unreliable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaFailure {
    pub cycle: (usize, usize),
    pub combination: String,
    pub kind: FailureKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub d: usize,
    pub e: usize,
    pub backend: Backend,
    pub cycles: usize,
    pub targets_checked: usize,
    /// Krylov rank (or eigen support size) per cycle, column-major.
    pub ranks: Vec<usize>,
    pub failures: Vec<LemmaFailure>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaOptions {
    pub eigen_tol: f64,
    pub separation_tol: f64,
    /// Fraction of cycles re-checked with the exact backend when running
    /// the eigen backend.
    pub spot_check_fraction: f64,
    pub allow_large_gcd: bool,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions {
            eigen_tol: DEFAULT_SUPPORT_TOL,
            separation_tol: DEFAULT_SEPARATION_TOL,
            spot_check_fraction: 0.0,
            allow_large_gcd: false,
        }
    }
}

/// `v(1,1) + v(1,3)` style rendering of an integer combination.
pub(crate) fn describe_combination(v: &CycleVector, rows: usize, cols: usize) -> String {
    let mut parts = Vec::new();
    for (k, c) in v.entries().iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let (r, col) = position_of(rows, cols, k + 1).expect("index in range");
        let coeff = if num_traits::One::is_one(c) { String::new() } else { format!("{c}*") };
        parts.push(format!("{coeff}v({r},{col})"));
    }
    parts.join(" + ")
}

fn check_degrees(d: usize, e: usize, allow_large_gcd: bool) -> Result<(), MonodromyError> {
    if d < 2 || e < 2 {
        return Err(MonodromyError::DegreeTooSmall { d, e });
    }
    let gcd = d.gcd(&e);
    if gcd > 2 && !allow_large_gcd {
        return Err(MonodromyError::GcdOutOfRange { d, e, gcd });
    }
    Ok(())
}

struct CycleOutcome {
    rank: usize,
    targets: usize,
    failures: Vec<LemmaFailure>,
}

fn exact_cycle(psi: &IntMatrix, rows: usize, cols: usize, d: usize, e: usize, k: usize) -> Result<CycleOutcome, MonodromyError> {
    let (i, j) = position_of(rows, cols, k)?;
    let n = psi.dim();
    let span = krylov_span_certified(psi, &CycleVector::unit(n, k - 1))?;
    let targets = lemma_targets(d, e, i, j);
    let mut failures = Vec::new();
    for t in &targets {
        if !member(&span, t)? {
            failures.push(LemmaFailure {
                cycle: (i, j),
                combination: describe_combination(t, rows, cols),
                kind: FailureKind::NotInSpan,
            });
        }
    }
    Ok(CycleOutcome {
        rank: span.rank(),
        targets: targets.len(),
        failures,
    })
}

fn eigen_cycle(basis: &EigenBasis, rows: usize, cols: usize, d: usize, e: usize, k: usize, tol: f64) -> CycleOutcome {
    let (i, j) = position_of(rows, cols, k).expect("index in range");
    let n = basis.dim();
    let mut seed = vec![0.0; n];
    seed[k - 1] = 1.0;
    let support = basis.support_indices(&seed, tol);
    let targets = lemma_targets(d, e, i, j);
    let mut failures = Vec::new();
    for t in &targets {
        let s = basis.support_indices(&to_f64(t), tol);
        if !s.iter().all(|l| support.binary_search(l).is_ok()) {
            failures.push(LemmaFailure {
                cycle: (i, j),
                combination: describe_combination(t, rows, cols),
                kind: FailureKind::NotInSpan,
            });
        }
    }
    CycleOutcome {
        rank: support.len(),
        targets: targets.len(),
        failures,
    }
}

/// Deterministic subset of roughly `fraction` of the cycles `1..=n`.
pub(crate) fn spot_check_cycles(n: usize, fraction: f64) -> Vec<usize> {
    if fraction <= 0.0 || n == 0 {
        return Vec::new();
    }
    let stride = ((1.0 / fraction).ceil() as usize).max(1);
    (1..=n).step_by(stride).collect()
}

/// Checks, for `x^d + y^e`, that the Krylov span of every vanishing cycle
/// contains its lemma combinations.
pub fn verify_lemma(d: usize, e: usize, backend: Backend) -> Result<LemmaReport, MonodromyError> {
    verify_lemma_with(d, e, backend, &LemmaOptions::default())
}

pub fn verify_lemma_with(
    d: usize,
    e: usize,
    backend: Backend,
    opts: &LemmaOptions,
) -> Result<LemmaReport, MonodromyError> {
    check_degrees(d, e, opts.allow_large_gcd)?;
    let psi_full = IntersectionMatrix::model(d, e);
    let (rows, cols) = (psi_full.rows(), psi_full.cols());
    let psi = psi_full.into_matrix();
    let n = psi.dim();
    let outcomes: Vec<CycleOutcome> = match backend {
        Backend::Exact => (1..=n)
            .into_par_iter()
            .map(|k| exact_cycle(&psi, rows, cols, d, e, k))
            .collect::<Result<_, _>>()?,
        Backend::Eigen => {
            let basis = EigenBasis::with_separation(&psi, opts.separation_tol)?;
            if let EigenStatus::Unreliable { .. } = basis.status() {
                let failures = vec![LemmaFailure {
                    cycle: (0, 0),
                    combination: format!("minimum eigenvalue gap {:e}", basis.min_gap()),
                    kind: FailureKind::Unreliable,
                }];
                return Ok(LemmaReport {
                    d,
                    e,
                    backend,
                    cycles: n,
                    targets_checked: 0,
                    ranks: Vec::new(),
                    failures,
                });
            }
            let mut outcomes: Vec<CycleOutcome> = (1..=n)
                .into_par_iter()
                .map(|k| eigen_cycle(&basis, rows, cols, d, e, k, opts.eigen_tol))
                .collect();
            for k in spot_check_cycles(n, opts.spot_check_fraction) {
                let exact = exact_cycle(&psi, rows, cols, d, e, k)?;
                if exact.rank != outcomes[k - 1].rank || exact.failures != outcomes[k - 1].failures {
                    let (i, j) = position_of(rows, cols, k)?;
                    let eigen_rank = outcomes[k - 1].rank;
                    outcomes[k - 1].failures.push(LemmaFailure {
                        cycle: (i, j),
                        combination: format!("exact rank {} vs eigen support {eigen_rank}", exact.rank),
                        kind: FailureKind::BackendDisagreement,
                    });
                }
            }
            outcomes
        }
    };
    let mut report = LemmaReport {
        d,
        e,
        backend,
        cycles: n,
        targets_checked: 0,
        ranks: Vec::with_capacity(n),
        failures: Vec::new(),
    };
    for o in outcomes {
        report.targets_checked += o.targets;
        report.ranks.push(o.rank);
        report.failures.extend(o.failures);
    }
    Ok(report)
}

/// Exact Krylov rank against eigen support size for one cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleComparison {
    pub cycle: (usize, usize),
    pub exact_rank: usize,
    pub eigen_support: usize,
    pub reliable: bool,
}

impl CycleComparison {
    pub fn agrees(&self) -> bool {
        self.exact_rank == self.eigen_support
    }
}

/// Compares both backends on every cycle of `x^d + y^e`.
pub fn cross_validate(d: usize, e: usize, tol: f64) -> Result<Vec<CycleComparison>, MonodromyError> {
    check_degrees(d, e, false)?;
    let model = IntersectionMatrix::model(d, e);
    let (rows, cols) = (model.rows(), model.cols());
    let psi = model.into_matrix();
    let n = psi.dim();
    let basis = EigenBasis::new(&psi)?;
    let reliable = basis.status() == EigenStatus::Reliable;
    (1..=n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = position_of(rows, cols, k)?;
            let v = CycleVector::unit(n, k - 1);
            let exact_rank = krylov_span_certified(&psi, &v)?.rank();
            let eigen_support = basis.support(&v, tol)?.support_dim;
            Ok(CycleComparison {
                cycle: (i, j),
                exact_rank,
                eigen_support,
                reliable,
            })
        })
        .collect()
}
