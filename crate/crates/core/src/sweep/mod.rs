//! Checkpointed re-verification of the one-critical-value lemma over all
//! admissible degree pairs up to a product bound.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::DEFAULT_SUPPORT_TOL;
use crate::monodromy::{cross_validate, verify_lemma_with, Backend, FailureKind, LemmaFailure, LemmaOptions};

/// Above this `d·e` the automatic backend switches to eigen.
pub const AUTO_EIGEN_PRODUCT: usize = 400;
/// Share of cycles re-checked exactly under the automatic eigen backend.
pub const AUTO_SPOT_CHECK: f64 = 0.05;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoint {path}: {source}")]
    Checkpoint { path: PathBuf, source: io::Error },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepBackend {
    Exact,
    Eigen,
    /// Exact verification plus a per-cycle comparison with the eigen backend.
    Both,
    /// Exact up to `d·e = 400`, eigen with exact spot checks beyond.
    #[default]
    Auto,
}

impl SweepBackend {
    fn for_pair(self, d: usize, e: usize) -> SweepBackend {
        match self {
            SweepBackend::Auto if d * e > AUTO_EIGEN_PRODUCT => SweepBackend::Eigen,
            SweepBackend::Auto => SweepBackend::Exact,
            b => b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub max_product: usize,
    pub gcd_max: usize,
    pub backend: SweepBackend,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub checkpoint_path: Option<PathBuf>,
    pub eigen_tol: f64,
    /// Required for `gcd_max > 2`; such results are exploratory.
    pub experimental_gcd: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_product: 200,
            gcd_max: 2,
            backend: SweepBackend::Auto,
            workers: 1,
            checkpoint_path: None,
            eigen_tol: DEFAULT_SUPPORT_TOL,
            experimental_gcd: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.max_product < 4 {
            return Err(SweepError::InvalidConfig(format!(
                "max_product must be at least 4, got {}",
                self.max_product
            )));
        }
        if self.workers == 0 {
            return Err(SweepError::InvalidConfig("workers must be at least 1".into()));
        }
        if self.gcd_max == 0 {
            return Err(SweepError::InvalidConfig("gcd_max must be at least 1".into()));
        }
        if self.gcd_max > 2 && !self.experimental_gcd {
            return Err(SweepError::InvalidConfig(format!(
                "gcd_max {} exceeds 2; pass the experimental gcd flag to explore",
                self.gcd_max
            )));
        }
        if !(self.eigen_tol > 0.0) {
            return Err(SweepError::InvalidConfig(format!("eigen_tol must be positive, got {}", self.eigen_tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    Passed,
    Failed,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub d: usize,
    pub e: usize,
    pub backend: SweepBackend,
    pub status: PairStatus,
    pub cycles: usize,
    pub targets_checked: usize,
    pub failures: Vec<LemmaFailure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exploratory: bool,
}

impl PairResult {
    /// One-line human summary.
    pub fn status_line(&self) -> String {
        let status = match self.status {
            PairStatus::Passed => "pass",
            PairStatus::Failed => "FAIL",
            PairStatus::Error => "ERROR",
        };
        let mut line = format!(
            "({}, {}) {status}: {} cycles, {} targets",
            self.d, self.e, self.cycles, self.targets_checked
        );
        if !self.failures.is_empty() {
            line.push_str(&format!(", {} failures", self.failures.len()));
        }
        if let Some(e) = &self.error {
            line.push_str(&format!(", {e}"));
        }
        line
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<SweepConfig>,
    pub pairs: Vec<PairResult>,
    pub summary: SweepSummary,
    /// Pairs taken from the checkpoint instead of recomputed.
    #[serde(skip)]
    pub resumed: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, usize, &LemmaFailure)> {
        self.pairs
            .iter()
            .flat_map(|p| p.failures.iter().map(move |f| (p.d, p.e, f)))
    }
}

/// Admissible ordered pairs, ascending in `d` and then `e`.
pub fn enumerate_pairs(cfg: &SweepConfig) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in 2..=cfg.max_product / 2 {
        for e in 2..=cfg.max_product / d {
            if d.gcd(&e) <= cfg.gcd_max {
                out.push((d, e));
            }
        }
    }
    out
}

fn error_result(d: usize, e: usize, backend: SweepBackend, message: String, exploratory: bool) -> PairResult {
    PairResult {
        d,
        e,
        backend,
        status: PairStatus::Error,
        cycles: (d - 1) * (e - 1),
        targets_checked: 0,
        failures: Vec::new(),
        error: Some(message),
        exploratory,
    }
}

/// Verifies one pair with the configured backend.
pub fn run_pair(cfg: &SweepConfig, d: usize, e: usize) -> PairResult {
    let backend = cfg.backend.for_pair(d, e);
    let exploratory = d.gcd(&e) > 2;
    let mut opts = LemmaOptions {
        eigen_tol: cfg.eigen_tol,
        allow_large_gcd: cfg.experimental_gcd,
        ..LemmaOptions::default()
    };
    let lemma_backend = match backend {
        SweepBackend::Eigen => {
            if cfg.backend == SweepBackend::Auto {
                opts.spot_check_fraction = AUTO_SPOT_CHECK;
            }
            Backend::Eigen
        }
        _ => Backend::Exact,
    };
    let report = match verify_lemma_with(d, e, lemma_backend, &opts) {
        Ok(r) => r,
        Err(err) => return error_result(d, e, backend, err.to_string(), exploratory),
    };
    let mut failures = report.failures;
    if backend == SweepBackend::Both {
        let table = if exploratory {
            Vec::new()
        } else {
            match cross_validate(d, e, cfg.eigen_tol) {
                Ok(t) => t,
                Err(err) => return error_result(d, e, backend, err.to_string(), exploratory),
            }
        };
        for c in table.iter().filter(|c| !c.agrees() || !c.reliable) {
            failures.push(LemmaFailure {
                cycle: c.cycle,
                combination: format!("exact rank {} vs eigen support {}", c.exact_rank, c.eigen_support),
                kind: if c.reliable {
                    FailureKind::BackendDisagreement
                } else {
                    FailureKind::Unreliable
                },
            });
        }
    }
    PairResult {
        d,
        e,
        backend,
        status: if failures.is_empty() {
            PairStatus::Passed
        } else {
            PairStatus::Failed
        },
        cycles: report.cycles,
        targets_checked: report.targets_checked,
        failures,
        error: None,
        exploratory,
    }
}

fn checkpoint_err(path: &Path) -> impl FnOnce(io::Error) -> SweepError + '_ {
    move |source| SweepError::Checkpoint {
        path: path.to_path_buf(),
        source,
    }
}

/// Completed pairs recorded in a checkpoint. A torn last line from an
/// interrupted write is ignored.
pub fn read_checkpoint(path: &Path) -> Result<Vec<PairResult>, SweepError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(checkpoint_err(path)(e)),
    };
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(checkpoint_err(path))?;
        if let Ok(r) = serde_json::from_str::<PairResult>(&line) {
            out.push(r);
        }
    }
    Ok(out)
}

struct Checkpoint {
    path: PathBuf,
    file: File,
}

impl Checkpoint {
    fn open(path: &Path) -> Result<Self, SweepError> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(path)
            .map_err(checkpoint_err(path))?;
        // Terminate a torn record so the next one starts on its own line.
        let len = file.metadata().map_err(checkpoint_err(path))?.len();
        if len > 0 {
            let text = std::fs::read(path).map_err(checkpoint_err(path))?;
            if text.last() != Some(&b'\n') {
                file.write_all(b"\n").map_err(checkpoint_err(path))?;
            }
        }
        Ok(Checkpoint {
            path: path.to_path_buf(),
            file,
        })
    }

    fn append(&mut self, r: &PairResult) -> Result<(), SweepError> {
        let mut line = serde_json::to_string(r).expect("pair results serialize");
        line.push('\n');
        self.file.write_all(line.as_bytes()).map_err(checkpoint_err(&self.path))?;
        self.file.sync_data().map_err(checkpoint_err(&self.path))
    }
}

/// Runs the sweep on a pool of `cfg.workers` threads.
pub fn sweep_run(cfg: &SweepConfig) -> Result<SweepReport, SweepError> {
    sweep_run_with(cfg, |_| {})
}

/// As [`sweep_run`], calling `progress` for every newly computed pair in
/// completion order.
pub fn sweep_run_with<F: FnMut(&PairResult)>(cfg: &SweepConfig, mut progress: F) -> Result<SweepReport, SweepError> {
    cfg.validate()?;
    let start = Instant::now();
    let pairs = enumerate_pairs(cfg);

    let mut done: HashMap<(usize, usize), PairResult> = HashMap::new();
    let mut checkpoint = None;
    if let Some(path) = &cfg.checkpoint_path {
        for r in read_checkpoint(path)? {
            if r.backend == cfg.backend.for_pair(r.d, r.e) {
                done.insert((r.d, r.e), r);
            }
        }
        checkpoint = Some(Checkpoint::open(path)?);
    }
    let resumed = pairs.iter().filter(|p| done.contains_key(p)).count();
    let pending: Vec<(usize, usize)> = pairs.iter().copied().filter(|p| !done.contains_key(p)).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let (tx, rx) = mpsc::channel::<PairResult>();
    let mut write_error = None;
    std::thread::scope(|s| {
        s.spawn(move || {
            pool.install(|| {
                pending.par_iter().for_each_with(tx, |tx, &(d, e)| {
                    let _ = tx.send(run_pair(cfg, d, e));
                });
            });
        });
        for r in rx {
            if let Some(cp) = checkpoint.as_mut() {
                if write_error.is_none() {
                    if let Err(e) = cp.append(&r) {
                        write_error = Some(e);
                    }
                }
            }
            progress(&r);
            done.insert((r.d, r.e), r);
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }

    let results: Vec<PairResult> = pairs
        .iter()
        .map(|p| done.remove(p).expect("every pair computed"))
        .collect();
    let passed = results.iter().filter(|r| r.status == PairStatus::Passed).count();
    Ok(SweepReport {
        config: Some(cfg.clone()),
        summary: SweepSummary {
            total: results.len(),
            passed,
            failed: results.len() - passed,
        },
        pairs: results,
        resumed,
        wall_time: start.elapsed(),
    })
}
