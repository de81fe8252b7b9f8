use std::fmt::Display;
use std::io::Write;

use serde::Serialize;
use vancycle_core::dynkin::{chain_diagram, index_of, intersection_matrix, join_grid};
use vancycle_core::exactlin::text::{format_matrix, format_vector, parse_matrix, parse_vector};
use vancycle_core::exactlin::{krylov_span_certified, member, EigenBasis, EigenStatus, DEFAULT_SUPPORT_TOL};
use vancycle_core::monodromy::{
    classify_cycle, lemma_targets, verify_lemma, Axis, Backend, MonodromyError, Verdict,
};
use vancycle_core::pushforward::{kernel_basis, pushforward_matrix, verify_kernel_lemma, ColumnKind, PushforwardMatrix};
use vancycle_core::realpoly::{critical_data, decompose, parse_poly, Decomposition, RealPoly};
use vancycle_core::sweep::{sweep_run, SweepBackend, SweepError};
use vancycle_core::{CycleVector, IntersectionMatrix, Role, SignMode, SweepConfig};

use crate::{
    BackendArg, ClassifyArgs, Command, DecomposeArgs, DynkinArgs, KrylovArgs, PushforwardArgs, SignArg, SweepArgs,
    SweepBackendArg, VerifyLemmaArgs, EXIT_FAILURE, EXIT_INPUT, EXIT_OK,
};

/// The six combinations listed for `v(2,2)` in the worked `(6, 4)` example.
pub const WORKED_EXAMPLE: [&[(usize, usize)]; 6] = [
    &[(2, 2)],
    &[(2, 4)],
    &[(2, 1), (2, 3)],
    &[(2, 3), (2, 5)],
    &[(1, 2), (3, 2)],
    &[(1, 1), (1, 3), (3, 1), (3, 3)],
];

enum Outcome {
    Code(i32),
    Input(String),
}

impl<E: Display> From<E> for Outcome {
    fn from(e: E) -> Self {
        Outcome::Input(e.to_string())
    }
}

type CmdResult = Result<i32, Outcome>;

pub(crate) fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cmd {
        Command::Dynkin(a) => dynkin(a, out),
        Command::Krylov(a) => krylov(a, out),
        Command::Classify(a) => classify(a, out, err),
        Command::VerifyLemma(a) => verify(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Decompose(a) => decomposition(a, out),
        Command::Pushforward(a) => pushforward(a, out),
    };
    match result {
        Ok(code) | Err(Outcome::Code(code)) => code,
        Err(Outcome::Input(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INPUT
        }
    }
}

fn poly(text: &str, name: &str) -> Result<RealPoly, Outcome> {
    parse_poly(text).map_err(|e| Outcome::Input(format!("--{name}: {e}")))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Outcome> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn cell_name(cells: &[(usize, usize)]) -> String {
    cells
        .iter()
        .map(|(i, j)| format!("v({i},{j})"))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Serialize)]
struct DynkinJson {
    labels_g: Vec<usize>,
    labels_h: Vec<usize>,
    groups: Vec<Vec<usize>>,
    psi: vancycle_core::IntMatrix,
}

fn dynkin(a: &DynkinArgs, out: &mut dyn Write) -> CmdResult {
    let (g, h) = (poly(&a.g, "g")?, poly(&a.h, "h")?);
    let gcd = critical_data(&g, Role::G)?;
    let hcd = critical_data(&h, Role::H)?;
    if gcd.is_empty() || hcd.is_empty() {
        return Err(Outcome::Input("g and h need degree at least 2".into()));
    }
    let gchain = chain_diagram(&gcd, Role::G);
    let hchain = chain_diagram(&hcd, Role::H);
    let grid = join_grid(&hchain, &gchain, &hcd, &gcd)?;
    let mode = match a.sign {
        SignArg::Plus => SignMode::Plus,
        SignArg::Minus => SignMode::Minus,
    };
    let psi = intersection_matrix(&grid, mode);
    if a.json {
        emit_json(
            out,
            &DynkinJson {
                labels_g: gchain.labels().to_vec(),
                labels_h: hchain.labels().to_vec(),
                groups: grid.groups().to_vec(),
                psi: psi.matrix().clone(),
            },
        )?;
        return Ok(EXIT_OK);
    }
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(out, "g labels: {}", join(gchain.labels()))?;
    writeln!(out, "h labels: {}", join(hchain.labels()))?;
    writeln!(out, "critical values of f [group]:")?;
    for r in 1..=grid.rows() {
        let mut line = String::new();
        for c in 1..=grid.cols() {
            let cell = grid.cell(r, c)?;
            line.push_str(&format!("{:>12.6} [{:>2}]", cell.value, cell.group + 1));
        }
        writeln!(out, "{line}")?;
    }
    writeln!(out, "psi:")?;
    write!(out, "{}", format_matrix(psi.matrix()))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Membership {
    combination: String,
    member: bool,
}

#[derive(Serialize)]
struct KrylovJson {
    dim: usize,
    backend: &'static str,
    rank: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    basis: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reliable: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checks: Vec<Membership>,
}

fn krylov(a: &KrylovArgs, out: &mut dyn Write) -> CmdResult {
    let (psi, seed, grid) = match (a.d, &a.matrix) {
        (Some(d), _) => {
            let e = a.e.expect("clap requires --e");
            let (i, j) = a.cycle.expect("clap requires --cycle");
            if d < 2 || e < 2 {
                return Err(Outcome::Input(format!("degrees must be at least 2, got ({d}, {e})")));
            }
            let model = IntersectionMatrix::model(d, e);
            let k = index_of(e - 1, d - 1, i, j)?;
            let n = model.dim();
            (model.into_matrix(), CycleVector::unit(n, k - 1), Some((d, e, i, j)))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let psi = parse_matrix(&text)?;
            let v = parse_vector(&a.vector.as_deref().unwrap_or_default().replace(',', " "))?;
            if v.dim() != psi.dim() {
                return Err(Outcome::Input(format!("vector has {} entries, matrix is {}", v.dim(), psi.dim())));
            }
            (psi, v, None)
        }
        (None, None) => return Err(Outcome::Input("give --d/--e/--cycle or --matrix/--vector".into())),
    };
    if (a.check_example || a.targets) && a.backend == BackendArg::Eigen {
        return Err(Outcome::Input("membership checks use the exact backend".into()));
    }

    let mut report = KrylovJson {
        dim: psi.dim(),
        backend: "exact",
        rank: 0,
        basis: Vec::new(),
        reliable: None,
        checks: Vec::new(),
    };
    match a.backend {
        BackendArg::Exact => {
            let span = krylov_span_certified(&psi, &seed)?;
            report.rank = span.rank();
            report.basis = span.rows().iter().map(format_vector).collect();
            let mut combos: Vec<(String, CycleVector)> = Vec::new();
            if let Some((d, e, i, j)) = grid {
                let (rows, cols) = (e - 1, d - 1);
                if a.check_example {
                    if (d, e, i, j) != (6, 4, 2, 2) {
                        return Err(Outcome::Input("--check-example applies to --d 6 --e 4 --cycle 2,2".into()));
                    }
                    for cells in WORKED_EXAMPLE {
                        let mut v = vec![0i64; rows * cols];
                        for &(r, c) in cells {
                            v[index_of(rows, cols, r, c)? - 1] += 1;
                        }
                        combos.push((cell_name(cells), CycleVector::from_ints(&v)));
                    }
                }
                if a.targets {
                    for t in lemma_targets(d, e, i, j) {
                        let cells: Vec<(usize, usize)> = t
                            .entries()
                            .iter()
                            .enumerate()
                            .filter(|(_, x)| !num_is_zero(x))
                            .map(|(k, _)| {
                                let k = k + 1;
                                ((k - 1) % rows + 1, (k - 1) / rows + 1)
                            })
                            .collect();
                        combos.push((cell_name(&cells), t));
                    }
                }
            }
            for (name, v) in combos {
                report.checks.push(Membership {
                    combination: name,
                    member: member(&span, &v)?,
                });
            }
        }
        BackendArg::Eigen => {
            let basis = EigenBasis::new(&psi)?;
            let support = basis.support(&seed, DEFAULT_SUPPORT_TOL)?;
            report.backend = "eigen";
            report.rank = support.support_dim;
            report.reliable = Some(support.status == EigenStatus::Reliable);
        }
    }
    let all_hold = report.checks.iter().all(|c| c.member);
    if a.json {
        emit_json(out, &report)?;
    } else {
        writeln!(out, "dimension {}, {} rank {}", report.dim, report.backend, report.rank)?;
        if report.reliable == Some(false) {
            writeln!(out, "warning: repeated eigenvalues, the support count is unreliable")?;
        }
        for b in &report.basis {
            writeln!(out, "  {b}")?;
        }
        for c in &report.checks {
            writeln!(out, "{}: {}", c.combination, c.member)?;
        }
    }
    Ok(if all_hold { EXIT_OK } else { EXIT_FAILURE })
}

fn num_is_zero(x: &vancycle_core::Rat) -> bool {
    *x.numer() == 0.into()
}

fn classify(a: &ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (g, h) = (poly(&a.g, "g")?, poly(&a.h, "h")?);
    let (i, j) = a.cycle;
    let report = match classify_cycle(&g, &h, i, j) {
        Ok(r) => r,
        Err(e @ MonodromyError::ContractViolation { .. }) => {
            writeln!(err, "contract violation: {e}")?;
            return Err(Outcome::Code(EXIT_FAILURE));
        }
        Err(e) => return Err(e.into()),
    };
    if a.json {
        emit_json(out, &report)?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "cycle ({i},{j}), index {}", report.index)?;
    match &report.verdict {
        Verdict::FullHomology => writeln!(out, "verdict: full homology")?,
        Verdict::Symmetric { axis, p, decomposition } => {
            let (axis, var) = match axis {
                Axis::Horizontal => ("horizontal", 'x'),
                Axis::Vertical => ("vertical", 'y'),
            };
            writeln!(out, "verdict: symmetric, {axis} axis, p = {p}")?;
            write_decomposition(out, decomposition, var)?;
        }
    }
    writeln!(out, "orbit rank {} of {}", report.orbit_rank, report.ambient_rank)?;
    if let Some(k) = report.kernel_check {
        writeln!(out, "kernel check: {}", if k { "holds" } else { "fails" })?;
    }
    Ok(EXIT_OK)
}

fn write_decomposition(out: &mut dyn Write, d: &Decomposition, var: char) -> std::io::Result<()> {
    writeln!(out, "g1 = {}", d.inner.display_with(var))?;
    writeln!(out, "g2 = {}", d.outer.display_with('z'))
}

fn verify(a: &VerifyLemmaArgs, out: &mut dyn Write) -> CmdResult {
    let backend = match a.backend {
        BackendArg::Exact => Backend::Exact,
        BackendArg::Eigen => Backend::Eigen,
    };
    let report = verify_lemma(a.d, a.e, backend)?;
    if a.json {
        emit_json(out, &report)?;
    } else {
        let status = if report.passed() { "pass" } else { "FAIL" };
        writeln!(
            out,
            "({}, {}) {}: {} cycles, {} combinations checked, {status}",
            a.d,
            a.e,
            serde_json::to_value(report.backend)?.as_str().unwrap_or("?"),
            report.cycles,
            report.targets_checked
        )?;
        for f in &report.failures {
            let kind = serde_json::to_value(f.kind)?;
            writeln!(
                out,
                "  cycle ({},{}): {} [{}]",
                f.cycle.0,
                f.cycle.1,
                f.combination,
                kind.as_str().unwrap_or("?")
            )?;
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn sweep(a: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = SweepConfig {
        max_product: a.max_product,
        gcd_max: a.gcd_max,
        backend: match a.backend {
            SweepBackendArg::Exact => SweepBackend::Exact,
            SweepBackendArg::Eigen => SweepBackend::Eigen,
            SweepBackendArg::Both => SweepBackend::Both,
            SweepBackendArg::Auto => SweepBackend::Auto,
        },
        workers: a.jobs,
        checkpoint_path: a.checkpoint.clone(),
        eigen_tol: a.eigen_tol,
        experimental_gcd: a.experimental_gcd,
    };
    let report = sweep_run(&cfg).map_err(|e: SweepError| Outcome::Input(e.to_string()))?;
    if a.json {
        emit_json(out, &report)?;
    } else {
        for p in &report.pairs {
            writeln!(out, "{}", p.status_line())?;
        }
        let s = report.summary;
        writeln!(out, "total {}, passed {}, failed {}", s.total, s.passed, s.failed)?;
        writeln!(out, "wall time {:.2} s", report.wall_time.as_secs_f64())?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Serialize)]
struct DecomposeEntry {
    inner_degree: usize,
    decomposition: Option<Decomposition>,
}

fn decomposition(a: &DecomposeArgs, out: &mut dyn Write) -> CmdResult {
    let g = poly(&a.g, "g")?;
    let n = g.degree();
    let degrees: Vec<usize> = match a.inner_degree {
        Some(k) => vec![k],
        None => (2..=n / 2).filter(|k| n % k == 0).collect(),
    };
    let mut entries = Vec::new();
    for k in degrees {
        entries.push(DecomposeEntry {
            inner_degree: k,
            decomposition: decompose(&g, k)?,
        });
    }
    if a.json {
        emit_json(out, &entries)?;
        return Ok(EXIT_OK);
    }
    if entries.is_empty() {
        writeln!(out, "degree {n} has no proper divisor; indecomposable")?;
    }
    for e in &entries {
        match &e.decomposition {
            Some(d) => {
                writeln!(out, "inner degree {}:", e.inner_degree)?;
                write_decomposition(out, d, 'x')?;
            }
            None => writeln!(out, "inner degree {}: none", e.inner_degree)?,
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PushforwardJson<'a> {
    pushforward: &'a PushforwardMatrix,
    surjective: bool,
    kernel_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel_lemma: Option<bool>,
}

fn pushforward(a: &PushforwardArgs, out: &mut dyn Write) -> CmdResult {
    let (g, g1, h) = (poly(&a.g, "g")?, poly(&a.g1, "g1")?, poly(&a.h, "h")?);
    let p = pushforward_matrix(&g, &g1, &h)?;
    let kernel = kernel_basis(&p)?;
    let lemma = match a.verify_cycle {
        Some(cell) => Some(verify_kernel_lemma(&g, &g1, &h, cell)?),
        None => None,
    };
    let report = PushforwardJson {
        pushforward: &p,
        surjective: p.is_surjective()?,
        kernel_rank: kernel.rank(),
        kernel_lemma: lemma,
    };
    if a.json {
        emit_json(out, &report)?;
    } else {
        write!(out, "{}", p.to_text())?;
        for (c, kind) in p.column_kinds.iter().enumerate() {
            match kind {
                ColumnKind::Collapsed => writeln!(out, "column {}: collapsed", c + 1)?,
                ColumnKind::Mapped { target, sign } => {
                    writeln!(out, "column {}: to column {target}, sign {sign:+}", c + 1)?
                }
            }
        }
        writeln!(out, "g2 = {}", p.outer.display_with('z'))?;
        writeln!(out, "surjective: {}", report.surjective)?;
        writeln!(out, "kernel rank: {}", report.kernel_rank)?;
        if let (Some(holds), Some((i, j))) = (lemma, a.verify_cycle) {
            let verdict = if holds { "holds" } else { "fails" };
            writeln!(out, "kernel equals orbit of v({i},{j}): {verdict}")?;
        }
    }
    Ok(if lemma == Some(false) { EXIT_FAILURE } else { EXIT_OK })
}
