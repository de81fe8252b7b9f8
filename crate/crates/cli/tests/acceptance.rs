//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! of them fails.

use std::io::{BufRead, BufReader};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use vancycle_core::dynkin::{ChainDiagram, IntersectionMatrix, SignMode};
use vancycle_core::exactlin::{krylov_span_certified, text::parse_matrix, CycleVector, IntMatrix, Rat};
use vancycle_core::monodromy::{
    classify_grid_cycle, cross_validate, detect_symmetry, pl_twist, Axis, JoinSystem, MonodromyError, Verdict,
};
use vancycle_core::pushforward::verify_kernel_lemma_in;
use vancycle_core::realpoly::{decompose, parse_poly, Poly, RealPoly};
use vancycle_core::sweep::{enumerate_pairs, sweep_run, SweepBackend, SweepConfig};
use vancycle_core::Role;

const PSI_FIXTURE: &str = include_str!("../../core/tests/fixtures/worked_example_psi.txt");
const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("vancycle").chain(args.iter().copied());
    let code = vancycle_cli::run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("utf8 stdout"),
        String::from_utf8(err).expect("utf8 stderr"),
    )
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn small_pairs(max_mu: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in 2..=max_mu + 1 {
        for e in 2..=max_mu + 1 {
            if (d - 1) * (e - 1) <= max_mu && gcd(d, e) <= 2 {
                out.push((d, e));
            }
        }
    }
    out
}

/// `∫ sign · ∏ (x - r)`, a polynomial whose critical points are `roots`.
fn with_critical_points(roots: &[Rat], sign: i64) -> RealPoly {
    let p = Poly::from_roots(roots).integral().scale(&rat(sign, 1));
    RealPoly::new(p).expect("degree at least 2")
}

fn distinct_rationals(rng: &mut ChaCha8Rng, n: usize, positive: bool) -> Vec<Rat> {
    let mut out: Vec<Rat> = Vec::with_capacity(n);
    while out.len() < n {
        let den = rng.random_range(1..=3);
        let num = if positive {
            rng.random_range(1..=12)
        } else {
            rng.random_range(-12..=12)
        };
        let x = rat(num, den);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn chebyshev(n: usize) -> Poly {
    let two_x = Poly::from_ints(&[0, 2]);
    let (mut prev, mut cur) = (Poly::one(), Poly::x());
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = &(&two_x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn psi_from_json(v: &Value) -> Option<IntMatrix> {
    let rows: Vec<Vec<i64>> = v
        .as_array()?
        .iter()
        .map(|r| r.as_array().map(|r| r.iter().filter_map(Value::as_i64).collect()))
        .collect::<Option<_>>()?;
    IntMatrix::from_rows(&rows).ok()
}

fn labels(v: &Value) -> Vec<u64> {
    v.as_array()
        .map(|a| a.iter().filter_map(Value::as_u64).collect())
        .unwrap_or_default()
}

fn oracle_matrix() -> Outcome {
    let expected = parse_matrix(PSI_FIXTURE).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (code, out, err) = cli(&[
        "dynkin",
        "--g",
        "(x+3)*(x+2)*(x+1)*(x-1)*(x-2)*(x-4)",
        "--h",
        "(3-y)*(y-1)*(y+1)*(y+2)",
        "--json",
    ]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(labels(&v["labels_g"]) == [3, 4, 2, 5, 1], || format!("g labels {}", v["labels_g"]))?;
    ensure(labels(&v["labels_h"]) == [2, 3, 1], || format!("h labels {}", v["labels_h"]))?;
    let psi = psi_from_json(&v["psi"]).ok_or("psi is not an integer matrix")?;
    ensure(psi == expected, || "psi differs from the printed matrix".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("15x15 matrix exact, labels match, {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn orbit_example() -> Outcome {
    let (code, out, err) = cli(&["krylov", "--d", "6", "--e", "4", "--cycle", "2,2", "--check-example", "--json"]);
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let checks = v["checks"].as_array().ok_or("no checks")?;
    let listed = [
        "v(2,2)",
        "v(2,4)",
        "v(2,1) + v(2,3)",
        "v(2,3) + v(2,5)",
        "v(1,2) + v(3,2)",
        "v(1,1) + v(1,3) + v(3,1) + v(3,3)",
    ];
    ensure(checks.len() == listed.len(), || format!("{} checks", checks.len()))?;
    for (c, want) in checks.iter().zip(listed) {
        ensure(c["combination"] == want, || format!("unexpected {}", c["combination"]))?;
        ensure(c["member"] == true, || format!("{want} not in span"))?;
    }

    // The same memberships straight from the model matrix, entry by entry.
    let psi = IntersectionMatrix::model(6, 4).into_matrix();
    let span = krylov_span_certified(&psi, &CycleVector::unit(15, 4)).map_err(|e| e.to_string())?;
    let at = |i: usize, j: usize| (j - 1) * 3 + i - 1;
    let cells: [&[(usize, usize)]; 6] = [
        &[(2, 2)],
        &[(2, 4)],
        &[(2, 1), (2, 3)],
        &[(2, 3), (2, 5)],
        &[(1, 2), (3, 2)],
        &[(1, 1), (1, 3), (3, 1), (3, 3)],
    ];
    for cs in cells {
        let mut w = vec![0i64; 15];
        for &(i, j) in cs {
            w[at(i, j)] = 1;
        }
        let member = vancycle_core::exactlin::member(&span, &CycleVector::from_ints(&w)).map_err(|e| e.to_string())?;
        ensure(member, || format!("{cs:?} not in span"))?;
    }
    Ok(format!("all 6 combinations in the rank {} Krylov span", span.rank()))
}

fn lemma_sweep() -> Outcome {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cfg = SweepConfig {
        max_product: 200,
        backend: SweepBackend::Exact,
        workers,
        ..SweepConfig::default()
    };
    let report = sweep_run(&cfg).map_err(|e| e.to_string())?;
    let s = &report.summary;
    ensure(s.total == enumerate_pairs(&cfg).len(), || "pair count mismatch".into())?;
    if let Some((d, e, f)) = report.failures().next() {
        return Err(format!("({d},{e}) cycle {:?}: {}", f.cycle, f.combination));
    }
    ensure(s.failed == 0 && s.passed == s.total, || format!("{} of {} failed", s.failed, s.total))?;
    let secs = report.wall_time.as_secs_f64();
    ensure(secs < 600.0, || format!("took {secs:.0} s"))?;
    Ok(format!("{}/{} pairs pass in {secs:.1} s on {workers} worker(s)", s.passed, s.total))
}

fn backend_agreement() -> Outcome {
    let cfg = SweepConfig {
        max_product: 120,
        ..SweepConfig::default()
    };
    let (mut cycles, mut pairs) = (0, 0);
    for (d, e) in enumerate_pairs(&cfg) {
        let table = cross_validate(d, e, 1e-9).map_err(|err| format!("({d},{e}): {err}"))?;
        for c in &table {
            ensure(c.reliable, || format!("({d},{e}) cycle {:?} unreliable", c.cycle))?;
            ensure(c.agrees(), || {
                format!(
                    "({d},{e}) cycle {:?}: exact {} vs eigen {}",
                    c.cycle, c.exact_rank, c.eigen_support
                )
            })?;
        }
        cycles += table.len();
        pairs += 1;
    }
    Ok(format!("{pairs} pairs, {cycles} cycles, 0 disagreements at tol 1e-9"))
}

fn generic_transitivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let pairs = small_pairs(24);
    let (mut accepted, mut rejected, mut cycles) = (0, 0, 0);
    while accepted < 50 {
        let (d, e) = pairs[rng.random_range(0..pairs.len())];
        let g = with_critical_points(&distinct_rationals(&mut rng, d - 1, false), 1);
        let h = with_critical_points(&distinct_rationals(&mut rng, e - 1, false), if rng.random() { 1 } else { -1 });
        let system = match JoinSystem::new(&g, &h) {
            Ok(s) if s.grid.groups().iter().all(|grp| grp.len() == 1) => s,
            Ok(_) | Err(MonodromyError::NonCommutingGroup { .. }) => {
                rejected += 1;
                continue;
            }
            Err(err) => return Err(format!("g = {g}, h = {h}: {err}")),
        };
        for i in 1..e {
            for j in 1..d {
                let orbit = system.orbit(i, j).map_err(|err| err.to_string())?;
                ensure(orbit.is_full(), || {
                    format!("g = {g}, h = {h}: v({i},{j}) has rank {} of {}", orbit.rank(), system.dim())
                })?;
                cycles += 1;
            }
        }
        accepted += 1;
    }
    Ok(format!("50 generic pairs, {cycles} cycles all full rank ({rejected} non-generic draws skipped)"))
}

fn symmetric_family() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x6);
    let hs = [parse_poly("y^3 - 3y").unwrap(), parse_poly("y^5 - 5y^3 + 4y").unwrap()];
    let x2 = parse_poly("x^2").unwrap();
    let (mut families, mut symmetric, mut full, mut skipped) = (0, 0, 0, 0);
    while families < 24 {
        let m = 2 + families % 2;
        let h = &hs[(families / 2) % 2];
        let (d, e) = (2 * m, h.degree());
        if (d - 1) * (e - 1) > 24 {
            families += 1;
            continue;
        }
        // g2 with critical points at positive z, so g = g2(x^2) has 2m - 1
        // real simple critical points.
        let zs = distinct_rationals(&mut rng, m - 1, true);
        let sign = if rng.random() { 1 } else { -1 };
        let shift = rat(rng.random_range(-5..=5), 1);
        let g2 = RealPoly::new(&Poly::from_roots(&zs).integral().scale(&rat(sign, 1)) + &Poly::constant(shift))
            .expect("nonconstant");
        let g = RealPoly::new(g2.as_poly().compose(x2.as_poly())).expect("nonconstant");
        // A second decomposition, e.g. g = c (x^3 - 3x)^2 + s, adds its own
        // symmetric columns.
        let mut other = false;
        for k in (3..d).filter(|k| d % k == 0) {
            other |= decompose(&g, k).map_err(|err| err.to_string())?.is_some();
        }
        if other {
            skipped += 1;
            continue;
        }

        let system = match JoinSystem::new(&g, h) {
            Ok(s) => s,
            Err(MonodromyError::NonCommutingGroup { .. }) => {
                skipped += 1;
                continue;
            }
            Err(err) => return Err(format!("g = {g}: {err}")),
        };
        let sym = detect_symmetry(&system.grid);
        ensure(sym.horizontal_ps().contains(&m), || {
            format!("g = {g}: horizontal p {:?}, expected {m}", sym.horizontal_ps())
        })?;
        let dec = decompose(&g, 2)
            .map_err(|err| err.to_string())?
            .ok_or_else(|| format!("g = {g} not decomposed"))?;
        ensure(dec.inner == x2 && dec.outer == g2, || format!("g = {g}: got {} o {}", dec.outer, dec.inner))?;

        for i in 1..e {
            for j in 1..d {
                let report = classify_grid_cycle(&system, i, j).map_err(|err| format!("g = {g}, ({i},{j}): {err}"))?;
                if j == m {
                    ensure(
                        matches!(report.verdict, Verdict::Symmetric { axis: Axis::Horizontal, p, .. } if p == m),
                        || format!("g = {g}, ({i},{j}): {:?}", report.verdict),
                    )?;
                    let holds = verify_kernel_lemma_in(&system, &x2, (i, j)).map_err(|err| err.to_string())?;
                    ensure(holds, || format!("g = {g}, ({i},{j}): kernel is not the orbit"))?;
                    symmetric += 1;
                } else {
                    ensure(report.is_full(), || format!("g = {g}, ({i},{j}): {:?}", report.verdict))?;
                    full += 1;
                }
            }
        }
        families += 1;
    }
    Ok(format!(
        "{symmetric} symmetric cycles with kernel = orbit, {full} full, 0 contract violations ({skipped} draws skipped)"
    ))
}

fn structural_invariants() -> Outcome {
    let cfg = SweepConfig {
        max_product: 60,
        ..SweepConfig::default()
    };
    let mut checks = 0usize;
    for (d, e) in enumerate_pairs(&cfg) {
        let tag = format!("({d},{e})");
        let model = IntersectionMatrix::model(d, e);
        let psi = model.matrix();
        ensure(psi.is_skew_symmetric(), || format!("{tag}: not skew"))?;
        let minus = IntersectionMatrix::from_chains(
            &ChainDiagram::alternating(e - 1, Role::H),
            &ChainDiagram::alternating(d - 1, Role::G),
            SignMode::Minus,
        );
        ensure(*minus.matrix() == psi.neg(), || format!("{tag}: minus mode is not -psi"))?;
        for k in 1..=psi.dim() {
            let t = pl_twist(psi, k).map_err(|err| err.to_string())?;
            ensure(t.preserves(psi), || format!("{tag}: twist {k} breaks psi"))?;
            ensure(t.matrix.determinant() == 1.into(), || format!("{tag}: det of twist {k}"))?;
            checks += 2;
        }
        checks += 2;

        // Chebyshev pair: many coinciding values, so groups are non-trivial.
        let g = RealPoly::new(chebyshev(d)).expect("degree >= 2");
        let h = RealPoly::new(chebyshev(e).scale(&rat(3, 1))).expect("degree >= 2");
        let system = JoinSystem::new(&g, &h).map_err(|err| format!("{tag} chebyshev: {err}"))?;
        for gen in &system.generators {
            for &a in &gen.site {
                for &b in &gen.site {
                    let ta = pl_twist(&system.psi, a).map_err(|err| err.to_string())?.matrix;
                    let tb = pl_twist(&system.psi, b).map_err(|err| err.to_string())?.matrix;
                    ensure(ta.mul(&tb) == tb.mul(&ta), || format!("{tag}: twists {a}, {b} do not commute"))?;
                    checks += 1;
                }
            }
        }
        for k in 1..=system.dim() {
            let (i, j) = system.grid.position_of(k).map_err(|err| err.to_string())?;
            let orbit = system.orbit(i, j).map_err(|err| err.to_string())?;
            let krylov =
                krylov_span_certified(&system.psi, &CycleVector::unit(system.dim(), k - 1)).map_err(|err| err.to_string())?;
            let inside = orbit.contains_subspace(&krylov).map_err(|err| err.to_string())?;
            ensure(inside, || format!("{tag}: Krylov span of v({i},{j}) leaves its orbit"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks on {} pairs", enumerate_pairs(&cfg).len()))
}

fn sweep_json(dir: &Path, name: &str, jobs: usize) -> Result<String, String> {
    let checkpoint = dir.join(name);
    let (code, out, err) = cli(&[
        "sweep",
        "--max-product",
        "60",
        "--backend",
        "exact",
        "--jobs",
        &jobs.to_string(),
        "--checkpoint",
        checkpoint.to_str().expect("utf8 path"),
        "--json",
    ]);
    ensure(code == 0, || format!("sweep exit {code}: {err}"))?;
    Ok(out)
}

fn determinism_and_resume() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let one = sweep_json(dir.path(), "one.jsonl", 1)?;
    let eight = sweep_json(dir.path(), "eight.jsonl", 8)?;
    ensure(one == eight, || "1 and 8 workers disagree".into())?;

    // Kill a real sweep once it has written a few records, then resume.
    let checkpoint = dir.path().join("killed.jsonl");
    let mut child = Command::new(env!("CARGO_BIN_EXE_vancycle"))
        .args(["sweep", "--max-product", "60", "--backend", "exact", "--jobs", "1", "--checkpoint"])
        .arg(&checkpoint)
        .arg("--json")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let deadline = Instant::now() + Duration::from_secs(120);
    let mut written = 0;
    while Instant::now() < deadline {
        written = std::fs::File::open(&checkpoint)
            .map(|f| BufReader::new(f).lines().count())
            .unwrap_or(0);
        if written >= 5 || child.try_wait().map_err(|e| e.to_string())?.is_some() {
            break;
        }
        std::thread::sleep(Duration::from_millis(5));
    }
    let _ = child.kill();
    let _ = child.wait();
    let before = std::fs::read_to_string(&checkpoint).unwrap_or_default().lines().count();

    // Simulate a torn final record as well.
    let mut torn = std::fs::read_to_string(&checkpoint).unwrap_or_default();
    torn.push_str("{\"d\":7,\"e\":");
    std::fs::write(&checkpoint, torn).map_err(|e| e.to_string())?;

    let resumed = sweep_json(dir.path(), "killed.jsonl", 8)?;
    ensure(resumed == one, || "resumed report differs from the uninterrupted run".into())?;
    let again = sweep_json(dir.path(), "killed.jsonl", 1)?;
    ensure(again == one, || "second resume differs".into())?;
    let pairs = one.matches("\"status\"").count();
    Ok(format!(
        "{pairs} pairs identical for 1/8 workers; killed after {before} of {pairs} records (saw {written}), resume identical"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle intersection matrix", oracle_matrix),
        ("orbit example (6,4) v(2,2)", orbit_example),
        ("lemma sweep d*e <= 200, exact", lemma_sweep),
        ("backend agreement d*e <= 120", backend_agreement),
        ("generic transitivity", generic_transitivity),
        ("symmetry/decomposition pipeline", symmetric_family),
        ("structural invariants d*e <= 60", structural_invariants),
        ("determinism and checkpoint resume", determinism_and_resume),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} [{secs:.1} s] {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.1} s] {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
