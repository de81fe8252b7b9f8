//! Command-line front end for `vancycle-core`.
//!
//! Exit codes: 0 when the computation succeeds and every check holds, 1 for a
//! failed verification or an unexplained orbit, 2 for bad input.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vancycle", version, about = "Vanishing-cycle monodromy of g(x) + h(y)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chain labels, critical value grid and intersection matrix of g + h.
    Dynkin(DynkinArgs),
    /// Krylov span of a cycle under the intersection matrix.
    Krylov(KrylovArgs),
    /// Orbit classification of one vanishing cycle.
    Classify(ClassifyArgs),
    /// Checks the one-critical-value lemma for x^d + y^e.
    VerifyLemma(VerifyLemmaArgs),
    /// Runs the lemma over all admissible (d, e) up to a product bound.
    Sweep(SweepArgs),
    /// Functional decomposition g = g2(g1(x)).
    Decompose(DecomposeArgs),
    /// Pushforward along (x, y) -> (g1(x), y) and its kernel.
    Pushforward(PushforwardArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepBackendArg {
    Exact,
    Eigen,
    Both,
    Auto,
}

#[derive(Debug, Args)]
pub struct DynkinArgs {
    /// Polynomial g(x), as an expression or a `coeffs:` list.
    #[arg(long)]
    pub g: String,
    /// Polynomial h(y).
    #[arg(long)]
    pub h: String,
    #[arg(long, value_enum, default_value = "plus")]
    pub sign: SignArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct KrylovArgs {
    /// Use the model matrix of x^d + y^e.
    #[arg(long, requires_all = ["e", "cycle"], conflicts_with_all = ["matrix", "vector"])]
    pub d: Option<usize>,
    #[arg(long, requires = "d")]
    pub e: Option<usize>,
    /// Grid cell `i,j` (1-based) of the seed cycle.
    #[arg(long, value_parser = parse_cell, requires = "d")]
    pub cycle: Option<(usize, usize)>,
    /// File holding Ψ in the plain-text matrix format.
    #[arg(long, requires = "vector")]
    pub matrix: Option<PathBuf>,
    /// Seed vector: rationals separated by spaces or commas.
    #[arg(long, requires = "matrix")]
    pub vector: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: BackendArg,
    /// Check the six combinations of the worked (6, 4) example for v(2,2).
    #[arg(long, requires = "d", conflicts_with = "targets")]
    pub check_example: bool,
    /// Check every lemma combination for the seed cycle.
    #[arg(long, requires = "d")]
    pub targets: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub h: String,
    #[arg(long, value_parser = parse_cell)]
    pub cycle: (usize, usize),
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyLemmaArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub e: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: BackendArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub max_product: usize,
    #[arg(long, default_value_t = 2)]
    pub gcd_max: usize,
    /// Worker threads.
    #[arg(long, env = "VANCYCLE_JOBS", default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub backend: SweepBackendArg,
    /// Line-delimited JSON checkpoint; completed pairs are skipped on rerun.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub eigen_tol: f64,
    /// Allow gcd(d, e) > 2; results are marked exploratory.
    #[arg(long)]
    pub experimental_gcd: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub g: String,
    /// Degree of the inner factor; all proper divisors are tried if omitted.
    #[arg(long)]
    pub inner_degree: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PushforwardArgs {
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub g1: String,
    #[arg(long)]
    pub h: String,
    /// Check that the kernel is the orbit span of this symmetric cycle.
    #[arg(long, value_parser = parse_cell)]
    pub verify_cycle: Option<(usize, usize)>,
    #[arg(long)]
    pub json: bool,
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected i,j but got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad index {t:?} in {s:?}"))
    };
    Ok((parse(a)?, parse(b)?))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    commands::dispatch(&cli.command, out, err)
}

/// Runs with the process arguments on stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(parse_cell("2,3"), Ok((2, 3)));
        assert_eq!(parse_cell(" 1 , 4"), Ok((1, 4)));
        assert!(parse_cell("2").is_err());
        assert!(parse_cell("a,1").is_err());
    }

    #[test]
    fn parser_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
