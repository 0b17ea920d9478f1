mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
use report::{Outcome, Report, EXIT_PARSE};

/// Exact ranges, biases, ranks and structure decompositions of polynomials
/// over F_p on S^n. Every command prints one JSON report.
#[derive(Debug, Parser)]
#[command(name = "fprange", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[command(rename_all = "kebab-case")]
enum Command {
    /// Image, histogram, bias and monomial rank of P on S^n.
    Analyze(CommonArgs),
    /// Canonical reduction modulo the functions vanishing on S^n.
    Reduce(CommonArgs),
    /// Whether P vanishes on S^n, by reduction and by enumeration.
    Vanish(CommonArgs),
    /// Character averages E ω^{sP} for s = 1..p-1.
    Bias(CommonArgs),
    /// Fiber certificates for P1..Pk at v=... (all v when omitted).
    CertifyLowerbound(CommonArgs),
    /// Low rank of some P + Σ a_i P_i, or every fiber seeing all of F_p.
    Dichotomy(CommonArgs),
    /// Squares-plus-determined decomposition of a quadratic.
    Decompose2(CommonArgs),
    /// Lowers modified degrees of an acceptable decomposition to ⌊d/(t+1)⌋.
    Structure(CommonArgs),
    /// Constant on S^n, or a univariate A with A(S) inside the image.
    Eliminate(CommonArgs),
    /// Degree-d rank certificate (method=auto|rk1|brute).
    Rank(CommonArgs),
    /// The recursion B(D) for D=..., e=..., v=sum|one|base|const:K, w=...
    Bound(CommonArgs),
    /// C_pre and C from psi=..., p, d.
    Constants(CommonArgs),
    /// Seeded corpus (kind=..., count=..., dir=... to write files).
    Corpus(CommonArgs),
    /// Largest exact relative degree-1 rank among sampled non-full-range quadratics.
    SearchQ1(CommonArgs),
}

type Handler = fn(&RunConfig) -> fprange::error::Result<Outcome>;

impl Command {
    fn parts(self) -> (&'static str, &'static str, Handler, CommonArgs) {
        match self {
            Command::Analyze(a) => ("analyze", "value distribution of P on S^n", commands::analyze, a),
            Command::Reduce(a) => ("reduce", "per-variable reduction modulo Δ_S", commands::reduce, a),
            Command::Vanish(a) => ("vanish", "vanishing on S^n iff the reduction is zero", commands::vanish, a),
            Command::Bias(a) => ("bias", "character sums of P over S^n", commands::bias_cmd, a),
            Command::CertifyLowerbound(a) => (
                "certify-lowerbound",
                "fiber densities are zero or at least |S|^-(p-1)dk",
                commands::certify,
                a,
            ),
            Command::Dichotomy(a) => ("dichotomy", "low rank or conditional full range", commands::dichotomy, a),
            Command::Decompose2(a) => (
                "decompose2",
                "quadratics without full range agree on S^n with A∘L + J",
                commands::decompose2,
                a,
            ),
            Command::Structure(a) => (
                "structure",
                "acceptable decompositions descend colexicographically to modified degree ≤ e",
                commands::structure,
                a,
            ),
            Command::Eliminate(a) => (
                "eliminate",
                "coordinate elimination to a constant or a univariate witness",
                commands::eliminate,
                a,
            ),
            Command::Rank(a) => ("rank", "explicit rank certificates", commands::rank, a),
            Command::Bound(a) => ("bound", "the bound recursion B(D)", commands::bound, a),
            Command::Constants(a) => ("constants", "C = p^{C_pre}", commands::constants_cmd, a),
            Command::Corpus(a) => ("corpus", "seeded constructions with checked properties", commands::corpus, a),
            Command::SearchQ1(a) => (
                "search-q1",
                "observed relative degree-1 rank against p-2",
                commands::search_q1,
                a,
            ),
        }
    }
}

fn threads_from_env() -> Option<usize> {
    let n: usize = std::env::var("FPRANGE_THREADS").ok()?.trim().parse().ok()?;
    (n > 0).then_some(n)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let threads = threads_from_env();
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (name, realizes, handler, args) = cli.command.parts();
    let report = match RunConfig::from_args(args, threads) {
        Ok(config) => {
            let out = handler(&config);
            Report::build(name, realizes, config, out)
        }
        Err(e) => Report::build(name, realizes, RunConfig::from_args(Default::default(), threads).expect("empty"), Err(e)),
    };
    let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    print!("{text}");
    if let Some(path) = &report.config.json {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("fprange: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_PARSE as u8);
        }
    }
    ExitCode::from(report.exit_code as u8)
}
