mod report;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use mulex::analysis::constants::{constants, find_constants};
use mulex::analysis::consts::gamma_a;
use mulex::analysis::{DEFAULT_PRECISION, MAX_PRECISION};
use mulex::quotient::{quotient_with_classes, realize, star_transform, VWGraph};
use mulex::search::{count_f, extremal, EdgeOrder, Family, Objective, SearchOptions};
use mulex::symmetry::{eliminate_123, local_improve_fixpoint};
use mulex::Multigraph;
use serde_json::json;

use report::{take_field, to_json, Failure, Outcome, RunReport, Versions};
use verify::Suite;

/// Node budget for searches unless `--budget` says otherwise; a few minutes
/// of single-threaded work.
const DEFAULT_NODES: u64 = 20_000_000_000;

#[derive(Parser)]
#[command(
    name = "mulex",
    version,
    about = "Exact search and certified bounds for product-extremal multigraphs"
)]
struct Cli {
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when unset.
    #[arg(long, global = true, env = "MULEX_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the labeled (s,q)-graphs on n vertices.
    Count {
        n: usize,
        s: usize,
        q: u64,
        /// Abort after this many search nodes (exit 3).
        #[arg(long, default_value_t = DEFAULT_NODES)]
        budget: u64,
    },
    /// Maximize the product or sum of multiplicities over a family.
    Extremal {
        n: usize,
        s: usize,
        q: u64,
        #[arg(long, default_value = "product")]
        objective: Objective,
        /// all, D, C, NC, W or mu<=k.
        #[arg(long, default_value = "all")]
        family: Family,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        budget: u64,
        /// Isomorphism classes of optima to report.
        #[arg(long, default_value_t = 100)]
        witness_cap: usize,
        /// Visit every feasible leaf.
        #[arg(long)]
        no_prune: bool,
        #[arg(long, value_enum, default_value = "colex")]
        order: Order,
    },
    /// Apply replacement moves to the multigraph in FILE (.mg format).
    Symmetrize {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: SymMode,
    },
    /// Quotient of the neat multigraph in FILE.
    Quotient { file: PathBuf },
    /// Rewire a forest quotient into a star. FILE holds a vertex-weighted
    /// graph as JSON or a neat multigraph in .mg format.
    StarTransform { file: PathBuf },
    /// Build a neat multigraph from the vertex-weighted graph (JSON) in FILE.
    Realize { file: PathBuf },
    /// Run a verification suite; exit 2 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Certified intervals for the constants and the appendix certificate.
    Constants {
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
        /// Values of a for the W_a constants.
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 4])]
        a: Vec<u64>,
    },
    /// Compare the best W_a(n) member with a search over mu <= a+1 graphs.
    Conjecture {
        #[arg(long)]
        a: u8,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        budget: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Colex,
    ReverseColex,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymMode {
    Eliminate123,
    Improve,
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::NoInput(format!("{}: {e}", path.display())))
}

fn read_mg(path: &Path) -> Result<Multigraph, Failure> {
    Ok(Multigraph::parse_mg(&read_input(path)?)?)
}

fn read_vw(path: &Path) -> Result<VWGraph, Failure> {
    serde_json::from_str(&read_input(path)?)
        .map_err(|e| Failure::Data(format!("{}: not a vertex-weighted graph: {e}", path.display())))
}

fn search_options(budget: u64) -> SearchOptions {
    SearchOptions {
        node_budget: Some(budget),
        ..SearchOptions::default()
    }
}

fn run(cmd: &Command) -> Result<(String, Outcome), Failure> {
    let out = match cmd {
        Command::Count { n, s, q, budget } => {
            let mut res = to_json(&count_f(*n, *s, *q, &search_options(*budget))?)?;
            let nodes = take_field(&mut res, "nodes");
            let mut o = Outcome::new(json!({ "n": n, "s": s, "q": q, "budget": budget }), res);
            o.diagnostics = nodes.map(|v| json!({ "nodes": v }));
            ("count", o)
        }
        Command::Extremal {
            n,
            s,
            q,
            objective,
            family,
            budget,
            witness_cap,
            no_prune,
            order,
        } => {
            let opts = SearchOptions {
                witness_cap: *witness_cap,
                node_budget: Some(*budget),
                prune: !no_prune,
                order: match order {
                    Order::Colex => EdgeOrder::Colex,
                    Order::ReverseColex => EdgeOrder::ReverseColex,
                },
            };
            let mut res = to_json(&extremal(*n, *s, *q, *objective, *family, &opts)?)?;
            let nodes = take_field(&mut res, "nodes");
            let params = json!({
                "n": n, "s": s, "q": q, "objective": objective, "family": family, "budget": budget,
                "witness_cap": witness_cap, "prune": !no_prune, "order": opts.order,
            });
            let mut o = Outcome::new(params, res);
            o.diagnostics = nodes.map(|v| json!({ "nodes": v }));
            ("extremal", o)
        }
        Command::Symmetrize { file, mode } => {
            let g = read_mg(file)?;
            let (mode_name, res) = match mode {
                SymMode::Eliminate123 => {
                    let (h, trace) = eliminate_123(&g)?;
                    (
                        "eliminate123",
                        json!({
                            "input": g, "output": h, "product_before": g.product(),
                            "product_after": h.product(), "trace": trace,
                        }),
                    )
                }
                SymMode::Improve => {
                    let (h, rounds) = local_improve_fixpoint(&g)?;
                    (
                        "improve",
                        json!({
                            "input": g, "output": h, "product_before": g.product(),
                            "product_after": h.product(), "rounds": rounds,
                        }),
                    )
                }
            };
            let params = json!({ "file": file, "mode": mode_name });
            ("symmetrize", Outcome::new(params, res))
        }
        Command::Quotient { file } => {
            let g = read_mg(file)?;
            let (h, classes) = quotient_with_classes(&g)?;
            let res = json!({
                "quotient": h, "classes": classes, "f_pi": h.f_pi(), "product": g.product(),
                "forest": h.is_forest(),
            });
            ("quotient", Outcome::new(json!({ "file": file }), res))
        }
        Command::StarTransform { file } => {
            let text = read_input(file)?;
            let h = match serde_json::from_str::<VWGraph>(&text) {
                Ok(h) => h,
                Err(_) => quotient_with_classes(&Multigraph::parse_mg(&text)?)?.0,
            };
            let s = star_transform(&h)?;
            let res = json!({
                "input": h, "f_pi_before": h.f_pi(), "f_pi_after": s.graph.f_pi(),
                "realized": realize(&s.graph, None)?.graph, "transform": s,
            });
            ("star-transform", Outcome::new(json!({ "file": file }), res))
        }
        Command::Realize { file } => {
            let h = read_vw(file)?;
            let r = realize(&h, None)?;
            let res = json!({ "graph": r.graph, "forest": r.forest, "product": r.graph.product() });
            ("realize", Outcome::new(json!({ "file": file }), res))
        }
        Command::Verify { suite } => {
            let checks = verify::run(*suite)?;
            let all = checks.iter().all(|c| c.passed);
            let mut o = Outcome::new(
                json!({ "suite": suite }),
                json!({ "checks": checks, "all_passed": all }),
            );
            o.verified = all;
            ("verify", o)
        }
        Command::Constants { precision, a } => {
            if !(10..=MAX_PRECISION).contains(precision) {
                return Err(Failure::Usage(format!("precision must be in 10..={MAX_PRECISION}")));
            }
            let res = json!({
                "constants": constants(*precision, a)?,
                "certificate": find_constants(*precision)?,
            });
            (
                "constants",
                Outcome::new(json!({ "precision": precision, "a": a }), res),
            )
        }
        Command::Conjecture { a, n, budget } => ("conjecture", conjecture(*a, *n, *budget)?),
    };
    Ok((out.0.to_string(), out.1))
}

/// The best `W_a(n)` member against the exact optimum over `μ ≤ a+1`
/// (4, 6a+3)-graphs. Reported, not asserted.
fn conjecture(a: u8, n: usize, budget: u64) -> Result<Outcome, Failure> {
    if a < 2 || a == u8::MAX {
        return Err(Failure::Usage(format!("a = {a} must be in 2..255")));
    }
    let q = 6 * a as u64 + 3;
    let mut best: Option<(usize, Multigraph)> = None;
    for r in 0..=n {
        let g = Multigraph::build_w(n, r, a)?;
        if best.as_ref().is_none_or(|(_, b)| g.product() > b.product()) {
            best = Some((r, g));
        }
    }
    let (r, wa) = best.expect("n + 1 candidates");
    let opts = SearchOptions {
        witness_cap: 10,
        ..search_options(budget)
    };
    let mut found = to_json(&extremal(n, 4, q, Objective::Product, Family::MaxMult(a + 1), &opts)?)?;
    let nodes = take_field(&mut found, "nodes");
    let search_value: num_bigint::BigUint = found["value"]
        .as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Failure::Internal("search value missing".into()))?;
    let gamma = gamma_a(a as u64, DEFAULT_PRECISION)?;
    let norm = |v: &num_bigint::BigUint| (v.bits() as f64 - 1.0 + leading_fraction(v)) / (n * n) as f64;
    let res = json!({
        "q": q,
        "w_a": { "r": r, "value": wa.product(), "graph": wa, "log2_over_n2": norm(&wa.product().0) },
        "search": found,
        "search_log2_over_n2": norm(&search_value),
        "search_beats_w_a": search_value > wa.product().0,
        "gamma_a": gamma,
    });
    let mut o = Outcome::new(json!({ "a": a, "n": n, "budget": budget }), res);
    o.diagnostics = nodes.map(|v| json!({ "nodes": v }));
    Ok(o)
}

/// `log₂ v - ⌊log₂ v⌋` from the top 53 bits.
fn leading_fraction(v: &num_bigint::BigUint) -> f64 {
    let bits = v.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(53);
    let top = (v >> shift).to_u64_digits().first().copied().unwrap_or(0) as f64;
    (top / 2f64.powi((bits - shift - 1) as i32)).log2()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("mulex: --threads must be positive");
            return ExitCode::from(64);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("mulex: {e}");
            return ExitCode::from(70);
        }
    }
    let start = Instant::now();
    let (command, outcome) = match run(&cli.command) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("mulex: {f}");
            return ExitCode::from(f.exit_code());
        }
    };
    let report = RunReport {
        command,
        parameters: outcome.parameters,
        results: outcome.results,
        diagnostics: outcome.diagnostics,
        wall_time: start.elapsed().as_secs_f64(),
        versions: Versions::current(),
    };
    let text = match serde_json::to_string_pretty(&report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("mulex: {e}");
            return ExitCode::from(70);
        }
    };
    println!("{text}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("mulex: {}: {e}", path.display());
            return ExitCode::from(73);
        }
    }
    ExitCode::from(if outcome.verified { 0 } else { 2 })
}
