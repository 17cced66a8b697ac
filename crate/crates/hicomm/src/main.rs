//! Command-line front end: validate algebra files, compute commutators,
//! inspect generated relations, run the named verification suites, and
//! manage the built-in algebra corpus.
//!
//! Exit codes are a stable contract: 0 success/PASS, 1 property FAIL,
//! 2 input error, 3 resource limit.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};

use hicomm::algebra::{con_capped, DEFAULT_CON_CAP};
use hicomm::checks::{all_pass, run_theorem, TheoremId};
use hicomm::commutator::{build_delta, build_m, build_rect, hyper_commutator, tc_commutator};
use hicomm::corpus;
use hicomm::error::{Error, Result};
use hicomm::limits::{Limits, DEFAULT_MAX_CUBES};
use hicomm::partition::Partition;
use hicomm::report::{render_check_lines, render_summary};
use hicomm::taylor::TaylorPackage;
use hicomm::FiniteAlgebra;

#[derive(Parser)]
#[command(
    name = "hicomm",
    version,
    about = "higher commutator computations on finite algebras"
)]
struct Cli {
    /// Memory budget: maximum number of stored cubes per generated relation.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CUBES)]
    memory_limit: usize,

    /// Wall-clock budget in seconds (unset: no limit).
    #[arg(long, global = true)]
    time_limit: Option<u64>,

    /// Parallelism hint. Accepted for interface stability; results never
    /// depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an algebra file and print a summary.
    Validate { file: PathBuf },

    /// Compute one higher commutator value.
    Commutator {
        file: PathBuf,
        /// Which operator: the term-condition commutator or the relational one.
        #[arg(long, value_parser = ["tc", "hyper"])]
        kind: String,
        /// `;`-separated congruences in block syntax ("0 1|2 3"), or the
        /// keywords `full` / `diag`.
        #[arg(long)]
        thetas: String,
        /// Centrality direction (default: the last argument index).
        #[arg(long)]
        direction: Option<usize>,
    },

    /// Generate the matrix tolerance, its transitive closure, and the
    /// line-compatible ceiling; report sizes and containments.
    Delta {
        file: PathBuf,
        #[arg(long)]
        thetas: String,
        /// Write the closed relation to this path in dump format.
        #[arg(long)]
        dump: Option<PathBuf>,
    },

    /// Run one named verification suite and report PASS/FAIL per check.
    Check {
        /// Corpus algebra name, or a path to an algebra file.
        algebra: String,
        #[arg(long)]
        theorem: String,
        /// Largest commutator arity the suite sweeps.
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        /// Term package file; defaults to the built-in package when the
        /// algebra ships with one.
        #[arg(long)]
        package: Option<PathBuf>,
        /// Seed for the randomized sweeps (bit-identical reruns).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// List the built-in algebras or write one to disk.
    Corpus {
        #[command(subcommand)]
        action: CorpusCmd,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Print the built-in algebra names.
    List,
    /// Write `<name>.alg` (and `<name>.taylor` when a package exists).
    Emit {
        name: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let limits = Limits {
        max_cubes: cli.memory_limit,
        deadline: cli.time_limit.map(|s| Instant::now() + Duration::from_secs(s)),
    };
    let _ = cli.jobs;
    let code = match run(&cli.cmd, &limits) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cmd: &Cmd, limits: &Limits) -> Result<i32> {
    match cmd {
        Cmd::Validate { file } => cmd_validate(file),
        Cmd::Commutator { file, kind, thetas, direction } => {
            cmd_commutator(file, kind, thetas, *direction, limits)
        }
        Cmd::Delta { file, thetas, dump } => cmd_delta(file, thetas, dump.as_deref(), limits),
        Cmd::Check { algebra, theorem, max_arity, package, seed } => {
            cmd_check(algebra, theorem, *max_arity, package.as_deref(), *seed, limits)
        }
        Cmd::Corpus { action } => cmd_corpus(action),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<FiniteAlgebra> {
    FiniteAlgebra::parse(&read_text(path)?)
}

fn parse_thetas(spec: &str, alg: &FiniteAlgebra) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for tok in spec.split(';') {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(Error::Parse("empty entry in theta list".into()));
        }
        let p = Partition::parse(tok, alg.size)?;
        if !hicomm::is_congruence(alg, &p) {
            return Err(Error::Invalid(format!("partition {p} is not a congruence of {}", alg.name)));
        }
        out.push(p);
    }
    Ok(out)
}

fn cmd_validate(file: &Path) -> Result<i32> {
    let alg = load_algebra(file)?;
    println!("algebra {}", alg.name);
    println!("size {}", alg.size);
    println!("ops {}", alg.ops.len());
    for op in &alg.ops {
        println!("  {} arity {}", op.name, op.arity);
    }
    match con_capped(&alg, DEFAULT_CON_CAP) {
        Ok(cons) => println!("con {}", cons.len()),
        Err(Error::Cap { limit, .. }) => println!("con exceeds cap {limit} (not printed)"),
        Err(e) => return Err(e),
    }
    Ok(0)
}

fn cmd_commutator(
    file: &Path,
    kind: &str,
    thetas: &str,
    direction: Option<usize>,
    limits: &Limits,
) -> Result<i32> {
    let alg = load_algebra(file)?;
    let thetas = parse_thetas(thetas, &alg)?;
    if thetas.len() < 2 {
        return Err(Error::Invalid("at least two congruences are required".into()));
    }
    let dir = direction.unwrap_or(thetas.len() - 1);
    let value = match kind {
        "tc" => tc_commutator(&alg, &thetas, dir, limits)?,
        "hyper" => hyper_commutator(&alg, &thetas, dir, limits)?,
        other => return Err(Error::Invalid(format!("unknown kind `{other}`"))),
    };
    println!("{value}");
    Ok(0)
}

fn cmd_delta(file: &Path, thetas: &str, dump: Option<&Path>, limits: &Limits) -> Result<i32> {
    let alg = load_algebra(file)?;
    let thetas = parse_thetas(thetas, &alg)?;
    if thetas.len() < 2 {
        return Err(Error::Invalid("at least two congruences are required".into()));
    }
    let m = build_m(&alg, &thetas, limits)?;
    let delta = build_delta(&alg, &thetas, limits)?;
    let rect = build_rect(&alg, &thetas, limits)?;
    println!("M {}", m.len());
    println!("delta {}", delta.len());
    println!("rect {}", rect.len());
    let m_in_delta = m.is_subset(&delta);
    let delta_in_rect = delta.is_subset(&rect);
    println!("M subset of delta: {}", if m_in_delta { "PASS" } else { "FAIL" });
    println!("delta subset of rect: {}", if delta_in_rect { "PASS" } else { "FAIL" });
    if let Some(path) = dump {
        std::fs::write(path, delta.to_dump_string())?;
        println!("dump written to {}", path.display());
    }
    Ok(if m_in_delta && delta_in_rect { 0 } else { 1 })
}

fn cmd_check(
    algebra: &str,
    theorem: &str,
    max_arity: usize,
    package: Option<&Path>,
    seed: u64,
    limits: &Limits,
) -> Result<i32> {
    let id = TheoremId::parse(theorem)?;
    let alg = if Path::new(algebra).exists() {
        load_algebra(Path::new(algebra))?
    } else if corpus::names().contains(&algebra) {
        corpus::algebra(algebra)?
    } else {
        return Err(Error::Invalid(format!(
            "`{algebra}` is neither a file nor a corpus name (expected one of {})",
            corpus::names().join(", ")
        )));
    };
    let pkg: Option<TaylorPackage> = match package {
        Some(path) => Some(TaylorPackage::parse(&read_text(path)?, &alg)?),
        None => corpus::package(&alg.name).ok().flatten(),
    };
    let lines = run_theorem(id, &alg, pkg.as_ref(), max_arity, seed, limits)?;
    print!("{}", render_check_lines(&lines));
    println!("{}", render_summary(&lines));
    Ok(if all_pass(&lines) { 0 } else { 1 })
}

fn cmd_corpus(action: &CorpusCmd) -> Result<i32> {
    match action {
        CorpusCmd::List => {
            for name in corpus::names() {
                println!("{name}");
            }
            Ok(0)
        }
        CorpusCmd::Emit { name, out } => {
            let alg = corpus::algebra(name)?;
            let alg_path = out.join(format!("{name}.alg"));
            std::fs::write(&alg_path, alg.to_file_string())?;
            println!("wrote {}", alg_path.display());
            if let Some(text) = corpus::package_file_text(name) {
                let pkg_path = out.join(format!("{name}.taylor"));
                std::fs::write(&pkg_path, text)?;
                println!("wrote {}", pkg_path.display());
            }
            Ok(0)
        }
    }
}
